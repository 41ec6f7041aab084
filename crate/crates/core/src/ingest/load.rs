use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IngestError, RawRecording};
use crate::model::ChannelNames;

/// JSON description of a time-series CSV dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub sampling_rate_hz: f64,
    pub label_column: String,
    pub channel_columns: Vec<String>,
    pub window_seconds: f64,
    pub overlap_seconds: f64,
    pub classes: Vec<String>,
}

impl DatasetDescriptor {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| IngestError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| IngestError::Io(format!("{}: {e}", path.display())))
    }

    pub fn channel_names(&self) -> Result<ChannelNames, IngestError> {
        Ok(ChannelNames::new(self.channel_columns.iter().cloned())?)
    }
}

/// Read a time-series CSV (header row, one row per sample) as described by
/// `schema`. Label cells must name one of `schema.classes`.
pub fn load_csv(path: impl AsRef<Path>, schema: &DatasetDescriptor) -> Result<RawRecording, IngestError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| IngestError::Io(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Io(e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let label_col = column(&schema.label_column)?;
    let channel_cols = schema
        .channel_columns
        .iter()
        .map(|c| column(c))
        .collect::<Result<Vec<_>, _>>()?;

    let mut samples = vec![Vec::new(); channel_cols.len()];
    let mut labels = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IngestError::Io(e.to_string()))?;
        let label = record.get(label_col).unwrap_or("");
        let class = schema
            .classes
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| IngestError::UnknownLabel {
                row: row + 1,
                label: label.to_string(),
            })?;
        labels.push(class);
        for (c, &col) in channel_cols.iter().enumerate() {
            let cell = record.get(col).unwrap_or("");
            let value = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| IngestError::NonNumericCell {
                    row: row + 1,
                    column: schema.channel_columns[c].clone(),
                })?;
            samples[c].push(value);
        }
    }
    if labels.is_empty() {
        return Err(IngestError::EmptyFile);
    }
    RawRecording::new(
        schema.channel_names()?,
        schema.classes.clone(),
        schema.sampling_rate_hz,
        samples,
        labels,
    )
}

/// Write `rec` in the layout [`load_csv`] reads, label column last.
pub fn write_csv(rec: &RawRecording, path: impl AsRef<Path>, label_column: &str) -> Result<(), IngestError> {
    let io = |e: csv::Error| IngestError::Io(e.to_string());
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(io)?;
    let mut header: Vec<&str> = rec.channel_names().as_slice().iter().map(String::as_str).collect();
    header.push(label_column);
    writer.write_record(&header).map_err(io)?;
    for t in 0..rec.n_samples() {
        let mut row: Vec<String> = (0..rec.n_channels())
            .map(|c| rec.channel(c)[t].to_string())
            .collect();
        row.push(rec.classes()[rec.labels()[t]].clone());
        writer.write_record(&row).map_err(io)?;
    }
    writer.flush().map_err(|e| IngestError::Io(e.to_string()))
}
