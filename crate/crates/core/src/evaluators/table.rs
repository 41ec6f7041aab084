use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_universe, EvalError, PerformanceFunction};
use crate::model::{ChannelNames, ChannelSet, Direction, ModelError};

/// Replays stored evaluations.
///
/// Lookups return the stored value bit-exactly; subsets without an entry
/// fall back to `default` or fail.
#[derive(Clone, Debug)]
pub struct TableOracle {
    n: usize,
    entries: HashMap<ChannelSet, f64>,
    default: Option<f64>,
    direction: Direction,
    monotone: bool,
}

/// On-disk form: `{"channels":[...], "default":x, "entries":[{"channels":[...],"performance":y}]}`.
///
/// `channels` (the universe, in index order) is optional when the caller
/// supplies the names some other way.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<f64>,
    pub entries: Vec<TableEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableEntry {
    pub channels: Vec<String>,
    pub performance: f64,
}

impl TableOracle {
    pub fn new(n: usize) -> Result<Self, EvalError> {
        ChannelSet::empty(n)?;
        Ok(Self {
            n,
            entries: HashMap::new(),
            default: None,
            direction: Direction::Maximize,
            monotone: false,
        })
    }

    /// Tabulate `f` over every nonempty subset of `0..n`.
    pub fn tabulate(n: usize, mut f: impl FnMut(ChannelSet) -> f64) -> Result<Self, EvalError> {
        if n > super::CERTIFY_MAX_CHANNELS {
            return Err(EvalError::EvaluatorFailure(format!(
                "refusing to tabulate 2^{n} subsets"
            )));
        }
        let mut table = Self::new(n)?;
        table.entries.reserve(1 << n);
        for bits in 1..(1u64 << n) {
            let s = ChannelSet::from_bits(n, bits)?;
            table.entries.insert(s, f(s));
        }
        Ok(table)
    }

    pub fn with_default(mut self, default: Option<f64>) -> Self {
        self.default = default;
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn claiming_monotone(mut self, monotone: bool) -> Self {
        self.monotone = monotone;
        self
    }

    pub fn insert(&mut self, subset: ChannelSet, performance: f64) -> Result<(), EvalError> {
        check_universe(self.n, subset)?;
        self.entries.insert(subset, performance);
        Ok(())
    }

    pub fn get(&self, subset: ChannelSet) -> Option<f64> {
        self.entries.get(&subset).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn default_value(&self) -> Option<f64> {
        self.default
    }

    pub fn from_file_data(file: &TableFile, names: &ChannelNames) -> Result<Self, EvalError> {
        let mut table = Self::new(names.len())?.with_default(file.default);
        for entry in &file.entries {
            let subset = names.resolve(&entry.channels)?;
            table.insert(subset, entry.performance)?;
        }
        Ok(table)
    }

    /// Load a table file. Names come from the file's `channels` field when
    /// present, otherwise from `names`.
    pub fn load(
        path: impl AsRef<Path>,
        names: Option<&ChannelNames>,
    ) -> Result<(ChannelNames, Self), EvalError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| EvalError::EvaluatorFailure(format!("{}: {e}", path.display())))?;
        let file: TableFile = serde_json::from_str(&text)
            .map_err(|e| EvalError::EvaluatorFailure(format!("{}: {e}", path.display())))?;
        let names = match (&file.channels, names) {
            (Some(own), Some(given)) => {
                if own != given.as_slice() {
                    return Err(EvalError::EvaluatorFailure(
                        "table channel list disagrees with the supplied channel names".into(),
                    ));
                }
                given.clone()
            }
            (Some(own), None) => ChannelNames::new(own.clone())?,
            (None, Some(given)) => given.clone(),
            (None, None) => {
                return Err(EvalError::EvaluatorFailure(
                    "table file has no `channels` list and no channel names were supplied".into(),
                ))
            }
        };
        let table = Self::from_file_data(&file, &names)?;
        Ok((names, table))
    }

    /// Serializable form with entries in ascending bitmask order.
    pub fn to_file_data(&self, names: &ChannelNames) -> Result<TableFile, ModelError> {
        if names.len() != self.n {
            return Err(ModelError::DimensionMismatch {
                expected: self.n,
                found: names.len(),
            });
        }
        let mut keys: Vec<_> = self.entries.keys().copied().collect();
        keys.sort();
        Ok(TableFile {
            channels: Some(names.as_slice().to_vec()),
            default: self.default,
            entries: keys
                .into_iter()
                .map(|k| TableEntry {
                    channels: names.names_of(k),
                    performance: self.entries[&k],
                })
                .collect(),
        })
    }
}

impl PerformanceFunction for TableOracle {
    fn channel_count(&self) -> usize {
        self.n
    }

    fn evaluate(&self, subset: ChannelSet) -> Result<f64, EvalError> {
        check_universe(self.n, subset)?;
        self.get(subset).or(self.default).ok_or_else(|| {
            EvalError::EvaluatorFailure(format!("no table entry for {subset} and no default"))
        })
    }

    fn direction(&self) -> Direction {
        self.direction
    }

    fn claims_monotone(&self) -> bool {
        self.monotone
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn stored_values_and_default() {
        let names = ChannelNames::new(["FP1", "F3", "C3"]).unwrap();
        let mut t = TableOracle::new(3).unwrap();
        t.insert(names.resolve(&["FP1"]).unwrap(), 0.7031).unwrap();
        assert_eq!(t.evaluate(names.resolve(&["FP1"]).unwrap()).unwrap(), 0.7031);
        assert!(matches!(
            t.evaluate(names.resolve(&["C3"]).unwrap()),
            Err(EvalError::EvaluatorFailure(_))
        ));
        let t = t.with_default(Some(0.1));
        assert_eq!(t.evaluate(names.resolve(&["C3"]).unwrap()).unwrap(), 0.1);
    }

    #[test]
    fn file_roundtrip() {
        let names = ChannelNames::new(["a", "b", "c"]).unwrap();
        let t = TableOracle::tabulate(3, |s| s.len() as f64 / 3.0 + 1e-17 * s.bits() as f64)
            .unwrap()
            .with_default(Some(0.0));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        std::fs::write(&path, serde_json::to_string(&t.to_file_data(&names).unwrap()).unwrap())
            .unwrap();
        let (loaded_names, loaded) = TableOracle::load(&path, None).unwrap();
        assert_eq!(loaded_names, names);
        for bits in 1..8 {
            let s = ChannelSet::from_bits(3, bits).unwrap();
            assert_eq!(loaded.get(s).unwrap().to_bits(), t.get(s).unwrap().to_bits());
        }
        let other = ChannelNames::new(["x", "y", "z"]).unwrap();
        assert!(TableOracle::load(&path, Some(&other)).is_err());
    }

    #[test]
    fn missing_universe_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        std::fs::write(&path, r#"{"entries":[{"channels":["a"],"performance":0.5}]}"#).unwrap();
        assert!(TableOracle::load(&path, None).is_err());
        let names = ChannelNames::new(["a", "b"]).unwrap();
        let (_, t) = TableOracle::load(&path, Some(&names)).unwrap();
        assert_eq!(t.len(), 1);
    }

    proptest! {
        #[test]
        fn lookup_is_bit_exact(entries in prop::collection::vec((1u64..1 << 12, any::<f64>()), 1..50)) {
            let mut t = TableOracle::new(12).unwrap();
            let mut expected = HashMap::new();
            for (bits, v) in entries {
                let s = ChannelSet::from_bits(12, bits).unwrap();
                t.insert(s, v).unwrap();
                expected.insert(s, v);
            }
            for (s, v) in expected {
                prop_assert_eq!(t.evaluate(s).unwrap().to_bits(), v.to_bits());
            }
        }
    }
}
