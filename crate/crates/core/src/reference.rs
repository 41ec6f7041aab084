//! Channel layouts and replay oracles for the two reference setups: a
//! 19-electrode 10-20 EEG montage for mental-arithmetic detection and the
//! 27-channel PAMAP2 body-worn IMU layout.
//!
//! The EEG replay oracle reproduces the reference evaluations (full-set
//! baseline, the single-channel optimum `FP1` and the greedy result
//! `{C3, F3}`) and fills every other subset with a monotone completion:
//!
//! ```text
//! f(S) = max( h(|S|), 0.7031 if FP1 in S, 0.7233 if {C3, F3} ⊆ S )
//! h(k) = 0.65 + (0.7348 - 0.65) * (k - 1) / 18
//! ```
//!
//! A maximum of monotone terms is monotone, so branch and bound is exact on
//! it; [`crate::evaluators::certify_monotone`] checks this exhaustively.

use crate::evaluators::TableOracle;
use crate::model::{ChannelNames, ChannelSet};

/// 10-20 montage, in channel-index order.
pub const EEG_CHANNELS: [&str; 19] = [
    "FP1", "FP2", "F7", "F3", "FZ", "F4", "F8", "T3", "C3", "CZ", "C4", "T4", "T5", "P3", "PZ",
    "P4", "T6", "O1", "O2",
];

/// Hand, chest and ankle units; accelerometer, gyroscope, magnetometer; axes 1-3.
pub const PAMAP2_CHANNELS: [&str; 27] = [
    "HA1", "HA2", "HA3", "HG1", "HG2", "HG3", "HM1", "HM2", "HM3", "CA1", "CA2", "CA3", "CG1",
    "CG2", "CG3", "CM1", "CM2", "CM3", "AA1", "AA2", "AA3", "AG1", "AG2", "AG3", "AM1", "AM2",
    "AM3",
];

/// Accuracy of the model trained on all EEG channels.
pub const EEG_BASELINE_ACCURACY: f64 = 0.7348;
pub const EEG_LAMBDA: f64 = 0.7;
pub const EEG_FP1_ACCURACY: f64 = 0.7031;
pub const EEG_C3_F3_ACCURACY: f64 = 0.7233;
/// Fill value for singletons other than FP1; below [`EEG_LAMBDA`].
pub const EEG_FLOOR_ACCURACY: f64 = 0.65;

pub const PAMAP2_BASELINE_ACCURACY: f64 = 0.5902;
pub const PAMAP2_LAMBDA: f64 = 0.5;

pub fn eeg_channel_names() -> ChannelNames {
    ChannelNames::new(EEG_CHANNELS).expect("static names are valid")
}

pub fn pamap2_channel_names() -> ChannelNames {
    ChannelNames::new(PAMAP2_CHANNELS).expect("static names are valid")
}

fn eeg_index(name: &str) -> usize {
    EEG_CHANNELS
        .iter()
        .position(|&c| c == name)
        .expect("known EEG channel")
}

/// Monotone completion of the reference EEG evaluations.
pub fn eeg_replay_performance(subset: ChannelSet) -> f64 {
    debug_assert_eq!(subset.universe(), EEG_CHANNELS.len());
    let k = subset.len();
    if k == 0 {
        return 0.0;
    }
    let slope = (EEG_BASELINE_ACCURACY - EEG_FLOOR_ACCURACY) / (EEG_CHANNELS.len() - 1) as f64;
    let mut f = EEG_FLOOR_ACCURACY + slope * (k - 1) as f64;
    if subset.contains(eeg_index("FP1")) {
        f = f.max(EEG_FP1_ACCURACY);
    }
    if subset.contains(eeg_index("C3")) && subset.contains(eeg_index("F3")) {
        f = f.max(EEG_C3_F3_ACCURACY);
    }
    f
}

/// [`eeg_replay_performance`] tabulated over all 2^19 - 1 nonempty subsets.
pub fn eeg_replay_oracle() -> TableOracle {
    TableOracle::tabulate(EEG_CHANNELS.len(), eeg_replay_performance)
        .expect("19 channels is within the tabulation limit")
        .claiming_monotone(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        let names = eeg_channel_names();
        assert_eq!(eeg_replay_performance(names.full_set()), EEG_BASELINE_ACCURACY);
        assert_eq!(eeg_replay_performance(names.resolve(&["FP1"]).unwrap()), EEG_FP1_ACCURACY);
        assert_eq!(eeg_replay_performance(names.resolve(&["C3", "F3"]).unwrap()), EEG_C3_F3_ACCURACY);
        for name in EEG_CHANNELS.iter().filter(|&&n| n != "FP1") {
            let single = names.resolve(&[*name]).unwrap();
            assert!(eeg_replay_performance(single) < EEG_LAMBDA, "{name}");
        }
    }

    #[test]
    fn layouts() {
        assert_eq!(pamap2_channel_names().len(), 27);
        assert_eq!(eeg_channel_names().len(), 19);
    }
}
