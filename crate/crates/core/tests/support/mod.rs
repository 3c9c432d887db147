#![allow(dead_code)]

pub mod checks;
pub mod fixtures;
pub mod oracle;

use crashdash_core::synth::calibration::{calibrated_spec, wisconsin_tribes};
use crashdash_core::{generate, DatasetSnapshot, SnapshotMeta};

pub fn meta(id: &str) -> SnapshotMeta {
    SnapshotMeta {
        snapshot_id: id.into(),
        ingested_at: "2024-01-01T00:00:00Z".into(),
        source_digest: "test".into(),
    }
}

/// Calibrated synthetic snapshot with a raised tribal share so every
/// tribe has crashes to rank.
pub fn synthetic_snapshot(seed: u64, n: usize) -> DatasetSnapshot {
    let mut spec = calibrated_spec(seed, n);
    spec.tribal_fraction = 0.3;
    let boundaries = wisconsin_tribes();
    let records = generate(&spec, &boundaries).expect("valid spec");
    DatasetSnapshot::build(meta(&format!("syn-{seed}")), records, boundaries).expect("valid snapshot")
}
