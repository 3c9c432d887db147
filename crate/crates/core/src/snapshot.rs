//! Immutable, validated, tribe-resolved dataset: the unit every query runs
//! against.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::assign::{assign_tribe_with_diagnostics, AssignDiagnostic, AssignmentSource, TribeAssignment};
use crate::geometry::TribeBoundary;
use crate::record::{CrashLocationClass, CrashRecord, RecordError};

/// Provenance of a snapshot. Produced by the ingest layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub snapshot_id: String,
    /// RFC 3339 timestamp.
    pub ingested_at: String,
    /// Hex content hash of the source files.
    pub source_digest: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotError {
    DuplicateCrashId(String),
    InvalidRecord { crash_id: String, error: RecordError },
    DuplicateTribeId(String),
    /// Deserialized assignments do not line up with the records.
    AssignmentMismatch,
}

impl fmt::Display for SnapshotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DuplicateCrashId(id) => write!(f, "duplicate crash_id {id:?}"),
            Self::InvalidRecord { crash_id, error } => write!(f, "crash {crash_id:?}: {error}"),
            Self::DuplicateTribeId(id) => write!(f, "duplicate tribe_id {id:?}"),
            Self::AssignmentMismatch => f.write_str("tribe assignments do not match records"),
        }
    }
}

impl core::error::Error for SnapshotError {}

/// How many crashes each tribal-identification route recognises.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentificationCounts {
    /// CRSHLOC says "Tribal Land".
    pub crshloc_tribal_land: usize,
    /// Tribal code resolved to a known tribe.
    pub attribute: usize,
    /// Location inside a tribal boundary.
    pub spatial: usize,
    /// Either route resolved (the tribal scope).
    pub tribal: usize,
    pub conflicts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSnapshot {
    meta: SnapshotMeta,
    records: Vec<CrashRecord>,
    assignments: Vec<TribeAssignment>,
    boundaries: Vec<TribeBoundary>,
    diagnostics: Vec<AssignDiagnostic>,
}

#[derive(Deserialize)]
struct SnapshotParts {
    meta: SnapshotMeta,
    records: Vec<CrashRecord>,
    assignments: Vec<TribeAssignment>,
    boundaries: Vec<TribeBoundary>,
    diagnostics: Vec<AssignDiagnostic>,
}

impl<'de> Deserialize<'de> for DatasetSnapshot {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let parts = SnapshotParts::deserialize(deserializer)?;
        let snapshot = DatasetSnapshot {
            meta: parts.meta,
            records: parts.records,
            assignments: parts.assignments,
            boundaries: parts.boundaries,
            diagnostics: parts.diagnostics,
        };
        snapshot.check().map_err(serde::de::Error::custom)?;
        Ok(snapshot)
    }
}

impl DatasetSnapshot {
    /// Validates the records, re-derives every crash severity and resolves
    /// each crash to a tribe.
    pub fn build(
        meta: SnapshotMeta,
        mut records: Vec<CrashRecord>,
        boundaries: Vec<TribeBoundary>,
    ) -> Result<Self, SnapshotError> {
        let mut tribe_ids = BTreeSet::new();
        for b in &boundaries {
            if !tribe_ids.insert(b.tribe_id.as_str()) {
                return Err(SnapshotError::DuplicateTribeId(b.tribe_id.clone()));
            }
        }
        let mut diagnostics = Vec::new();
        let mut assignments = Vec::with_capacity(records.len());
        for record in &mut records {
            record.refresh_severity();
            assignments.push(assign_tribe_with_diagnostics(record, &boundaries, &mut diagnostics));
        }
        let snapshot = Self { meta, records, assignments, boundaries, diagnostics };
        snapshot.check()?;
        Ok(snapshot)
    }

    fn check(&self) -> Result<(), SnapshotError> {
        let mut seen = BTreeSet::new();
        for r in &self.records {
            r.validate().map_err(|error| SnapshotError::InvalidRecord {
                crash_id: r.crash_id.clone(),
                error,
            })?;
            if !seen.insert(r.crash_id.as_str()) {
                return Err(SnapshotError::DuplicateCrashId(r.crash_id.clone()));
            }
        }
        if self.assignments.len() != self.records.len()
            || self.records.iter().zip(&self.assignments).any(|(r, a)| r.crash_id != a.crash_id)
        {
            return Err(SnapshotError::AssignmentMismatch);
        }
        let mut tribe_ids = BTreeSet::new();
        for b in &self.boundaries {
            if !tribe_ids.insert(b.tribe_id.as_str()) {
                return Err(SnapshotError::DuplicateTribeId(b.tribe_id.clone()));
            }
        }
        Ok(())
    }

    pub fn meta(&self) -> &SnapshotMeta {
        &self.meta
    }

    pub fn snapshot_id(&self) -> &str {
        &self.meta.snapshot_id
    }

    pub fn records(&self) -> &[CrashRecord] {
        &self.records
    }

    pub fn assignments(&self) -> &[TribeAssignment] {
        &self.assignments
    }

    pub fn boundaries(&self) -> &[TribeBoundary] {
        &self.boundaries
    }

    pub fn diagnostics(&self) -> &[AssignDiagnostic] {
        &self.diagnostics
    }

    /// Records paired with their tribe assignment.
    pub fn iter(&self) -> impl Iterator<Item = (&CrashRecord, &TribeAssignment)> + Clone + '_ {
        self.records.iter().zip(&self.assignments)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn tribe(&self, tribe_id: &str) -> Option<&TribeBoundary> {
        self.boundaries.iter().find(|b| b.tribe_id == tribe_id)
    }

    pub fn tribal_count(&self) -> usize {
        self.assignments.iter().filter(|a| a.is_tribal()).count()
    }

    pub fn conflict_count(&self) -> usize {
        self.assignments
            .iter()
            .filter(|a| a.source == AssignmentSource::Conflict)
            .count()
    }

    pub fn identification_counts(&self) -> IdentificationCounts {
        let mut c = IdentificationCounts::default();
        for (r, a) in self.iter() {
            if r.crash_location_class == CrashLocationClass::TribalLand {
                c.crshloc_tribal_land += 1;
            }
            match a.source {
                AssignmentSource::Attribute => c.attribute += 1,
                AssignmentSource::Spatial => c.spatial += 1,
                AssignmentSource::BothAgree | AssignmentSource::Conflict => {
                    c.attribute += 1;
                    c.spatial += 1;
                }
                AssignmentSource::Unresolved => {}
            }
            if a.source == AssignmentSource::Conflict {
                c.conflicts += 1;
            }
            if a.is_tribal() {
                c.tribal += 1;
            }
        }
        c
    }
}
