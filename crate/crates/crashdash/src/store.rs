//! Building snapshots from input files and persisting them in a data
//! directory.
//!
//! The directory holds `snapshot.json` (the full served snapshot),
//! `ingest_report.json` and `diagnostics.json`. Files are written to a
//! temporary name and renamed so a reader never sees a partial file.

use std::fs;
use std::path::{Path, PathBuf};

use crashdash_core::{AssignDiagnostic, DatasetSnapshot, SnapshotError, SnapshotMeta};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::boundaries::{load_boundaries, BoundaryError};
use crate::ingest::{digest_inputs, parse_crash_csv, IngestError, IngestReport, Schema};

pub const SNAPSHOT_FILE: &str = "snapshot.json";
pub const REPORT_FILE: &str = "ingest_report.json";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.json";

/// Paths of the three ingest inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputPaths {
    #[serde(rename = "crash_csv_path")]
    pub crashes: PathBuf,
    #[serde(rename = "persons_csv_path")]
    pub persons: PathBuf,
    #[serde(rename = "boundaries_path")]
    pub boundaries: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("boundaries: {0}")]
    Boundaries(#[from] BoundaryError),
    #[error("snapshot: {0}")]
    Snapshot(#[from] SnapshotError),
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// Everything written next to a snapshot for operators to inspect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub snapshot_id: String,
    pub rejected_rows: usize,
    pub orphan_person_rows: usize,
    pub assignment: Vec<AssignDiagnostic>,
}

/// Snapshot id: the first 16 hex digits of SHA-256 over the source digest
/// and ingest timestamp.
pub fn snapshot_id(source_digest: &str, ingested_at: &str) -> String {
    let mut h = Sha256::new();
    h.update(source_digest.as_bytes());
    h.update(b"\n");
    h.update(ingested_at.as_bytes());
    hex::encode(h.finalize())[..16].to_string()
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Builds a snapshot from in-memory inputs. The snapshot's source digest
/// covers all three inputs; the report's covers the two CSV files.
pub fn build_from_bytes(
    crashes: &[u8],
    persons: &[u8],
    boundaries: &[u8],
    schema: &Schema,
    ingested_at: &str,
) -> Result<(DatasetSnapshot, IngestReport), BuildError> {
    let (records, report) = parse_crash_csv(crashes, persons, schema)?;
    let tribes = load_boundaries(boundaries)?;
    let source_digest = digest_inputs(&[crashes, persons, boundaries]);
    let meta = SnapshotMeta {
        snapshot_id: snapshot_id(&source_digest, ingested_at),
        ingested_at: ingested_at.into(),
        source_digest,
    };
    Ok((DatasetSnapshot::build(meta, records, tribes)?, report))
}

fn read(path: &Path) -> Result<Vec<u8>, BuildError> {
    fs::read(path).map_err(|source| BuildError::Read { path: path.into(), source })
}

pub fn build_from_paths(
    paths: &InputPaths,
    schema: &Schema,
    ingested_at: &str,
) -> Result<(DatasetSnapshot, IngestReport), BuildError> {
    let crashes = read(&paths.crashes)?;
    let persons = read(&paths.persons)?;
    let boundaries = read(&paths.boundaries)?;
    build_from_bytes(&crashes, &persons, &boundaries, schema, ingested_at)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), StoreError> {
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    let bytes = serde_json::to_vec(value).map_err(|source| StoreError::Json { path: path.clone(), source })?;
    fs::write(&tmp, bytes).map_err(|source| StoreError::Io { path: tmp.clone(), source })?;
    fs::rename(&tmp, &path).map_err(|source| StoreError::Io { path, source })
}

/// Persists a snapshot with its report and diagnostics. The snapshot file
/// is written last, so a crash mid-save leaves the previous one in place.
pub fn save(dir: &Path, snapshot: &DatasetSnapshot, report: &IngestReport) -> Result<(), StoreError> {
    fs::create_dir_all(dir).map_err(|source| StoreError::Io { path: dir.into(), source })?;
    let diagnostics = Diagnostics {
        snapshot_id: snapshot.snapshot_id().into(),
        rejected_rows: report.rejected.len(),
        orphan_person_rows: report.orphan_person_rows.len(),
        assignment: snapshot.diagnostics().to_vec(),
    };
    write_json(dir, REPORT_FILE, report)?;
    write_json(dir, DIAGNOSTICS_FILE, &diagnostics)?;
    write_json(dir, SNAPSHOT_FILE, snapshot)
}

/// Loads the persisted snapshot, `None` when the directory has none.
pub fn load(dir: &Path) -> Result<Option<DatasetSnapshot>, StoreError> {
    let path = dir.join(SNAPSHOT_FILE);
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(source) => return Err(StoreError::Io { path, source }),
    };
    serde_json::from_slice(&bytes).map(Some).map_err(|source| StoreError::Json { path, source })
}
