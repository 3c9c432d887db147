#![allow(dead_code)]

pub mod service;

use std::path::Path;

use crashdash::boundaries::boundaries_to_geojson;
use crashdash::ingest::{IngestReport, Schema};
use crashdash::store::{self, InputPaths};
use crashdash::synth_io::{crash_csv, person_csv};
use crashdash_core::synth::calibration::{calibrated_spec, wisconsin_tribes};
use crashdash_core::{generate, CrashRecord, DatasetSnapshot};

pub const AT: &str = "2024-01-01T00:00:00.000Z";

/// Calibrated synthetic records with a raised tribal share so small runs
/// still cover every tribe.
pub fn records(seed: u64, n: usize) -> Vec<CrashRecord> {
    let mut spec = calibrated_spec(seed, n);
    spec.tribal_fraction = 0.3;
    generate(&spec, &wisconsin_tribes()).unwrap()
}

pub struct Inputs {
    pub crashes: Vec<u8>,
    pub persons: Vec<u8>,
    pub boundaries: Vec<u8>,
}

impl Inputs {
    pub fn from_records(records: &[CrashRecord]) -> Self {
        let schema = Schema::default();
        Self {
            crashes: crash_csv(records, &schema),
            persons: person_csv(records, &schema),
            boundaries: serde_json::to_vec(&boundaries_to_geojson(&wisconsin_tribes())).unwrap(),
        }
    }

    pub fn synthetic(seed: u64, n: usize) -> Self {
        Self::from_records(&records(seed, n))
    }

    pub fn snapshot(&self, at: &str) -> (DatasetSnapshot, IngestReport) {
        store::build_from_bytes(&self.crashes, &self.persons, &self.boundaries, &Schema::default(), at).unwrap()
    }

    pub fn write(&self, dir: &Path) -> InputPaths {
        std::fs::create_dir_all(dir).unwrap();
        let paths = InputPaths {
            crashes: dir.join("crashes.csv"),
            persons: dir.join("persons.csv"),
            boundaries: dir.join("boundaries.geojson"),
        };
        std::fs::write(&paths.crashes, &self.crashes).unwrap();
        std::fs::write(&paths.persons, &self.persons).unwrap();
        std::fs::write(&paths.boundaries, &self.boundaries).unwrap();
        paths
    }
}

/// Percent-encodes a query-string component.
pub fn encode(s: &str) -> String {
    let mut out = String::new();
    for b in s.bytes() {
        match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' | b'~' => out.push(b as char),
            _ => out.push_str(&format!("%{b:02X}")),
        }
    }
    out
}

pub fn query_string(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{}={}", encode(k), encode(v))).collect::<Vec<_>>().join("&")
}

/// HTTP path serving each query kind.
pub fn route(kind: &str) -> &'static str {
    match kind {
        "summary" => "/api/v1/summary",
        "breakdown" => "/api/v1/breakdown",
        "road" => "/api/v1/road",
        "rankings" => "/api/v1/tribes/rankings",
        "crash-types" => "/api/v1/crash-types",
        "hotspots" => "/api/v1/hotspots",
        "crashes" => "/api/v1/crashes",
        other => panic!("no route for {other}"),
    }
}

/// A random query kind with a random, mostly valid parameter set. Roughly
/// one set in twelve carries an invalid value.
pub fn random_query(rng: &mut crashdash_core::synth::SynthRng, tribe_ids: &[String], crash_types: &[String]) -> (&'static str, Vec<(String, String)>) {
    fn pick<'a, T>(rng: &mut crashdash_core::synth::SynthRng, items: &'a [T]) -> &'a T {
        &items[rng.int(0, items.len() as i64 - 1) as usize]
    }
    let kinds = ["summary", "breakdown", "road", "rankings", "crash-types", "hotspots", "crashes"];
    let kind = *pick(rng, &kinds);
    let mut p: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: String| p.push((k.to_string(), v));
    if kind != "rankings" && kind != "crash-types" && rng.chance(0.8) {
        let scope = match rng.int(0, 2) {
            0 => "statewide".to_string(),
            1 => "tribal".to_string(),
            _ => format!("tribe:{}", pick(rng, tribe_ids)),
        };
        put("scope", scope);
    }
    if rng.chance(0.4) {
        let from = rng.int(2015, 2023);
        put("year_from", from.to_string());
        if rng.chance(0.6) {
            put("year_to", rng.int(from, 2024).to_string());
        }
    }
    if rng.chance(0.15) {
        put("tribe_id", pick(rng, tribe_ids).clone());
    }
    if rng.chance(0.3) {
        put("severity_group", pick(rng, &["KA", "KAB", "ALL", "kab"]).to_string());
    }
    if rng.chance(0.25) {
        put("urban_rural", pick(rng, &["U", "R"]).to_string());
    }
    if rng.chance(0.25) {
        put("road_class", pick(rng, &["highway", "non_highway"]).to_string());
    }
    if rng.chance(0.25) {
        put("key_factor", pick(rng, &["speeding", "impaired", "pedestrian", "hit_and_run", "safety_belt"]).to_string());
    }
    if rng.chance(0.15) {
        put("crash_type", pick(rng, crash_types).clone());
    }
    if rng.chance(0.15) {
        let lon = rng.range(-92.0, -88.0);
        let lat = rng.range(43.0, 46.5);
        put("bbox", format!("{lon:.3},{lat:.3},{:.3},{:.3}", lon + rng.range(0.2, 2.0), lat + rng.range(0.2, 1.5)));
    }
    match kind {
        "breakdown" => put("dimension", pick(rng, &["sex", "age_group", "key_factor", "road_category"]).to_string()),
        "crash-types" => {
            if rng.chance(0.5) {
                put("weight", pick(rng, &["total", "kab"]).to_string());
            }
            if rng.chance(0.5) {
                put("n", rng.int(1, 15).to_string());
            }
        }
        "hotspots" => {
            put("cell", pick(rng, &["0.05", "0.1", "0.25"]).to_string());
            if rng.chance(0.5) {
                put("radius", rng.int(0, 3).to_string());
            }
        }
        "crashes" => {
            if rng.chance(0.5) {
                put("limit", rng.int(1, 200).to_string());
            }
        }
        _ => {}
    }
    if rng.chance(1.0 / 12.0) {
        match rng.int(0, 3) {
            0 => put("year_from", "twenty".into()),
            1 => put("severity_group", "X".into()),
            2 => put("tribe_id", "NOT_A_TRIBE".into()),
            _ => put("colour", "red".into()),
        }
    }
    (kind, p)
}
