//! Independent reference implementations used to check the engine.
//!
//! Nothing here calls into the aggregation, geometry or hotspot code under
//! test; each function recomputes its answer from raw record fields.

#![allow(dead_code)]

use std::collections::BTreeMap;

use crashdash_core::record::{CrashRecord, PersonRole, RoadFunctional, Sex, UrbanRural};
use crashdash_core::{DatasetSnapshot, SeverityLevel, TribeAssignment};

/// Even-odd test casting the ray towards -x, with the lower-endpoint
/// inclusion rule. Not boundary-aware: callers avoid boundary points.
pub fn even_odd(point: (f64, f64), outer: &[(f64, f64)], holes: &[Vec<(f64, f64)>]) -> bool {
    fn parity(p: (f64, f64), ring: &[(f64, f64)]) -> bool {
        let mut count = 0usize;
        for k in 0..ring.len() - 1 {
            let (x1, y1) = ring[k];
            let (x2, y2) = ring[k + 1];
            let straddles = (y1 <= p.1 && y2 > p.1) || (y2 <= p.1 && y1 > p.1);
            if straddles {
                let t = (p.1 - y1) / (y2 - y1);
                let x_cross = x1 + t * (x2 - x1);
                if x_cross < p.0 {
                    count += 1;
                }
            }
        }
        count % 2 == 1
    }
    parity(point, outer) && !holes.iter().any(|h| parity(point, h))
}

/// Linear scan for the grid cell of `x`: the largest `k` whose lower edge
/// `min + k·size` is at or below `x` (1e-9-cell tolerance), last cell
/// closed.
pub fn scan_cell(x: f64, min: f64, size: f64, n: usize) -> usize {
    let mut best = 0;
    for k in 0..n {
        if x >= min + k as f64 * size - 1e-9 * size {
            best = k;
        }
    }
    best
}

/// Textbook Gi* with an explicit weight matrix.
pub fn gi_star_reference(values: &[f64], ncols: usize, nrows: usize, radius: usize) -> Vec<f64> {
    let n = values.len();
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let s = (values.iter().map(|x| x * x).sum::<f64>() / nf - mean * mean).max(0.0).sqrt();
    let mut weights = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        let (ci, ri) = ((i % ncols) as i64, (i / ncols) as i64);
        for j in 0..n {
            let (cj, rj) = ((j % ncols) as i64, (j / ncols) as i64);
            if (ci - cj).abs().max((ri - rj).abs()) <= radius as i64 {
                weights[i][j] = 1.0;
            }
        }
    }
    let _ = nrows;
    (0..n)
        .map(|i| {
            let w_sum: f64 = weights[i].iter().sum();
            let w_sq: f64 = weights[i].iter().map(|w| w * w).sum();
            let wx: f64 = weights[i].iter().zip(values).map(|(w, x)| w * x).sum();
            let disc = (nf * w_sq - w_sum * w_sum) / (nf - 1.0);
            if s == 0.0 || disc <= 0.0 {
                0.0
            } else {
                (wx - mean * w_sum) / (s * disc.sqrt())
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub total: u64,
    pub kab: u64,
    pub ka: u64,
}

impl Tally {
    pub fn add(&mut self, severity: SeverityLevel) {
        self.total += 1;
        match severity.code() {
            "K" | "A" => {
                self.kab += 1;
                self.ka += 1;
            }
            "B" => self.kab += 1,
            _ => {}
        }
    }

    pub fn kab_rate(&self) -> Option<f64> {
        (self.total > 0).then(|| self.kab as f64 * 100.0 / self.total as f64)
    }

    pub fn ka_rate(&self) -> Option<f64> {
        (self.total > 0).then(|| self.ka as f64 * 100.0 / self.total as f64)
    }
}

pub fn close(a: Option<f64>, b: Option<f64>, rel: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= rel * x.abs().max(y.abs()).max(1e-300),
        _ => false,
    }
}

pub fn driver_or_first(r: &CrashRecord) -> Option<(Sex, Option<u8>)> {
    for p in &r.persons {
        if p.role == PersonRole::Driver {
            return Some((p.sex, p.age));
        }
    }
    r.persons.first().map(|p| (p.sex, p.age))
}

pub fn sex_label(r: &CrashRecord) -> &'static str {
    match driver_or_first(r).map(|(s, _)| s) {
        Some(Sex::Female) => "Female",
        Some(Sex::Male) => "Male",
        _ => "Unknown",
    }
}

pub fn age_label(r: &CrashRecord) -> &'static str {
    match driver_or_first(r).and_then(|(_, a)| a) {
        None => "unknown",
        Some(a) if a <= 4 => "≤4",
        Some(a) if a <= 14 => "5–14",
        Some(a) if a <= 24 => "15–24",
        Some(a) if a <= 44 => "25–44",
        Some(a) if a <= 64 => "45–64",
        Some(a) if a <= 74 => "65–74",
        Some(a) if a <= 120 => "≥75",
        Some(_) => "unknown",
    }
}

pub fn road_label(r: &CrashRecord) -> &'static str {
    let highway = matches!(r.road_functional, RoadFunctional::Sth | RoadFunctional::Ush | RoadFunctional::Ih);
    let non_highway = matches!(r.road_functional, RoadFunctional::Cth | RoadFunctional::Local);
    match (r.urban_rural, highway, non_highway) {
        (UrbanRural::Rural, true, _) => "Rural Highway",
        (UrbanRural::Rural, _, true) => "Rural Non-highway",
        (UrbanRural::Urban, true, _) => "Urban Highway",
        (UrbanRural::Urban, _, true) => "Urban Non-highway",
        _ => "Unknown",
    }
}

pub fn factor_labels(r: &CrashRecord) -> Vec<&'static str> {
    let f = &r.flags;
    let mut out = Vec::new();
    if f.speeding {
        out.push("Speeding");
    }
    if f.impaired {
        out.push("Impaired");
    }
    if f.pedestrian {
        out.push("Pedestrian");
    }
    if f.hit_and_run {
        out.push("Hit & Run");
    }
    if f.belt_nonuse {
        out.push("Safety Belt");
    }
    out
}

/// Group-by recount: label -> tally over the records selected by `keep`.
pub fn recount<'a>(
    snapshot: &'a DatasetSnapshot,
    keep: impl Fn(&CrashRecord, &TribeAssignment) -> bool,
    labels: impl Fn(&CrashRecord) -> Vec<&'static str>,
) -> (Tally, BTreeMap<&'static str, Tally>) {
    let mut grand = Tally::default();
    let mut by = BTreeMap::new();
    for (r, a) in snapshot.records().iter().zip(snapshot.assignments()) {
        if !keep(r, a) {
            continue;
        }
        grand.add(r.severity);
        for l in labels(r) {
            by.entry(l).or_insert_with(Tally::default).add(r.severity);
        }
    }
    (grand, by)
}

/// Per-tribe tallies.
pub fn tribe_tallies(
    snapshot: &DatasetSnapshot,
    keep: impl Fn(&CrashRecord, &TribeAssignment) -> bool,
) -> BTreeMap<String, Tally> {
    let mut by = BTreeMap::new();
    for (r, a) in snapshot.records().iter().zip(snapshot.assignments()) {
        if let Some(t) = &a.tribe_id {
            if keep(r, a) {
                by.entry(t.clone()).or_insert_with(Tally::default).add(r.severity);
            }
        }
    }
    by
}

/// Crash-type tallies keyed by lowercased trimmed label:
/// `(tribal count, statewide count)`, plus both denominators.
pub fn crash_type_tallies(
    snapshot: &DatasetSnapshot,
    kab_only: bool,
    keep: impl Fn(&CrashRecord, &TribeAssignment) -> bool,
    tribal: impl Fn(&TribeAssignment) -> bool,
) -> (BTreeMap<String, (u64, u64)>, u64, u64) {
    let mut by = BTreeMap::new();
    let (mut tt, mut st) = (0, 0);
    for (r, a) in snapshot.records().iter().zip(snapshot.assignments()) {
        if !keep(r, a) {
            continue;
        }
        if kab_only && !matches!(r.severity.code(), "K" | "A" | "B") {
            continue;
        }
        let e = by.entry(r.crash_type.trim().to_lowercase()).or_insert((0u64, 0u64));
        e.1 += 1;
        st += 1;
        if tribal(a) {
            e.0 += 1;
            tt += 1;
        }
    }
    (by, tt, st)
}

/// Filter predicate recoded from the field definitions.
pub fn passes(f: &crashdash_core::QueryFilter, r: &CrashRecord, a: &TribeAssignment) -> bool {
    use crashdash_core::{RoadClass, SeverityGroup};
    let y = r.crash_date.year;
    if let Some(from) = f.year_from {
        if y < from {
            return false;
        }
    }
    if let Some(to) = f.year_to {
        if y > to {
            return false;
        }
    }
    if let Some(t) = &f.tribe_id {
        if a.tribe_id.as_ref() != Some(t) {
            return false;
        }
    }
    if let Some(g) = f.severity_group {
        let code = r.severity.code();
        let ok = match g {
            SeverityGroup::Ka => code == "K" || code == "A",
            SeverityGroup::Kab => code == "K" || code == "A" || code == "B",
            SeverityGroup::All => true,
        };
        if !ok {
            return false;
        }
    }
    if let Some(road) = f.road {
        if let Some(ur) = road.urban_rural {
            if r.urban_rural != ur {
                return false;
            }
        }
        if let Some(class) = road.class {
            let have = match r.road_functional {
                RoadFunctional::Sth | RoadFunctional::Ush | RoadFunctional::Ih => RoadClass::Highway,
                RoadFunctional::Cth | RoadFunctional::Local => RoadClass::NonHighway,
                _ => RoadClass::Unknown,
            };
            if have != class {
                return false;
            }
        }
    }
    if let Some(k) = f.key_factor {
        if !factor_labels(r).contains(&k.label()) {
            return false;
        }
    }
    if let Some(b) = f.bbox {
        match r.location {
            Some(p) if p.lon >= b.min_lon && p.lon <= b.max_lon && p.lat >= b.min_lat && p.lat <= b.max_lat => {}
            _ => return false,
        }
    }
    if let Some(t) = &f.crash_type {
        if r.crash_type.trim().to_lowercase() != t.trim().to_lowercase() {
            return false;
        }
    }
    true
}
