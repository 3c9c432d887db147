//! Brute-force equivalence checks for the aggregation engine.

use std::cmp::Ordering;

use crashdash_core::synth::calibration::{calibrated_spec, wisconsin_tribes, WISCONSIN};
use crashdash_core::synth::SynthRng;
use crashdash_core::{
    breakdown, generate, top_crash_types, tribe_rankings, BBox, CategoryBreakdown, CrashTypeWeight,
    DatasetSnapshot, Dimension, KeyFactor, QueryFilter, RoadClass, RoadFilter, Scope, SeverityGroup,
    UrbanRural,
};

use super::oracle::{self, close, Tally};

pub const REL: f64 = 1e-9;

/// Snapshot with crash-type spellings perturbed so grouping is exercised.
pub fn snapshot(seed: u64, n: usize) -> DatasetSnapshot {
    let mut spec = calibrated_spec(seed, n);
    spec.tribal_fraction = 0.2;
    let boundaries = wisconsin_tribes();
    let mut records = generate(&spec, &boundaries).unwrap();
    for (i, r) in records.iter_mut().enumerate() {
        match i % 11 {
            3 => r.crash_type = r.crash_type.to_uppercase(),
            7 => r.crash_type = format!("  {} ", r.crash_type.to_lowercase()),
            _ => {}
        }
    }
    DatasetSnapshot::build(super::meta(&format!("s{seed}")), records, boundaries).unwrap()
}

pub fn random_filter(rng: &mut SynthRng, snap: &DatasetSnapshot) -> QueryFilter {
    let mut f = QueryFilter::default();
    if rng.chance(0.4) {
        let from = rng.int(2016, 2021) as i32;
        f.year_from = Some(from);
        f.year_to = Some(from + rng.int(0, 3) as i32);
    }
    if rng.chance(0.3) {
        let tribes = snap.boundaries();
        f.tribe_id = Some(tribes[rng.int(0, tribes.len() as i64 - 1) as usize].tribe_id.clone());
    }
    if rng.chance(0.3) {
        f.severity_group = Some([SeverityGroup::Ka, SeverityGroup::Kab, SeverityGroup::All][rng.int(0, 2) as usize]);
    }
    if rng.chance(0.3) {
        let ur = [None, Some(UrbanRural::Urban), Some(UrbanRural::Rural)][rng.int(0, 2) as usize];
        let class = [None, Some(RoadClass::Highway), Some(RoadClass::NonHighway)][rng.int(0, 2) as usize];
        f.road = Some(RoadFilter { urban_rural: ur, class });
    }
    if rng.chance(0.25) {
        f.key_factor = Some(KeyFactor::ALL[rng.int(0, 4) as usize]);
    }
    if rng.chance(0.25) {
        let lon = rng.range(WISCONSIN.min_lon, WISCONSIN.max_lon - 1.0);
        let lat = rng.range(WISCONSIN.min_lat, WISCONSIN.max_lat - 1.0);
        f.bbox = Some(BBox::new(lon, lat, lon + rng.range(0.5, 3.0), lat + rng.range(0.5, 3.0)));
    }
    if rng.chance(0.15) {
        f.crash_type = Some(["angle", " REAR END", "Ditch", "tree "][rng.int(0, 3) as usize].into());
    }
    f
}

fn scope_keep<'a>(
    scope: &'a Scope,
    f: &'a QueryFilter,
) -> impl Fn(&crashdash_core::CrashRecord, &crashdash_core::TribeAssignment) -> bool + 'a {
    move |r, a| {
        let in_scope = match scope {
            Scope::Statewide => true,
            Scope::Tribal => a.tribe_id.is_some(),
            Scope::SingleTribe(id) => a.tribe_id.as_ref() == Some(id),
        };
        in_scope && oracle::passes(f, r, a)
    }
}

pub fn check_breakdown(snap: &DatasetSnapshot, dim: Dimension, scope: &Scope, f: &QueryFilter) {
    let got: CategoryBreakdown = breakdown(snap, dim, scope, f);
    let labels = |r: &crashdash_core::CrashRecord| match dim {
        Dimension::Sex => vec![oracle::sex_label(r)],
        Dimension::AgeGroup => vec![oracle::age_label(r)],
        Dimension::KeyFactor => oracle::factor_labels(r),
        Dimension::RoadCategory => vec![oracle::road_label(r)],
    };
    let (grand, by) = oracle::recount(snap, scope_keep(scope, f), labels);
    let ctx = format!("{} {dim:?} {scope} {f:?}", snap.snapshot_id());
    assert_eq!(got.grand_total.total, grand.total, "{ctx}");
    assert_eq!(got.grand_total.kab, grand.kab, "{ctx}");
    assert_eq!(got.grand_total.ka, grand.ka, "{ctx}");
    let mut seen = 0;
    for row in &got.rows {
        let want = by.get(row.label.as_str()).copied().unwrap_or_default();
        if want.total > 0 {
            seen += 1;
        }
        let s = &row.summary;
        assert_eq!((s.total, s.kab, s.ka), (want.total, want.kab, want.ka), "{ctx} row {}", row.label);
        assert!(close(s.kab_rate, want.kab_rate(), REL), "{ctx} row {}", row.label);
        assert!(close(s.ka_rate, want.ka_rate(), REL), "{ctx} row {}", row.label);
        let share = (grand.total > 0).then(|| want.total as f64 * 100.0 / grand.total as f64);
        assert!(close(row.share_of_scope_total, share, REL), "{ctx} row {}", row.label);
    }
    assert_eq!(seen, by.len(), "{ctx}: oracle has labels the engine lacks");
    if dim.is_exclusive() {
        assert_eq!(got.rows.iter().map(|r| r.summary.total).sum::<u64>(), grand.total, "{ctx}");
    }
}

/// Independent ranking: floating-point quotients of small integers compare
/// equal exactly when the rationals do.
fn oracle_ranks(by: &std::collections::BTreeMap<String, Tally>, snap: &DatasetSnapshot, ka_first: bool) -> Vec<String> {
    let mut ids: Vec<&String> = by.keys().collect();
    let name = |id: &str| snap.tribe(id).map(|b| b.name.clone()).unwrap();
    let key = |t: &Tally| {
        let kab = t.kab as f64 / t.total as f64;
        let ka = t.ka as f64 / t.total as f64;
        if ka_first {
            (ka, kab)
        } else {
            (kab, ka)
        }
    };
    ids.sort_by(|x, y| {
        let (tx, ty) = (&by[*x], &by[*y]);
        let (kx, ky) = (key(tx), key(ty));
        ky.0.partial_cmp(&kx.0)
            .unwrap()
            .then(ky.1.partial_cmp(&kx.1).unwrap())
            .then(ty.total.cmp(&tx.total))
            .then_with(|| name(x).cmp(&name(y)))
            .then(x.cmp(y))
    });
    ids.into_iter().cloned().collect()
}

pub fn check_rankings(snap: &DatasetSnapshot, f: &QueryFilter) {
    let got = tribe_rankings(snap, f);
    let by = oracle::tribe_tallies(snap, |r, a| oracle::passes(f, r, a));
    assert_eq!(got.rows.len(), by.len());
    let kab_order = oracle_ranks(&by, snap, false);
    let ka_order = oracle_ranks(&by, snap, true);
    for (i, row) in got.rows.iter().enumerate() {
        assert_eq!(row.kab_rank, i + 1);
        assert_eq!(kab_order[i], row.tribe_id, "{f:?}");
        assert_eq!(ka_order[row.ka_rank - 1], row.tribe_id, "{f:?}");
        let t = by[&row.tribe_id];
        let s = &row.summary;
        assert_eq!((s.total, s.kab, s.ka), (t.total, t.kab, t.ka));
        assert!(close(s.kab_rate, t.kab_rate(), REL));
        assert!(close(s.ka_rate, t.ka_rate(), REL));
    }
}

pub fn check_crash_types(snap: &DatasetSnapshot, weight: CrashTypeWeight, n: usize, f: &QueryFilter) {
    let got = top_crash_types(snap, n, weight, f);
    let statewide_filter = QueryFilter { tribe_id: None, ..f.clone() };
    let (by, tt, st) = oracle::crash_type_tallies(
        snap,
        weight == CrashTypeWeight::Kab,
        |r, a| oracle::passes(&statewide_filter, r, a),
        |a| a.tribe_id.is_some() && f.tribe_id.as_ref().is_none_or(|t| a.tribe_id.as_ref() == Some(t)),
    );
    let ctx = format!("{weight:?} {f:?}");
    assert_eq!((got.tribal_total, got.statewide_total), (tt, st), "{ctx}");
    if tt == 0 {
        assert!(got.rows.is_empty(), "{ctx}");
        return;
    }
    assert_eq!(got.rows.len(), by.len().min(n), "{ctx}");
    for w in got.rows.windows(2) {
        let ord = w[1].tribal_count.cmp(&w[0].tribal_count).then(w[1].statewide_count.cmp(&w[0].statewide_count));
        assert!(ord != Ordering::Greater, "{ctx}: rows out of order");
    }
    for row in &got.rows {
        let &(t, s) = by.get(&row.crash_type.trim().to_lowercase()).expect("known type");
        assert_eq!((row.tribal_count, row.statewide_count), (t, s), "{ctx} {}", row.crash_type);
        assert!(close(Some(row.tribal_percent), Some(t as f64 * 100.0 / tt as f64), REL));
        assert!(close(Some(row.statewide_percent), Some(s as f64 * 100.0 / st as f64), REL));
    }
    // the cut keeps the largest tribal counts
    if let Some(last) = got.rows.last() {
        let above = by.values().filter(|(t, _)| *t > last.tribal_count).count();
        assert!(above < got.rows.len(), "{ctx}");
    }
}

/// Every breakdown, ranking and crash-type result of `count` seeded
/// snapshots (100 to 10,000 crashes) against the oracle, unfiltered and
/// under three random filters. Returns the number of comparisons.
pub fn run_equivalence(count: u64) -> usize {
    let mut rng = SynthRng::new(0xC0FFEE);
    let mut compared = 0;
    for seed in 0..count {
        let n = 100 + (seed as usize * 7919) % 9_901;
        let snap = snapshot(seed, n);
        let tribe = snap.boundaries()[seed as usize % snap.boundaries().len()].tribe_id.clone();
        let scopes = [Scope::Statewide, Scope::Tribal, Scope::SingleTribe(tribe)];
        let mut filters = vec![QueryFilter::default()];
        filters.extend((0..3).map(|_| random_filter(&mut rng, &snap)));
        for f in &filters {
            for dim in Dimension::ALL {
                for scope in &scopes {
                    check_breakdown(&snap, dim, scope, f);
                    compared += 1;
                }
            }
            check_rankings(&snap, f);
            for weight in [CrashTypeWeight::Total, CrashTypeWeight::Kab] {
                check_crash_types(&snap, weight, 10, f);
                check_crash_types(&snap, weight, usize::MAX, f);
            }
            compared += 5;
        }
    }
    compared
}
