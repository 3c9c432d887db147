//! Wisconsin 2017–2021 reference marginals and fixtures built from them.
//!
//! The counts below are the published statewide and tribal-land crash
//! totals by severity group. They drive [`calibrated_spec`] and the
//! marginal-exact [`tribal_seed_records`] fixture. Boundary polygons are
//! simplified stand-ins placed near each reservation, not surveyed
//! geometry.

use alloc::string::String;
use alloc::vec::Vec;

use crate::analytics::RoadClass;
use crate::geometry::{BBox, LonLat, Polygon, TribeBoundary};
use crate::record::{
    AgencyType, CrashDate, CrashLocationClass, CrashRecord, Jurisdiction, PersonRecord, PersonRole, RoadFunctional,
    Sex, UrbanRural,
};
use crate::severity::SeverityLevel;
use crate::synth::{
    FlagRates, RoadStratum, ScopeProfile, SeverityMix, SynthRng, SynthSpec, TribeWeight, WeightedLabel,
};

/// Crash total with KAB and KA counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub total: u64,
    pub kab: u64,
    pub ka: u64,
}

const fn counts(total: u64, kab: u64, ka: u64) -> Counts {
    Counts { total, kab, ka }
}

impl Counts {
    fn minus(self, other: Counts) -> Counts {
        counts(self.total - other.total, self.kab - other.kab, self.ka - other.ka)
    }

    fn kab_fraction(self) -> f64 {
        self.kab as f64 / self.total as f64
    }

    fn ka_fraction(self) -> f64 {
        self.ka as f64 / self.total as f64
    }
}

pub const STATEWIDE_TOTAL: Counts = counts(672_363, 77_516, 16_450);
pub const TRIBAL_TOTAL: Counts = counts(3396, 465, 108);

/// Tribal crashes by KABCO level (K, A, B, C, O).
pub const TRIBAL_SEVERITY: [(SeverityLevel, u64); 5] = [
    (SeverityLevel::K, 20),
    (SeverityLevel::A, 88),
    (SeverityLevel::B, 357),
    (SeverityLevel::C, 309),
    (SeverityLevel::O, 2622),
];

/// `(tribe_id, name, counts)` in published KAB-rank order.
pub const TRIBES: [(&str, &str, Counts); 11] = [
    ("MENOMINEE", "Menominee Indian Tribe", counts(74, 16, 6)),
    ("LCO", "Lac Courte Oreilles Band", counts(202, 42, 18)),
    ("STCROIX", "St. Croix Chippewa Indians", counts(29, 6, 4)),
    ("BADRIVER", "Bad River Band", counts(103, 20, 6)),
    ("LDF", "Lac Du Flambeau Band", counts(349, 58, 14)),
    ("SOKAOGON", "Sokaogon Chippewa Community", counts(14, 2, 0)),
    ("HOCHUNK", "Ho-Chunk Nation", counts(130, 17, 5)),
    ("ONEIDA", "Oneida Tribe Of Indians", counts(2277, 287, 47)),
    ("REDCLIFF", "Red Cliff", counts(34, 4, 2)),
    ("STOCKBRIDGE", "Stockbridge-Munsee Community", counts(68, 6, 4)),
    ("FCP", "Forest County Potawatomi Community", counts(116, 7, 2)),
];

/// Published `(kab_rank, ka_rank)` per entry of [`TRIBES`].
pub const TRIBE_RANKS: [(usize, usize); 11] =
    [(1, 3), (2, 2), (3, 1), (4, 6), (5, 7), (6, 11), (7, 8), (8, 9), (9, 4), (10, 5), (11, 10)];

/// Published rates in percent, `(kab_rate, ka_rate)`, two decimals.
pub const TRIBE_RATES: [(f64, f64); 11] = [
    (21.62, 8.11),
    (20.79, 8.91),
    (20.69, 13.79),
    (19.42, 5.83),
    (16.62, 4.01),
    (14.29, 0.00),
    (13.08, 3.85),
    (12.60, 2.06),
    (11.76, 5.88),
    (8.82, 5.88),
    (6.03, 1.72),
];

/// Road-type strata: `(urban_rural, class, statewide, tribal)`.
pub const ROAD_STRATA: [(UrbanRural, RoadClass, Counts, Counts); 4] = [
    (UrbanRural::Rural, RoadClass::Highway, counts(138_268, 17_061, 4460), counts(543, 87, 27)),
    (UrbanRural::Rural, RoadClass::NonHighway, counts(147_508, 18_517, 5064), counts(1040, 153, 51)),
    (UrbanRural::Urban, RoadClass::Highway, counts(118_936, 13_901, 2383), counts(817, 98, 10)),
    (UrbanRural::Urban, RoadClass::NonHighway, counts(267_651, 28_037, 4543), counts(996, 127, 20)),
];

/// Highway / non-highway totals: `(class, statewide, tribal)`.
pub const ROAD_CLASSES: [(RoadClass, Counts, Counts); 2] = [
    (RoadClass::Highway, counts(257_204, 30_962, 6843), counts(1360, 185, 37)),
    (RoadClass::NonHighway, counts(415_159, 46_554, 9607), counts(2036, 280, 72)),
];

/// Sex of the primary person: `(sex, statewide, tribal)`.
pub const SEX_ROWS: [(Sex, Counts, Counts); 2] = [
    (Sex::Female, counts(246_957, 27_971, 4551), counts(1346, 170, 32)),
    (Sex::Male, counts(358_933, 46_668, 11_423), counts(1865, 287, 71)),
];

/// Age bins as printed: `(label, min, max, statewide, tribal)`. The
/// "55–74" row overlaps "45–64"; the seed fixture places it at 65–74.
pub const AGE_ROWS: [(&str, u8, u8, Counts, Counts); 7] = [
    ("≤4", 0, 4, counts(33, 10, 4), counts(0, 0, 0)),
    ("5–14", 5, 14, counts(795, 311, 68), counts(4, 2, 1)),
    ("15–24", 15, 24, counts(155_109, 19_958, 3658), counts(756, 121, 24)),
    ("25–44", 25, 44, counts(219_105, 27_250, 6124), counts(1117, 184, 42)),
    ("45–64", 45, 64, counts(157_308, 17_912, 4176), counts(899, 98, 25)),
    ("55–74", 65, 74, counts(44_596, 5273, 1153), counts(258, 31, 4)),
    ("≥75", 75, 120, counts(28_041, 3847, 776), counts(170, 21, 7)),
];

/// Key factors: `(factor key, statewide, tribal)`.
pub const FACTOR_ROWS: [(&str, Counts, Counts); 5] = [
    ("speeding", counts(94_657, 17_753, 4896), counts(484, 108, 33)),
    ("impaired", counts(40_445, 12_795, 5002), counts(316, 133, 56)),
    ("pedestrian", counts(6908, 4752, 1592), counts(32, 25, 12)),
    ("hit_and_run", counts(97_800, 5755, 1760), counts(336, 21, 9)),
    ("safety_belt", counts(50_327, 10_005, 5755), counts(288, 66, 40)),
];

pub const WISCONSIN: BBox = BBox::new(-92.89, 42.49, -86.81, 47.08);

type Ring = &'static [(f64, f64)];

/// `(tribe_id, outer ring, holes)`.
const SHAPES: [(&str, Ring, &[Ring]); 11] = [
    (
        "MENOMINEE",
        &[(-88.98, 44.85), (-88.48, 44.85), (-88.48, 45.12), (-88.98, 45.12), (-88.98, 44.85)],
        &[&[(-88.70, 44.95), (-88.65, 44.95), (-88.65, 45.00), (-88.70, 45.00), (-88.70, 44.95)]],
    ),
    (
        "LCO",
        &[
            (-91.55, 45.78),
            (-91.20, 45.78),
            (-91.20, 45.90),
            (-91.38, 45.90),
            (-91.38, 46.02),
            (-91.55, 46.02),
            (-91.55, 45.78),
        ],
        &[],
    ),
    ("STCROIX", &[(-92.45, 45.55), (-92.30, 45.55), (-92.30, 45.68), (-92.45, 45.68), (-92.45, 45.55)], &[]),
    ("BADRIVER", &[(-90.75, 46.35), (-90.40, 46.35), (-90.40, 46.62), (-90.75, 46.62), (-90.75, 46.35)], &[]),
    ("LDF", &[(-90.05, 45.85), (-89.75, 45.85), (-89.75, 46.05), (-90.05, 46.05), (-90.05, 45.85)], &[]),
    ("SOKAOGON", &[(-88.98, 45.48), (-88.88, 45.48), (-88.88, 45.56), (-88.98, 45.56), (-88.98, 45.48)], &[]),
    ("HOCHUNK", &[(-90.90, 44.25), (-90.70, 44.25), (-90.70, 44.40), (-90.90, 44.40), (-90.90, 44.25)], &[]),
    (
        "ONEIDA",
        &[
            (-88.30, 44.40),
            (-88.05, 44.40),
            (-88.05, 44.48),
            (-88.18, 44.48),
            (-88.18, 44.58),
            (-88.30, 44.58),
            (-88.30, 44.40),
        ],
        &[],
    ),
    ("REDCLIFF", &[(-90.85, 46.80), (-90.70, 46.80), (-90.70, 46.92), (-90.85, 46.92), (-90.85, 46.80)], &[]),
    ("STOCKBRIDGE", &[(-89.15, 44.78), (-89.00, 44.78), (-89.00, 44.88), (-89.15, 44.88), (-89.15, 44.78)], &[]),
    ("FCP", &[(-88.85, 45.55), (-88.65, 45.55), (-88.65, 45.70), (-88.85, 45.70), (-88.85, 45.55)], &[]),
];

/// The eleven Wisconsin tribal lands as simplified, pairwise-disjoint
/// polygons.
pub fn wisconsin_tribes() -> Vec<TribeBoundary> {
    SHAPES
        .iter()
        .map(|(id, outer, holes)| {
            let name = TRIBES.iter().find(|t| t.0 == *id).map_or(*id, |t| t.1);
            TribeBoundary {
                tribe_id: (*id).into(),
                name: name.into(),
                polygons: alloc::vec![Polygon::from_coords(outer, holes).expect("fixture polygon is valid")],
            }
        })
        .collect()
}

const K_SHARE_OF_KA: f64 = 20.0 / 108.0;
const C_SHARE_OF_CO: f64 = 309.0 / 2931.0;

fn mix_of(c: Counts) -> SeverityMix {
    SeverityMix::from_rates(c.kab_fraction(), c.ka_fraction(), K_SHARE_OF_KA, C_SHARE_OF_CO)
}

fn labels(pairs: &[(&str, f64)]) -> Vec<WeightedLabel> {
    pairs.iter().map(|(l, w)| WeightedLabel { label: (*l).into(), weight: *w }).collect()
}

/// Crash-type shares. Tribal land has roughly twice the ditch and tree
/// share and more deer (ANL) crashes.
pub fn tribal_crash_types() -> Vec<WeightedLabel> {
    labels(&[
        ("ANL NA", 16.0),
        ("ANL ND", 4.0),
        ("Ditch", 10.0),
        ("Tree", 6.0),
        ("Angle", 12.0),
        ("Rear End", 14.0),
        ("Single Vehicle Other", 8.0),
        ("Sideswipe", 6.0),
        ("Head On", 3.0),
        ("Parked Vehicle", 5.0),
        ("Pedestrian", 1.0),
        ("Other", 15.0),
    ])
}

pub fn statewide_crash_types() -> Vec<WeightedLabel> {
    labels(&[
        ("ANL NA", 12.0),
        ("ANL ND", 3.0),
        ("Ditch", 5.0),
        ("Tree", 3.0),
        ("Angle", 18.0),
        ("Rear End", 24.0),
        ("Single Vehicle Other", 7.0),
        ("Sideswipe", 7.0),
        ("Head On", 2.0),
        ("Parked Vehicle", 5.0),
        ("Pedestrian", 1.0),
        ("Other", 13.0),
    ])
}

fn flag_rates(pick: impl Fn(Counts, Counts) -> Counts, denominator: Counts) -> FlagRates {
    let rate = |key: &str| {
        FACTOR_ROWS
            .iter()
            .find(|r| r.0 == key)
            .map_or(0.0, |r| pick(r.1, r.2).total as f64 / denominator.total as f64)
    };
    FlagRates {
        speeding: rate("speeding"),
        impaired: rate("impaired"),
        pedestrian: rate("pedestrian"),
        hit_and_run: rate("hit_and_run"),
        belt_nonuse: rate("safety_belt"),
    }
}

/// Spec calibrated to the reference marginals: tribal share, per-stratum
/// KAB/KA rates for tribal and off-tribal crashes, key-factor rates and
/// per-tribe crash shares. Off-tribal strata use statewide minus tribal
/// counts so that the statewide aggregate matches the published totals.
pub fn calibrated_spec(seed: u64, n_crashes: usize) -> SynthSpec {
    let off_tribal = STATEWIDE_TOTAL.minus(TRIBAL_TOTAL);
    let strata = |tribal: bool| {
        ROAD_STRATA
            .iter()
            .map(|&(ur, class, sw, tr)| {
                let c = if tribal { tr } else { sw.minus(tr) };
                RoadStratum { urban_rural: ur, class, weight: c.total as f64, severity: Some(mix_of(c)) }
            })
            .collect()
    };
    SynthSpec {
        seed,
        n_crashes,
        tribal_fraction: TRIBAL_TOTAL.total as f64 / STATEWIDE_TOTAL.total as f64,
        statewide: ScopeProfile {
            severity: mix_of(off_tribal),
            roads: strata(false),
            flags: flag_rates(|sw, tr| sw.minus(tr), off_tribal),
            crash_types: statewide_crash_types(),
        },
        tribal: ScopeProfile {
            severity: mix_of(TRIBAL_TOTAL),
            roads: strata(true),
            flags: flag_rates(|_, tr| tr, TRIBAL_TOTAL),
            crash_types: tribal_crash_types(),
        },
        tribe_weights: TRIBES
            .iter()
            .map(|(id, _, c)| TribeWeight { tribe_id: (*id).into(), weight: c.total as f64 })
            .collect(),
        cluster_centers: Vec::new(),
        year_range: (2017, 2021),
        region: WISCONSIN,
    }
}

/// Severity class used to split every marginal: KA, B only, and C/O.
#[derive(Clone, Copy)]
enum Class {
    Ka,
    BOnly,
    Rest,
}

impl Class {
    fn of(c: Counts, class: Class) -> u64 {
        match class {
            Class::Ka => c.ka,
            Class::BOnly => c.kab - c.ka,
            Class::Rest => c.total - c.kab,
        }
    }
}

/// Assigns a value to each of `len` slots so that value `i` fills exactly
/// `sizes[i]` slots, in order; leftover slots get `fallback`.
fn fill<T: Copy>(len: usize, sizes: impl Iterator<Item = (T, u64)>, fallback: T) -> Vec<T> {
    let mut out = Vec::with_capacity(len);
    for (value, n) in sizes {
        for _ in 0..n {
            out.push(value);
        }
    }
    debug_assert!(out.len() <= len);
    out.resize(len, fallback);
    out
}

/// 3,396 tribal crashes whose tribe, road stratum, severity, driver sex,
/// driver age bin and key-factor counts reproduce the tribal reference
/// marginals exactly (each within the KA / B-only / C-and-O classes).
/// Tribes are resolved through `tribal_code`; locations fall inside
/// [`wisconsin_tribes`].
pub fn tribal_seed_records() -> Vec<CrashRecord> {
    let boundaries = wisconsin_tribes();
    let mut rng = SynthRng::new(2017);
    let mut out = Vec::with_capacity(TRIBAL_TOTAL.total as usize);
    let crash_types = tribal_crash_types();

    for (class, severities) in [
        (Class::Ka, &[(SeverityLevel::K, 20u64), (SeverityLevel::A, 88)][..]),
        (Class::BOnly, &[(SeverityLevel::B, 357)][..]),
        (Class::Rest, &[(SeverityLevel::C, 309), (SeverityLevel::O, 2622)][..]),
    ] {
        let len = Class::of(TRIBAL_TOTAL, class) as usize;
        let severity = fill(len, severities.iter().copied(), SeverityLevel::O);
        let tribe = fill(len, TRIBES.iter().map(|t| (t.0, Class::of(t.2, class))), "");
        let stratum = fill(
            len,
            ROAD_STRATA.iter().map(|s| ((s.0, s.1), Class::of(s.3, class))),
            (UrbanRural::Unknown, RoadClass::Unknown),
        );
        let sex = fill(len, SEX_ROWS.iter().map(|s| (s.0, Class::of(s.2, class))), Sex::Unknown);
        let age = fill(len, AGE_ROWS.iter().map(|a| (Some(a.1), Class::of(a.4, class))), None);
        let flags: Vec<Vec<bool>> = FACTOR_ROWS
            .iter()
            .map(|f| fill(len, [(true, Class::of(f.2, class))].into_iter(), false))
            .collect();

        for i in 0..len {
            let n = out.len() + 1;
            let year = 2017 + (n % 5) as i32;
            let date = CrashDate::new(year, (n % 12) as u8 + 1, (n % 28) as u8 + 1).expect("valid date");
            let mut r = CrashRecord::new(alloc::format!("TRB-{n:05}"), date);
            let boundary = boundaries.iter().find(|b| b.tribe_id == tribe[i]);
            if let Some(b) = boundary {
                r.tribal_code = Some(b.tribe_id.clone());
                r.tribal_name = Some(b.name.clone());
                r.location = Some(super::point_in_tribe(&mut rng, b));
            }
            r.crash_location_class = CrashLocationClass::TribalLand;
            r.jurisdiction = Jurisdiction::IndianReservationTrust;
            r.agency_type = AgencyType::Tribal;
            r.urban_rural = stratum[i].0;
            r.road_functional = match stratum[i].1 {
                RoadClass::Highway => [RoadFunctional::Sth, RoadFunctional::Ush, RoadFunctional::Ih][n % 3],
                RoadClass::NonHighway => [RoadFunctional::Cth, RoadFunctional::Local][n % 2],
                RoadClass::Unknown => RoadFunctional::Other,
            };
            r.flags.speeding = flags[0][i];
            r.flags.impaired = flags[1][i];
            r.flags.pedestrian = flags[2][i];
            r.flags.hit_and_run = flags[3][i];
            r.flags.belt_nonuse = flags[4][i];
            r.crash_type = crash_types[rng.weighted(crash_types.iter().map(|c| c.weight))].label.clone();
            r.persons.push(PersonRecord { role: PersonRole::Driver, sex: sex[i], age: age[i], injury: severity[i] });
            if r.flags.pedestrian {
                r.persons.push(PersonRecord {
                    role: PersonRole::Pedestrian,
                    sex: Sex::Unknown,
                    age: None,
                    injury: SeverityLevel::O,
                });
            }
            r.refresh_severity();
            out.push(r);
        }
    }
    out
}

/// A point inside `tribe`, found on a 15×15 lattice over its bbox.
pub fn interior_point(tribe: &TribeBoundary) -> Option<LonLat> {
    let bbox = tribe.bbox()?;
    let steps = 16;
    (1..steps)
        .flat_map(|i| (1..steps).map(move |j| (i, j)))
        .map(|(i, j)| {
            LonLat::new(
                bbox.min_lon + bbox.width() * i as f64 / steps as f64,
                bbox.min_lat + bbox.height() * j as f64 / steps as f64,
            )
        })
        .find(|p| tribe.contains(*p))
}

/// Display names keyed by tribe id.
pub fn tribe_name(tribe_id: &str) -> Option<String> {
    TRIBES.iter().find(|t| t.0 == tribe_id).map(|t| String::from(t.1))
}
