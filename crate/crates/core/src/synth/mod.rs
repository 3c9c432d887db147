//! Seeded synthetic crash data.
//!
//! Crash-level source data for this domain is not public, so every
//! published table is reproduced from synthesis calibrated to printed
//! marginals (see [`calibration`]). Generation is a pure function of the
//! [`SynthSpec`] (including its seed) and the boundary set.

pub mod calibration;
mod rng;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::analytics::RoadClass;
use crate::geometry::{BBox, LonLat, TribeBoundary};
use crate::record::{
    AgencyType, CrashDate, CrashLocationClass, CrashRecord, Jurisdiction, KeyFlags, PersonRecord, PersonRole,
    RoadFunctional, Sex, UrbanRural,
};
use crate::severity::SeverityLevel;

pub use rng::SynthRng;

/// Probabilities over the five KABCO levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeverityMix {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "O")]
    pub o: f64,
}

impl SeverityMix {
    /// Mix with the given KAB and KA fractions. `k_share_of_ka` splits KA
    /// into K and A; `c_share_of_co` splits the non-KAB remainder into C
    /// and O.
    pub fn from_rates(kab: f64, ka: f64, k_share_of_ka: f64, c_share_of_co: f64) -> Self {
        let k = ka * k_share_of_ka;
        let c = (1.0 - kab) * c_share_of_co;
        Self { k, a: ka - k, b: kab - ka, c, o: 1.0 - kab - c }
    }

    fn weights(&self) -> [f64; 5] {
        [self.k, self.a, self.b, self.c, self.o]
    }

    pub fn sum(&self) -> f64 {
        self.weights().iter().sum()
    }

    fn sample(&self, rng: &mut SynthRng) -> SeverityLevel {
        SeverityLevel::ALL[rng.weighted(self.weights().into_iter())]
    }
}

/// One urban/rural × road-class stratum with its share of a scope's
/// crashes and an optional stratum-specific severity mix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadStratum {
    pub urban_rural: UrbanRural,
    pub class: RoadClass,
    pub weight: f64,
    #[serde(default)]
    pub severity: Option<SeverityMix>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FlagRates {
    pub speeding: f64,
    pub impaired: f64,
    pub pedestrian: f64,
    pub hit_and_run: f64,
    pub belt_nonuse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedLabel {
    pub label: String,
    pub weight: f64,
}

/// Generation profile of one scope (tribal or non-tribal crashes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScopeProfile {
    /// Used for strata without their own mix.
    pub severity: SeverityMix,
    pub roads: Vec<RoadStratum>,
    pub flags: FlagRates,
    pub crash_types: Vec<WeightedLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TribeWeight {
    pub tribe_id: String,
    pub weight: f64,
}

/// Planted spatial cluster: a fraction `intensity` of all crashes is drawn
/// from an isotropic normal of standard deviation `spread` degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterCenter {
    pub lon: f64,
    pub lat: f64,
    pub intensity: f64,
    #[serde(default = "default_spread")]
    pub spread: f64,
}

fn default_spread() -> f64 {
    0.002
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_crashes: usize,
    /// Share of non-cluster crashes placed on tribal land.
    pub tribal_fraction: f64,
    /// Profile of crashes off tribal land.
    pub statewide: ScopeProfile,
    pub tribal: ScopeProfile,
    pub tribe_weights: Vec<TribeWeight>,
    #[serde(default)]
    pub cluster_centers: Vec<ClusterCenter>,
    /// Inclusive.
    pub year_range: (i32, i32),
    /// Extent for crashes off tribal land.
    pub region: BBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpecError(pub String);

impl fmt::Display for SynthSpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl core::error::Error for SynthSpecError {}

fn check_weights(what: &str, weights: impl Iterator<Item = f64>) -> Result<(), SynthSpecError> {
    let mut total = 0.0;
    for w in weights {
        if !(w.is_finite() && w >= 0.0) {
            return Err(SynthSpecError(format!("{what}: weight {w} must be finite and non-negative")));
        }
        total += w;
    }
    if total <= 0.0 {
        return Err(SynthSpecError(format!("{what}: weights must have a positive sum")));
    }
    Ok(())
}

fn check_mix(what: &str, mix: &SeverityMix) -> Result<(), SynthSpecError> {
    if mix.weights().iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(SynthSpecError(format!("{what}: probabilities must be non-negative")));
    }
    let sum = mix.sum();
    if libm::fabs(sum - 1.0) > 1e-9 {
        return Err(SynthSpecError(format!("{what}: severity mix sums to {sum}, expected 1")));
    }
    Ok(())
}

fn check_probability(what: &str, p: f64) -> Result<(), SynthSpecError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SynthSpecError(format!("{what}: {p} is not a probability")));
    }
    Ok(())
}

impl ScopeProfile {
    fn validate(&self, scope: &str) -> Result<(), SynthSpecError> {
        check_mix(&format!("{scope}.severity"), &self.severity)?;
        check_weights(&format!("{scope}.roads"), self.roads.iter().map(|r| r.weight))?;
        for (i, stratum) in self.roads.iter().enumerate() {
            if let Some(mix) = &stratum.severity {
                check_mix(&format!("{scope}.roads[{i}].severity"), mix)?;
            }
        }
        let f = &self.flags;
        for (name, p) in [
            ("speeding", f.speeding),
            ("impaired", f.impaired),
            ("pedestrian", f.pedestrian),
            ("hit_and_run", f.hit_and_run),
            ("belt_nonuse", f.belt_nonuse),
        ] {
            check_probability(&format!("{scope}.flags.{name}"), p)?;
        }
        check_weights(&format!("{scope}.crash_types"), self.crash_types.iter().map(|c| c.weight))
    }
}

impl SynthSpec {
    pub fn validate(&self, boundaries: &[TribeBoundary]) -> Result<(), SynthSpecError> {
        check_probability("tribal_fraction", self.tribal_fraction)?;
        self.statewide.validate("statewide")?;
        self.tribal.validate("tribal")?;
        if self.year_range.0 > self.year_range.1 {
            return Err(SynthSpecError("year_range: start after end".into()));
        }
        if !self.region.is_valid() || self.region.width() <= 0.0 || self.region.height() <= 0.0 {
            return Err(SynthSpecError("region: invalid bbox".into()));
        }
        let mut cluster_total = 0.0;
        for c in &self.cluster_centers {
            check_probability("cluster intensity", c.intensity)?;
            if !(c.spread.is_finite() && c.spread >= 0.0) || !c.lon.is_finite() || !c.lat.is_finite() {
                return Err(SynthSpecError("cluster: invalid centre or spread".into()));
            }
            cluster_total += c.intensity;
        }
        if cluster_total > 1.0 + 1e-12 {
            return Err(SynthSpecError(format!("cluster intensities sum to {cluster_total} > 1")));
        }
        if self.tribal_fraction > 0.0 && self.n_crashes > 0 {
            check_weights("tribe_weights", self.tribe_weights.iter().map(|t| t.weight))?;
            for t in &self.tribe_weights {
                if !boundaries.iter().any(|b| b.tribe_id == t.tribe_id) {
                    return Err(SynthSpecError(format!("tribe_weights: no boundary for {:?}", t.tribe_id)));
                }
            }
        }
        Ok(())
    }
}

/// Coordinates are quantised to 1e-6° so that a CSV round trip reproduces
/// them bit for bit.
fn quantise(v: f64) -> f64 {
    libm::round(v * 1e6) / 1e6
}

fn quantised(p: LonLat) -> LonLat {
    LonLat::new(quantise(p.lon), quantise(p.lat))
}

const MAX_TRIES: usize = 10_000;

fn uniform_in(rng: &mut SynthRng, bbox: &BBox) -> LonLat {
    quantised(LonLat::new(
        rng.range(bbox.min_lon, bbox.max_lon),
        rng.range(bbox.min_lat, bbox.max_lat),
    ))
}

fn point_in_tribe(rng: &mut SynthRng, tribe: &TribeBoundary) -> LonLat {
    let bbox = tribe.bbox().unwrap_or(BBox::new(0.0, 0.0, 0.0, 0.0));
    let mut p = uniform_in(rng, &bbox);
    for _ in 0..MAX_TRIES {
        if tribe.contains(p) {
            break;
        }
        p = uniform_in(rng, &bbox);
    }
    p
}

fn point_off_tribal_land(rng: &mut SynthRng, region: &BBox, boundaries: &[TribeBoundary]) -> LonLat {
    let mut p = uniform_in(rng, region);
    for _ in 0..MAX_TRIES {
        if !boundaries.iter().any(|b| b.contains(p)) {
            break;
        }
        p = uniform_in(rng, region);
    }
    p
}

fn road_functional(rng: &mut SynthRng, class: RoadClass) -> RoadFunctional {
    match class {
        RoadClass::Highway => [RoadFunctional::Sth, RoadFunctional::Ush, RoadFunctional::Ih]
            [rng.weighted([0.5, 0.35, 0.15].into_iter())],
        RoadClass::NonHighway => [RoadFunctional::Cth, RoadFunctional::Local][rng.weighted([0.4, 0.6].into_iter())],
        RoadClass::Unknown => RoadFunctional::Other,
    }
}

/// Driver age-bin shares: `(min, max, weight)`; the remainder is unknown.
const AGE_WEIGHTS: [(i64, i64, f64); 7] = [
    (0, 4, 0.0001),
    (5, 14, 0.001),
    (15, 24, 0.231),
    (25, 44, 0.326),
    (45, 64, 0.234),
    (65, 74, 0.066),
    (75, 95, 0.042),
];

fn sample_person(rng: &mut SynthRng, role: PersonRole) -> PersonRecord {
    let sex = [Sex::Female, Sex::Male, Sex::Unknown][rng.weighted([0.367, 0.534, 0.099].into_iter())];
    let unknown_age = 1.0 - AGE_WEIGHTS.iter().map(|w| w.2).sum::<f64>();
    let bin = rng.weighted(AGE_WEIGHTS.iter().map(|w| w.2).chain([unknown_age]));
    let age = AGE_WEIGHTS.get(bin).map(|&(lo, hi, _)| rng.int(lo, hi) as u8);
    PersonRecord { role, sex, age, injury: SeverityLevel::O }
}

/// Generates `spec.n_crashes` crashes; ids are `SYN-0000001`, ….
///
/// Each crash is first placed: with the summed cluster intensity it is
/// drawn around a planted cluster (and is tribal iff it lands on tribal
/// land), otherwise it is tribal with probability `tribal_fraction` and
/// placed uniformly inside a weighted tribe, else placed uniformly in the
/// region off tribal land. The scope profile then draws road stratum,
/// severity, key factors, crash type and persons.
pub fn generate(spec: &SynthSpec, boundaries: &[TribeBoundary]) -> Result<Vec<CrashRecord>, SynthSpecError> {
    spec.validate(boundaries)?;
    let mut rng = SynthRng::new(spec.seed);
    let mut out = Vec::with_capacity(spec.n_crashes);
    let tribes: Vec<&TribeBoundary> = spec
        .tribe_weights
        .iter()
        .filter_map(|w| boundaries.iter().find(|b| b.tribe_id == w.tribe_id))
        .collect();
    let cluster_weights = spec.cluster_centers.iter().map(|c| c.intensity);
    let cluster_total: f64 = cluster_weights.clone().sum();

    for i in 0..spec.n_crashes {
        let (location, tribe) = if cluster_total > 0.0 && rng.chance(cluster_total) {
            let c = &spec.cluster_centers[rng.weighted(cluster_weights.clone())];
            let p = quantised(LonLat::new(
                c.lon + c.spread * rng.normal(),
                c.lat + c.spread * rng.normal(),
            ));
            (p, boundaries.iter().find(|b| b.contains(p)))
        } else if !tribes.is_empty() && rng.chance(spec.tribal_fraction) {
            let tribe = tribes[rng.weighted(spec.tribe_weights.iter().map(|w| w.weight))];
            (point_in_tribe(&mut rng, tribe), Some(tribe))
        } else {
            (point_off_tribal_land(&mut rng, &spec.region, boundaries), None)
        };
        let profile = if tribe.is_some() { &spec.tribal } else { &spec.statewide };

        let stratum = &profile.roads[rng.weighted(profile.roads.iter().map(|r| r.weight))];
        let severity = stratum.severity.unwrap_or(profile.severity).sample(&mut rng);
        let f = &profile.flags;
        let flags = KeyFlags {
            speeding: rng.chance(f.speeding),
            impaired: rng.chance(f.impaired),
            pedestrian: rng.chance(f.pedestrian),
            hit_and_run: rng.chance(f.hit_and_run),
            belt_nonuse: rng.chance(f.belt_nonuse),
        };
        let crash_type = profile.crash_types[rng.weighted(profile.crash_types.iter().map(|c| c.weight))]
            .label
            .clone();
        let year = rng.int(i64::from(spec.year_range.0), i64::from(spec.year_range.1)) as i32;
        let month = rng.int(1, 12) as u8;
        let day = rng.int(1, 28) as u8;
        let date = CrashDate::new(year, month, day).ok_or_else(|| SynthSpecError("year out of range".into()))?;

        let mut record = CrashRecord::new(format!("SYN-{:07}", i + 1), date);
        record.location = Some(location);
        record.urban_rural = stratum.urban_rural;
        record.road_functional = road_functional(&mut rng, stratum.class);
        record.crash_type = crash_type;
        record.flags = flags;
        match tribe {
            Some(t) => {
                record.crash_location_class = CrashLocationClass::TribalLand;
                record.jurisdiction = Jurisdiction::IndianReservationTrust;
                record.agency_type = if rng.chance(0.6) { AgencyType::Tribal } else { AgencyType::CountySheriff };
                record.tribal_code = Some(t.tribe_id.clone());
                record.tribal_name = Some(t.name.clone());
            }
            None => {
                record.crash_location_class = if rng.chance(0.9) {
                    CrashLocationClass::PublicProperty
                } else {
                    CrashLocationClass::PrivateProperty
                };
                record.jurisdiction = Jurisdiction::None;
                record.agency_type = [AgencyType::StatePatrol, AgencyType::CountySheriff, AgencyType::CityPolice]
                    [rng.weighted([0.2, 0.4, 0.4].into_iter())];
            }
        }

        let mut persons = alloc::vec![sample_person(&mut rng, PersonRole::Driver)];
        let passengers = rng.weighted([0.55, 0.3, 0.15].into_iter());
        for _ in 0..passengers {
            persons.push(sample_person(&mut rng, PersonRole::Passenger));
        }
        if flags.pedestrian {
            persons.push(sample_person(&mut rng, PersonRole::Pedestrian));
        }
        let injured = rng.int(0, persons.len() as i64 - 1) as usize;
        persons[injured].injury = severity;
        record.persons = persons;
        record.refresh_severity();
        out.push(record);
    }
    Ok(out)
}
