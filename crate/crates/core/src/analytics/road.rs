use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::analytics::rate::{RateCounter, RateSummary};
use crate::filter::{select, QueryFilter, Scope};
use crate::record::{CrashRecord, RoadFunctional, UrbanRural};
use crate::snapshot::DatasetSnapshot;

/// Highway = STH, USH, IH; non-highway = CTH and local roads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoadClass {
    Highway,
    NonHighway,
    Unknown,
}

impl RoadClass {
    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim();
        [
            ("highway", Self::Highway),
            ("non_highway", Self::NonHighway),
            ("nonhighway", Self::NonHighway),
            ("non-highway", Self::NonHighway),
            ("unknown", Self::Unknown),
        ]
        .into_iter()
        .find(|(k, _)| k.eq_ignore_ascii_case(t))
        .map(|(_, v)| v)
    }
}

pub fn road_category(record: &CrashRecord) -> (UrbanRural, RoadClass) {
    let class = match record.road_functional {
        RoadFunctional::Sth | RoadFunctional::Ush | RoadFunctional::Ih => RoadClass::Highway,
        RoadFunctional::Cth | RoadFunctional::Local => RoadClass::NonHighway,
        RoadFunctional::Other | RoadFunctional::Unknown => RoadClass::Unknown,
    };
    (record.urban_rural, class)
}

/// Row label of a road category; anything with an unknown component is
/// `"Unknown"`.
pub fn road_label(category: (UrbanRural, RoadClass)) -> &'static str {
    match category {
        (UrbanRural::Rural, RoadClass::Highway) => "Rural Highway",
        (UrbanRural::Rural, RoadClass::NonHighway) => "Rural Non-highway",
        (UrbanRural::Urban, RoadClass::Highway) => "Urban Highway",
        (UrbanRural::Urban, RoadClass::NonHighway) => "Urban Non-highway",
        _ => "Unknown",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadTableRow {
    pub label: String,
    #[serde(flatten)]
    pub summary: RateSummary,
}

/// Road-type table: total, highway, non-highway, then the four
/// urban/rural × class combinations. Rows overlap by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadTable {
    pub scope: Scope,
    pub rows: Vec<RoadTableRow>,
}

pub const ROAD_TABLE_LABELS: [&str; 7] = [
    "Total Crashes",
    "Highway",
    "Non-highway",
    "Rural Highway",
    "Rural Non-highway",
    "Urban Highway",
    "Urban Non-highway",
];

pub fn road_table(snapshot: &DatasetSnapshot, scope: &Scope, filter: &QueryFilter) -> RoadTable {
    let mut counters = [RateCounter::default(); 7];
    for (record, _) in select(snapshot, scope, filter) {
        let category = road_category(record);
        counters[0].push(record.severity);
        match category.1 {
            RoadClass::Highway => counters[1].push(record.severity),
            RoadClass::NonHighway => counters[2].push(record.severity),
            RoadClass::Unknown => {}
        }
        if let Some(i) = ROAD_TABLE_LABELS[3..].iter().position(|l| *l == road_label(category)) {
            counters[3 + i].push(record.severity);
        }
    }
    RoadTable {
        scope: scope.clone(),
        rows: ROAD_TABLE_LABELS
            .iter()
            .zip(counters)
            .map(|(label, c)| RoadTableRow { label: (*label).into(), summary: c.finish() })
            .collect(),
    }
}
