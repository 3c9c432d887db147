use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::analytics::age::{AgeBins, UNKNOWN_AGE_LABEL};
use crate::analytics::rate::{RateCounter, RateSummary};
use crate::analytics::road::{road_category, road_label};
use crate::filter::{select, QueryFilter, Scope};
use crate::record::{KeyFactor, Sex};
use crate::snapshot::DatasetSnapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Sex,
    AgeGroup,
    KeyFactor,
    RoadCategory,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [Self::Sex, Self::AgeGroup, Self::KeyFactor, Self::RoadCategory];

    pub fn key(self) -> &'static str {
        match self {
            Self::Sex => "sex",
            Self::AgeGroup => "age_group",
            Self::KeyFactor => "key_factor",
            Self::RoadCategory => "road_category",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim();
        Self::ALL.into_iter().find(|d| d.key().eq_ignore_ascii_case(t))
    }

    /// Whether every crash lands under exactly one row.
    pub fn is_exclusive(self) -> bool {
        !matches!(self, Self::KeyFactor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRow {
    pub label: String,
    /// Row total as a percentage of the scope total.
    pub share_of_scope_total: Option<f64>,
    #[serde(flatten)]
    pub summary: RateSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryBreakdown {
    pub dimension: Dimension,
    pub scope: Scope,
    pub rows: Vec<BreakdownRow>,
    pub grand_total: RateSummary,
}

const SEX_LABELS: [(Sex, &str); 3] = [(Sex::Female, "Female"), (Sex::Male, "Male"), (Sex::Unknown, "Unknown")];

const ROAD_LABELS: [&str; 5] = [
    "Rural Highway",
    "Rural Non-highway",
    "Urban Highway",
    "Urban Non-highway",
    "Unknown",
];

/// Per-category rate summaries with the default age bins.
///
/// Sex and age come from the crash's primary person (first driver, else
/// first person); a crash without persons counts as unknown. Key factors
/// count a crash under every flag it carries. Every label of the dimension
/// is emitted, including empty ones.
pub fn breakdown(
    snapshot: &DatasetSnapshot,
    dimension: Dimension,
    scope: &Scope,
    filter: &QueryFilter,
) -> CategoryBreakdown {
    breakdown_with_bins(snapshot, dimension, scope, filter, &AgeBins::default())
}

pub fn breakdown_with_bins(
    snapshot: &DatasetSnapshot,
    dimension: Dimension,
    scope: &Scope,
    filter: &QueryFilter,
    bins: &AgeBins,
) -> CategoryBreakdown {
    let labels: Vec<&str> = match dimension {
        Dimension::Sex => SEX_LABELS.iter().map(|(_, l)| *l).collect(),
        Dimension::AgeGroup => bins
            .bins()
            .iter()
            .map(|b| b.label.as_str())
            .chain([UNKNOWN_AGE_LABEL])
            .collect(),
        Dimension::KeyFactor => KeyFactor::ALL.iter().map(|f| f.label()).collect(),
        Dimension::RoadCategory => ROAD_LABELS.to_vec(),
    };
    let mut counters = alloc::vec![RateCounter::default(); labels.len()];
    let mut grand = RateCounter::default();
    let index_of = |label: &str| labels.iter().position(|l| *l == label);

    for (record, _) in select(snapshot, scope, filter) {
        grand.push(record.severity);
        let primary = record.primary_person();
        match dimension {
            Dimension::Sex => {
                let sex = primary.map_or(Sex::Unknown, |p| p.sex);
                let i = SEX_LABELS.iter().position(|(s, _)| *s == sex).unwrap_or(2);
                counters[i].push(record.severity);
            }
            Dimension::AgeGroup => {
                let age = primary.and_then(|p| p.age);
                let mut hit = false;
                for label in bins.labels_for(age) {
                    if let Some(i) = index_of(label) {
                        counters[i].push(record.severity);
                        hit = true;
                    }
                }
                if !hit {
                    // age outside all configured bins
                    if let Some(i) = index_of(UNKNOWN_AGE_LABEL) {
                        counters[i].push(record.severity);
                    }
                }
            }
            Dimension::KeyFactor => {
                for (i, factor) in KeyFactor::ALL.iter().enumerate() {
                    if factor.is_set(&record.flags) {
                        counters[i].push(record.severity);
                    }
                }
            }
            Dimension::RoadCategory => {
                if let Some(i) = index_of(road_label(road_category(record))) {
                    counters[i].push(record.severity);
                }
            }
        }
    }

    let grand_total = grand.finish();
    let rows = labels
        .iter()
        .zip(counters)
        .map(|(label, c)| {
            let summary = c.finish();
            BreakdownRow {
                label: (*label).into(),
                share_of_scope_total: (grand_total.total > 0)
                    .then(|| 100.0 * summary.total as f64 / grand_total.total as f64),
                summary,
            }
        })
        .collect();
    CategoryBreakdown { dimension, scope: scope.clone(), rows, grand_total }
}
