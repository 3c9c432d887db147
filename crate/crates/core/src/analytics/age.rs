use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub const UNKNOWN_AGE_LABEL: &str = "unknown";

/// Inclusive age range with its display label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgeBin {
    pub label: String,
    pub min: u8,
    pub max: u8,
}

/// Age-group bin edges. The default bins partition `0..=120`; any other
/// edges (including overlapping ones) may be supplied, in which case an
/// age is counted under every bin containing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgeBins {
    bins: Vec<AgeBin>,
}

const DEFAULT_BINS: [(&str, u8, u8); 7] = [
    ("≤4", 0, 4),
    ("5–14", 5, 14),
    ("15–24", 15, 24),
    ("25–44", 25, 44),
    ("45–64", 45, 64),
    ("65–74", 65, 74),
    ("≥75", 75, 120),
];

impl Default for AgeBins {
    fn default() -> Self {
        Self::from_edges(&DEFAULT_BINS)
    }
}

impl AgeBins {
    pub fn from_edges(edges: &[(&str, u8, u8)]) -> Self {
        Self {
            bins: edges
                .iter()
                .map(|&(label, min, max)| AgeBin { label: label.into(), min, max })
                .collect(),
        }
    }

    /// The bins exactly as printed in the source table, where "45–64" and
    /// "55–74" overlap.
    pub fn printed_overlapping() -> Self {
        Self::from_edges(&[
            ("≤4", 0, 4),
            ("5–14", 5, 14),
            ("15–24", 15, 24),
            ("25–44", 25, 44),
            ("45–64", 45, 64),
            ("55–74", 55, 74),
            ("≥75", 75, 120),
        ])
    }

    pub fn bins(&self) -> &[AgeBin] {
        &self.bins
    }

    /// Labels of every bin holding `age`; `["unknown"]` for an unknown age.
    pub fn labels_for(&self, age: Option<u8>) -> impl Iterator<Item = &str> + '_ {
        let known = age.map(|a| {
            self.bins
                .iter()
                .filter(move |b| (b.min..=b.max).contains(&a))
                .map(|b| b.label.as_str())
        });
        let unknown = age.is_none().then_some(UNKNOWN_AGE_LABEL);
        known.into_iter().flatten().chain(unknown)
    }
}

/// Default-bin label for an age; `"unknown"` when not recorded or out of
/// range.
pub fn age_group_of(age: Option<u8>) -> &'static str {
    age.and_then(|a| DEFAULT_BINS.iter().find(|(_, lo, hi)| (*lo..=*hi).contains(&a)))
        .map_or(UNKNOWN_AGE_LABEL, |(label, _, _)| label)
}
