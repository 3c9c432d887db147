use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::filter::{select, QueryFilter, Scope};
use crate::severity::{in_group, SeverityGroup};
use crate::snapshot::DatasetSnapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrashTypeWeight {
    /// All crashes.
    Total,
    /// KAB crashes only.
    Kab,
}

impl CrashTypeWeight {
    pub fn parse(text: &str) -> Option<Self> {
        match text.trim() {
            t if t.eq_ignore_ascii_case("total") => Some(Self::Total),
            t if t.eq_ignore_ascii_case("kab") => Some(Self::Kab),
            _ => None,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Self::Total => "total",
            Self::Kab => "kab",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrashTypeRow {
    pub crash_type: String,
    pub tribal_count: u64,
    pub tribal_percent: f64,
    pub statewide_count: u64,
    pub statewide_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrashTypeComparison {
    pub weight: CrashTypeWeight,
    /// Tribal crashes in the weight restriction (the tribal denominator).
    pub tribal_total: u64,
    pub statewide_total: u64,
    /// At most `n` rows, by descending tribal percent.
    pub rows: Vec<CrashTypeRow>,
}

/// Grouping key of a crash-type label: trimmed and lowercased.
fn type_key(label: &str) -> String {
    label.trim().to_lowercase()
}

#[derive(Default)]
struct TypeCounts<'a> {
    display: &'a str,
    tribal: u64,
    statewide: u64,
}

/// Top-`n` crash types on tribal land with the matching statewide share.
///
/// The tribal side is the tribal scope (narrowed by `filter.tribe_id` when
/// set); the statewide side is every record, with the remaining filters
/// applied to both. Ties in tribal percent fall back to statewide percent
/// descending, then label. A label's display form is the lexicographically
/// smallest trimmed spelling seen. No tribal crashes in the restriction
/// yields no rows.
pub fn top_crash_types(
    snapshot: &DatasetSnapshot,
    n: usize,
    weight: CrashTypeWeight,
    filter: &QueryFilter,
) -> CrashTypeComparison {
    let keep = |r: &crate::record::CrashRecord| match weight {
        CrashTypeWeight::Total => true,
        CrashTypeWeight::Kab => in_group(r.severity, SeverityGroup::Kab),
    };
    let statewide_filter = filter.without_tribe();
    let mut by_type: BTreeMap<String, TypeCounts> = BTreeMap::new();
    let (mut tribal_total, mut statewide_total) = (0u64, 0u64);

    for (record, assignment) in select(snapshot, &Scope::Statewide, &statewide_filter) {
        if !keep(record) {
            continue;
        }
        let tribal = Scope::Tribal.contains(assignment) && filter.matches(record, assignment);
        let display = record.crash_type.trim();
        let entry = by_type.entry(type_key(display)).or_insert_with(|| TypeCounts {
            display,
            ..Default::default()
        });
        if display < entry.display {
            entry.display = display;
        }
        entry.statewide += 1;
        statewide_total += 1;
        if tribal {
            entry.tribal += 1;
            tribal_total += 1;
        }
    }

    let pct = |count: u64, total: u64| if total == 0 { 0.0 } else { 100.0 * count as f64 / total as f64 };
    let mut rows: Vec<CrashTypeRow> = if tribal_total == 0 {
        Vec::new()
    } else {
        by_type
            .into_values()
            .map(|c| CrashTypeRow {
                crash_type: c.display.into(),
                tribal_count: c.tribal,
                tribal_percent: pct(c.tribal, tribal_total),
                statewide_count: c.statewide,
                statewide_percent: pct(c.statewide, statewide_total),
            })
            .collect()
    };
    // counts share denominators, so comparing counts orders the percents exactly
    rows.sort_by(|a, b| {
        b.tribal_count
            .cmp(&a.tribal_count)
            .then_with(|| b.statewide_count.cmp(&a.statewide_count))
            .then_with(|| a.crash_type.cmp(&b.crash_type))
    });
    rows.truncate(n);
    CrashTypeComparison { weight, tribal_total, statewide_total, rows }
}
