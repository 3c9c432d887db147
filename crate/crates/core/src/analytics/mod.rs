//! Severity-rate statistics: KAB/KA rate summaries, categorical
//! breakdowns, road-type tables, per-tribe rankings and crash-type
//! comparisons. All functions are pure over a [`DatasetSnapshot`].
//!
//! [`DatasetSnapshot`]: crate::snapshot::DatasetSnapshot

mod age;
mod breakdown;
mod crash_types;
mod ranking;
mod rate;
mod road;

pub use age::{age_group_of, AgeBin, AgeBins, UNKNOWN_AGE_LABEL};
pub use breakdown::{breakdown, breakdown_with_bins, BreakdownRow, CategoryBreakdown, Dimension};
pub use crash_types::{top_crash_types, CrashTypeComparison, CrashTypeRow, CrashTypeWeight};
pub use ranking::{tribe_rankings, TribeRanking, TribeRankingRow};
pub use rate::{format_percent, rate_summary, RateCounter, RateSummary};
pub use road::{road_category, road_label, road_table, RoadClass, RoadTable, RoadTableRow};
