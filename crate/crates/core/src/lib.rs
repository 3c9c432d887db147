#![cfg_attr(not(test), no_std)]

//! Core engine for tribal crash-safety analytics.
//!
//! Everything in this crate is a pure function over owned values: crash
//! records and their KABCO severities, tribal-land geometry and tribe
//! resolution, KAB/KA rate statistics, Getis-Ord Gi* hotspots over a
//! regular grid, and a seeded synthetic data generator. The crate needs an
//! allocator but no operating system; file formats, the HTTP service and
//! the CLI live in the `crashdash` crate.

extern crate alloc;

pub mod analytics;
pub mod assign;
pub mod filter;
pub mod geometry;
pub mod hotspot;
pub mod record;
pub mod severity;
pub mod snapshot;
pub mod synth;

pub use analytics::{
    age_group_of, breakdown, rate_summary, road_category, road_table, top_crash_types,
    tribe_rankings, AgeBins, BreakdownRow, CategoryBreakdown, CrashTypeComparison, CrashTypeRow,
    CrashTypeWeight, Dimension, RateSummary, RoadClass, RoadTable, TribeRanking, TribeRankingRow,
};
pub use assign::{assign_tribe, AssignDiagnostic, AssignmentSource, TribeAssignment};
pub use filter::{FilterError, QueryFilter, RoadFilter, Scope};
pub use geometry::{point_in_polygon, BBox, GeometryError, LonLat, Polygon, Ring, TribeBoundary};
pub use hotspot::{
    analyze, bin_to_grid, classify_hotspots, gi_star, GiStarCell, HotspotAnalysis, HotspotError, HotspotGrid,
    HotspotLabel, HotspotWarning,
};
pub use record::{
    AgencyType, CrashDate, CrashLocationClass, CrashRecord, Jurisdiction, KeyFactor, KeyFlags,
    PersonRecord, PersonRole, RecordError, RoadFunctional, Sex, UrbanRural,
};
pub use severity::{derive_crash_severity, in_group, SeverityGroup, SeverityLevel};
pub use snapshot::{DatasetSnapshot, IdentificationCounts, SnapshotError, SnapshotMeta};
pub use synth::{generate, SynthSpec, SynthSpecError};
