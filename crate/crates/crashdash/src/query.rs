//! Parameter parsing and execution shared by the CLI and the HTTP API.
//!
//! Both front ends turn their inputs into string key/value pairs, parse
//! them into a [`Query`] and run it here, so a report printed by the CLI
//! and the body served by the API come from the same code path.

use std::collections::BTreeMap;
use std::fmt;

use crashdash_core::filter::select;
use crashdash_core::{
    analyze, breakdown, rate_summary, road_table, top_crash_types, tribe_rankings, BBox, CategoryBreakdown,
    CrashTypeComparison, CrashTypeWeight, DatasetSnapshot, Dimension, GiStarCell, HotspotError, HotspotGrid,
    HotspotWarning, KeyFactor, LonLat, QueryFilter, RateSummary, RoadClass, RoadFilter, RoadTable, Scope,
    SeverityGroup, SeverityLevel, TribeRanking, UrbanRural,
};
use serde::{Deserialize, Serialize};

pub const DEFAULT_TOP_N: usize = 10;
pub const DEFAULT_RADIUS: usize = 1;
/// Upper bound on hotspot grid cells per request.
pub const MAX_GRID_CELLS: usize = 4_000_000;

/// A parameter that could not be parsed or applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamError {
    pub param: String,
    pub message: String,
}

impl ParamError {
    pub fn new(param: impl Into<String>, message: impl Into<String>) -> Self {
        Self { param: param.into(), message: message.into() }
    }
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.param, self.message)
    }
}

impl std::error::Error for ParamError {}

impl From<crashdash_core::FilterError> for ParamError {
    fn from(e: crashdash_core::FilterError) -> Self {
        Self::new(e.param, e.message)
    }
}

/// Key/value parameters; each key may appear once and every key must be
/// consumed by the query that reads them.
#[derive(Debug, Clone, Default)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn from_pairs<K, V>(pairs: impl IntoIterator<Item = (K, V)>) -> Result<Self, ParamError>
    where
        K: Into<String>,
        V: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            let k = k.into();
            if map.insert(k.clone(), v.into()).is_some() {
                return Err(ParamError::new(k, "given more than once"));
            }
        }
        Ok(Self(map))
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.0.remove(key).filter(|v| !v.trim().is_empty())
    }

    fn take_parsed<T>(&mut self, key: &str, parse: impl FnOnce(&str) -> Option<T>, expected: &str) -> Result<Option<T>, ParamError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => parse(v.trim()).map(Some).ok_or_else(|| ParamError::new(key, format!("expected {expected}, got {v:?}"))),
        }
    }

    fn finish(self) -> Result<(), ParamError> {
        match self.0.into_keys().next() {
            None => Ok(()),
            Some(k) => Err(ParamError::new(k.clone(), format!("unknown parameter {k:?}"))),
        }
    }
}

fn parse_bbox(text: &str) -> Option<BBox> {
    let v: Vec<f64> = text.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
    match v.as_slice() {
        &[a, b, c, d] => Some(BBox::new(a, b, c, d)),
        _ => None,
    }
}

fn parse_filter(p: &mut Params) -> Result<QueryFilter, ParamError> {
    let year = |s: &str| s.parse::<i32>().ok();
    let mut f = QueryFilter {
        year_from: p.take_parsed("year_from", year, "a year")?,
        year_to: p.take_parsed("year_to", year, "a year")?,
        tribe_id: p.take("tribe_id").map(|s| s.trim().to_string()),
        severity_group: p.take_parsed("severity_group", SeverityGroup::from_code, "KA, KAB or ALL")?,
        road: None,
        key_factor: p.take_parsed("key_factor", KeyFactor::parse, "a key factor")?,
        bbox: p.take_parsed("bbox", parse_bbox, "min_lon,min_lat,max_lon,max_lat")?,
        crash_type: p.take("crash_type"),
    };
    let urban_rural = p.take_parsed("urban_rural", UrbanRural::parse, "U or R")?;
    let class = p.take_parsed("road_class", RoadClass::parse, "highway or non_highway")?;
    if urban_rural.is_some() || class.is_some() {
        f.road = Some(RoadFilter { urban_rural, class });
    }
    f.validate()?;
    Ok(f)
}

fn parse_scope(p: &mut Params) -> Result<Scope, ParamError> {
    p.take_parsed("scope", Scope::parse, "statewide, tribal or tribe:<id>").map(|s| s.unwrap_or(Scope::Statewide))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    Summary { scope: Scope, filter: QueryFilter },
    Breakdown { dimension: Dimension, scope: Scope, filter: QueryFilter },
    Road { scope: Scope, filter: QueryFilter },
    Rankings { filter: QueryFilter },
    CrashTypes { weight: CrashTypeWeight, n: usize, filter: QueryFilter },
    Hotspots { scope: Scope, cell: Option<f64>, radius: usize, filter: QueryFilter },
    Crashes { scope: Scope, filter: QueryFilter, cursor: Option<String>, limit: Option<usize> },
}

/// Names accepted by [`Query::parse`].
pub const QUERY_KINDS: [&str; 7] = ["summary", "breakdown", "road", "rankings", "crash-types", "hotspots", "crashes"];

impl Query {
    pub fn parse(kind: &str, mut p: Params) -> Result<Query, ParamError> {
        let q = match kind {
            "summary" => Query::Summary { scope: parse_scope(&mut p)?, filter: parse_filter(&mut p)? },
            "breakdown" => Query::Breakdown {
                dimension: p
                    .take_parsed("dimension", Dimension::parse, "sex, age_group, key_factor or road_category")?
                    .ok_or_else(|| ParamError::new("dimension", "required"))?,
                scope: parse_scope(&mut p)?,
                filter: parse_filter(&mut p)?,
            },
            "road" => Query::Road { scope: parse_scope(&mut p)?, filter: parse_filter(&mut p)? },
            "rankings" => Query::Rankings { filter: parse_filter(&mut p)? },
            "crash-types" => Query::CrashTypes {
                weight: p.take_parsed("weight", CrashTypeWeight::parse, "total or kab")?.unwrap_or(CrashTypeWeight::Total),
                n: p.take_parsed("n", |s| s.parse().ok(), "a count")?.unwrap_or(DEFAULT_TOP_N),
                filter: parse_filter(&mut p)?,
            },
            "hotspots" => Query::Hotspots {
                scope: parse_scope(&mut p)?,
                cell: p.take_parsed("cell", |s| s.parse::<f64>().ok().filter(|c| c.is_finite() && *c > 0.0), "a positive cell size")?,
                radius: p.take_parsed("radius", |s| s.parse().ok(), "a cell count")?.unwrap_or(DEFAULT_RADIUS),
                filter: parse_filter(&mut p)?,
            },
            "crashes" => Query::Crashes {
                scope: parse_scope(&mut p)?,
                cursor: p.take("cursor"),
                limit: p.take_parsed("limit", |s| s.parse().ok().filter(|n| *n > 0), "a positive count")?,
                filter: parse_filter(&mut p)?,
            },
            other => return Err(ParamError::new("kind", format!("unknown query kind {other:?}"))),
        };
        p.finish()?;
        Ok(q)
    }
}

/// Counts of crashes by rolled-up severity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjuryCounts {
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "A")]
    pub a: u64,
    #[serde(rename = "B")]
    pub b: u64,
    #[serde(rename = "C")]
    pub c: u64,
    #[serde(rename = "O")]
    pub o: u64,
}

impl InjuryCounts {
    fn push(&mut self, s: SeverityLevel) {
        match s {
            SeverityLevel::K => self.k += 1,
            SeverityLevel::A => self.a += 1,
            SeverityLevel::B => self.b += 1,
            SeverityLevel::C => self.c += 1,
            SeverityLevel::O => self.o += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scope: Scope,
    #[serde(flatten)]
    pub rates: RateSummary,
    pub injury_counts: InjuryCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HotspotNote {
    /// The grid collapsed to one cell; its z is reported as 0.
    SingleCell,
    /// No crash locations matched.
    NoPoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotspotReport {
    pub scope: Scope,
    pub radius: usize,
    /// Located crashes that fed the grid.
    pub points: usize,
    pub grid: Option<HotspotGrid>,
    pub cells: Vec<GiStarCell>,
    pub warnings: Vec<HotspotNote>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrashPoint {
    pub id: String,
    pub lon: f64,
    pub lat: f64,
    pub severity: SeverityLevel,
    pub tribe_id: Option<String>,
    pub crash_type: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrashPage {
    /// Located crashes matching the query, over all pages.
    pub total: usize,
    pub features: Vec<CrashPoint>,
    pub next_cursor: Option<String>,
}

/// Serialized without a tag; see [`crate::report::parse_json`] to read one
/// back given its kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum QueryResult {
    Summary(Summary),
    Breakdown(CategoryBreakdown),
    Road(RoadTable),
    Rankings(TribeRanking),
    CrashTypes(CrashTypeComparison),
    Hotspots(HotspotReport),
    Crashes(CrashPage),
}

/// Every result travels with the id of the snapshot it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub snapshot_id: String,
    pub result: T,
}

/// Settings a query falls back to when a parameter is absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defaults {
    pub cell_size: f64,
    pub page_size: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Self { cell_size: 0.01, page_size: 5000 }
    }
}

fn check_scope(scope: &Scope, snapshot: &DatasetSnapshot) -> Result<(), ParamError> {
    match scope {
        Scope::SingleTribe(id) if snapshot.tribe(id).is_none() => {
            Err(ParamError::new("scope", format!("unknown tribe {id:?}")))
        }
        _ => Ok(()),
    }
}

fn summary(snapshot: &DatasetSnapshot, scope: &Scope, filter: &QueryFilter) -> Summary {
    let selected = select(snapshot, scope, filter);
    let mut injury_counts = InjuryCounts::default();
    for (r, _) in selected.clone() {
        injury_counts.push(r.severity);
    }
    Summary { scope: scope.clone(), rates: rate_summary(selected.map(|(r, _)| r)), injury_counts }
}

fn hotspots(
    snapshot: &DatasetSnapshot,
    scope: &Scope,
    cell: f64,
    radius: usize,
    filter: &QueryFilter,
) -> Result<HotspotReport, ParamError> {
    let points: Vec<LonLat> = select(snapshot, scope, filter).filter_map(|(r, _)| r.location).collect();
    let extent = filter.bbox.or_else(|| match scope {
        Scope::SingleTribe(id) => snapshot.tribe(id).and_then(|t| t.bbox()),
        _ => None,
    });
    let report = |grid, cells, warnings| HotspotReport { scope: scope.clone(), radius, points: points.len(), grid, cells, warnings };
    if let Some(b) = extent.or_else(|| BBox::around(points.iter().copied())) {
        let cols = (b.width() / cell).ceil().max(1.0);
        let rows = (b.height() / cell).ceil().max(1.0);
        if cols * rows > MAX_GRID_CELLS as f64 {
            return Err(ParamError::new("cell", format!("grid of {cols}x{rows} cells exceeds {MAX_GRID_CELLS}")));
        }
    }
    match analyze(&points, extent, cell, radius) {
        Ok(a) => {
            let mut warnings: Vec<HotspotNote> =
                a.warnings.iter().map(|w| match w { HotspotWarning::SingleCell => HotspotNote::SingleCell }).collect();
            if points.is_empty() {
                warnings.push(HotspotNote::NoPoints);
            }
            Ok(report(Some(a.grid), a.cells, warnings))
        }
        Err(HotspotError::NoExtent) => Ok(report(None, Vec::new(), vec![HotspotNote::NoPoints])),
        Err(HotspotError::InvalidCellSize(_)) => Err(ParamError::new("cell", "must be positive")),
        Err(e) => Err(ParamError::new("bbox", e.to_string())),
    }
}

fn crashes(
    snapshot: &DatasetSnapshot,
    scope: &Scope,
    filter: &QueryFilter,
    cursor: Option<&str>,
    limit: usize,
) -> Result<CrashPage, ParamError> {
    let offset = match cursor {
        None => 0,
        Some(c) => {
            let (id, offset) = c.rsplit_once(':').ok_or_else(|| ParamError::new("cursor", "malformed cursor"))?;
            if id != snapshot.snapshot_id() {
                return Err(ParamError::new("cursor", "cursor belongs to a different snapshot"));
            }
            offset.parse::<usize>().map_err(|_| ParamError::new("cursor", "malformed cursor"))?
        }
    };
    let located = select(snapshot, scope, filter).filter(|(r, _)| r.location.is_some());
    let total = located.clone().count();
    let features: Vec<CrashPoint> = located
        .skip(offset)
        .take(limit)
        .map(|(r, a)| {
            let p = r.location.expect("filtered to located crashes");
            CrashPoint {
                id: r.crash_id.clone(),
                lon: p.lon,
                lat: p.lat,
                severity: r.severity,
                tribe_id: a.tribe_id.clone(),
                crash_type: r.crash_type.clone(),
            }
        })
        .collect();
    let end = offset + features.len();
    let next_cursor = (end < total).then(|| format!("{}:{end}", snapshot.snapshot_id()));
    Ok(CrashPage { total, features, next_cursor })
}

/// Runs `query` against `snapshot`. Filters that name a tribe the snapshot
/// does not know are rejected here rather than returning empty results.
pub fn execute(query: &Query, snapshot: &DatasetSnapshot, defaults: &Defaults) -> Result<QueryResult, ParamError> {
    let check = |filter: &QueryFilter, scope: Option<&Scope>| -> Result<(), ParamError> {
        filter.validate_for(snapshot)?;
        scope.map_or(Ok(()), |s| check_scope(s, snapshot))
    };
    Ok(match query {
        Query::Summary { scope, filter } => {
            check(filter, Some(scope))?;
            QueryResult::Summary(summary(snapshot, scope, filter))
        }
        Query::Breakdown { dimension, scope, filter } => {
            check(filter, Some(scope))?;
            QueryResult::Breakdown(breakdown(snapshot, *dimension, scope, filter))
        }
        Query::Road { scope, filter } => {
            check(filter, Some(scope))?;
            QueryResult::Road(road_table(snapshot, scope, filter))
        }
        Query::Rankings { filter } => {
            check(filter, None)?;
            QueryResult::Rankings(tribe_rankings(snapshot, filter))
        }
        Query::CrashTypes { weight, n, filter } => {
            check(filter, None)?;
            QueryResult::CrashTypes(top_crash_types(snapshot, *n, *weight, filter))
        }
        Query::Hotspots { scope, cell, radius, filter } => {
            check(filter, Some(scope))?;
            QueryResult::Hotspots(hotspots(snapshot, scope, cell.unwrap_or(defaults.cell_size), *radius, filter)?)
        }
        Query::Crashes { scope, filter, cursor, limit } => {
            check(filter, Some(scope))?;
            let limit = limit.unwrap_or(defaults.page_size).min(defaults.page_size);
            QueryResult::Crashes(crashes(snapshot, scope, filter, cursor.as_deref(), limit)?)
        }
    })
}

/// Parses and runs in one step, wrapping the result in an [`Envelope`].
pub fn run(
    kind: &str,
    params: Params,
    snapshot: &DatasetSnapshot,
    defaults: &Defaults,
) -> Result<Envelope<QueryResult>, ParamError> {
    let query = Query::parse(kind, params)?;
    let result = execute(&query, snapshot, defaults)?;
    Ok(Envelope { snapshot_id: snapshot.snapshot_id().into(), result })
}
