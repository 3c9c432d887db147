//! CSV and JSON renderings of query results.
//!
//! CSV rates are fixed-point: one decimal for the statewide/tribal tables
//! and crash types, two for tribe rankings. An undefined rate is an empty
//! cell. JSON is the [`Envelope`] exactly as the HTTP API serves it.

use crashdash_core::analytics::format_percent;
use crashdash_core::{CategoryBreakdown, CrashTypeComparison, RateSummary, RoadTable, TribeRanking};
use serde::Serialize;

use crate::hotspot_export;
use crate::query::{CrashPage, Envelope, QueryResult, Summary};

pub const TABLE_DECIMALS: usize = 1;
pub const RANKING_DECIMALS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv of utf-8 fields")
}

fn rate_cells(s: &RateSummary, decimals: usize) -> [String; 5] {
    [
        s.total.to_string(),
        s.kab.to_string(),
        format_percent(s.kab_rate, decimals),
        s.ka.to_string(),
        format_percent(s.ka_rate, decimals),
    ]
}

const RATE_HEADER: [&str; 5] = ["total", "kab", "kab_rate", "ka", "ka_rate"];

pub fn summary_csv(s: &Summary) -> String {
    let mut w = writer();
    let mut header = vec!["scope"];
    header.extend(RATE_HEADER);
    header.extend(["K", "A", "B", "C", "O"]);
    w.write_record(&header).unwrap();
    let c = s.injury_counts;
    let mut row = vec![s.scope.to_string()];
    row.extend(rate_cells(&s.rates, TABLE_DECIMALS));
    row.extend([c.k, c.a, c.b, c.c, c.o].map(|n| n.to_string()));
    w.write_record(&row).unwrap();
    finish(w)
}

pub fn breakdown_csv(b: &CategoryBreakdown) -> String {
    let mut w = writer();
    w.write_record(["label", "total", "share_of_scope_total", "kab", "kab_rate", "ka", "ka_rate"]).unwrap();
    for row in &b.rows {
        let [total, kab, kab_rate, ka, ka_rate] = rate_cells(&row.summary, TABLE_DECIMALS);
        let share = format_percent(row.share_of_scope_total, TABLE_DECIMALS);
        w.write_record([row.label.as_str(), &total, &share, &kab, &kab_rate, &ka, &ka_rate]).unwrap();
    }
    let [total, kab, kab_rate, ka, ka_rate] = rate_cells(&b.grand_total, TABLE_DECIMALS);
    let share = format_percent((b.grand_total.total > 0).then_some(100.0), TABLE_DECIMALS);
    w.write_record(["Grand Total", &total, &share, &kab, &kab_rate, &ka, &ka_rate]).unwrap();
    finish(w)
}

pub fn road_csv(t: &RoadTable) -> String {
    let mut w = writer();
    let mut header = vec!["label"];
    header.extend(RATE_HEADER);
    w.write_record(&header).unwrap();
    for row in &t.rows {
        let mut cells = vec![row.label.clone()];
        cells.extend(rate_cells(&row.summary, TABLE_DECIMALS));
        w.write_record(&cells).unwrap();
    }
    finish(w)
}

pub fn rankings_csv(r: &TribeRanking) -> String {
    let mut w = writer();
    w.write_record(["name", "tribe_id", "total", "kab", "kab_rate", "kab_rank", "ka", "ka_rate", "ka_rank"]).unwrap();
    for row in &r.rows {
        let [total, kab, kab_rate, ka, ka_rate] = rate_cells(&row.summary, RANKING_DECIMALS);
        let (kab_rank, ka_rank) = (row.kab_rank.to_string(), row.ka_rank.to_string());
        w.write_record([row.name.as_str(), &row.tribe_id, &total, &kab, &kab_rate, &kab_rank, &ka, &ka_rate, &ka_rank])
            .unwrap();
    }
    finish(w)
}

pub fn crash_types_csv(c: &CrashTypeComparison) -> String {
    let mut w = writer();
    w.write_record(["crash_type", "tribal_count", "tribal_percent", "statewide_count", "statewide_percent"]).unwrap();
    for row in &c.rows {
        w.write_record([
            row.crash_type.clone(),
            row.tribal_count.to_string(),
            format_percent(Some(row.tribal_percent), TABLE_DECIMALS),
            row.statewide_count.to_string(),
            format_percent(Some(row.statewide_percent), TABLE_DECIMALS),
        ])
        .unwrap();
    }
    finish(w)
}

pub fn crashes_csv(page: &CrashPage) -> String {
    let mut w = writer();
    w.write_record(["id", "lon", "lat", "severity", "tribe_id", "crash_type"]).unwrap();
    for p in &page.features {
        w.write_record([
            p.id.clone(),
            p.lon.to_string(),
            p.lat.to_string(),
            p.severity.code().to_string(),
            p.tribe_id.clone().unwrap_or_default(),
            p.crash_type.clone(),
        ])
        .unwrap();
    }
    finish(w)
}

pub fn to_csv(result: &QueryResult) -> String {
    match result {
        QueryResult::Summary(s) => summary_csv(s),
        QueryResult::Breakdown(b) => breakdown_csv(b),
        QueryResult::Road(t) => road_csv(t),
        QueryResult::Rankings(r) => rankings_csv(r),
        QueryResult::CrashTypes(c) => crash_types_csv(c),
        QueryResult::Hotspots(h) => hotspot_export::to_csv(h),
        QueryResult::Crashes(p) => crashes_csv(p),
    }
}

/// Compact JSON, the same bytes the API returns for this envelope.
pub fn to_json<T: Serialize>(envelope: &Envelope<T>) -> String {
    serde_json::to_string(envelope).expect("results serialize")
}

/// Reads back a JSON envelope produced for a query of `kind`.
pub fn parse_json(kind: &str, json: &str) -> Result<Envelope<QueryResult>, serde_json::Error> {
    fn typed<T: serde::de::DeserializeOwned>(
        json: &str,
        wrap: fn(T) -> QueryResult,
    ) -> Result<Envelope<QueryResult>, serde_json::Error> {
        let e: Envelope<T> = serde_json::from_str(json)?;
        Ok(Envelope { snapshot_id: e.snapshot_id, result: wrap(e.result) })
    }
    match kind {
        "summary" => typed(json, QueryResult::Summary),
        "breakdown" => typed(json, QueryResult::Breakdown),
        "road" => typed(json, QueryResult::Road),
        "rankings" => typed(json, QueryResult::Rankings),
        "crash-types" => typed(json, QueryResult::CrashTypes),
        "hotspots" => typed(json, QueryResult::Hotspots),
        "crashes" => typed(json, QueryResult::Crashes),
        other => Err(serde::de::Error::custom(format!("unknown query kind {other:?}"))),
    }
}

pub fn render(envelope: &Envelope<QueryResult>, format: Format) -> String {
    match format {
        Format::Csv => to_csv(&envelope.result),
        Format::Json => {
            let mut s = to_json(envelope);
            s.push('\n');
            s
        }
    }
}
