use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::analytics::rate::{RateCounter, RateSummary};
use crate::filter::{select, QueryFilter, Scope};
use crate::snapshot::DatasetSnapshot;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TribeRankingRow {
    pub tribe_id: String,
    pub name: String,
    #[serde(flatten)]
    pub summary: RateSummary,
    pub kab_rank: usize,
    pub ka_rank: usize,
}

/// Rows ordered by `kab_rank`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TribeRanking {
    pub rows: Vec<TribeRankingRow>,
}

/// `a/b` against `c/d` exactly, for positive denominators.
fn cmp_ratio(a: u64, b: u64, c: u64, d: u64) -> Ordering {
    (u128::from(a) * u128::from(d)).cmp(&(u128::from(c) * u128::from(b)))
}

struct Entry<'a> {
    tribe_id: &'a str,
    name: &'a str,
    counts: RateCounter,
}

/// Ordering for one rank column: the primary rate descending, then the
/// companion rate descending, then larger total, then name.
fn rank_order(primary: impl Fn(&RateCounter) -> u64, companion: impl Fn(&RateCounter) -> u64) -> impl Fn(&Entry, &Entry) -> Ordering {
    move |x, y| {
        let (a, b) = (&x.counts, &y.counts);
        cmp_ratio(primary(b), b.total, primary(a), a.total)
            .then_with(|| cmp_ratio(companion(b), b.total, companion(a), a.total))
            .then_with(|| b.total.cmp(&a.total))
            .then_with(|| x.name.cmp(y.name))
            .then_with(|| x.tribe_id.cmp(y.tribe_id))
    }
}

/// KAB- and KA-rate rankings over every tribe with at least one crash
/// passing `filter`. Ranks are exact (integer cross-multiplication), so
/// equal rates always fall through to the tie-break.
pub fn tribe_rankings(snapshot: &DatasetSnapshot, filter: &QueryFilter) -> TribeRanking {
    let mut counts: BTreeMap<&str, RateCounter> = BTreeMap::new();
    for (record, assignment) in select(snapshot, &Scope::Tribal, filter) {
        if let Some(id) = assignment.tribe_id.as_deref() {
            counts.entry(id).or_default().push(record.severity);
        }
    }
    let mut entries: Vec<Entry> = counts
        .into_iter()
        .map(|(tribe_id, counts)| Entry {
            tribe_id,
            name: snapshot.tribe(tribe_id).map_or(tribe_id, |b| b.name.as_str()),
            counts,
        })
        .collect();

    entries.sort_by(rank_order(|c| c.ka, |c| c.kab));
    let ka_ranks: BTreeMap<&str, usize> = entries.iter().enumerate().map(|(i, e)| (e.tribe_id, i + 1)).collect();
    entries.sort_by(rank_order(|c| c.kab, |c| c.ka));

    let rows = entries
        .iter()
        .enumerate()
        .map(|(i, e)| TribeRankingRow {
            tribe_id: e.tribe_id.into(),
            name: e.name.into(),
            summary: e.counts.finish(),
            kab_rank: i + 1,
            ka_rank: ka_ranks[e.tribe_id],
        })
        .collect();
    TribeRanking { rows }
}
