use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::record::CrashRecord;
use crate::severity::{in_group, SeverityGroup, SeverityLevel};

/// Crash total with KAB and KA counts and their rates in percent.
///
/// Rates are `None` when `total == 0`, which is distinct from a 0 % rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    pub total: u64,
    pub kab: u64,
    pub kab_rate: Option<f64>,
    pub ka: u64,
    pub ka_rate: Option<f64>,
}

impl RateSummary {
    /// `None` unless `ka <= kab <= total`.
    pub fn from_counts(total: u64, kab: u64, ka: u64) -> Option<Self> {
        if ka > kab || kab > total {
            return None;
        }
        let rate = |n: u64| (total > 0).then(|| 100.0 * n as f64 / total as f64);
        Some(Self { total, kab, kab_rate: rate(kab), ka, ka_rate: rate(ka) })
    }

    pub fn empty() -> Self {
        Self { total: 0, kab: 0, kab_rate: None, ka: 0, ka_rate: None }
    }
}

impl Default for RateSummary {
    fn default() -> Self {
        Self::empty()
    }
}

/// Incremental counter behind every [`RateSummary`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RateCounter {
    pub total: u64,
    pub kab: u64,
    pub ka: u64,
}

impl RateCounter {
    pub fn push(&mut self, severity: SeverityLevel) {
        self.total += 1;
        if in_group(severity, SeverityGroup::Kab) {
            self.kab += 1;
        }
        if in_group(severity, SeverityGroup::Ka) {
            self.ka += 1;
        }
    }

    pub fn finish(self) -> RateSummary {
        // push() keeps ka <= kab <= total
        RateSummary::from_counts(self.total, self.kab, self.ka).unwrap_or_default()
    }
}

pub fn rate_summary<'a, I>(records: I) -> RateSummary
where
    I: IntoIterator<Item = &'a CrashRecord>,
{
    let mut counter = RateCounter::default();
    for r in records {
        counter.push(r.severity);
    }
    counter.finish()
}

/// Presentation formatting of a percentage; undefined rates render empty.
///
/// Ties round half up as in the published tables (21/336 = 6.25 % shows as
/// 6.3), where plain `{:.1}` would give 6.2. The nudge absorbs float error
/// in ratios that are exact decimal ties.
pub fn format_percent(value: Option<f64>, decimals: usize) -> String {
    match value {
        Some(v) => {
            let scale = libm::pow(10.0, decimals as f64);
            let r = libm::floor(libm::fabs(v) * scale + 0.5 + 1e-9) / scale;
            let r = if v < 0.0 { -r } else { r };
            format!("{r:.decimals$}")
        }
        None => String::new(),
    }
}
