//! Query scope and filter predicates shared by every aggregate.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::analytics::{road_category, RoadClass};
use crate::assign::TribeAssignment;
use crate::geometry::BBox;
use crate::record::{CrashRecord, KeyFactor, UrbanRural};
use crate::severity::{in_group, SeverityGroup};
use crate::snapshot::DatasetSnapshot;

/// Which crashes a query ranges over.
///
/// Serialized as `"statewide"`, `"tribal"` or `"tribe:<tribe_id>"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Scope {
    /// Every record.
    Statewide,
    /// Records resolved to some tribe.
    Tribal,
    SingleTribe(String),
}

impl Scope {
    pub fn contains(&self, assignment: &TribeAssignment) -> bool {
        match self {
            Scope::Statewide => true,
            Scope::Tribal => assignment.is_tribal(),
            Scope::SingleTribe(id) => assignment.tribe_id.as_deref() == Some(id.as_str()),
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("statewide") {
            Some(Scope::Statewide)
        } else if text.eq_ignore_ascii_case("tribal") {
            Some(Scope::Tribal)
        } else {
            text.strip_prefix("tribe:")
                .filter(|id| !id.is_empty())
                .map(|id| Scope::SingleTribe(id.into()))
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Scope::Statewide => "statewide",
            Scope::Tribal => "tribal",
            Scope::SingleTribe(_) => "single_tribe",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::SingleTribe(id) => write!(f, "tribe:{id}"),
            other => f.write_str(other.kind()),
        }
    }
}

impl From<Scope> for String {
    fn from(value: Scope) -> Self {
        value.to_string()
    }
}

impl TryFrom<String> for Scope {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Scope::parse(&value).ok_or_else(|| format!("invalid scope {value:?}"))
    }
}

/// Urban/rural and highway-class restriction; `None` fields match anything.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoadFilter {
    pub urban_rural: Option<UrbanRural>,
    pub class: Option<RoadClass>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryFilter {
    pub year_from: Option<i32>,
    pub year_to: Option<i32>,
    pub tribe_id: Option<String>,
    pub severity_group: Option<SeverityGroup>,
    pub road: Option<RoadFilter>,
    pub key_factor: Option<KeyFactor>,
    pub bbox: Option<BBox>,
    /// Matched case-insensitively after trimming.
    pub crash_type: Option<String>,
}

/// A filter parameter that cannot be applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterError {
    pub param: &'static str,
    pub message: String,
}

impl fmt::Display for FilterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.param, self.message)
    }
}

impl core::error::Error for FilterError {}

impl QueryFilter {
    pub fn validate(&self) -> Result<(), FilterError> {
        if let (Some(from), Some(to)) = (self.year_from, self.year_to) {
            if from > to {
                return Err(FilterError {
                    param: "year_from",
                    message: format!("year_from {from} is after year_to {to}"),
                });
            }
        }
        if let Some(bbox) = &self.bbox {
            if !bbox.is_valid() {
                return Err(FilterError {
                    param: "bbox",
                    message: "bbox must be finite with min <= max".into(),
                });
            }
        }
        if let Some(id) = &self.tribe_id {
            if id.trim().is_empty() {
                return Err(FilterError { param: "tribe_id", message: "empty tribe_id".into() });
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus checks that need the snapshot
    /// (the tribe must exist).
    pub fn validate_for(&self, snapshot: &DatasetSnapshot) -> Result<(), FilterError> {
        self.validate()?;
        if let Some(id) = &self.tribe_id {
            if snapshot.tribe(id).is_none() {
                return Err(FilterError {
                    param: "tribe_id",
                    message: format!("unknown tribe_id {id:?}"),
                });
            }
        }
        Ok(())
    }

    pub fn matches(&self, record: &CrashRecord, assignment: &TribeAssignment) -> bool {
        let year = record.year();
        if self.year_from.is_some_and(|from| year < from) || self.year_to.is_some_and(|to| year > to) {
            return false;
        }
        if let Some(id) = &self.tribe_id {
            if assignment.tribe_id.as_deref() != Some(id.as_str()) {
                return false;
            }
        }
        if let Some(group) = self.severity_group {
            if !in_group(record.severity, group) {
                return false;
            }
        }
        if let Some(road) = &self.road {
            let (ur, class) = road_category(record);
            if road.urban_rural.is_some_and(|want| want != ur) || road.class.is_some_and(|want| want != class) {
                return false;
            }
        }
        if let Some(factor) = self.key_factor {
            if !factor.is_set(&record.flags) {
                return false;
            }
        }
        if let Some(bbox) = &self.bbox {
            match record.location {
                Some(p) if bbox.contains(p) => {}
                _ => return false,
            }
        }
        if let Some(kind) = &self.crash_type {
            if !same_crash_type(&record.crash_type, kind) {
                return false;
            }
        }
        true
    }

    /// The same filter with the tribe restriction removed.
    pub fn without_tribe(&self) -> QueryFilter {
        QueryFilter { tribe_id: None, ..self.clone() }
    }
}

/// Crash-type labels compare case-insensitively after trimming.
pub fn same_crash_type(a: &str, b: &str) -> bool {
    let (a, b) = (a.trim(), b.trim());
    a.len() == b.len() && a.chars().zip(b.chars()).all(|(x, y)| x.to_lowercase().eq(y.to_lowercase()))
}

/// Records of `snapshot` inside `scope` that pass `filter`.
pub fn select<'a>(
    snapshot: &'a DatasetSnapshot,
    scope: &'a Scope,
    filter: &'a QueryFilter,
) -> impl Iterator<Item = (&'a CrashRecord, &'a TribeAssignment)> + Clone + 'a {
    snapshot
        .iter()
        .filter(move |(r, a)| scope.contains(a) && filter.matches(r, a))
}
