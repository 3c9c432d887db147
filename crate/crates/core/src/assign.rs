//! Tribe resolution: reconcile the officer-entered tribal code with a
//! point-in-polygon join against the boundary set.
//!
//! The attribute path wins on disagreement; the disagreement is kept on the
//! assignment so it can be reported.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::TribeBoundary;
use crate::record::CrashRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignmentSource {
    /// Only the tribal code resolved.
    Attribute,
    /// Only the geometry resolved.
    Spatial,
    BothAgree,
    /// Both resolved to different tribes; the attribute tribe is used.
    Conflict,
    /// Neither path resolved.
    Unresolved,
}

/// Derived tribal-membership field for one crash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TribeAssignment {
    pub crash_id: String,
    pub tribe_id: Option<String>,
    pub source: AssignmentSource,
    /// `(attribute tribe, spatial tribe)`, present only for conflicts.
    pub conflict_detail: Option<(String, String)>,
}

impl TribeAssignment {
    pub fn is_tribal(&self) -> bool {
        self.tribe_id.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AssignDiagnostic {
    /// The record's tribal code matched no boundary's `tribe_id`.
    UnknownTribalCode { crash_id: String, code: String },
    /// The location fell inside more than one boundary; the first in file
    /// order was used.
    OverlappingBoundaries { crash_id: String, tribe_ids: Vec<String> },
    TribeConflict { crash_id: String, attribute: String, spatial: String },
}

/// Resolves `record` to a tribe, discarding diagnostics.
pub fn assign_tribe(record: &CrashRecord, boundaries: &[TribeBoundary]) -> TribeAssignment {
    assign_tribe_with_diagnostics(record, boundaries, &mut Vec::new())
}

pub fn assign_tribe_with_diagnostics(
    record: &CrashRecord,
    boundaries: &[TribeBoundary],
    diagnostics: &mut Vec<AssignDiagnostic>,
) -> TribeAssignment {
    let attribute = record
        .tribal_code
        .as_deref()
        .map(str::trim)
        .filter(|code| !code.is_empty())
        .and_then(|code| {
            let hit = boundaries.iter().find(|b| b.tribe_id.eq_ignore_ascii_case(code));
            if hit.is_none() {
                diagnostics.push(AssignDiagnostic::UnknownTribalCode {
                    crash_id: record.crash_id.clone(),
                    code: code.into(),
                });
            }
            hit
        })
        .map(|b| b.tribe_id.clone());

    let spatial = record.location.and_then(|p| {
        let mut hits = boundaries.iter().filter(|b| b.contains(p));
        let first = hits.next()?;
        let rest: Vec<String> = hits.map(|b| b.tribe_id.clone()).collect();
        if !rest.is_empty() {
            let mut tribe_ids = alloc::vec![first.tribe_id.clone()];
            tribe_ids.extend(rest);
            diagnostics.push(AssignDiagnostic::OverlappingBoundaries {
                crash_id: record.crash_id.clone(),
                tribe_ids,
            });
        }
        Some(first.tribe_id.clone())
    });

    let crash_id = record.crash_id.clone();
    match (attribute, spatial) {
        (Some(a), Some(s)) if a == s => TribeAssignment {
            crash_id,
            tribe_id: Some(a),
            source: AssignmentSource::BothAgree,
            conflict_detail: None,
        },
        (Some(a), Some(s)) => {
            diagnostics.push(AssignDiagnostic::TribeConflict {
                crash_id: crash_id.clone(),
                attribute: a.clone(),
                spatial: s.clone(),
            });
            TribeAssignment {
                crash_id,
                tribe_id: Some(a.clone()),
                source: AssignmentSource::Conflict,
                conflict_detail: Some((a, s)),
            }
        }
        (Some(a), None) => TribeAssignment {
            crash_id,
            tribe_id: Some(a),
            source: AssignmentSource::Attribute,
            conflict_detail: None,
        },
        (None, Some(s)) => TribeAssignment {
            crash_id,
            tribe_id: Some(s),
            source: AssignmentSource::Spatial,
            conflict_detail: None,
        },
        (None, None) => TribeAssignment {
            crash_id,
            tribe_id: None,
            source: AssignmentSource::Unresolved,
            conflict_detail: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{LonLat, Polygon};
    use crate::record::{CrashDate, CrashRecord};

    fn square(id: &str, x0: f64, y0: f64) -> TribeBoundary {
        TribeBoundary {
            tribe_id: id.into(),
            name: id.into(),
            polygons: vec![Polygon::from_coords(
                &[(x0, y0), (x0 + 1.0, y0), (x0 + 1.0, y0 + 1.0), (x0, y0 + 1.0), (x0, y0)],
                &[],
            )
            .unwrap()],
        }
    }

    fn boundaries() -> Vec<TribeBoundary> {
        vec![square("LCO", 0.0, 0.0), square("ONEIDA", 5.0, 0.0)]
    }

    fn record(code: Option<&str>, at: Option<(f64, f64)>) -> CrashRecord {
        let mut r = CrashRecord::new("c1", CrashDate::new(2019, 1, 1).unwrap());
        r.tribal_code = code.map(Into::into);
        r.location = at.map(|(x, y)| LonLat::new(x, y));
        r
    }

    #[test]
    fn agreement() {
        let a = assign_tribe(&record(Some("LCO"), Some((0.5, 0.5))), &boundaries());
        assert_eq!(a.tribe_id.as_deref(), Some("LCO"));
        assert_eq!(a.source, AssignmentSource::BothAgree);
        assert_eq!(a.conflict_detail, None);
    }

    #[test]
    fn spatial_only() {
        let a = assign_tribe(&record(None, Some((5.5, 0.5))), &boundaries());
        assert_eq!(a.tribe_id.as_deref(), Some("ONEIDA"));
        assert_eq!(a.source, AssignmentSource::Spatial);
    }

    #[test]
    fn attribute_only() {
        let a = assign_tribe(&record(Some("lco"), Some((50.0, 0.5))), &boundaries());
        assert_eq!(a.tribe_id.as_deref(), Some("LCO"));
        assert_eq!(a.source, AssignmentSource::Attribute);
        let a = assign_tribe(&record(Some("LCO"), None), &boundaries());
        assert_eq!(a.source, AssignmentSource::Attribute);
    }

    #[test]
    fn conflict_keeps_attribute() {
        let mut diags = Vec::new();
        let a = assign_tribe_with_diagnostics(&record(Some("LCO"), Some((5.5, 0.5))), &boundaries(), &mut diags);
        assert_eq!(a.tribe_id.as_deref(), Some("LCO"));
        assert_eq!(a.source, AssignmentSource::Conflict);
        assert_eq!(a.conflict_detail, Some(("LCO".into(), "ONEIDA".into())));
        assert!(matches!(diags.as_slice(), [AssignDiagnostic::TribeConflict { .. }]));
    }

    #[test]
    fn unknown_code_is_unresolved_attribute() {
        let mut diags = Vec::new();
        let a = assign_tribe_with_diagnostics(&record(Some("NOPE"), Some((5.5, 0.5))), &boundaries(), &mut diags);
        assert_eq!(a.tribe_id.as_deref(), Some("ONEIDA"));
        assert_eq!(a.source, AssignmentSource::Spatial);
        assert_eq!(
            diags,
            vec![AssignDiagnostic::UnknownTribalCode { crash_id: "c1".into(), code: "NOPE".into() }]
        );
        let a = assign_tribe(&record(Some("  "), None), &boundaries());
        assert_eq!(a.source, AssignmentSource::Unresolved);
        assert_eq!(a.tribe_id, None);
    }

    #[test]
    fn overlapping_boundaries_first_wins() {
        let mut b = boundaries();
        b.push(square("OVERLAP", 0.5, 0.5));
        let mut diags = Vec::new();
        let a = assign_tribe_with_diagnostics(&record(None, Some((0.75, 0.75))), &b, &mut diags);
        assert_eq!(a.tribe_id.as_deref(), Some("LCO"));
        assert_eq!(
            diags,
            vec![AssignDiagnostic::OverlappingBoundaries {
                crash_id: "c1".into(),
                tribe_ids: vec!["LCO".into(), "OVERLAP".into()]
            }]
        );
    }
}
