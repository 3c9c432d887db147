//! Crash and person records following the DT4000 / MMUCC element set.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::LonLat;
use crate::severity::{derive_crash_severity, SeverityLevel};

/// Compares two labels ignoring ASCII case and every non-alphanumeric
/// character, so `"Tribal Land"`, `"tribal_land"` and `"TRIBAL-LAND"` match.
pub(crate) fn loose_eq(a: &str, b: &str) -> bool {
    let mut left = a.chars().filter(|c| c.is_alphanumeric());
    let mut right = b.chars().filter(|c| c.is_alphanumeric());
    loop {
        match (left.next(), right.next()) {
            (None, None) => return true,
            (Some(x), Some(y)) if x.eq_ignore_ascii_case(&y) => {}
            _ => return false,
        }
    }
}

macro_rules! coded_enum {
    (
        $(#[$meta:meta])*
        $name:ident, unknown = $unknown:ident {
            $( $variant:ident => $code:literal $(| $alias:literal)* ),+ $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name {
            $( $variant, )+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$( $name::$variant ),+];

            /// Canonical CSV code.
            pub const fn code(self) -> &'static str {
                match self {
                    $( $name::$variant => $code, )+
                }
            }

            /// Lenient parse; blank or unrecognised cells map to the unknown value.
            pub fn parse_lenient(cell: &str) -> Self {
                Self::parse(cell).unwrap_or($name::$unknown)
            }

            /// Strict parse of a code or alias; `None` when unrecognised.
            pub fn parse(cell: &str) -> Option<Self> {
                let cell = cell.trim();
                if cell.is_empty() {
                    return None;
                }
                $(
                    if loose_eq(cell, $code) $(|| loose_eq(cell, $alias))* || loose_eq(cell, stringify!($variant)) {
                        return Some($name::$variant);
                    }
                )+
                None
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.code())
            }
        }
    };
}

coded_enum! {
    /// CRSHLOC: crash classification by location.
    CrashLocationClass, unknown = Unknown {
        PublicProperty => "Public Property",
        PrivateProperty => "Private Property",
        TribalLand => "Tribal Land",
        Unknown => "Unknown",
    }
}

coded_enum! {
    /// CRSHJUR: special jurisdiction.
    Jurisdiction, unknown = Unknown {
        None => "No Special Jurisdiction" | "None",
        CollegeCampus => "College/University Campus" | "College Campus",
        Military => "Military",
        NationalPark => "National Park Service" | "Notional Park Service" | "National Park",
        IndianReservationTrust => "Indian Reservation/Trust" | "Indian Reservation Trust",
        Other => "Other",
        Unknown => "Unknown",
    }
}

coded_enum! {
    /// AGCYTYPE: type of the reporting enforcement agency.
    AgencyType, unknown = Unknown {
        StatePatrol => "State Patrol",
        CountySheriff => "County Sheriff",
        CityPolice => "City Police" | "Police Department",
        Tribal => "Tribal" | "Tribal Police",
        Other => "Other",
        Unknown => "Unknown",
    }
}

coded_enum! {
    /// Roadway functional class of the crash location.
    RoadFunctional, unknown = Unknown {
        Sth => "STH",
        Ush => "USH",
        Ih => "IH",
        Cth => "CTH",
        Local => "LOCAL",
        Other => "OTHER",
        Unknown => "UNKNOWN",
    }
}

coded_enum! {
    UrbanRural, unknown = Unknown {
        Urban => "U",
        Rural => "R",
        Unknown => "UNKNOWN",
    }
}

coded_enum! {
    PersonRole, unknown = Other {
        Driver => "driver" | "D",
        Passenger => "passenger" | "P",
        Pedestrian => "pedestrian" | "PED",
        Other => "other",
    }
}

coded_enum! {
    Sex, unknown = Unknown {
        Female => "F",
        Male => "M",
        Unknown => "U",
    }
}

pub const MAX_AGE: u8 = 120;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonRecord {
    pub role: PersonRole,
    pub sex: Sex,
    /// Years; `None` when not recorded. Known ages lie in `0..=120`.
    pub age: Option<u8>,
    pub injury: SeverityLevel,
}

/// Calendar date of a crash.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CrashDate {
    pub year: i32,
    pub month: u8,
    pub day: u8,
}

impl CrashDate {
    pub fn new(year: i32, month: u8, day: u8) -> Option<Self> {
        if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return None;
        }
        Some(Self { year, month, day })
    }

    /// Parses an ISO 8601 calendar date, `YYYY-MM-DD`.
    pub fn parse_iso(text: &str) -> Option<Self> {
        let text = text.trim();
        let bytes = text.as_bytes();
        if bytes.len() != 10 || bytes[4] != b'-' || bytes[7] != b'-' {
            return None;
        }
        let digits = |range: core::ops::Range<usize>| -> Option<u32> {
            let part = &text[range];
            if !part.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            part.parse().ok()
        };
        let year = digits(0..4)? as i32;
        let month = digits(5..7)? as u8;
        let day = digits(8..10)? as u8;
        Self::new(year, month, day)
    }
}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if (year % 4 == 0 && year % 100 != 0) || year % 400 == 0 => 29,
        2 => 28,
        _ => 0,
    }
}

impl fmt::Display for CrashDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// Key-factor flags ingested as explicit booleans.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KeyFlags {
    pub speeding: bool,
    pub impaired: bool,
    pub pedestrian: bool,
    pub hit_and_run: bool,
    /// Safety-belt non-use was involved.
    pub belt_nonuse: bool,
}

/// The five key factors reported alongside sex and age.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyFactor {
    Speeding,
    Impaired,
    Pedestrian,
    HitAndRun,
    SafetyBelt,
}

impl KeyFactor {
    pub const ALL: [KeyFactor; 5] = [
        Self::Speeding,
        Self::Impaired,
        Self::Pedestrian,
        Self::HitAndRun,
        Self::SafetyBelt,
    ];

    pub const fn label(self) -> &'static str {
        match self {
            Self::Speeding => "Speeding",
            Self::Impaired => "Impaired",
            Self::Pedestrian => "Pedestrian",
            Self::HitAndRun => "Hit & Run",
            Self::SafetyBelt => "Safety Belt",
        }
    }

    /// Query-parameter name.
    pub const fn key(self) -> &'static str {
        match self {
            Self::Speeding => "speeding",
            Self::Impaired => "impaired",
            Self::Pedestrian => "pedestrian",
            Self::HitAndRun => "hit_and_run",
            Self::SafetyBelt => "safety_belt",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        Self::ALL
            .into_iter()
            .find(|f| loose_eq(text, f.key()) || loose_eq(text, f.label()))
            .or_else(|| {
                [("hitrun", Self::HitAndRun), ("beltnonuse", Self::SafetyBelt)]
                    .into_iter()
                    .find(|(alias, _)| loose_eq(text, alias))
                    .map(|(_, f)| f)
            })
    }

    pub fn is_set(self, flags: &KeyFlags) -> bool {
        match self {
            Self::Speeding => flags.speeding,
            Self::Impaired => flags.impaired,
            Self::Pedestrian => flags.pedestrian,
            Self::HitAndRun => flags.hit_and_run,
            Self::SafetyBelt => flags.belt_nonuse,
        }
    }
}

/// One reported crash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrashRecord {
    pub crash_id: String,
    pub crash_date: CrashDate,
    pub location: Option<LonLat>,
    pub crash_location_class: CrashLocationClass,
    pub jurisdiction: Jurisdiction,
    pub agency_type: AgencyType,
    pub tribal_code: Option<String>,
    pub tribal_name: Option<String>,
    pub road_functional: RoadFunctional,
    pub urban_rural: UrbanRural,
    pub crash_type: String,
    pub flags: KeyFlags,
    pub persons: Vec<PersonRecord>,
    /// Always `derive_crash_severity(&persons)`; see [`CrashRecord::refresh_severity`].
    pub severity: SeverityLevel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecordError {
    EmptyCrashId,
    Longitude(f64),
    Latitude(f64),
    Age(u8),
    SeverityMismatch { stored: SeverityLevel, derived: SeverityLevel },
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyCrashId => f.write_str("crash_id is empty"),
            Self::Longitude(v) => write!(f, "longitude {v} outside [-180, 180]"),
            Self::Latitude(v) => write!(f, "latitude {v} outside [-90, 90]"),
            Self::Age(v) => write!(f, "age {v} outside [0, {MAX_AGE}]"),
            Self::SeverityMismatch { stored, derived } => {
                write!(f, "stored severity {stored} differs from person roll-up {derived}")
            }
        }
    }
}

impl core::error::Error for RecordError {}

impl CrashRecord {
    /// A record with every classification unknown, no location and no
    /// persons (severity `O`).
    pub fn new(crash_id: impl Into<String>, crash_date: CrashDate) -> Self {
        Self {
            crash_id: crash_id.into(),
            crash_date,
            location: None,
            crash_location_class: CrashLocationClass::Unknown,
            jurisdiction: Jurisdiction::Unknown,
            agency_type: AgencyType::Unknown,
            tribal_code: None,
            tribal_name: None,
            road_functional: RoadFunctional::Unknown,
            urban_rural: UrbanRural::Unknown,
            crash_type: String::new(),
            flags: KeyFlags::default(),
            persons: Vec::new(),
            severity: SeverityLevel::O,
        }
    }

    /// Appends a person and re-derives the crash severity.
    pub fn push_person(&mut self, person: PersonRecord) {
        self.persons.push(person);
        self.refresh_severity();
    }

    /// Recomputes the crash severity from the person list.
    pub fn refresh_severity(&mut self) {
        self.severity = derive_crash_severity(&self.persons);
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        if self.crash_id.trim().is_empty() {
            return Err(RecordError::EmptyCrashId);
        }
        if let Some(loc) = self.location {
            if !(loc.lon.is_finite() && (-180.0..=180.0).contains(&loc.lon)) {
                return Err(RecordError::Longitude(loc.lon));
            }
            if !(loc.lat.is_finite() && (-90.0..=90.0).contains(&loc.lat)) {
                return Err(RecordError::Latitude(loc.lat));
            }
        }
        if let Some(age) = self.persons.iter().filter_map(|p| p.age).find(|a| *a > MAX_AGE) {
            return Err(RecordError::Age(age));
        }
        let derived = derive_crash_severity(&self.persons);
        if derived != self.severity {
            return Err(RecordError::SeverityMismatch {
                stored: self.severity,
                derived,
            });
        }
        Ok(())
    }

    /// The person whose sex and age represent the crash: the first listed
    /// driver, otherwise the first listed person.
    pub fn primary_person(&self) -> Option<&PersonRecord> {
        self.persons
            .iter()
            .find(|p| p.role == PersonRole::Driver)
            .or_else(|| self.persons.first())
    }

    pub fn year(&self) -> i32 {
        self.crash_date.year
    }
}
