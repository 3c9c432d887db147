//! Crash and person CSV parsing.
//!
//! Structural problems with a row (missing crash id, bad coordinates, an
//! unparseable injury code) reject that crash and are listed in the
//! [`IngestReport`]; unreadable input or a missing header aborts the whole
//! ingest. Unrecognised enum cells fall back to the enum's unknown value.

use std::collections::{HashMap, HashSet};
use std::io::Read;

use crashdash_core::{
    AgencyType, CrashDate, CrashLocationClass, CrashRecord, Jurisdiction, LonLat, PersonRecord, PersonRole,
    RoadFunctional, SeverityLevel, Sex, UrbanRural,
};
use crashdash_core::record::MAX_AGE;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Column names of the crash file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrashColumns {
    pub crash_id: String,
    pub crash_date: String,
    pub longitude: String,
    pub latitude: String,
    pub crshloc: String,
    pub crshjur: String,
    pub agcytype: String,
    pub trbcode: String,
    pub trbname: String,
    pub road_functional: String,
    pub urban_rural: String,
    pub crash_type: String,
    pub flag_speeding: String,
    pub flag_impaired: String,
    pub flag_pedestrian: String,
    pub flag_hitrun: String,
    pub flag_beltnonuse: String,
}

impl Default for CrashColumns {
    fn default() -> Self {
        let s = |v: &str| v.to_string();
        Self {
            crash_id: s("crash_id"),
            crash_date: s("crash_date"),
            longitude: s("longitude"),
            latitude: s("latitude"),
            crshloc: s("crshloc"),
            crshjur: s("crshjur"),
            agcytype: s("agcytype"),
            trbcode: s("trbcode"),
            trbname: s("trbname"),
            road_functional: s("road_functional"),
            urban_rural: s("urban_rural"),
            crash_type: s("crash_type"),
            flag_speeding: s("flag_speeding"),
            flag_impaired: s("flag_impaired"),
            flag_pedestrian: s("flag_pedestrian"),
            flag_hitrun: s("flag_hitrun"),
            flag_beltnonuse: s("flag_beltnonuse"),
        }
    }
}

/// Column names of the person file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PersonColumns {
    pub crash_id: String,
    pub role: String,
    pub sex: String,
    pub age: String,
    pub injury: String,
}

impl Default for PersonColumns {
    fn default() -> Self {
        Self {
            crash_id: "crash_id".into(),
            role: "role".into(),
            sex: "sex".into(),
            age: "age".into(),
            injury: "injury".into(),
        }
    }
}

/// Logical field to column-name mapping for both input files.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Schema {
    pub crashes: CrashColumns,
    pub persons: PersonColumns,
}

/// A rejected crash row. `row` counts data rows from 1, header excluded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub row: usize,
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub accepted_count: usize,
    /// At most one entry per crash row: the first violation found.
    pub rejected: Vec<Rejection>,
    /// SHA-256 over both inputs, hex.
    pub source_digest: String,
    pub person_rows: usize,
    /// Person rows (1-based) whose crash id matches no crash row.
    pub orphan_person_rows: Vec<usize>,
}

impl IngestReport {
    pub fn data_rows(&self) -> usize {
        self.accepted_count + self.rejected.len()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{file}: cannot read input: {source}")]
    Unreadable {
        file: &'static str,
        #[source]
        source: csv::Error,
    },
    #[error("{file}: missing header row")]
    MissingHeader { file: &'static str },
    #[error("{file}: required column {column:?} not in header")]
    MissingColumn { file: &'static str, column: String },
}

/// Hex SHA-256 of the inputs, each prefixed by its length so that moving
/// bytes between files changes the digest.
pub fn digest_inputs(parts: &[&[u8]]) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    hex::encode(hasher.finalize())
}

struct Table {
    headers: HashMap<String, usize>,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn read(file: &'static str, bytes: &[u8]) -> Result<Self, IngestError> {
        let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(bytes);
        let header = reader
            .headers()
            .map_err(|source| IngestError::Unreadable { file, source })?
            .clone();
        if header.is_empty() || header.iter().all(|h| h.trim().is_empty()) {
            return Err(IngestError::MissingHeader { file });
        }
        let headers = header.iter().enumerate().map(|(i, h)| (h.trim().to_string(), i)).collect();
        let rows = reader
            .records()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|source| IngestError::Unreadable { file, source })?;
        Ok(Self { headers, rows })
    }

    fn require(&self, file: &'static str, column: &str) -> Result<usize, IngestError> {
        self.headers
            .get(column)
            .copied()
            .ok_or_else(|| IngestError::MissingColumn { file, column: column.into() })
    }

    /// Accessor for an optional column; absent columns read as blank.
    fn column(&self, column: &str) -> Option<usize> {
        self.headers.get(column).copied()
    }
}

fn cell<'a>(row: &'a csv::StringRecord, idx: Option<usize>) -> &'a str {
    idx.and_then(|i| row.get(i)).map_or("", str::trim)
}

fn optional_text(value: &str) -> Option<String> {
    (!value.is_empty()).then(|| value.to_string())
}

fn parse_flag(value: &str) -> Option<bool> {
    match value.to_ascii_lowercase().as_str() {
        "" | "0" | "n" | "no" | "false" => Some(false),
        "1" | "y" | "yes" | "true" => Some(true),
        _ => None,
    }
}

fn parse_coordinate(value: &str, limit: f64) -> Result<f64, String> {
    let v: f64 = value.parse().map_err(|_| format!("not a number: {value:?}"))?;
    if !v.is_finite() || v.abs() > limit {
        return Err(format!("{value} outside [-{limit}, {limit}]"));
    }
    Ok(v)
}

type RowResult<T> = Result<T, (&'static str, String)>;

struct CrashIdx {
    id: usize,
    date: usize,
    lon: Option<usize>,
    lat: Option<usize>,
    crshloc: Option<usize>,
    crshjur: Option<usize>,
    agcytype: Option<usize>,
    trbcode: Option<usize>,
    trbname: Option<usize>,
    road: Option<usize>,
    urban_rural: Option<usize>,
    crash_type: Option<usize>,
    flags: [Option<usize>; 5],
}

const FLAG_FIELDS: [&str; 5] = ["flag_speeding", "flag_impaired", "flag_pedestrian", "flag_hitrun", "flag_beltnonuse"];

fn parse_crash_row(row: &csv::StringRecord, ix: &CrashIdx) -> RowResult<CrashRecord> {
    let id = cell(row, Some(ix.id));
    if id.is_empty() {
        return Err(("crash_id", "empty".into()));
    }
    let date_text = cell(row, Some(ix.date));
    let date = CrashDate::parse_iso(date_text).ok_or(("crash_date", format!("not an ISO date: {date_text:?}")))?;
    let mut record = CrashRecord::new(id, date);

    let (lon, lat) = (cell(row, ix.lon), cell(row, ix.lat));
    record.location = match (lon.is_empty(), lat.is_empty()) {
        (true, true) => None,
        (false, true) => return Err(("latitude", "missing while longitude is set".into())),
        (true, false) => return Err(("longitude", "missing while latitude is set".into())),
        (false, false) => {
            let lon = parse_coordinate(lon, 180.0).map_err(|m| ("longitude", m))?;
            let lat = parse_coordinate(lat, 90.0).map_err(|m| ("latitude", m))?;
            Some(LonLat::new(lon, lat))
        }
    };
    record.crash_location_class = CrashLocationClass::parse_lenient(cell(row, ix.crshloc));
    record.jurisdiction = Jurisdiction::parse_lenient(cell(row, ix.crshjur));
    record.agency_type = AgencyType::parse_lenient(cell(row, ix.agcytype));
    record.tribal_code = optional_text(cell(row, ix.trbcode));
    record.tribal_name = optional_text(cell(row, ix.trbname));
    record.road_functional = RoadFunctional::parse_lenient(cell(row, ix.road));
    record.urban_rural = UrbanRural::parse_lenient(cell(row, ix.urban_rural));
    record.crash_type = cell(row, ix.crash_type).to_string();

    let mut flags = [false; 5];
    for (k, slot) in flags.iter_mut().enumerate() {
        let text = cell(row, ix.flags[k]);
        *slot = parse_flag(text).ok_or((FLAG_FIELDS[k], format!("not a 0/1 flag: {text:?}")))?;
    }
    let f = &mut record.flags;
    [f.speeding, f.impaired, f.pedestrian, f.hit_and_run, f.belt_nonuse] = flags;
    Ok(record)
}

struct PersonIdx {
    id: usize,
    role: Option<usize>,
    sex: Option<usize>,
    age: Option<usize>,
    injury: usize,
}

fn parse_person_row(row: &csv::StringRecord, ix: &PersonIdx, person_row: usize) -> RowResult<PersonRecord> {
    let injury_text = cell(row, Some(ix.injury));
    let injury = SeverityLevel::from_code(injury_text)
        .ok_or_else(|| ("injury", format!("person row {person_row}: not a KABCO code: {injury_text:?}")))?;
    let age_text = cell(row, ix.age);
    let age = if age_text.is_empty() {
        None
    } else {
        match age_text.parse::<u16>() {
            Ok(a) if a <= u16::from(MAX_AGE) => Some(a as u8),
            _ => return Err(("age", format!("person row {person_row}: age {age_text:?} outside [0, {MAX_AGE}]"))),
        }
    };
    Ok(PersonRecord {
        role: PersonRole::parse_lenient(cell(row, ix.role)),
        sex: Sex::parse_lenient(cell(row, ix.sex)),
        age,
        injury,
    })
}

/// Parses a crash file and its person file into validated records.
///
/// Person rows join to crashes by crash id in file order; a bad person
/// row rejects its crash. Accepted records keep crash-file order.
pub fn parse_crash_csv(
    crashes: &[u8],
    persons: &[u8],
    schema: &Schema,
) -> Result<(Vec<CrashRecord>, IngestReport), IngestError> {
    let source_digest = digest_inputs(&[crashes, persons]);
    let crash_table = Table::read("crashes", crashes)?;
    let person_table = Table::read("persons", persons)?;
    let c = &schema.crashes;
    let opt = |name: &str| crash_table.column(name);
    let ix = CrashIdx {
        id: crash_table.require("crashes", &c.crash_id)?,
        date: crash_table.require("crashes", &c.crash_date)?,
        lon: opt(&c.longitude),
        lat: opt(&c.latitude),
        crshloc: opt(&c.crshloc),
        crshjur: opt(&c.crshjur),
        agcytype: opt(&c.agcytype),
        trbcode: opt(&c.trbcode),
        trbname: opt(&c.trbname),
        road: opt(&c.road_functional),
        urban_rural: opt(&c.urban_rural),
        crash_type: opt(&c.crash_type),
        flags: [
            opt(&c.flag_speeding),
            opt(&c.flag_impaired),
            opt(&c.flag_pedestrian),
            opt(&c.flag_hitrun),
            opt(&c.flag_beltnonuse),
        ],
    };
    let p = &schema.persons;
    let pix = PersonIdx {
        id: person_table.require("persons", &p.crash_id)?,
        role: person_table.column(&p.role),
        sex: person_table.column(&p.sex),
        age: person_table.column(&p.age),
        injury: person_table.require("persons", &p.injury)?,
    };

    // Parse crash rows; `slots` maps crash id to the parsed row index.
    let mut parsed: Vec<(usize, RowResult<CrashRecord>)> = Vec::with_capacity(crash_table.rows.len());
    let mut slots: HashMap<String, usize> = HashMap::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (i, row) in crash_table.rows.iter().enumerate() {
        let mut result = parse_crash_row(row, &ix);
        if let Ok(record) = &result {
            if !seen.insert(record.crash_id.clone()) {
                result = Err(("crash_id", format!("duplicate crash_id {:?}", record.crash_id)));
            } else {
                slots.insert(record.crash_id.clone(), parsed.len());
            }
        } else {
            let id = cell(row, Some(ix.id));
            if !id.is_empty() {
                seen.insert(id.to_string());
            }
        }
        parsed.push((i + 1, result));
    }

    let mut orphan_person_rows = Vec::new();
    for (i, row) in person_table.rows.iter().enumerate() {
        let id = cell(row, Some(pix.id));
        let Some(&slot) = slots.get(id) else {
            if !seen.contains(id) {
                orphan_person_rows.push(i + 1);
            }
            continue;
        };
        let entry = &mut parsed[slot].1;
        if let Ok(record) = entry {
            match parse_person_row(row, &pix, i + 1) {
                Ok(person) => record.persons.push(person),
                Err(e) => *entry = Err(e),
            }
        }
    }

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for (row, result) in parsed {
        match result {
            Ok(mut record) => {
                record.refresh_severity();
                records.push(record);
            }
            Err((field, message)) => rejected.push(Rejection { row, field: field.into(), message }),
        }
    }
    let report = IngestReport {
        accepted_count: records.len(),
        rejected,
        source_digest,
        person_rows: person_table.rows.len(),
        orphan_person_rows,
    };
    Ok((records, report))
}

/// Reads both files fully, then parses them.
pub fn parse_crash_files(
    crashes: impl Read,
    persons: impl Read,
    schema: &Schema,
) -> std::io::Result<Result<(Vec<CrashRecord>, IngestReport), IngestError>> {
    let mut c = Vec::new();
    let mut p = Vec::new();
    { crashes }.read_to_end(&mut c)?;
    { persons }.read_to_end(&mut p)?;
    Ok(parse_crash_csv(&c, &p, schema))
}
