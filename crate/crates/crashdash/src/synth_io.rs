//! Writes crash records back out in the ingest CSV layout.
//!
//! Output is byte-deterministic: records in order, fixed column order,
//! coordinates with six decimals, `\n` line endings.

use std::fmt::Write as _;

use crashdash_core::CrashRecord;

use crate::ingest::Schema;

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn flag(v: bool) -> &'static str {
    if v {
        "1"
    } else {
        "0"
    }
}

/// Crash file with the schema's column names.
pub fn crash_csv(records: &[CrashRecord], schema: &Schema) -> Vec<u8> {
    let c = &schema.crashes;
    let mut w = writer();
    w.write_record([
        &c.crash_id,
        &c.crash_date,
        &c.longitude,
        &c.latitude,
        &c.crshloc,
        &c.crshjur,
        &c.agcytype,
        &c.trbcode,
        &c.trbname,
        &c.road_functional,
        &c.urban_rural,
        &c.crash_type,
        &c.flag_speeding,
        &c.flag_impaired,
        &c.flag_pedestrian,
        &c.flag_hitrun,
        &c.flag_beltnonuse,
    ])
    .unwrap();
    let mut lon = String::new();
    let mut lat = String::new();
    for r in records {
        lon.clear();
        lat.clear();
        if let Some(p) = r.location {
            write!(lon, "{:.6}", p.lon).unwrap();
            write!(lat, "{:.6}", p.lat).unwrap();
        }
        let f = &r.flags;
        w.write_record([
            r.crash_id.as_str(),
            &r.crash_date.to_string(),
            &lon,
            &lat,
            r.crash_location_class.code(),
            r.jurisdiction.code(),
            r.agency_type.code(),
            r.tribal_code.as_deref().unwrap_or(""),
            r.tribal_name.as_deref().unwrap_or(""),
            r.road_functional.code(),
            r.urban_rural.code(),
            &r.crash_type,
            flag(f.speeding),
            flag(f.impaired),
            flag(f.pedestrian),
            flag(f.hit_and_run),
            flag(f.belt_nonuse),
        ])
        .unwrap();
    }
    w.into_inner().unwrap()
}

/// Person file: one row per person, grouped by crash in record order.
pub fn person_csv(records: &[CrashRecord], schema: &Schema) -> Vec<u8> {
    let p = &schema.persons;
    let mut w = writer();
    w.write_record([&p.crash_id, &p.role, &p.sex, &p.age, &p.injury]).unwrap();
    for r in records {
        for person in &r.persons {
            let age = person.age.map(|a| a.to_string()).unwrap_or_default();
            w.write_record([r.crash_id.as_str(), person.role.code(), person.sex.code(), &age, person.injury.code()])
                .unwrap();
        }
    }
    w.into_inner().unwrap()
}
