//! Hotspot grids as GeoJSON cell polygons and as a flat CSV.

use serde_json::{json, Value};

use crate::query::HotspotReport;

/// FeatureCollection with one Polygon per grid cell, properties
/// `{col, row, count, z, label}`. Grid metadata rides along as foreign
/// members so a consumer can rebuild the grid.
pub fn to_geojson(report: &HotspotReport) -> Value {
    let features: Vec<Value> = match &report.grid {
        None => Vec::new(),
        Some(grid) => report
            .cells
            .iter()
            .map(|c| {
                let b = grid.cell_bounds(c.col, c.row);
                json!({
                    "type": "Feature",
                    "properties": {"col": c.col, "row": c.row, "count": c.count, "z": c.z, "label": c.label},
                    "geometry": {
                        "type": "Polygon",
                        "coordinates": [[
                            [b.min_lon, b.min_lat],
                            [b.max_lon, b.min_lat],
                            [b.max_lon, b.max_lat],
                            [b.min_lon, b.max_lat],
                            [b.min_lon, b.min_lat],
                        ]],
                    },
                })
            })
            .collect(),
    };
    let mut doc = json!({"type": "FeatureCollection", "features": features});
    if let Some(grid) = &report.grid {
        let b = grid.bbox;
        doc["bbox"] = json!([b.min_lon, b.min_lat, b.max_lon, b.max_lat]);
        doc["cell_size"] = json!(grid.cell_size);
        doc["ncols"] = json!(grid.ncols);
        doc["nrows"] = json!(grid.nrows);
        doc["overflow"] = json!(grid.overflow);
    }
    doc["radius"] = json!(report.radius);
    doc["warnings"] = json!(report.warnings);
    doc
}

/// `col,row,lon_center,lat_center,count,z,label`, row-major from the
/// south-west cell. Floats use the shortest round-trip representation.
pub fn to_csv(report: &HotspotReport) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["col", "row", "lon_center", "lat_center", "count", "z", "label"]).unwrap();
    if let Some(grid) = &report.grid {
        for c in &report.cells {
            let center = grid.cell_center(c.col, c.row);
            w.write_record([
                c.col.to_string(),
                c.row.to_string(),
                center.lon.to_string(),
                center.lat.to_string(),
                c.count.to_string(),
                c.z.to_string(),
                c.label.key().to_string(),
            ])
            .unwrap();
        }
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
