//! Tribal-land boundaries as a GeoJSON FeatureCollection.
//!
//! Each feature is a Polygon or MultiPolygon with string properties
//! `tribe_id` and `name`.

use std::collections::HashSet;
use std::fmt;

use crashdash_core::{GeometryError, LonLat, Polygon, Ring, TribeBoundary};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryError {
    /// Index of the offending feature; `None` for document-level problems.
    pub feature: Option<usize>,
    pub message: String,
}

impl fmt::Display for BoundaryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.feature {
            Some(i) => write!(f, "{}, feature {i}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for BoundaryError {}

fn doc_error(message: impl Into<String>) -> BoundaryError {
    BoundaryError { feature: None, message: message.into() }
}

fn ring(value: &Value) -> Result<Ring, String> {
    let points = value.as_array().ok_or("ring is not an array")?;
    let vertices = points
        .iter()
        .map(|p| match p.as_array().map(Vec::as_slice) {
            Some([lon, lat, ..]) => match (lon.as_f64(), lat.as_f64()) {
                (Some(lon), Some(lat)) => Ok(LonLat::new(lon, lat)),
                _ => Err("position is not numeric".to_string()),
            },
            _ => Err("position needs two coordinates".to_string()),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ring::new(vertices).map_err(|e| e.to_string())
}

fn polygon(value: &Value) -> Result<Polygon, String> {
    let rings = value.as_array().ok_or("polygon is not an array of rings")?;
    let (outer, holes) = rings.split_first().ok_or("polygon has no rings")?;
    let holes = holes.iter().map(ring).collect::<Result<Vec<_>, _>>()?;
    Polygon::new(ring(outer)?, holes).map_err(|e: GeometryError| e.to_string())
}

fn feature(value: &Value) -> Result<TribeBoundary, String> {
    let props = value.get("properties").and_then(Value::as_object).ok_or("missing properties")?;
    let text = |key: &str| {
        props
            .get(key)
            .and_then(Value::as_str)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .ok_or_else(|| format!("missing {key}"))
    };
    let tribe_id = text("tribe_id")?;
    let name = text("name")?;
    let geometry = value.get("geometry").ok_or("missing geometry")?;
    let coords = geometry.get("coordinates").ok_or("geometry has no coordinates")?;
    let polygons = match geometry.get("type").and_then(Value::as_str) {
        Some("Polygon") => vec![polygon(coords)?],
        Some("MultiPolygon") => coords
            .as_array()
            .ok_or("MultiPolygon coordinates are not an array")?
            .iter()
            .map(polygon)
            .collect::<Result<Vec<_>, _>>()?,
        Some(other) => return Err(format!("unsupported geometry type {other}")),
        None => return Err("geometry has no type".into()),
    };
    if polygons.is_empty() {
        return Err("MultiPolygon has no polygons".into());
    }
    Ok(TribeBoundary { tribe_id, name, polygons })
}

/// Parses a FeatureCollection. Any invalid feature fails the whole load.
pub fn load_boundaries(bytes: &[u8]) -> Result<Vec<TribeBoundary>, BoundaryError> {
    let doc: Value = serde_json::from_slice(bytes).map_err(|e| doc_error(format!("malformed GeoJSON: {e}")))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(doc_error("malformed GeoJSON: expected a FeatureCollection"));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| doc_error("malformed GeoJSON: features is not an array"))?;
    let mut ids = HashSet::new();
    let mut out = Vec::with_capacity(features.len());
    for (i, f) in features.iter().enumerate() {
        let boundary = feature(f).map_err(|message| BoundaryError { feature: Some(i), message })?;
        if !ids.insert(boundary.tribe_id.clone()) {
            return Err(BoundaryError { feature: Some(i), message: format!("duplicate tribe_id {}", boundary.tribe_id) });
        }
        out.push(boundary);
    }
    Ok(out)
}

fn ring_coords(ring: &Ring) -> Value {
    Value::Array(ring.vertices().iter().map(|p| json!([p.lon, p.lat])).collect())
}

fn polygon_coords(p: &Polygon) -> Value {
    let mut rings = vec![ring_coords(&p.outer)];
    rings.extend(p.holes.iter().map(ring_coords));
    Value::Array(rings)
}

/// Inverse of [`load_boundaries`]: single polygons become `Polygon`
/// features, several become `MultiPolygon`.
pub fn boundaries_to_geojson(boundaries: &[TribeBoundary]) -> Value {
    let features: Vec<Value> = boundaries
        .iter()
        .map(|b| {
            let geometry = match b.polygons.as_slice() {
                [one] => json!({"type": "Polygon", "coordinates": polygon_coords(one)}),
                many => json!({
                    "type": "MultiPolygon",
                    "coordinates": many.iter().map(polygon_coords).collect::<Vec<_>>(),
                }),
            };
            json!({
                "type": "Feature",
                "properties": {"tribe_id": b.tribe_id, "name": b.name},
                "geometry": geometry,
            })
        })
        .collect();
    json!({"type": "FeatureCollection", "features": features})
}
