//! Planar geometry in longitude/latitude degree space.
//!
//! Containment uses the even-odd rule with boundary points counted as
//! inside. No geodesic math: at reservation scale the distortion does not
//! change membership.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LonLat {
    pub lon: f64,
    pub lat: f64,
}

impl LonLat {
    pub const fn new(lon: f64, lat: f64) -> Self {
        Self { lon, lat }
    }
}

/// Axis-aligned box, inclusive on every side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
}

impl BBox {
    pub const fn new(min_lon: f64, min_lat: f64, max_lon: f64, max_lat: f64) -> Self {
        Self { min_lon, min_lat, max_lon, max_lat }
    }

    /// Smallest box holding every point; `None` for an empty input.
    pub fn around<I: IntoIterator<Item = LonLat>>(points: I) -> Option<Self> {
        let mut iter = points.into_iter();
        let first = iter.next()?;
        let mut bbox = Self::new(first.lon, first.lat, first.lon, first.lat);
        for p in iter {
            bbox.min_lon = bbox.min_lon.min(p.lon);
            bbox.min_lat = bbox.min_lat.min(p.lat);
            bbox.max_lon = bbox.max_lon.max(p.lon);
            bbox.max_lat = bbox.max_lat.max(p.lat);
        }
        Some(bbox)
    }

    pub fn contains(&self, p: LonLat) -> bool {
        p.lon >= self.min_lon && p.lon <= self.max_lon && p.lat >= self.min_lat && p.lat <= self.max_lat
    }

    pub fn is_valid(&self) -> bool {
        [self.min_lon, self.min_lat, self.max_lon, self.max_lat]
            .iter()
            .all(|v| v.is_finite())
            && self.min_lon <= self.max_lon
            && self.min_lat <= self.max_lat
    }

    pub fn width(&self) -> f64 {
        self.max_lon - self.min_lon
    }

    pub fn height(&self) -> f64 {
        self.max_lat - self.min_lat
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox::new(
            self.min_lon.min(other.min_lon),
            self.min_lat.min(other.min_lat),
            self.max_lon.max(other.max_lon),
            self.max_lat.max(other.max_lat),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    TooFewVertices(usize),
    NotClosed,
    NonFinite,
    ZeroArea,
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewVertices(n) => write!(f, "ring has {n} vertices, need at least 4"),
            Self::NotClosed => f.write_str("ring not closed"),
            Self::NonFinite => f.write_str("ring has a non-finite coordinate"),
            Self::ZeroArea => f.write_str("polygon has zero area"),
        }
    }
}

impl core::error::Error for GeometryError {}

/// Closed ring: at least four vertices, first equal to last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<LonLat>", into = "Vec<LonLat>")]
pub struct Ring(Vec<LonLat>);

impl Ring {
    pub fn new(vertices: Vec<LonLat>) -> Result<Self, GeometryError> {
        if vertices.len() < 4 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if vertices.iter().any(|v| !v.lon.is_finite() || !v.lat.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if vertices.first() != vertices.last() {
            return Err(GeometryError::NotClosed);
        }
        Ok(Self(vertices))
    }

    pub fn vertices(&self) -> &[LonLat] {
        &self.0
    }

    /// Consecutive vertex pairs; the closing edge is the last pair.
    pub fn edges(&self) -> impl Iterator<Item = (LonLat, LonLat)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }

    /// Shoelace signed area (positive for counter-clockwise).
    pub fn signed_area(&self) -> f64 {
        self.edges().map(|(a, b)| a.lon * b.lat - b.lon * a.lat).sum::<f64>() / 2.0
    }

    pub fn bbox(&self) -> BBox {
        // a valid ring always has vertices
        BBox::around(self.0.iter().copied()).unwrap_or(BBox::new(0.0, 0.0, 0.0, 0.0))
    }

    pub fn translated(&self, dlon: f64, dlat: f64) -> Ring {
        Ring(self.0.iter().map(|v| LonLat::new(v.lon + dlon, v.lat + dlat)).collect())
    }

    fn on_boundary(&self, p: LonLat) -> bool {
        self.edges().any(|(a, b)| on_segment(p, a, b))
    }

    /// Even-odd crossing parity of a ray cast towards +lon.
    fn crossings_odd(&self, p: LonLat) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.lat > p.lat) != (b.lat > p.lat) {
                let x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
                if p.lon < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

impl TryFrom<Vec<LonLat>> for Ring {
    type Error = GeometryError;

    fn try_from(value: Vec<LonLat>) -> Result<Self, Self::Error> {
        Ring::new(value)
    }
}

impl From<Ring> for Vec<LonLat> {
    fn from(value: Ring) -> Self {
        value.0
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ring of {} vertices", self.0.len())
    }
}

fn on_segment(p: LonLat, a: LonLat, b: LonLat) -> bool {
    let cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    cross == 0.0
        && p.lon >= a.lon.min(b.lon)
        && p.lon <= a.lon.max(b.lon)
        && p.lat >= a.lat.min(b.lat)
        && p.lat <= a.lat.max(b.lat)
}

/// Outer ring plus zero or more holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub outer: Ring,
    pub holes: Vec<Ring>,
}

impl Polygon {
    pub fn new(outer: Ring, holes: Vec<Ring>) -> Result<Self, GeometryError> {
        if outer.signed_area() == 0.0 || holes.iter().any(|h| h.signed_area() == 0.0) {
            return Err(GeometryError::ZeroArea);
        }
        Ok(Self { outer, holes })
    }

    /// Convenience constructor from raw coordinate pairs.
    pub fn from_coords(outer: &[(f64, f64)], holes: &[&[(f64, f64)]]) -> Result<Self, GeometryError> {
        let ring = |pts: &[(f64, f64)]| Ring::new(pts.iter().map(|&(x, y)| LonLat::new(x, y)).collect());
        let holes = holes.iter().map(|h| ring(h)).collect::<Result<Vec<_>, _>>()?;
        Polygon::new(ring(outer)?, holes)
    }

    pub fn bbox(&self) -> BBox {
        self.outer.bbox()
    }

    pub fn contains(&self, p: LonLat) -> bool {
        point_in_polygon(p, self)
    }

    pub fn translated(&self, dlon: f64, dlat: f64) -> Polygon {
        Polygon {
            outer: self.outer.translated(dlon, dlat),
            holes: self.holes.iter().map(|h| h.translated(dlon, dlat)).collect(),
        }
    }
}

/// Even-odd containment, boundary-inclusive: true iff the point is inside
/// the outer ring and outside every hole, or lies on any ring edge.
pub fn point_in_polygon(p: LonLat, polygon: &Polygon) -> bool {
    if !polygon.outer.bbox().contains(p) {
        return false;
    }
    if polygon.outer.on_boundary(p) || polygon.holes.iter().any(|h| h.on_boundary(p)) {
        return true;
    }
    polygon.outer.crossings_odd(p) && !polygon.holes.iter().any(|h| h.crossings_odd(p))
}

/// Tribal land boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TribeBoundary {
    pub tribe_id: String,
    pub name: String,
    pub polygons: Vec<Polygon>,
}

impl TribeBoundary {
    pub fn contains(&self, p: LonLat) -> bool {
        self.polygons.iter().any(|poly| poly.contains(p))
    }

    pub fn bbox(&self) -> Option<BBox> {
        self.polygons.iter().map(Polygon::bbox).reduce(|a, b| a.union(&b))
    }
}
