//! Grid hotspot detection with the Getis-Ord Gi* statistic.
//!
//! Points are binned onto a regular lon/lat grid; each cell's Gi* z-score
//! uses binary weights over a square (Chebyshev) neighbourhood that
//! includes the cell itself.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{BBox, LonLat};

#[derive(Debug, Clone, PartialEq)]
pub enum HotspotError {
    InvalidCellSize(f64),
    InvalidBBox,
    /// Gi* needs a variance, so at least two cells.
    TooFewCells(usize),
    /// No bbox given and no points to derive one from.
    NoExtent,
}

impl fmt::Display for HotspotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidCellSize(v) => write!(f, "cell size must be positive and finite, got {v}"),
            Self::InvalidBBox => f.write_str("bbox must be finite with min <= max"),
            Self::TooFewCells(n) => write!(f, "grid has {n} cell(s); Gi* needs at least 2"),
            Self::NoExtent => f.write_str("no points and no bbox: grid extent undefined"),
        }
    }
}

impl core::error::Error for HotspotError {}

/// Dense row-major crash counts. Row 0 is the southern edge, column 0 the
/// western edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotspotGrid {
    pub bbox: BBox,
    /// Degrees.
    pub cell_size: f64,
    pub ncols: usize,
    pub nrows: usize,
    pub cells: Vec<u64>,
    /// Points that fell outside `bbox`.
    pub overflow: u64,
}

/// `ceil(span / size)`, snapping ratios within 1e-9 of an integer so that
/// e.g. a span of 1.0 with size 0.1 gives 10 cells, never fewer than one.
fn cells_spanning(span: f64, size: f64) -> usize {
    let ratio = span / size;
    let nearest = libm::round(ratio);
    let n = if libm::fabs(ratio - nearest) <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        libm::ceil(ratio)
    };
    (n as usize).max(1)
}

/// Tolerance, in cells, within which a coordinate counts as lying on a
/// cell edge (so decimal inputs like 0.3 on a 0.1° grid hit the edge).
pub const EDGE_TOLERANCE: f64 = 1e-9;

/// Index of the half-open cell `[min + i·size, min + (i+1)·size)` holding
/// `x`, with the last cell closed.
fn cell_index(x: f64, min: f64, size: f64, n: usize) -> usize {
    let t = libm::floor((x - min) / size + EDGE_TOLERANCE);
    if t < 0.0 {
        0
    } else {
        (t as usize).min(n - 1)
    }
}

impl HotspotGrid {
    /// All-zero grid covering `bbox`.
    pub fn empty(bbox: BBox, cell_size: f64) -> Result<Self, HotspotError> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(HotspotError::InvalidCellSize(cell_size));
        }
        if !bbox.is_valid() {
            return Err(HotspotError::InvalidBBox);
        }
        let ncols = cells_spanning(bbox.width(), cell_size);
        let nrows = cells_spanning(bbox.height(), cell_size);
        Ok(Self { bbox, cell_size, ncols, nrows, cells: alloc::vec![0; ncols * nrows], overflow: 0 })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn count(&self, col: usize, row: usize) -> u64 {
        self.cells[row * self.ncols + col]
    }

    /// `(col, row)` of the cell holding `p`, `None` outside the bbox.
    pub fn locate(&self, p: LonLat) -> Option<(usize, usize)> {
        if !self.bbox.contains(p) {
            return None;
        }
        Some((
            cell_index(p.lon, self.bbox.min_lon, self.cell_size, self.ncols),
            cell_index(p.lat, self.bbox.min_lat, self.cell_size, self.nrows),
        ))
    }

    pub fn add(&mut self, p: LonLat) {
        match self.locate(p) {
            Some((col, row)) => self.cells[row * self.ncols + col] += 1,
            None => self.overflow += 1,
        }
    }

    pub fn binned(&self) -> u64 {
        self.cells.iter().sum()
    }

    /// Cell rectangle in degrees.
    pub fn cell_bounds(&self, col: usize, row: usize) -> BBox {
        let x0 = self.bbox.min_lon + col as f64 * self.cell_size;
        let y0 = self.bbox.min_lat + row as f64 * self.cell_size;
        BBox::new(x0, y0, x0 + self.cell_size, y0 + self.cell_size)
    }

    pub fn cell_center(&self, col: usize, row: usize) -> LonLat {
        let b = self.cell_bounds(col, row);
        LonLat::new((b.min_lon + b.max_lon) / 2.0, (b.min_lat + b.max_lat) / 2.0)
    }
}

pub fn bin_to_grid(points: &[LonLat], bbox: BBox, cell_size: f64) -> Result<HotspotGrid, HotspotError> {
    let mut grid = HotspotGrid::empty(bbox, cell_size)?;
    for p in points {
        grid.add(*p);
    }
    Ok(grid)
}

/// Confidence tier of a Gi* z-score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HotspotLabel {
    Hot99,
    Hot95,
    Hot90,
    Neutral,
    Cold90,
    Cold95,
    Cold99,
}

impl HotspotLabel {
    pub const Z90: f64 = 1.645;
    pub const Z95: f64 = 1.960;
    pub const Z99: f64 = 2.576;

    /// Thresholds are strict outward: `z > 2.576` is hot99, `z = 2.576` is
    /// hot95.
    pub fn from_z(z: f64) -> Self {
        if z > Self::Z99 {
            Self::Hot99
        } else if z > Self::Z95 {
            Self::Hot95
        } else if z > Self::Z90 {
            Self::Hot90
        } else if z < -Self::Z99 {
            Self::Cold99
        } else if z < -Self::Z95 {
            Self::Cold95
        } else if z < -Self::Z90 {
            Self::Cold90
        } else {
            Self::Neutral
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Self::Hot99 => "hot99",
            Self::Hot95 => "hot95",
            Self::Hot90 => "hot90",
            Self::Neutral => "neutral",
            Self::Cold90 => "cold90",
            Self::Cold95 => "cold95",
            Self::Cold99 => "cold99",
        }
    }

    pub fn is_hot(self) -> bool {
        matches!(self, Self::Hot90 | Self::Hot95 | Self::Hot99)
    }

    pub fn is_cold(self) -> bool {
        matches!(self, Self::Cold90 | Self::Cold95 | Self::Cold99)
    }

    /// At least 95 % confidence hot.
    pub fn is_hot95(self) -> bool {
        matches!(self, Self::Hot95 | Self::Hot99)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GiStarCell {
    pub col: usize,
    pub row: usize,
    pub count: u64,
    pub z: f64,
    pub label: HotspotLabel,
}

/// Summed-area table with a zero border: `at(r, c)` is the sum of rows
/// `< r` and columns `< c`.
struct Prefix {
    width: usize,
    sums: Vec<u64>,
}

impl Prefix {
    fn new(grid: &HotspotGrid) -> Self {
        let width = grid.ncols + 1;
        let mut sums = alloc::vec![0u64; width * (grid.nrows + 1)];
        for r in 0..grid.nrows {
            let mut row_sum = 0;
            for c in 0..grid.ncols {
                row_sum += grid.cells[r * grid.ncols + c];
                sums[(r + 1) * width + c + 1] = sums[r * width + c + 1] + row_sum;
            }
        }
        Self { width, sums }
    }

    fn at(&self, r: usize, c: usize) -> u64 {
        self.sums[r * self.width + c]
    }

    /// Sum over rows `r0..r1`, columns `c0..c1`.
    fn window(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> u64 {
        self.at(r1, c1) + self.at(r0, c0) - self.at(r0, c1) - self.at(r1, c0)
    }
}

/// Gi* z-score of every cell, labelled.
///
/// With `n` cells, `x̄` their mean and `S` their population standard
/// deviation, cell `i` with window sum `Σx` over `W` neighbours scores
/// `(Σx − x̄W) / (S·√((nW − W²)/(n − 1)))`. A constant grid, or a window
/// covering the whole grid, scores 0. The numerator and both degeneracy
/// checks are evaluated in exact integer arithmetic.
pub fn gi_star(grid: &HotspotGrid, neighborhood_radius: usize) -> Result<Vec<GiStarCell>, HotspotError> {
    let n = grid.len();
    if n < 2 {
        return Err(HotspotError::TooFewCells(n));
    }
    let n_i = n as i128;
    let total: i128 = grid.cells.iter().map(|&x| x as i128).sum();
    let total_sq: i128 = grid.cells.iter().map(|&x| (x as i128) * (x as i128)).sum();
    // n²·S² = n·Σx² − (Σx)²
    let n2_var = n_i * total_sq - total * total;
    let std_dev = libm::sqrt(n2_var as f64) / n as f64;

    let prefix = Prefix::new(grid);
    let mut out = Vec::with_capacity(n);
    for row in 0..grid.nrows {
        let r0 = row.saturating_sub(neighborhood_radius);
        let r1 = (row + neighborhood_radius + 1).min(grid.nrows);
        for col in 0..grid.ncols {
            let c0 = col.saturating_sub(neighborhood_radius);
            let c1 = (col + neighborhood_radius + 1).min(grid.ncols);
            let weight = ((r1 - r0) * (c1 - c0)) as i128;
            let window = prefix.window(r0, r1, c0, c1) as i128;
            let discriminant = weight * (n_i - weight);
            let z = if n2_var == 0 || discriminant == 0 {
                0.0
            } else {
                // Σx − x̄W = (n·Σx − total·W) / n
                let numerator = (n_i * window - total * weight) as f64 / n as f64;
                let denominator = std_dev * libm::sqrt(discriminant as f64 / (n - 1) as f64);
                numerator / denominator
            };
            out.push(GiStarCell {
                col,
                row,
                count: grid.cells[row * grid.ncols + col],
                z,
                label: HotspotLabel::Neutral,
            });
        }
    }
    Ok(classify_hotspots(out))
}

pub fn classify_hotspots(mut cells: Vec<GiStarCell>) -> Vec<GiStarCell> {
    for cell in &mut cells {
        cell.label = HotspotLabel::from_z(cell.z);
    }
    cells
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HotspotWarning {
    /// The extent collapsed to one cell; every z is reported as 0.
    SingleCell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotspotAnalysis {
    pub grid: HotspotGrid,
    pub cells: Vec<GiStarCell>,
    pub warnings: Vec<HotspotWarning>,
}

/// Bins `points` and scores the grid. Without an explicit `bbox` the
/// extent of the points is used; a single-cell grid is reported with a
/// warning and neutral cells instead of an error.
pub fn analyze(
    points: &[LonLat],
    bbox: Option<BBox>,
    cell_size: f64,
    neighborhood_radius: usize,
) -> Result<HotspotAnalysis, HotspotError> {
    let bbox = bbox.or_else(|| BBox::around(points.iter().copied())).ok_or(HotspotError::NoExtent)?;
    let grid = bin_to_grid(points, bbox, cell_size)?;
    if grid.len() < 2 {
        let cells = (0..grid.len())
            .map(|i| GiStarCell {
                col: i % grid.ncols,
                row: i / grid.ncols,
                count: grid.cells[i],
                z: 0.0,
                label: HotspotLabel::Neutral,
            })
            .collect();
        return Ok(HotspotAnalysis { grid, cells, warnings: alloc::vec![HotspotWarning::SingleCell] });
    }
    let cells = gi_star(&grid, neighborhood_radius)?;
    Ok(HotspotAnalysis { grid, cells, warnings: Vec::new() })
}
