//! Polygon and grid fixtures shared by the geometry and hotspot checks.

use crashdash_core::{BBox, HotspotGrid, Polygon};

pub type Coords = Vec<(f64, f64)>;

pub fn hexagon() -> Coords {
    let mut v: Coords = (0..6)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 3.0;
            (2.0 + 1.5 * t.cos(), 2.0 + 1.5 * t.sin())
        })
        .collect();
    v.push(v[0]);
    v
}

/// Star with 7 spikes: deeply concave.
pub fn star() -> Coords {
    let mut v: Coords = (0..14)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 7.0 + 0.1;
            let r = if k % 2 == 0 { 1.9 } else { 0.6 };
            (2.0 + r * t.cos(), 2.0 + r * t.sin())
        })
        .collect();
    v.push(v[0]);
    v
}

/// Comb: horizontal rays cross many edges.
pub fn comb() -> Coords {
    let mut out = vec![(0.2, 0.2), (3.8, 0.2), (3.8, 3.8)];
    for k in (0..6).rev() {
        let x = 0.4 + k as f64 * 0.6;
        out.extend([(x + 0.25, 3.8), (x + 0.25, 1.0), (x, 1.0), (x, 3.8)]);
    }
    out.push((0.2, 3.8));
    out.push((0.2, 0.2));
    out
}

pub fn fixtures() -> Vec<(&'static str, Coords, Vec<Coords>)> {
    let square_hole = vec![(1.5, 1.5), (2.5, 1.5), (2.5, 2.5), (1.5, 2.5), (1.5, 1.5)];
    vec![
        ("hexagon", hexagon(), vec![]),
        ("hexagon with hole", hexagon(), vec![square_hole]),
        ("star", star(), vec![]),
        ("comb", comb(), vec![]),
    ]
}

pub fn polygon(outer: &[(f64, f64)], holes: &[Coords]) -> Polygon {
    let holes: Vec<&[(f64, f64)]> = holes.iter().map(|h| h.as_slice()).collect();
    Polygon::from_coords(outer, &holes).unwrap()
}

pub fn grid_of(values: &[u64], ncols: usize, nrows: usize) -> HotspotGrid {
    let mut grid = HotspotGrid::empty(BBox::new(0.0, 0.0, ncols as f64, nrows as f64), 1.0).unwrap();
    assert_eq!((grid.ncols, grid.nrows), (ncols, nrows));
    grid.cells.copy_from_slice(values);
    grid
}

pub fn planted_5x5() -> Vec<u64> {
    let mut v = vec![1u64; 25];
    v[12] = 25;
    v[7] = 6;
    v[11] = 5;
    v[13] = 4;
    v[17] = 6;
    v[0] = 0;
    v[24] = 3;
    v
}

