//! Point-in-polygon against an independently coded even-odd test.

mod support;

use crashdash_core::synth::calibration::wisconsin_tribes;
use crashdash_core::synth::SynthRng;
use crashdash_core::{point_in_polygon, LonLat};
use proptest::prelude::*;
use support::fixtures::{fixtures, polygon, Coords};
use support::oracle::even_odd;

#[test]
fn agrees_with_even_odd_oracle_on_random_points() {
    let mut rng = SynthRng::new(2024);
    for (name, outer, holes) in fixtures() {
        let poly = polygon(&outer, &holes);
        let mut inside = 0;
        for _ in 0..12_000 {
            let p = (rng.range(-0.5, 4.5), rng.range(-0.5, 4.5));
            let want = even_odd(p, &outer, &holes);
            assert_eq!(point_in_polygon(LonLat::new(p.0, p.1), &poly), want, "{name} at {p:?}");
            inside += want as usize;
        }
        assert!(inside > 500, "{name}: fixture too small to be meaningful");
    }
}

#[test]
fn agrees_with_oracle_on_tribal_shapes() {
    let mut rng = SynthRng::new(7);
    for tribe in wisconsin_tribes() {
        for poly in &tribe.polygons {
            let outer: Coords = poly.outer.vertices().iter().map(|p| (p.lon, p.lat)).collect();
            let holes: Vec<Coords> =
                poly.holes.iter().map(|h| h.vertices().iter().map(|p| (p.lon, p.lat)).collect()).collect();
            let b = poly.bbox();
            for _ in 0..1_000 {
                let p = (rng.range(b.min_lon - 0.1, b.max_lon + 0.1), rng.range(b.min_lat - 0.1, b.max_lat + 0.1));
                assert_eq!(point_in_polygon(LonLat::new(p.0, p.1), poly), even_odd(p, &outer, &holes), "{}", tribe.tribe_id);
            }
        }
    }
}

#[test]
fn boundary_points_count_as_inside() {
    let square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)];
    let hole = vec![(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75), (0.25, 0.25)];
    let poly = polygon(&square, &[hole]);
    for p in [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0), (0.0, 0.0), (1.0, 1.0)] {
        assert!(point_in_polygon(LonLat::new(p.0, p.1), &poly), "outer edge {p:?}");
    }
    for p in [(0.25, 0.5), (0.75, 0.5), (0.5, 0.25), (0.5, 0.75), (0.25, 0.25)] {
        assert!(point_in_polygon(LonLat::new(p.0, p.1), &poly), "hole edge {p:?}");
    }
    assert!(!point_in_polygon(LonLat::new(0.5, 0.5), &poly), "hole interior");
    assert!(!point_in_polygon(LonLat::new(1.0 + 1e-12, 0.5), &poly), "just outside");
    // a ray through a vertex must not double count
    let diamond = [(0.0, 1.0), (1.0, 0.0), (2.0, 1.0), (1.0, 2.0), (0.0, 1.0)];
    let d = polygon(&diamond, &[]);
    assert!(point_in_polygon(LonLat::new(1.0, 1.0), &d));
    assert!(!point_in_polygon(LonLat::new(-1.0, 1.0), &d));
    assert!(!point_in_polygon(LonLat::new(3.0, 1.0), &d));
}

proptest! {
    /// Translation by dyadic offsets is exact in binary floating point, so
    /// membership must carry over unchanged.
    #[test]
    fn translation_preserves_membership(
        px in -64i32..320, py in -64i32..320,
        dx in -4096i32..4096, dy in -4096i32..4096,
        which in 0usize..4,
    ) {
        let (_, outer, holes) = fixtures().swap_remove(which);
        let q = |v: f64| (v * 64.0).round() / 64.0;
        let outer: Coords = outer.iter().map(|&(x, y)| (q(x), q(y))).collect();
        let holes: Vec<Coords> = holes.iter().map(|h| h.iter().map(|&(x, y)| (q(x), q(y))).collect()).collect();
        let poly = polygon(&outer, &holes);
        let p = LonLat::new(px as f64 / 64.0, py as f64 / 64.0);
        let (ox, oy) = (dx as f64 / 8.0, dy as f64 / 8.0);
        let moved = LonLat::new(p.lon + ox, p.lat + oy);
        prop_assert_eq!(point_in_polygon(p, &poly), point_in_polygon(moved, &poly.translated(ox, oy)));
    }
}
