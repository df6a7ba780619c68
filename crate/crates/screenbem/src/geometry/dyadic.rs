//! Dyadic grid approximations of arbitrary bounded regions: the outer
//! approximation keeps closed cells of side 2^-j meeting the region (nested
//! decreasing in j), the inner one keeps cells whose closure lies inside it
//! (interior of the union, nested increasing).

use super::region::{ConvexPolygon, Interval, RegionCells, RegionKind, ScreenRegion};
use crate::error::{Error, Result};

const COVER_TOL: f64 = 1e-12;

/// Union of closed dyadic cells of side 2^-j meeting the region.
pub fn grid_outer_approx(region: &ScreenRegion, j: u32) -> Result<ScreenRegion> {
    grid_approx(region, j, true)
}

/// Interior of the union of closed dyadic cells contained in the region.
pub fn grid_inner_approx(region: &ScreenRegion, j: u32) -> Result<ScreenRegion> {
    grid_approx(region, j, false)
}

fn grid_approx(region: &ScreenRegion, j: u32, outer: bool) -> Result<ScreenRegion> {
    if j > 26 {
        return Err(Error::InvalidParameter(format!("grid level {j} too fine")));
    }
    let side = 2.0_f64.powi(-(j as i32));
    let (lo, hi) = region.bbox();
    if !lo[0].is_finite() {
        return Err(Error::Geometry("empty region has no grid approximation".into()));
    }
    let kind = if outer { RegionKind::Closed } else { RegionKind::Open };
    match &region.cells {
        RegionCells::Intervals(cells) => {
            let i0 = (lo[0] / side).floor() as i64 - 1;
            let i1 = (hi[0] / side).ceil() as i64 + 1;
            let mut kept = Vec::new();
            for i in i0..i1 {
                let a = i as f64 * side;
                let b = a + side;
                let keep = if outer {
                    cells.iter().any(|c| c.b >= a && c.a <= b)
                } else {
                    let covered: f64 =
                        cells.iter().map(|c| (b.min(c.b) - a.max(c.a)).max(0.0)).sum();
                    covered >= side - COVER_TOL * side.max(1.0)
                };
                if keep {
                    kept.push(Interval { a, b });
                }
            }
            Ok(ScreenRegion::from_cells_unchecked(kind, RegionCells::Intervals(kept)))
        }
        RegionCells::Polygons(cells) => {
            let x0 = (lo[0] / side).floor() as i64 - 1;
            let x1 = (hi[0] / side).ceil() as i64 + 1;
            let y0 = (lo[1] / side).floor() as i64 - 1;
            let y1 = (hi[1] / side).ceil() as i64 + 1;
            let mut kept = Vec::new();
            for ix in x0..x1 {
                for iy in y0..y1 {
                    let clo = [ix as f64 * side, iy as f64 * side];
                    let chi = [clo[0] + side, clo[1] + side];
                    let keep = if outer {
                        cells.iter().any(|c| c.intersects_box(clo, chi))
                    } else {
                        // cells have pairwise disjoint interiors: the covered
                        // area inside the box is the sum of clipped areas
                        let covered: f64 =
                            cells.iter().map(|c| c.clip_box(clo, chi).area()).sum();
                        covered >= side * side * (1.0 - COVER_TOL)
                    };
                    if keep {
                        kept.push(ConvexPolygon::square(clo, side));
                    }
                }
            }
            Ok(ScreenRegion::from_cells_unchecked(kind, RegionCells::Polygons(kept)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::prefractal::cantor_prefractal;

    fn point_region(p: [f64; 2]) -> ScreenRegion {
        // degenerate single-point "region" for the outer-approximation test
        ScreenRegion::from_cells_unchecked(
            RegionKind::Closed,
            RegionCells::Polygons(vec![ConvexPolygon { vertices: vec![p, p, p] }]),
        )
    }

    #[test]
    fn outer_approx_of_point_shrinks_to_zero() {
        let r = point_region([0.375, 0.25]);
        let mut last = f64::INFINITY;
        for j in 2..8 {
            let approx = grid_outer_approx(&r, j).unwrap();
            let count = approx.cell_count();
            assert!((1..=4).contains(&count), "point covered by {count} cells");
            assert!(approx.measure() <= last);
            last = approx.measure();
        }
        assert!(last <= 4.0 * 4.0_f64.powi(-7));
    }

    #[test]
    fn inner_approx_of_unit_square_fills_up() {
        let sq = ScreenRegion::from_polygons(
            RegionKind::Open,
            vec![ConvexPolygon::square([0.0, 0.0], 1.0)],
        )
        .unwrap();
        let mut last = 0.0;
        for j in 1..7 {
            let approx = grid_inner_approx(&sq, j).unwrap();
            let m = approx.measure();
            // exactly the aligned cells: the full square at every level
            assert!((m - 1.0).abs() < 1e-12, "level {j}: measure {m}");
            assert!(m >= last - 1e-12);
            last = m;
        }
        // a shifted square is approximated from inside
        let sq2 = ScreenRegion::from_polygons(
            RegionKind::Open,
            vec![ConvexPolygon::square([0.131, 0.279], 0.5)],
        )
        .unwrap();
        let mut lastm = 0.0;
        for j in 2..9 {
            let m = grid_inner_approx(&sq2, j).unwrap().measure();
            assert!(m <= 0.25 + 1e-12);
            assert!(m >= lastm - 1e-12, "not increasing at level {j}");
            lastm = m;
        }
        assert!(0.25 - lastm < 0.02);
    }

    #[test]
    fn outer_approx_of_cantor_set_interval_cover() {
        // E_{j'} has 2^{j'} intervals of length 3^{-j'}; the dyadic cover at
        // level j has measure <= 2 (2/3)^{j'} + 2^{j'+1} * 2 * 2^{-j}
        let jp = 3u32;
        let intervals = cantor_prefractal(1.0 / 3.0, jp).unwrap();
        let r = ScreenRegion::from_intervals(RegionKind::Closed, intervals).unwrap();
        for j in 6..10 {
            let approx = grid_outer_approx(&r, j).unwrap();
            let slack = 2.0 * 2.0_f64.powi(jp as i32 + 1) * 2.0_f64.powi(-(j as i32));
            assert!(
                approx.measure() <= (2.0f64 / 3.0).powi(jp as i32) + slack,
                "cover too large at level {j}: {}",
                approx.measure()
            );
            // outer approximations cover the region
            assert!(approx.contains_region(&r, 1e-12));
        }
    }

    #[test]
    fn grid_families_are_nested() {
        let tri = ScreenRegion::from_polygons(
            RegionKind::Closed,
            vec![ConvexPolygon::triangle([0.05, 0.1], [0.9, 0.2], [0.4, 0.85])],
        )
        .unwrap();
        for j in 2..6 {
            let outer_j = grid_outer_approx(&tri, j).unwrap();
            let outer_j1 = grid_outer_approx(&tri, j + 1).unwrap();
            assert!(outer_j.contains_region(&outer_j1, 1e-10), "outer not decreasing at {j}");
            let inner_j = grid_inner_approx(&tri, j).unwrap();
            let inner_j1 = grid_inner_approx(&tri, j + 1).unwrap();
            assert!(inner_j1.contains_region(&inner_j, 1e-10), "inner not increasing at {j}");
            // sandwich: inner ⊆ region ⊆ outer
            assert!(tri.contains_region(&inner_j, 1e-10));
            assert!(outer_j.contains_region(&tri, 1e-10));
        }
    }
}
