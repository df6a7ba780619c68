//! Prefractal screen families: Cantor sets and dusts, the Sierpinski
//! triangle, Koch snowflake interiors, Swiss cheese screens and their solid
//! complements, and dyadic grid approximations of arbitrary regions.

use super::dyadic::{grid_inner_approx, grid_outer_approx};
use super::region::{ConvexPolygon, Interval, RegionCells, RegionKind, ScreenRegion};
use crate::error::{Error, Result};
use crate::specialfn::Ambient;
use serde::{Deserialize, Serialize};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Parameters of the Swiss cheese construction (Ω minus a dense sequence of
/// balls with summable radii), realised on a dyadic grid of level j + margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwissCheeseParams {
    pub dimension: Ambient,
    /// Radius budget: rₘ = 6ε/(πm)² for n=3, rₘ = 2 exp(-π²m²/(6ε)) for n=2.
    pub epsilon: f64,
    /// Grid resolution is 2^-(j + grid_margin).
    pub grid_margin: u32,
}

impl Default for SwissCheeseParams {
    fn default() -> Self {
        SwissCheeseParams { dimension: Ambient::Three, epsilon: 0.5, grid_margin: 4 }
    }
}

/// A recursively generated screen family, indexed by a prefractal level j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PrefractalFamily {
    /// Middle-λ Cantor set on [0,1] (n=2), closed, decreasing in j.
    CantorMiddleLambda { lambda: f64 },
    /// Cartesian square of the middle-λ Cantor set (n=3), closed.
    CantorDust { lambda: f64 },
    /// Standard closed prefractals of the Sierpinski triangle (n=3), j ≥ 1.
    SierpinskiTriangle,
    /// Interior of the j-th Koch snowflake prefractal (n=3), open, j ≥ 1.
    KochSnowflakeInterior,
    /// Closed unit interval/square minus the first j open balls.
    SwissCheese(SwissCheeseParams),
    /// Open unit interval/square minus the level-j Cantor set/dust.
    SolidMinusCantor { lambda: f64, dimension: Ambient },
    /// Open part of the unit square covered by the first j Swiss cheese balls.
    SolidMinusSwissCheese(SwissCheeseParams),
    /// Union of the first j touching circles of decreasing radius (n=3), open.
    IrregularCircles { circle_segments: usize },
    /// Dyadic inner approximation of a base region at grid level j.
    GridInner { base: Box<PrefractalFamily>, base_level: u32 },
    /// Dyadic outer approximation of a base region at grid level j.
    GridOuter { base: Box<PrefractalFamily>, base_level: u32 },
}

impl PrefractalFamily {
    pub fn dimension(&self) -> Ambient {
        match self {
            PrefractalFamily::CantorMiddleLambda { .. } => Ambient::Two,
            PrefractalFamily::CantorDust { .. } => Ambient::Three,
            PrefractalFamily::SierpinskiTriangle => Ambient::Three,
            PrefractalFamily::KochSnowflakeInterior => Ambient::Three,
            PrefractalFamily::SwissCheese(p) => p.dimension,
            PrefractalFamily::SolidMinusCantor { dimension, .. } => *dimension,
            PrefractalFamily::SolidMinusSwissCheese(_) => Ambient::Three,
            PrefractalFamily::IrregularCircles { .. } => Ambient::Three,
            PrefractalFamily::GridInner { base, .. } | PrefractalFamily::GridOuter { base, .. } => {
                base.dimension()
            }
        }
    }

    /// Open families are nested increasing in j, closed nested decreasing.
    pub fn kind(&self) -> RegionKind {
        match self {
            PrefractalFamily::CantorMiddleLambda { .. }
            | PrefractalFamily::CantorDust { .. }
            | PrefractalFamily::SierpinskiTriangle
            | PrefractalFamily::SwissCheese(_)
            | PrefractalFamily::GridOuter { .. } => RegionKind::Closed,
            _ => RegionKind::Open,
        }
    }

    /// Characteristic cell size at level j, used by the mesh-size rules.
    pub fn feature_size(&self, j: u32) -> f64 {
        match self {
            PrefractalFamily::CantorMiddleLambda { lambda }
            | PrefractalFamily::CantorDust { lambda } => {
                let alpha = (1.0 - lambda) / 2.0;
                alpha.powi(j as i32)
            }
            PrefractalFamily::SierpinskiTriangle => 2.0_f64.powi(1 - j.max(1) as i32),
            PrefractalFamily::KochSnowflakeInterior => 3.0_f64.powi(1 - j.max(1) as i32),
            PrefractalFamily::SwissCheese(p) | PrefractalFamily::SolidMinusSwissCheese(p) => {
                2.0_f64.powi(-((j + p.grid_margin) as i32))
            }
            PrefractalFamily::SolidMinusCantor { lambda, .. } => {
                let alpha = (1.0 - lambda) / 2.0;
                if j == 0 {
                    1.0
                } else {
                    lambda * alpha.powi(j as i32 - 1)
                }
            }
            PrefractalFamily::IrregularCircles { .. } => {
                let jf = j.max(1) as f64;
                1.0 / (2.0 * jf * (jf + 1.0))
            }
            PrefractalFamily::GridInner { .. } | PrefractalFamily::GridOuter { .. } => {
                2.0_f64.powi(-(j as i32))
            }
        }
    }

    /// Builds the level-j region of the family.
    pub fn region(&self, j: u32) -> Result<ScreenRegion> {
        match self {
            PrefractalFamily::CantorMiddleLambda { lambda } => {
                ScreenRegion::from_intervals(RegionKind::Closed, cantor_prefractal(*lambda, j)?)
            }
            PrefractalFamily::CantorDust { lambda } => ScreenRegion::from_polygons(
                RegionKind::Closed,
                cantor_dust_prefractal(*lambda, j)?,
            ),
            PrefractalFamily::SierpinskiTriangle => {
                ScreenRegion::from_polygons(RegionKind::Closed, sierpinski_prefractal(j)?)
            }
            PrefractalFamily::KochSnowflakeInterior => koch_prefractal(j),
            PrefractalFamily::SwissCheese(p) => swiss_cheese_prefractal(j, p),
            PrefractalFamily::SolidMinusCantor { lambda, dimension } => {
                solid_minus_cantor(*lambda, j, *dimension)
            }
            PrefractalFamily::SolidMinusSwissCheese(p) => solid_minus_swiss_cheese(j, p),
            PrefractalFamily::IrregularCircles { circle_segments } => {
                irregular_circles(j, *circle_segments)
            }
            PrefractalFamily::GridInner { base, base_level } => {
                grid_inner_approx(&base.region(*base_level)?, j)
            }
            PrefractalFamily::GridOuter { base, base_level } => {
                grid_outer_approx(&base.region(*base_level)?, j)
            }
        }
    }
}

fn check_lambda(lambda: f64) -> Result<f64> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok((1.0 - lambda) / 2.0)
    } else {
        Err(Error::InvalidParameter(format!(
            "Cantor middle fraction must lie in (0,1), got {lambda}"
        )))
    }
}

/// Level-j middle-λ Cantor prefractal: 2^j closed intervals of length α^j,
/// α = (1-λ)/2, starting from [0,1].
pub fn cantor_prefractal(lambda: f64, j: u32) -> Result<Vec<Interval>> {
    let alpha = check_lambda(lambda)?;
    let mut intervals = vec![Interval { a: 0.0, b: 1.0 }];
    for _ in 0..j {
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for iv in &intervals {
            let len = iv.len();
            next.push(Interval { a: iv.a, b: iv.a + alpha * len });
            next.push(Interval { a: iv.b - alpha * len, b: iv.b });
        }
        intervals = next;
    }
    Ok(intervals)
}

/// Level-j Cantor dust: Cartesian product E_j × E_j, 4^j squares of side α^j.
pub fn cantor_dust_prefractal(lambda: f64, j: u32) -> Result<Vec<ConvexPolygon>> {
    let intervals = cantor_prefractal(lambda, j)?;
    let mut squares = Vec::with_capacity(intervals.len() * intervals.len());
    for ix in &intervals {
        for iy in &intervals {
            squares.push(ConvexPolygon::rect([ix.a, iy.a], ix.len(), iy.len()));
        }
    }
    Ok(squares)
}

/// Level-j Sierpinski prefractal (j ≥ 1): 3^{j-1} closed equilateral
/// triangles of side 2^{1-j}; level 1 is the unit triangle with lower-left
/// vertex at the origin.
pub fn sierpinski_prefractal(j: u32) -> Result<Vec<ConvexPolygon>> {
    if j < 1 {
        return Err(Error::InvalidParameter(
            "Sierpinski prefractal level must be at least 1".into(),
        ));
    }
    let mut tris = vec![[[0.0, 0.0], [1.0, 0.0], [0.5, 0.5 * SQRT3]]];
    for _ in 1..j {
        let mut next = Vec::with_capacity(tris.len() * 3);
        for t in &tris {
            let m01 = mid(t[0], t[1]);
            let m12 = mid(t[1], t[2]);
            let m20 = mid(t[2], t[0]);
            next.push([t[0], m01, m20]);
            next.push([m01, t[1], m12]);
            next.push([m20, m12, t[2]]);
        }
        tris = next;
    }
    Ok(tris
        .into_iter()
        .map(|t| ConvexPolygon::triangle(t[0], t[1], t[2]))
        .collect())
}

fn mid(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

/// Interior of the j-th Koch snowflake prefractal (j ≥ 1), triangulated by
/// construction: the unit triangle plus the bump triangles added per step.
/// The boundary polygon has 3·4^{j-1} edges.
pub fn koch_prefractal(j: u32) -> Result<ScreenRegion> {
    if j < 1 {
        return Err(Error::InvalidParameter(
            "Koch prefractal level must be at least 1".into(),
        ));
    }
    let base = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.5 * SQRT3]];
    let mut boundary: Vec<[f64; 2]> = base.to_vec(); // CCW
    let mut cells = vec![ConvexPolygon::triangle(base[0], base[1], base[2])];
    for _ in 1..j {
        let n = boundary.len();
        let mut next = Vec::with_capacity(4 * n);
        for i in 0..n {
            let p = boundary[i];
            let q = boundary[(i + 1) % n];
            let e = [q[0] - p[0], q[1] - p[1]];
            let a = [p[0] + e[0] / 3.0, p[1] + e[1] / 3.0];
            let b = [p[0] + 2.0 * e[0] / 3.0, p[1] + 2.0 * e[1] / 3.0];
            // outward apex: for a CCW polygon the outside is to the right of p->q
            let m = mid(a, b);
            let out = [e[1], -e[0]];
            let norm = (out[0] * out[0] + out[1] * out[1]).sqrt();
            // apex of the equilateral bump on [a, b]: (sqrt3/2)·|ab|, |ab| = |e|/3
            let apex_dist = SQRT3 * norm / 6.0;
            let c = [m[0] + out[0] / norm * apex_dist, m[1] + out[1] / norm * apex_dist];
            cells.push(ConvexPolygon::triangle(a, b, c));
            next.push(p);
            next.push(a);
            next.push(c);
            next.push(b);
        }
        boundary = next;
    }
    ScreenRegion::from_polygons(RegionKind::Open, cells)
}

/// Dense dyadic enumeration of the open unit interval (n=2) or square (n=3).
pub fn dyadic_centers(dimension: Ambient, count: usize) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(count);
    let mut level = 1u32;
    while out.len() < count {
        let denom = 1u64 << level;
        match dimension {
            Ambient::Two => {
                for a in (1..denom).step_by(2) {
                    out.push([a as f64 / denom as f64, 0.0]);
                    if out.len() == count {
                        return out;
                    }
                }
            }
            Ambient::Three => {
                for a in 1..denom {
                    for b in 1..denom {
                        if a % 2 == 1 || b % 2 == 1 {
                            out.push([a as f64 / denom as f64, b as f64 / denom as f64]);
                            if out.len() == count {
                                return out;
                            }
                        }
                    }
                }
            }
        }
        level += 1;
    }
    out
}

/// Ball radii of the Swiss cheese construction.
pub fn swiss_cheese_radius(dimension: Ambient, epsilon: f64, m: usize) -> f64 {
    let mf = m as f64;
    match dimension {
        Ambient::Three => 6.0 * epsilon / (std::f64::consts::PI * mf).powi(2),
        Ambient::Two => 2.0 * (-std::f64::consts::PI.powi(2) * mf * mf / (6.0 * epsilon)).exp(),
    }
}

/// F_j = Ω̄ minus the first j open balls, realised as the dyadic cells of
/// resolution 2^-(j + margin) not contained in any single ball (an outer
/// approximation of F_j, nested decreasing in j).
pub fn swiss_cheese_prefractal(j: u32, params: &SwissCheeseParams) -> Result<ScreenRegion> {
    if !(params.epsilon > 0.0) {
        return Err(Error::InvalidParameter("Swiss cheese epsilon must be positive".into()));
    }
    if j == 0 {
        return match params.dimension {
            Ambient::Two => {
                ScreenRegion::from_intervals(RegionKind::Closed, vec![Interval { a: 0.0, b: 1.0 }])
            }
            Ambient::Three => ScreenRegion::from_polygons(
                RegionKind::Closed,
                vec![ConvexPolygon::square([0.0, 0.0], 1.0)],
            ),
        };
    }
    let cells = swiss_cheese_cells(j, params, false)?;
    if cells.0.is_empty() && cells.1.is_empty() {
        return Err(Error::Geometry(
            "Swiss cheese radii removed the whole region at this level".into(),
        ));
    }
    finish_swiss(params.dimension, RegionKind::Closed, cells)
}

/// Γ_j = Γ₀ ∩ (first j balls): the exact grid complement of the Swiss cheese
/// prefractal, nested increasing in j.
pub fn solid_minus_swiss_cheese(j: u32, params: &SwissCheeseParams) -> Result<ScreenRegion> {
    if params.dimension != Ambient::Three {
        return Err(Error::InvalidParameter(
            "solid-minus-Swiss-cheese is a planar (n=3) construction".into(),
        ));
    }
    if j == 0 {
        return Err(Error::Geometry("no balls removed at level 0: empty region".into()));
    }
    let cells = swiss_cheese_cells(j, params, true)?;
    if cells.1.is_empty() {
        return Err(Error::Geometry(
            "no grid cell is covered by a ball at this level; raise epsilon or the level".into(),
        ));
    }
    finish_swiss(params.dimension, RegionKind::Open, cells)
}

type SwissCells = (Vec<Interval>, Vec<ConvexPolygon>);

fn finish_swiss(dim: Ambient, kind: RegionKind, cells: SwissCells) -> Result<ScreenRegion> {
    match dim {
        Ambient::Two => ScreenRegion::from_intervals(kind, cells.0),
        Ambient::Three => ScreenRegion::from_polygons(kind, cells.1),
    }
}

/// Grid cells of Ω̄ classified against the first j balls. `inside_balls`
/// selects the complement (cells contained in a single ball).
fn swiss_cheese_cells(j: u32, params: &SwissCheeseParams, inside_balls: bool) -> Result<SwissCells> {
    let level = j + params.grid_margin;
    if level > 14 {
        return Err(Error::InvalidParameter(format!(
            "Swiss cheese grid level {level} too fine (limit 14)"
        )));
    }
    let n_cells = 1usize << level;
    let side = 1.0 / n_cells as f64;
    let centers = dyadic_centers(params.dimension, j as usize);
    let radii: Vec<f64> = (1..=j as usize)
        .map(|m| swiss_cheese_radius(params.dimension, params.epsilon, m))
        .collect();
    let mut intervals = Vec::new();
    let mut polys = Vec::new();
    match params.dimension {
        Ambient::Two => {
            for i in 0..n_cells {
                let a = i as f64 * side;
                let b = a + side;
                let inside = centers.iter().zip(&radii).any(|(c, &r)| {
                    (a - c[0]).abs() < r && (b - c[0]).abs() < r
                });
                if inside == inside_balls {
                    intervals.push(Interval { a, b });
                }
            }
        }
        Ambient::Three => {
            for ix in 0..n_cells {
                for iy in 0..n_cells {
                    let lo = [ix as f64 * side, iy as f64 * side];
                    let corners = [
                        lo,
                        [lo[0] + side, lo[1]],
                        [lo[0], lo[1] + side],
                        [lo[0] + side, lo[1] + side],
                    ];
                    let inside = centers.iter().zip(&radii).any(|(c, &r)| {
                        corners.iter().all(|p| {
                            (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) < r * r
                        })
                    });
                    if inside == inside_balls {
                        polys.push(ConvexPolygon::square(lo, side));
                    }
                }
            }
        }
    }
    Ok((intervals, polys))
}

/// Γ₀ \ C_j: the open unit interval (n=2) or square (n=3) minus the level-j
/// Cantor prefractal; a union of gap intervals or gap rectangles.
pub fn solid_minus_cantor(lambda: f64, j: u32, dimension: Ambient) -> Result<ScreenRegion> {
    let intervals = cantor_prefractal(lambda, j)?;
    // complement gaps of E_j within [0,1]
    let mut gaps = Vec::new();
    for w in intervals.windows(2) {
        if w[1].a > w[0].b {
            gaps.push(Interval { a: w[0].b, b: w[1].a });
        }
    }
    match dimension {
        Ambient::Two => {
            if gaps.is_empty() {
                return Err(Error::Geometry(
                    "level 0 has no holes: solid-minus-Cantor region is empty".into(),
                ));
            }
            ScreenRegion::from_intervals(RegionKind::Open, gaps)
        }
        Ambient::Three => {
            if gaps.is_empty() {
                return Err(Error::Geometry(
                    "level 0 has no holes: solid-minus-Cantor region is empty".into(),
                ));
            }
            // [0,1]^2 \ (E_j x E_j) = gaps x [0,1]  ∪  E_j x gaps
            let mut cells = Vec::new();
            for g in &gaps {
                cells.push(ConvexPolygon::rect([g.a, 0.0], g.len(), 1.0));
            }
            for e in &intervals {
                for g in &gaps {
                    cells.push(ConvexPolygon::rect([e.a, g.a], e.len(), g.len()));
                }
            }
            ScreenRegion::from_polygons(RegionKind::Open, cells)
        }
    }
}

/// Union of the first j circles B_{r_m}(x_m) with s_m = (2m+1)/(2m(m+1)),
/// r_m = 1/(2m(m+1)), x_m = (s_m, 0); circles touch at the points 1/(m+1).
/// Each circle is realised as an inscribed regular polygon (fan-triangulated)
/// whose vertex set contains the two touch points.
pub fn irregular_circles(j: u32, circle_segments: usize) -> Result<ScreenRegion> {
    if j < 1 {
        return Err(Error::InvalidParameter("at least one circle required".into()));
    }
    if circle_segments < 8 || circle_segments % 2 != 0 {
        return Err(Error::InvalidParameter(
            "circle_segments must be even and at least 8".into(),
        ));
    }
    let mut cells = Vec::new();
    for m in 1..=j as usize {
        let mf = m as f64;
        let s = (2.0 * mf + 1.0) / (2.0 * mf * (mf + 1.0));
        let r = 1.0 / (2.0 * mf * (mf + 1.0));
        let center = [s, 0.0];
        let mut ring: Vec<[f64; 2]> = (0..circle_segments)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / circle_segments as f64;
                [s + r * th.cos(), r * th.sin()]
            })
            .collect();
        // pin the touch points exactly
        ring[0] = [s + r, 0.0];
        ring[circle_segments / 2] = [s - r, 0.0];
        for i in 0..circle_segments {
            let a = ring[i];
            let b = ring[(i + 1) % circle_segments];
            cells.push(ConvexPolygon::triangle(center, a, b));
        }
    }
    ScreenRegion::from_polygons(RegionKind::Open, cells)
}

/// Convenience: the closed unit interval (n=2) or unit square (n=3) screen.
pub fn unit_screen(dimension: Ambient) -> ScreenRegion {
    match dimension {
        Ambient::Two => ScreenRegion {
            cells: RegionCells::Intervals(vec![Interval { a: 0.0, b: 1.0 }]),
            kind: RegionKind::Closed,
        },
        Ambient::Three => ScreenRegion {
            cells: RegionCells::Polygons(vec![ConvexPolygon::square([0.0, 0.0], 1.0)]),
            kind: RegionKind::Closed,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_base_cases() {
        let e0 = cantor_prefractal(1.0 / 3.0, 0).unwrap();
        assert_eq!(e0.len(), 1);
        assert_eq!((e0[0].a, e0[0].b), (0.0, 1.0));
        let e1 = cantor_prefractal(1.0 / 3.0, 1).unwrap();
        assert_eq!(e1.len(), 2);
        assert!((e1[0].b - 1.0 / 3.0).abs() < 1e-15);
        assert!((e1[1].a - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cantor_half_level_two() {
        // lambda = 1/2, alpha = 1/4: {[0,1/16],[3/16,1/4],[3/4,13/16],[15/16,1]}
        let e2 = cantor_prefractal(0.5, 2).unwrap();
        let want = [(0.0, 1.0 / 16.0), (3.0 / 16.0, 0.25), (0.75, 13.0 / 16.0), (15.0 / 16.0, 1.0)];
        assert_eq!(e2.len(), 4);
        for (iv, &(a, b)) in e2.iter().zip(&want) {
            assert!((iv.a - a).abs() < 1e-15 && (iv.b - b).abs() < 1e-15);
        }
    }

    #[test]
    fn cantor_measure_recursion() {
        for &(lambda, j) in &[(1.0 / 3.0, 5u32), (0.5, 4), (0.2, 6)] {
            let alpha = (1.0 - lambda) / 2.0;
            let total: f64 = cantor_prefractal(lambda, j).unwrap().iter().map(|i| i.len()).sum();
            assert!((total - (2.0 * alpha).powi(j as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn cantor_rejects_bad_lambda() {
        assert!(cantor_prefractal(0.0, 1).is_err());
        assert!(cantor_prefractal(1.0, 1).is_err());
        assert!(cantor_prefractal(-0.5, 1).is_err());
    }

    #[test]
    fn dust_level_counts_and_measure() {
        let d0 = cantor_dust_prefractal(1.0 / 3.0, 0).unwrap();
        assert_eq!(d0.len(), 1);
        assert!((d0[0].area() - 1.0).abs() < 1e-15);
        let d1 = cantor_dust_prefractal(1.0 / 3.0, 1).unwrap();
        assert_eq!(d1.len(), 4);
        for sq in &d1 {
            assert!((sq.area() - 1.0 / 9.0).abs() < 1e-15);
        }
        // product structure at level 2, lambda = 1/2
        let d2 = cantor_dust_prefractal(0.5, 2).unwrap();
        assert_eq!(d2.len(), 16);
        let alpha: f64 = 0.25;
        let total: f64 = d2.iter().map(|p| p.area()).sum();
        assert!((total - (2.0 * alpha).powi(4)).abs() < 1e-12);
    }

    #[test]
    fn sierpinski_counts_and_area() {
        assert!(sierpinski_prefractal(0).is_err());
        let s1 = sierpinski_prefractal(1).unwrap();
        assert_eq!(s1.len(), 1);
        let area1: f64 = s1.iter().map(|p| p.area()).sum();
        assert!((area1 - SQRT3 / 4.0).abs() < 1e-15);
        for j in 2..=4u32 {
            let sj = sierpinski_prefractal(j).unwrap();
            assert_eq!(sj.len(), 3usize.pow(j - 1));
            let area: f64 = sj.iter().map(|p| p.area()).sum();
            assert!(
                (area - area1 * 0.75f64.powi(j as i32 - 1)).abs() < 1e-12,
                "area recursion at level {j}"
            );
        }
    }

    #[test]
    fn koch_edge_counts_and_area_series() {
        assert!(koch_prefractal(0).is_err());
        let area1 = SQRT3 / 4.0;
        for j in 1..=4u32 {
            let r = koch_prefractal(j).unwrap();
            // area(j) = area1 * (1 + 1/3 * sum_{i=0}^{j-2} (4/9)^i)
            let mut want = area1;
            for i in 0..j.saturating_sub(1) {
                want += area1 / 3.0 * (4.0f64 / 9.0).powi(i as i32);
            }
            assert!(
                (r.measure() - want).abs() < 1e-12,
                "area at level {j}: {} vs {want}",
                r.measure()
            );
            // cells: 1 + 3 + 12 + ... = 1 + 3 sum 4^i
            let mut cells = 1usize;
            for i in 0..j.saturating_sub(1) {
                cells += 3 * 4usize.pow(i);
            }
            assert_eq!(r.cell_count(), cells);
        }
    }

    #[test]
    fn swiss_cheese_levels() {
        let params = SwissCheeseParams::default();
        let f0 = swiss_cheese_prefractal(0, &params).unwrap();
        assert!((f0.measure() - 1.0).abs() < 1e-15);
        let f1 = swiss_cheese_prefractal(1, &params).unwrap();
        // outer approximation: measure >= exact = 1 - pi r1^2 (ball inside)
        let r1 = swiss_cheese_radius(Ambient::Three, params.epsilon, 1);
        assert!(f1.measure() >= 1.0 - std::f64::consts::PI * r1 * r1 - 1e-12);
        // refinement converges to the exact measure from above
        let exact = 1.0 - std::f64::consts::PI * r1 * r1;
        let mut last = f64::INFINITY;
        for margin in [2u32, 4, 6, 8] {
            let p = SwissCheeseParams { grid_margin: margin, ..params };
            let m = swiss_cheese_prefractal(1, &p).unwrap().measure();
            assert!(m >= exact - 1e-12);
            assert!(m <= last + 1e-15);
            last = m;
        }
        assert!(last - exact < 0.02, "grid measure {last} should approach {exact}");
    }

    #[test]
    fn swiss_cheese_nested_decreasing() {
        let params = SwissCheeseParams::default();
        let mut prev: Option<ScreenRegion> = None;
        for j in 1..=3u32 {
            let r = swiss_cheese_prefractal(j, &params).unwrap();
            if let Some(p) = &prev {
                assert!(p.contains_region(&r, 1e-10), "level {j} not nested");
            }
            prev = Some(r);
        }
    }

    #[test]
    fn solid_minus_cantor_structure() {
        let r = solid_minus_cantor(1.0 / 3.0, 1, Ambient::Two).unwrap();
        assert_eq!(r.cell_count(), 1); // single middle gap
        assert!((r.measure() - 1.0 / 3.0).abs() < 1e-15);
        let r2 = solid_minus_cantor(1.0 / 3.0, 2, Ambient::Two).unwrap();
        assert_eq!(r2.cell_count(), 3);
        // square version: measure = 1 - (2 alpha)^{2j}
        let r3 = solid_minus_cantor(1.0 / 3.0, 2, Ambient::Three).unwrap();
        assert!((r3.measure() - (1.0 - (2.0f64 / 3.0).powi(4))).abs() < 1e-12);
        assert!(solid_minus_cantor(1.0 / 3.0, 0, Ambient::Two).is_err());
    }

    #[test]
    fn solid_minus_cheese_complements_cheese() {
        let params = SwissCheeseParams::default();
        for j in 1..=2u32 {
            let cheese = swiss_cheese_prefractal(j, &params).unwrap();
            let holes = solid_minus_swiss_cheese(j, &params).unwrap();
            assert!((cheese.measure() + holes.measure() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn irregular_circles_touch_points() {
        let r = irregular_circles(3, 24).unwrap();
        // total area ~ sum of inscribed 24-gon areas
        let mut want = 0.0;
        for m in 1..=3 {
            let mf = m as f64;
            let rad = 1.0 / (2.0 * mf * (mf + 1.0));
            want += 0.5 * 24.0 * rad * rad * (2.0 * std::f64::consts::PI / 24.0).sin();
        }
        assert!((r.measure() - want).abs() < 1e-12);
        assert!(irregular_circles(0, 24).is_err());
    }

    #[test]
    fn open_families_nested_increasing() {
        for j in 1..=3u32 {
            let a = koch_prefractal(j).unwrap();
            let b = koch_prefractal(j + 1).unwrap();
            assert!(b.contains_region(&a, 1e-10), "koch level {j} not nested");
        }
        for j in 1..=3u32 {
            let a = solid_minus_cantor(1.0 / 3.0, j, Ambient::Two).unwrap();
            let b = solid_minus_cantor(1.0 / 3.0, j + 1, Ambient::Two).unwrap();
            assert!(b.contains_region(&a, 1e-12));
        }
    }

    #[test]
    fn closed_families_nested_decreasing() {
        for j in 0..=3u32 {
            let a = PrefractalFamily::CantorDust { lambda: 1.0 / 3.0 }.region(j).unwrap();
            let b = PrefractalFamily::CantorDust { lambda: 1.0 / 3.0 }.region(j + 1).unwrap();
            assert!(a.contains_region(&b, 1e-12));
        }
        for j in 1..=3u32 {
            let a = PrefractalFamily::SierpinskiTriangle.region(j).unwrap();
            let b = PrefractalFamily::SierpinskiTriangle.region(j + 1).unwrap();
            assert!(a.contains_region(&b, 1e-12));
        }
    }
}
