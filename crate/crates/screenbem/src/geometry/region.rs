//! Screen regions: unions of cells (intervals on the screen line for n=2,
//! convex polygons in the screen plane for n=3) with disjoint interiors.

use crate::error::{Error, Result};
use crate::specialfn::Ambient;
use serde::{Deserialize, Serialize};

/// Which limiting-geometry convention the region represents: open regions are
/// approximated from inside (increasing), closed from outside (decreasing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Open,
    Closed,
}

/// Closed interval [a, b] on the screen line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.b - self.a
    }
}

/// Convex polygon in the screen plane, vertices in counter-clockwise order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    pub vertices: Vec<[f64; 2]>,
}

impl ConvexPolygon {
    pub fn triangle(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Self {
        let mut p = ConvexPolygon { vertices: vec![a, b, c] };
        p.ensure_ccw();
        p
    }

    pub fn square(corner: [f64; 2], side: f64) -> Self {
        ConvexPolygon {
            vertices: vec![
                corner,
                [corner[0] + side, corner[1]],
                [corner[0] + side, corner[1] + side],
                [corner[0], corner[1] + side],
            ],
        }
    }

    pub fn rect(corner: [f64; 2], w: f64, h: f64) -> Self {
        ConvexPolygon {
            vertices: vec![
                corner,
                [corner[0] + w, corner[1]],
                [corner[0] + w, corner[1] + h],
                [corner[0], corner[1] + h],
            ],
        }
    }

    pub fn signed_area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let mut s = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            s += v[i][0] * v[j][1] - v[j][0] * v[i][1];
        }
        0.5 * s
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn ensure_ccw(&mut self) {
        if self.signed_area() < 0.0 {
            self.vertices.reverse();
        }
    }

    pub fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for c in 0..2 {
                lo[c] = lo[c].min(v[c]);
                hi[c] = hi[c].max(v[c]);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                d = d.max(((v[i][0] - v[j][0]).powi(2) + (v[i][1] - v[j][1]).powi(2)).sqrt());
            }
        }
        d
    }

    /// Clip by the half-plane n·x <= c (Sutherland–Hodgman step).
    pub fn clip_halfplane(&self, n: [f64; 2], c: f64) -> ConvexPolygon {
        let v = &self.vertices;
        let mut out = Vec::new();
        let m = v.len();
        for i in 0..m {
            let cur = v[i];
            let nxt = v[(i + 1) % m];
            let dc = n[0] * cur[0] + n[1] * cur[1] - c;
            let dn = n[0] * nxt[0] + n[1] * nxt[1] - c;
            if dc <= 0.0 {
                out.push(cur);
            }
            if (dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0) {
                let t = dc / (dc - dn);
                out.push([cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])]);
            }
        }
        ConvexPolygon { vertices: out }
    }

    /// Intersection with an axis-aligned box [lo, hi], as a polygon.
    pub fn clip_box(&self, lo: [f64; 2], hi: [f64; 2]) -> ConvexPolygon {
        self.clip_halfplane([1.0, 0.0], hi[0])
            .clip_halfplane([-1.0, 0.0], -lo[0])
            .clip_halfplane([0.0, 1.0], hi[1])
            .clip_halfplane([0.0, -1.0], -lo[1])
    }

    /// Separating-axis test against an axis-aligned box (closed sets: shared
    /// boundary points count as intersection).
    pub fn intersects_box(&self, lo: [f64; 2], hi: [f64; 2]) -> bool {
        // box axes
        let (plo, phi) = self.bbox();
        if plo[0] > hi[0] || phi[0] < lo[0] || plo[1] > hi[1] || phi[1] < lo[1] {
            return false;
        }
        // polygon edge normals
        let v = &self.vertices;
        let n = v.len();
        for i in 0..n {
            let j = (i + 1) % n;
            let axis = [v[i][1] - v[j][1], v[j][0] - v[i][0]];
            let mut pmin = f64::INFINITY;
            let mut pmax = f64::NEG_INFINITY;
            for p in v {
                let d = axis[0] * p[0] + axis[1] * p[1];
                pmin = pmin.min(d);
                pmax = pmax.max(d);
            }
            let mut bmin = f64::INFINITY;
            let mut bmax = f64::NEG_INFINITY;
            for &bx in &[lo[0], hi[0]] {
                for &by in &[lo[1], hi[1]] {
                    let d = axis[0] * bx + axis[1] * by;
                    bmin = bmin.min(d);
                    bmax = bmax.max(d);
                }
            }
            if pmin > bmax || pmax < bmin {
                return false;
            }
        }
        true
    }

    /// Fan triangulation from the first vertex; quadrilaterals split along
    /// the main diagonal.
    pub fn triangulate(&self) -> Vec<[[f64; 2]; 3]> {
        let v = &self.vertices;
        (1..v.len() - 1).map(|i| [v[0], v[i], v[i + 1]]).collect()
    }
}

/// Cells of a region: intervals for n=2, convex polygons for n=3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RegionCells {
    Intervals(Vec<Interval>),
    Polygons(Vec<ConvexPolygon>),
}

/// A screen region: bounded union of cells with pairwise disjoint interiors,
/// lying in the hyperplane xₙ = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenRegion {
    pub cells: RegionCells,
    pub kind: RegionKind,
}

impl ScreenRegion {
    pub fn from_intervals(kind: RegionKind, intervals: Vec<Interval>) -> Result<Self> {
        for iv in &intervals {
            if !(iv.b > iv.a) || !iv.a.is_finite() || !iv.b.is_finite() {
                return Err(Error::Geometry(format!(
                    "interval [{}, {}] must have positive finite length",
                    iv.a, iv.b
                )));
            }
        }
        Ok(ScreenRegion { cells: RegionCells::Intervals(intervals), kind })
    }

    pub fn from_polygons(kind: RegionKind, mut polygons: Vec<ConvexPolygon>) -> Result<Self> {
        for p in polygons.iter_mut() {
            if p.vertices.len() < 3 {
                return Err(Error::Geometry("polygon needs at least 3 vertices".into()));
            }
            p.ensure_ccw();
            if p.area() <= 0.0 {
                return Err(Error::Geometry("polygon cell has zero area".into()));
            }
        }
        Ok(ScreenRegion { cells: RegionCells::Polygons(polygons), kind })
    }

    /// Constructor without validation; used by dyadic approximations of
    /// degenerate sets (e.g. a single point) where cells may have zero measure.
    pub(crate) fn from_cells_unchecked(kind: RegionKind, cells: RegionCells) -> Self {
        ScreenRegion { cells, kind }
    }

    pub fn dimension(&self) -> Ambient {
        match self.cells {
            RegionCells::Intervals(_) => Ambient::Two,
            RegionCells::Polygons(_) => Ambient::Three,
        }
    }

    /// Total length (n=2) or area (n=3).
    pub fn measure(&self) -> f64 {
        match &self.cells {
            RegionCells::Intervals(v) => v.iter().map(|i| i.len()).sum(),
            RegionCells::Polygons(v) => v.iter().map(|p| p.area()).sum(),
        }
    }

    pub fn cell_count(&self) -> usize {
        match &self.cells {
            RegionCells::Intervals(v) => v.len(),
            RegionCells::Polygons(v) => v.len(),
        }
    }

    pub fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        match &self.cells {
            RegionCells::Intervals(v) => {
                for iv in v {
                    lo[0] = lo[0].min(iv.a);
                    hi[0] = hi[0].max(iv.b);
                }
                lo[1] = 0.0;
                hi[1] = 0.0;
            }
            RegionCells::Polygons(v) => {
                for p in v {
                    let (l, h) = p.bbox();
                    for c in 0..2 {
                        lo[c] = lo[c].min(l[c]);
                        hi[c] = hi[c].max(h[c]);
                    }
                }
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bbox();
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt()
    }

    /// Point-set containment check by cells (used by the nesting tests):
    /// every cell of `other` must be covered by this region's cells.
    pub fn contains_region(&self, other: &ScreenRegion, tol: f64) -> bool {
        match (&self.cells, &other.cells) {
            (RegionCells::Intervals(a), RegionCells::Intervals(b)) => b.iter().all(|iv| {
                // covered length of iv by cells of a
                let mut covered = 0.0;
                for c in a {
                    covered += (iv.b.min(c.b) - iv.a.max(c.a)).max(0.0);
                }
                covered >= iv.len() - tol
            }),
            (RegionCells::Polygons(a), RegionCells::Polygons(b)) => b.iter().all(|p| {
                let mut covered = 0.0;
                for c in a {
                    covered += clip_convex(c, p).area();
                }
                covered >= p.area() - tol
            }),
            _ => false,
        }
    }
}

/// Intersection of two convex polygons.
pub fn clip_convex(subject: &ConvexPolygon, clipper: &ConvexPolygon) -> ConvexPolygon {
    let mut out = subject.clone();
    let v = &clipper.vertices;
    let n = v.len();
    for i in 0..n {
        if out.vertices.len() < 3 {
            return ConvexPolygon { vertices: vec![] };
        }
        let a = v[i];
        let b = v[(i + 1) % n];
        // inward normal of CCW edge (a, b): left side is inside
        let normal = [b[1] - a[1], a[0] - b[0]];
        let c = normal[0] * a[0] + normal[1] * a[1];
        out = out.clip_halfplane(normal, c);
    }
    if out.vertices.len() < 3 {
        ConvexPolygon { vertices: vec![] }
    } else {
        out
    }
}

impl ConvexPolygon {
    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }
}
