//! Panel meshes of screen regions: segments on the line for n=2, triangles
//! in the plane for n=3, with boundary-vertex flags driving the conforming
//! hat-function basis.

use super::region::{RegionCells, ScreenRegion};
use crate::error::{Error, Result};
use crate::specialfn::Ambient;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashMap;

/// Panel connectivity: vertex indices per panel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Panels {
    Segments(Vec<[usize; 2]>),
    Triangles(Vec<[usize; 3]>),
}

impl Panels {
    pub fn len(&self) -> usize {
        match self {
            Panels::Segments(v) => v.len(),
            Panels::Triangles(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A conforming panel mesh of a screen region.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenPanelMesh {
    dimension: Ambient,
    vertices: Vec<[f64; 2]>,
    panels: Panels,
    boundary: Vec<bool>,
    h: f64,
}

impl ScreenPanelMesh {
    /// Meshes the region into panels of diameter at most `h`: intervals are
    /// split uniformly; polygons are fan-triangulated (squares along the main
    /// diagonal) and red-refined until the diameter bound holds.
    pub fn build(region: &ScreenRegion, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mesh size must be positive, got {h}"
            )));
        }
        let mut builder = MeshBuilder::new(region.diameter().max(1.0));
        match &region.cells {
            RegionCells::Intervals(cells) => {
                let mut segs = Vec::new();
                for iv in cells {
                    let n = (iv.len() / h).ceil().max(1.0) as usize;
                    let step = iv.len() / n as f64;
                    for i in 0..n {
                        let a = iv.a + i as f64 * step;
                        let b = if i + 1 == n { iv.b } else { iv.a + (i + 1) as f64 * step };
                        let ia = builder.vertex([a, 0.0]);
                        let ib = builder.vertex([b, 0.0]);
                        segs.push([ia, ib]);
                    }
                }
                builder.finish_segments(segs)
            }
            RegionCells::Polygons(cells) => {
                let mut tris = Vec::new();
                for poly in cells {
                    if let Some((corner, w, hh)) = axis_aligned_rect(poly) {
                        // structured split keeps panels shape-regular even for
                        // thin gap rectangles
                        let target = h / std::f64::consts::SQRT_2;
                        let nx = (w / target).ceil().max(1.0) as usize;
                        let ny = (hh / target).ceil().max(1.0) as usize;
                        let (dx, dy) = (w / nx as f64, hh / ny as f64);
                        for i in 0..nx {
                            for j in 0..ny {
                                let x0 = corner[0] + i as f64 * dx;
                                let y0 = corner[1] + j as f64 * dy;
                                let x1 = if i + 1 == nx { corner[0] + w } else { x0 + dx };
                                let y1 = if j + 1 == ny { corner[1] + hh } else { y0 + dy };
                                // main-diagonal split of each sub-rectangle
                                refine_triangle(&[[x0, y0], [x1, y0], [x1, y1]], h, &mut tris);
                                refine_triangle(&[[x0, y0], [x1, y1], [x0, y1]], h, &mut tris);
                            }
                        }
                        continue;
                    }
                    for tri in poly.triangulate() {
                        refine_triangle(&tri, h, &mut tris);
                    }
                }
                let conn: Vec<[usize; 3]> = tris
                    .iter()
                    .map(|t| {
                        [
                            builder.vertex(t[0]),
                            builder.vertex(t[1]),
                            builder.vertex(t[2]),
                        ]
                    })
                    .collect();
                builder.finish_triangles(conn)
            }
        }
    }

    pub fn dimension(&self) -> Ambient {
        self.dimension
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn panels(&self) -> &Panels {
        &self.panels
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    /// Indices of vertices not on the mesh-support boundary.
    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| !self.boundary[v]).collect()
    }

    /// Maximum panel diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn panel_measure(&self, p: usize) -> f64 {
        match &self.panels {
            Panels::Segments(v) => {
                let [a, b] = v[p];
                (self.vertices[b][0] - self.vertices[a][0]).abs()
            }
            Panels::Triangles(v) => {
                let [a, b, c] = v[p];
                let (va, vb, vc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
                0.5 * ((vb[0] - va[0]) * (vc[1] - va[1]) - (vc[0] - va[0]) * (vb[1] - va[1]))
                    .abs()
            }
        }
    }

    pub fn panel_diameter(&self, p: usize) -> f64 {
        match &self.panels {
            Panels::Segments(_) => self.panel_measure(p),
            Panels::Triangles(v) => {
                let [a, b, c] = v[p];
                let d = |x: [f64; 2], y: [f64; 2]| {
                    ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt()
                };
                let (va, vb, vc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
                d(va, vb).max(d(vb, vc)).max(d(vc, va))
            }
        }
    }

    pub fn panel_centroid(&self, p: usize) -> [f64; 2] {
        match &self.panels {
            Panels::Segments(v) => {
                let [a, b] = v[p];
                [0.5 * (self.vertices[a][0] + self.vertices[b][0]), 0.0]
            }
            Panels::Triangles(v) => {
                let [a, b, c] = v[p];
                let (va, vb, vc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
                [
                    (va[0] + vb[0] + vc[0]) / 3.0,
                    (va[1] + vb[1] + vc[1]) / 3.0,
                ]
            }
        }
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.panel_count()).map(|p| self.panel_measure(p)).sum()
    }

    /// Vertex indices of panel p.
    pub fn panel_vertices(&self, p: usize) -> Vec<usize> {
        match &self.panels {
            Panels::Segments(v) => v[p].to_vec(),
            Panels::Triangles(v) => v[p].to_vec(),
        }
    }

    /// SHA-256 over a canonical byte encoding (first 16 bytes, hex).
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.dimension.n() as u64).to_le_bytes());
        for v in &self.vertices {
            hasher.update(v[0].to_le_bytes());
            hasher.update(v[1].to_le_bytes());
        }
        match &self.panels {
            Panels::Segments(v) => {
                for s in v {
                    hasher.update((s[0] as u64).to_le_bytes());
                    hasher.update((s[1] as u64).to_le_bytes());
                }
            }
            Panels::Triangles(v) => {
                for t in v {
                    for &i in t {
                        hasher.update((i as u64).to_le_bytes());
                    }
                }
            }
        }
        let digest = hasher.finalize();
        digest[..16].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// JSON export: {dimension, vertices, panels, boundary_vertices}.
    /// Vertices carry the in-plane coordinates (1 for n=2, 2 for n=3).
    pub fn to_json(&self) -> serde_json::Value {
        let verts: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .map(|v| match self.dimension {
                Ambient::Two => vec![v[0]],
                Ambient::Three => vec![v[0], v[1]],
            })
            .collect();
        let panels: Vec<Vec<usize>> = match &self.panels {
            Panels::Segments(v) => v.iter().map(|s| s.to_vec()).collect(),
            Panels::Triangles(v) => v.iter().map(|t| t.to_vec()).collect(),
        };
        let boundary: Vec<usize> = (0..self.vertices.len()).filter(|&i| self.boundary[i]).collect();
        serde_json::json!({
            "dimension": self.dimension.n(),
            "vertices": verts,
            "panels": panels,
            "boundary_vertices": boundary,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct MeshFile {
            dimension: usize,
            vertices: Vec<Vec<f64>>,
            panels: Vec<Vec<usize>>,
            boundary_vertices: Vec<usize>,
        }
        let f: MeshFile = serde_json::from_value(value.clone())?;
        let dimension = match f.dimension {
            2 => Ambient::Two,
            3 => Ambient::Three,
            d => {
                return Err(Error::InvalidParameter(format!(
                    "mesh dimension must be 2 or 3, got {d}"
                )))
            }
        };
        let vertices: Vec<[f64; 2]> = f
            .vertices
            .iter()
            .map(|v| match dimension {
                Ambient::Two => Ok([v[0], 0.0]),
                Ambient::Three if v.len() >= 2 => Ok([v[0], v[1]]),
                _ => Err(Error::InvalidParameter("vertex with too few coordinates".into())),
            })
            .collect::<Result<_>>()?;
        let nv = vertices.len();
        let panels = match dimension {
            Ambient::Two => Panels::Segments(
                f.panels
                    .iter()
                    .map(|p| {
                        if p.len() == 2 && p.iter().all(|&i| i < nv) {
                            Ok([p[0], p[1]])
                        } else {
                            Err(Error::InvalidParameter("bad segment panel".into()))
                        }
                    })
                    .collect::<Result<_>>()?,
            ),
            Ambient::Three => Panels::Triangles(
                f.panels
                    .iter()
                    .map(|p| {
                        if p.len() == 3 && p.iter().all(|&i| i < nv) {
                            Ok([p[0], p[1], p[2]])
                        } else {
                            Err(Error::InvalidParameter("bad triangle panel".into()))
                        }
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        let mut boundary = vec![false; nv];
        for i in f.boundary_vertices {
            if i >= nv {
                return Err(Error::InvalidParameter("boundary vertex index out of range".into()));
            }
            boundary[i] = true;
        }
        let mut mesh = ScreenPanelMesh { dimension, vertices, panels, boundary, h: 0.0 };
        mesh.h = (0..mesh.panel_count()).map(|p| mesh.panel_diameter(p)).fold(0.0, f64::max);
        Ok(mesh)
    }

    /// Distance from an in-plane point (with a height above the plane) to the
    /// closest panel; used to gate near-screen evaluation.
    pub fn distance_to_panels(&self, foot: [f64; 2], height: f64) -> f64 {
        let mut best = f64::INFINITY;
        match &self.panels {
            Panels::Segments(v) => {
                for s in v {
                    let (a, b) = (self.vertices[s[0]][0], self.vertices[s[1]][0]);
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    let dx = if foot[0] < lo {
                        lo - foot[0]
                    } else if foot[0] > hi {
                        foot[0] - hi
                    } else {
                        0.0
                    };
                    best = best.min((dx * dx + height * height).sqrt());
                }
            }
            Panels::Triangles(v) => {
                for t in v {
                    let d = point_triangle_distance(
                        foot,
                        self.vertices[t[0]],
                        self.vertices[t[1]],
                        self.vertices[t[2]],
                    );
                    best = best.min((d * d + height * height).sqrt());
                }
            }
        }
        best
    }
}

/// In-plane distance from a point to a (closed) triangle.
pub fn mesh_point_triangle_distance(p: [f64; 2], tri: &[[f64; 2]; 3]) -> f64 {
    point_triangle_distance(p, tri[0], tri[1], tri[2])
}

fn point_triangle_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    // inside test via signs of edge cross products
    let sign = |u: [f64; 2], v: [f64; 2]| (p[0] - v[0]) * (u[1] - v[1]) - (u[0] - v[0]) * (p[1] - v[1]);
    let d1 = sign(a, b);
    let d2 = sign(b, c);
    let d3 = sign(c, a);
    let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    if !(has_neg && has_pos) {
        return 0.0;
    }
    crate::quadrature::triangle::point_segment_distance(p, a, b)
        .min(crate::quadrature::triangle::point_segment_distance(p, b, c))
        .min(crate::quadrature::triangle::point_segment_distance(p, c, a))
}

/// Recognises an axis-aligned rectangle cell: (corner, width, height).
fn axis_aligned_rect(poly: &super::region::ConvexPolygon) -> Option<([f64; 2], f64, f64)> {
    let v = &poly.vertices;
    if v.len() != 4 {
        return None;
    }
    let xs: Vec<f64> = v.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = v.iter().map(|p| p[1]).collect();
    let (x0, x1) = (xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let (y0, y1) = (ys.iter().cloned().fold(f64::INFINITY, f64::min), ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let aligned = v
        .iter()
        .all(|p| (p[0] == x0 || p[0] == x1) && (p[1] == y0 || p[1] == y1));
    if aligned && x1 > x0 && y1 > y0 {
        Some(([x0, y0], x1 - x0, y1 - y0))
    } else {
        None
    }
}

fn refine_triangle(tri: &[[f64; 2]; 3], h: f64, out: &mut Vec<[[f64; 2]; 3]>) {
    let d = |x: [f64; 2], y: [f64; 2]| ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
    let diam = d(tri[0], tri[1]).max(d(tri[1], tri[2])).max(d(tri[2], tri[0]));
    if diam <= h {
        out.push(*tri);
        return;
    }
    let m01 = [0.5 * (tri[0][0] + tri[1][0]), 0.5 * (tri[0][1] + tri[1][1])];
    let m12 = [0.5 * (tri[1][0] + tri[2][0]), 0.5 * (tri[1][1] + tri[2][1])];
    let m20 = [0.5 * (tri[2][0] + tri[0][0]), 0.5 * (tri[2][1] + tri[0][1])];
    refine_triangle(&[tri[0], m01, m20], h, out);
    refine_triangle(&[m01, tri[1], m12], h, out);
    refine_triangle(&[m20, m12, tri[2]], h, out);
    refine_triangle(&[m01, m12, m20], h, out);
}

struct MeshBuilder {
    vertices: Vec<[f64; 2]>,
    lookup: HashMap<(i64, i64), usize>,
    quantum: f64,
}

impl MeshBuilder {
    fn new(scale: f64) -> Self {
        MeshBuilder { vertices: Vec::new(), lookup: HashMap::new(), quantum: 1e-12 * scale }
    }

    fn vertex(&mut self, p: [f64; 2]) -> usize {
        let key = (
            (p[0] / self.quantum).round() as i64,
            (p[1] / self.quantum).round() as i64,
        );
        if let Some(&i) = self.lookup.get(&key) {
            return i;
        }
        let i = self.vertices.len();
        self.vertices.push(p);
        self.lookup.insert(key, i);
        i
    }

    fn finish_segments(self, segs: Vec<[usize; 2]>) -> Result<ScreenPanelMesh> {
        let nv = self.vertices.len();
        let mut valence = vec![0usize; nv];
        for s in &segs {
            valence[s[0]] += 1;
            valence[s[1]] += 1;
        }
        let boundary: Vec<bool> = valence.iter().map(|&v| v != 2).collect();
        let mut mesh = ScreenPanelMesh {
            dimension: Ambient::Two,
            vertices: self.vertices,
            panels: Panels::Segments(segs),
            boundary,
            h: 0.0,
        };
        mesh.h = (0..mesh.panel_count()).map(|p| mesh.panel_diameter(p)).fold(0.0, f64::max);
        Ok(mesh)
    }

    fn finish_triangles(self, tris: Vec<[usize; 3]>) -> Result<ScreenPanelMesh> {
        let nv = self.vertices.len();
        // an edge on exactly one triangle is a boundary edge; its vertices are
        // boundary vertices (a vertex is interior iff its panels surround it)
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &tris {
            for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (e.0.min(e.1), e.0.max(e.1));
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        let mut boundary = vec![false; nv];
        let mut touched = vec![false; nv];
        for t in &tris {
            for &v in t {
                touched[v] = true;
            }
        }
        for (&(a, b), &count) in &edge_count {
            if count == 1 {
                boundary[a] = true;
                boundary[b] = true;
            } else if count > 2 {
                return Err(Error::Geometry(format!(
                    "non-manifold edge ({a},{b}) shared by {count} panels"
                )));
            }
        }
        // isolated vertices (should not happen) count as boundary
        for v in 0..nv {
            if !touched[v] {
                boundary[v] = true;
            }
        }
        let mut mesh = ScreenPanelMesh {
            dimension: Ambient::Three,
            vertices: self.vertices,
            panels: Panels::Triangles(tris),
            boundary,
            h: 0.0,
        };
        mesh.h = (0..mesh.panel_count()).map(|p| mesh.panel_diameter(p)).fold(0.0, f64::max);
        Ok(mesh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::prefractal::{sierpinski_prefractal, unit_screen};
    use crate::geometry::region::{ConvexPolygon, RegionKind, ScreenRegion};

    #[test]
    fn interval_mesh_uniform_split() {
        let region = unit_screen(Ambient::Two);
        let mesh = ScreenPanelMesh::build(&region, 0.25).unwrap();
        assert_eq!(mesh.panel_count(), 4);
        for p in 0..4 {
            assert!((mesh.panel_measure(p) - 0.25).abs() < 1e-15);
        }
        // endpoints flagged, interior vertices not
        let flags: Vec<bool> = mesh.boundary_flags().to_vec();
        assert_eq!(flags.iter().filter(|&&b| b).count(), 2);
        assert_eq!(mesh.interior_vertices().len(), 3);
    }

    #[test]
    fn mesh_rejects_nonpositive_h() {
        let region = unit_screen(Ambient::Two);
        assert!(ScreenPanelMesh::build(&region, 0.0).is_err());
        assert!(ScreenPanelMesh::build(&region, -1.0).is_err());
    }

    #[test]
    fn square_mesh_diagonal_split() {
        let region = unit_screen(Ambient::Three);
        let mesh = ScreenPanelMesh::build(&region, std::f64::consts::SQRT_2).unwrap();
        assert_eq!(mesh.panel_count(), 2);
        assert!((mesh.total_measure() - 1.0).abs() < 1e-12);
        // all four corners are boundary vertices
        assert_eq!(mesh.interior_vertices().len(), 0);
    }

    #[test]
    fn refined_square_interior_vertices_unflagged() {
        let region = unit_screen(Ambient::Three);
        let mesh = ScreenPanelMesh::build(&region, 0.5 * std::f64::consts::SQRT_2).unwrap();
        assert_eq!(mesh.panel_count(), 8);
        // 3x3 vertex grid: single interior vertex at the centre
        let interior = mesh.interior_vertices();
        assert_eq!(interior.len(), 1);
        let c = mesh.vertices()[interior[0]];
        assert!((c[0] - 0.5).abs() < 1e-15 && (c[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mesh_partition_preserves_measure() {
        let region = ScreenRegion::from_polygons(
            RegionKind::Closed,
            sierpinski_prefractal(3).unwrap(),
        )
        .unwrap();
        let mesh = ScreenPanelMesh::build(&region, 0.07).unwrap();
        assert!(
            (mesh.total_measure() - region.measure()).abs() <= 1e-10 * region.measure(),
            "partition property violated"
        );
        for p in 0..mesh.panel_count() {
            assert!(mesh.panel_diameter(p) <= 0.07 + 1e-12);
        }
    }

    #[test]
    fn touching_triangles_flag_pinch_vertex() {
        // two triangles sharing exactly one vertex: every vertex is boundary
        let region = ScreenRegion::from_polygons(
            RegionKind::Closed,
            vec![
                ConvexPolygon::triangle([0.0, 0.0], [1.0, 0.0], [1.0, 1.0]),
                ConvexPolygon::triangle([1.0, 1.0], [2.0, 1.0], [2.0, 2.0]),
            ],
        )
        .unwrap();
        let mesh = ScreenPanelMesh::build(&region, 3.0).unwrap();
        assert_eq!(mesh.panel_count(), 2);
        assert_eq!(mesh.vertices().len(), 5); // shared vertex deduplicated
        assert!(mesh.boundary_flags().iter().all(|&b| b));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let region = unit_screen(Ambient::Three);
        let mesh = ScreenPanelMesh::build(&region, 0.4).unwrap();
        let json = mesh.to_json();
        let back = ScreenPanelMesh::from_json(&json).unwrap();
        assert_eq!(mesh, back);
        assert_eq!(mesh.content_hash(), back.content_hash());
    }

    #[test]
    fn distance_to_panels_basics() {
        let region = unit_screen(Ambient::Two);
        let mesh = ScreenPanelMesh::build(&region, 0.5).unwrap();
        assert!((mesh.distance_to_panels([0.5, 0.0], 0.3) - 0.3).abs() < 1e-15);
        assert!((mesh.distance_to_panels([1.5, 0.0], 0.0) - 0.5).abs() < 1e-15);
        assert_eq!(mesh.distance_to_panels([0.25, 0.0], 0.0), 0.0);
    }
}
