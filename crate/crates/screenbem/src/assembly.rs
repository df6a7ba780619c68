//! Dense Galerkin assembly of the single-layer form a_S over piecewise
//! constants and the hypersingular form a_T over interior hat functions.
//!
//! The hypersingular form is assembled in its integration-by-parts (Maue)
//! form on the flat screen: with T = ∂ₙ⁺D,
//!     a_T(ψ, φ) = ∫∫ Φ(x,y) [k² ψ(y) φ(x) - ∇ψ(y)·∇φ(x)] ds(y) ds(x),
//! where the gradients are taken along the screen. The sign and the identity
//! are pinned by the off-surface finite-difference oracle in the test suite.
//!
//! Each unordered panel pair is integrated once and scattered to both matrix
//! slots, so assembled matrices are complex-symmetric by construction.
//! Parallelisation is over rows with an ordered collect, which keeps results
//! bit-identical regardless of thread count.

use crate::error::{Error, Result};
use crate::geometry::{Panels, ScreenPanelMesh};
use crate::linalg;
use crate::quadrature::{
    segment_pair_block, segments_close, triangle_pair_block, Affine, Affine2, PairConfig,
    QuadSpec, Segment, Triangle,
};
use crate::specialfn::{phi_radial, Ambient, Wavenumber};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Boundary-condition side of the scattering problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// Sound-soft (Dirichlet): unknown [∂ₙu], single-layer form.
    Soft,
    /// Sound-hard (Neumann): unknown [u], hypersingular form.
    Hard,
}

/// Discrete trial/test space on a panel mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// One constant per panel; conforming in H̃^{-1/2}.
    PiecewiseConstant,
    /// Hat functions at interior vertices only; conforming in H̃^{1/2}.
    PiecewiseLinearZeroBoundary,
}

/// A basis bound to its mesh: panel constants or interior-vertex hats.
#[derive(Debug, Clone)]
pub struct BasisSpec {
    kind: BasisKind,
    mesh: Arc<ScreenPanelMesh>,
    /// dof -> vertex index (hat basis only)
    dof_vertices: Vec<usize>,
    /// vertex index -> dof (hat basis only)
    vertex_dof: Vec<Option<usize>>,
}

impl BasisSpec {
    pub fn piecewise_constant(mesh: Arc<ScreenPanelMesh>) -> Self {
        BasisSpec {
            kind: BasisKind::PiecewiseConstant,
            mesh,
            dof_vertices: Vec::new(),
            vertex_dof: Vec::new(),
        }
    }

    pub fn hat_interior(mesh: Arc<ScreenPanelMesh>) -> Self {
        let dof_vertices = mesh.interior_vertices();
        let mut vertex_dof = vec![None; mesh.vertices().len()];
        for (d, &v) in dof_vertices.iter().enumerate() {
            vertex_dof[v] = Some(d);
        }
        BasisSpec { kind: BasisKind::PiecewiseLinearZeroBoundary, mesh, dof_vertices, vertex_dof }
    }

    /// The conforming basis per problem: constants realise V⁻ (soft),
    /// interior hats realise V⁺ (hard).
    pub fn for_problem(problem: Problem, mesh: Arc<ScreenPanelMesh>) -> Self {
        match problem {
            Problem::Soft => Self::piecewise_constant(mesh),
            Problem::Hard => Self::hat_interior(mesh),
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn mesh(&self) -> &Arc<ScreenPanelMesh> {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            BasisKind::PiecewiseConstant => self.mesh.panel_count(),
            BasisKind::PiecewiseLinearZeroBoundary => self.dof_vertices.len(),
        }
    }

    pub fn dof_vertex(&self, dof: usize) -> usize {
        self.dof_vertices[dof]
    }

    pub fn vertex_to_dof(&self, vertex: usize) -> Option<usize> {
        self.vertex_dof.get(vertex).copied().flatten()
    }

    pub fn dof_vertices(&self) -> &[usize] {
        &self.dof_vertices
    }
}

/// Assembled Galerkin system for one of the two variational problems.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub problem: Problem,
    pub matrix: DMatrix<Complex64>,
    pub basis: BasisSpec,
    pub k: f64,
    pub quad: QuadSpec,
}

impl GalerkinSystem {
    /// JSON dump of the matrix (row-major [re, im] pairs) with metadata.
    pub fn dump_json(&self) -> serde_json::Value {
        let mut v = linalg::matrix_to_json(&self.matrix);
        v["problem"] = serde_json::json!(self.problem);
        v["k"] = serde_json::json!(self.k);
        v["mesh_hash"] = serde_json::json!(self.basis.mesh().content_hash());
        v
    }
}

// ---------------------------------------------------------------------------
// Cached panel geometry
// ---------------------------------------------------------------------------

pub(crate) enum PanelGeom {
    Seg {
        seg: Segment,
        verts: [usize; 2],
        hats: [Affine; 2],
        slopes: [f64; 2],
    },
    Tri {
        tri: Triangle,
        verts: [usize; 3],
        hats: [Affine2; 3],
        grads: [[f64; 2]; 3],
        diam: f64,
        centroid: [f64; 2],
    },
}

pub(crate) fn panel_geometry(mesh: &ScreenPanelMesh) -> Vec<PanelGeom> {
    match mesh.panels() {
        Panels::Segments(segs) => segs
            .iter()
            .map(|&[ia, ib]| {
                let (a, b) = (mesh.vertices()[ia][0], mesh.vertices()[ib][0]);
                let (a, b, ia, ib) = if a <= b { (a, b, ia, ib) } else { (b, a, ib, ia) };
                let len = b - a;
                // hat at a: (b - x)/len, hat at b: (x - a)/len
                let hats = [
                    Affine { c0: b / len, c1: -1.0 / len },
                    Affine { c0: -a / len, c1: 1.0 / len },
                ];
                PanelGeom::Seg {
                    seg: Segment { a, b },
                    verts: [ia, ib],
                    hats,
                    slopes: [-1.0 / len, 1.0 / len],
                }
            })
            .collect(),
        Panels::Triangles(tris) => tris
            .iter()
            .map(|&[i0, i1, i2]| {
                let v = [mesh.vertices()[i0], mesh.vertices()[i1], mesh.vertices()[i2]];
                let two_a = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1])
                    - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
                let mut hats = [Affine2::ONE; 3];
                let mut grads = [[0.0; 2]; 3];
                for loc in 0..3 {
                    let (p, q) = (v[(loc + 1) % 3], v[(loc + 2) % 3]);
                    // affine with value 1 at v[loc], 0 at the other two
                    hats[loc] = Affine2 {
                        c0: (p[0] * q[1] - q[0] * p[1]) / two_a,
                        cx: (p[1] - q[1]) / two_a,
                        cy: (q[0] - p[0]) / two_a,
                    };
                    grads[loc] = [hats[loc].cx, hats[loc].cy];
                }
                let d = |x: [f64; 2], y: [f64; 2]| {
                    ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt()
                };
                PanelGeom::Tri {
                    tri: v,
                    verts: [i0, i1, i2],
                    hats,
                    grads,
                    diam: d(v[0], v[1]).max(d(v[1], v[2])).max(d(v[2], v[0])),
                    centroid: [
                        (v[0][0] + v[1][0] + v[2][0]) / 3.0,
                        (v[0][1] + v[1][1] + v[2][1]) / 3.0,
                    ],
                }
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Pair blocks
// ---------------------------------------------------------------------------

/// Far-pair rules precomputed per panel: points, weights and hat values.
struct PanelRule {
    nodes: Vec<([f64; 2], f64, [f64; 3])>,
}

fn panel_rules(geoms: &[PanelGeom], order: usize) -> Vec<PanelRule> {
    geoms
        .iter()
        .map(|g| match g {
            PanelGeom::Seg { seg, hats, .. } => PanelRule {
                nodes: crate::quadrature::gauss_on_interval(seg.a, seg.b, order)
                    .into_iter()
                    .map(|(x, w)| ([x, 0.0], w, [hats[0].eval(x), hats[1].eval(x), 0.0]))
                    .collect(),
            },
            PanelGeom::Tri { tri, hats, .. } => PanelRule {
                nodes: crate::quadrature::gauss_on_triangle(tri, order)
                    .into_iter()
                    .map(|(p, w)| (p, w, [hats[0].eval(p), hats[1].eval(p), hats[2].eval(p)]))
                    .collect(),
            },
        })
        .collect()
}

/// PC entry plus (optionally) the hat mass block; 2D blocks occupy the
/// leading 2x2 corner.
#[derive(Clone, Copy, Default)]
struct PairBlock {
    s: Complex64,
    mass: [[Complex64; 3]; 3],
}

impl PairBlock {
    fn is_finite(&self) -> bool {
        let ok = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        ok(self.s) && self.mass.iter().flatten().all(|&z| ok(z))
    }
}

fn far_pair_block(
    dim: Ambient,
    k: f64,
    rp: &PanelRule,
    rq: &PanelRule,
    need_mass: bool,
) -> PairBlock {
    let mut block = PairBlock::default();
    for &(x, wx, hx) in &rp.nodes {
        for &(y, wy, hy) in &rq.nodes {
            let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
            let f = phi_radial(dim, k, r) * (wx * wy);
            block.s += f;
            if need_mass {
                for a in 0..3 {
                    for b in 0..3 {
                        block.mass[a][b] += f * (hx[a] * hy[b]);
                    }
                }
            }
        }
    }
    block
}

#[allow(clippy::too_many_arguments)]
fn pair_block(
    dim: Ambient,
    k: f64,
    geoms: &[PanelGeom],
    rules: &[PanelRule],
    p: usize,
    q: usize,
    need_mass: bool,
    quad: &QuadSpec,
) -> PairBlock {
    match (&geoms[p], &geoms[q]) {
        (PanelGeom::Seg { seg: sp, hats: hp, .. }, PanelGeom::Seg { seg: sq, hats: hq, .. }) => {
            if segments_close(*sp, *sq) {
                let b = segment_pair_block(
                    k,
                    *sp,
                    *sq,
                    *hp,
                    *hq,
                    need_mass,
                    quad.regular_order,
                    quad.singular_order,
                );
                let mut out = PairBlock { s: b.s, ..Default::default() };
                for a in 0..2 {
                    for c in 0..2 {
                        out.mass[a][c] = b.mass[a][c];
                    }
                }
                out
            } else {
                far_pair_block(dim, k, &rules[p], &rules[q], need_mass)
            }
        }
        (
            PanelGeom::Tri { tri: tp, verts: vp, hats: hp, diam: dp, centroid: cp, .. },
            PanelGeom::Tri { tri: tq, verts: vq, hats: hq, diam: dq, centroid: cq, .. },
        ) => {
            let config = classify_triangles(tp, vp, vq, *dp, *dq, *cp, *cq, p == q);
            match config {
                PairConfig::Far => far_pair_block(dim, k, &rules[p], &rules[q], need_mass),
                cfg => {
                    let b = triangle_pair_block(
                        k,
                        tp,
                        tq,
                        hp,
                        hq,
                        need_mass,
                        cfg,
                        quad.singular_order,
                        quad.theta_order,
                    );
                    PairBlock { s: b.s, mass: b.mass }
                }
            }
        }
        _ => unreachable!("mixed panel kinds in one mesh"),
    }
}

#[allow(clippy::too_many_arguments)]
fn classify_triangles(
    tp: &Triangle,
    vp: &[usize; 3],
    vq: &[usize; 3],
    dp: f64,
    dq: f64,
    cp: [f64; 2],
    cq: [f64; 2],
    same: bool,
) -> PairConfig {
    if same {
        return PairConfig::Coincident;
    }
    let shared: Vec<usize> = (0..3).filter(|&a| vq.contains(&vp[a])).collect();
    match shared.len() {
        3 => PairConfig::Coincident,
        2 => PairConfig::SharedEdge([tp[shared[0]], tp[shared[1]]]),
        1 => PairConfig::SharedVertex(tp[shared[0]]),
        _ => {
            let cd = ((cp[0] - cq[0]).powi(2) + (cp[1] - cq[1]).powi(2)).sqrt();
            // lower bound on the inter-panel distance
            if cd - 0.5 * (dp + dq) >= dp.max(dq) {
                PairConfig::Far
            } else {
                PairConfig::Near
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Assembly drivers
// ---------------------------------------------------------------------------

/// Galerkin matrix of the single-layer form over piecewise constants:
/// A_pq = ∫_p ∫_q Φ(x, y) ds(y) ds(x).
pub fn assemble_single_layer(
    mesh: &Arc<ScreenPanelMesh>,
    k: Wavenumber,
    quad: QuadSpec,
) -> Result<GalerkinSystem> {
    if mesh.panel_count() == 0 {
        return Err(Error::EmptyBasis("mesh has no panels".into()));
    }
    let basis = BasisSpec::piecewise_constant(mesh.clone());
    let geoms = panel_geometry(mesh);
    let rules = panel_rules(&geoms, quad.regular_order);
    let n = mesh.panel_count();
    let dim = mesh.dimension();
    let kv = k.get();

    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|p| {
            (p..n)
                .map(|q| pair_block(dim, kv, &geoms, &rules, p, q, false, &quad).s)
                .collect()
        })
        .collect();

    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    for (p, row) in rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let q = p + off;
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::QuadratureNonFinite { panel_x: p, panel_y: q });
            }
            matrix[(p, q)] = v;
            matrix[(q, p)] = v;
        }
    }
    Ok(GalerkinSystem { problem: Problem::Soft, matrix, basis, k: kv, quad })
}

/// Galerkin matrix of the hypersingular form over interior hats, via the
/// Maue identity: A_ij = ∫∫ Φ [k² λ_j(y) λ_i(x) - ∇λ_j(y)·∇λ_i(x)].
pub fn assemble_hypersingular(
    mesh: &Arc<ScreenPanelMesh>,
    k: Wavenumber,
    quad: QuadSpec,
) -> Result<GalerkinSystem> {
    let basis = BasisSpec::hat_interior(mesh.clone());
    if basis.dim() == 0 {
        return Err(Error::EmptyBasis(
            "no interior vertices: the conforming hat space is {0}".into(),
        ));
    }
    let geoms = panel_geometry(mesh);
    let rules = panel_rules(&geoms, quad.regular_order);
    let n_panels = mesh.panel_count();
    let dim = mesh.dimension();
    let kv = k.get();
    let k2 = Complex64::new(kv * kv, 0.0);
    let local_count = match dim {
        Ambient::Two => 2,
        Ambient::Three => 3,
    };

    // contributions (i, j, value) per panel row; q > p pairs are mirrored to
    // (j, i) with the same value (the integrand is symmetric under x <-> y)
    type Contrib = (usize, usize, Complex64);
    let rows: Vec<Result<Vec<Contrib>>> = (0..n_panels)
        .into_par_iter()
        .map(|p| {
            let mut out: Vec<Contrib> = Vec::new();
            for q in p..n_panels {
                let mut block = pair_block(dim, kv, &geoms, &rules, p, q, true, &quad);
                if !block.is_finite() {
                    return Err(Error::QuadratureNonFinite { panel_x: p, panel_y: q });
                }
                if p == q {
                    // symmetrise the diagonal mass block so the assembled
                    // matrix comes out exactly complex-symmetric
                    for a in 0..local_count {
                        for b in (a + 1)..local_count {
                            let avg = (block.mass[a][b] + block.mass[b][a]) * 0.5;
                            block.mass[a][b] = avg;
                            block.mass[b][a] = avg;
                        }
                    }
                }
                let dofs_p = panel_dof_data(&geoms[p]);
                let dofs_q = panel_dof_data(&geoms[q]);
                for (a, &(va, ga)) in dofs_p.iter().enumerate() {
                    let Some(i) = basis.vertex_to_dof(va) else { continue };
                    for (b, &(vb, gb)) in dofs_q.iter().enumerate() {
                        let Some(j) = basis.vertex_to_dof(vb) else { continue };
                        let gdot = ga[0] * gb[0] + ga[1] * gb[1];
                        let val = k2 * block.mass[a][b] - block.s * gdot;
                        out.push((i, j, val));
                        if p != q {
                            out.push((j, i, val));
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();

    let n = basis.dim();
    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    for row in rows {
        for (i, j, v) in row? {
            matrix[(i, j)] += v;
        }
    }
    Ok(GalerkinSystem { problem: Problem::Hard, matrix, basis, k: kv, quad })
}

/// (vertex id, surface gradient) per local basis function of a panel.
fn panel_dof_data(geom: &PanelGeom) -> Vec<(usize, [f64; 2])> {
    match geom {
        PanelGeom::Seg { verts, slopes, .. } => {
            vec![(verts[0], [slopes[0], 0.0]), (verts[1], [slopes[1], 0.0])]
        }
        PanelGeom::Tri { verts, grads, .. } => (0..3).map(|a| (verts[a], grads[a])).collect(),
    }
}

/// Max-norm symmetry defect ‖A - Aᵀ‖_max / ‖A‖_max.
pub fn symmetry_defect(a: &DMatrix<Complex64>) -> f64 {
    let mut defect = 0.0_f64;
    let mut scale = 0.0_f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            scale = scale.max(a[(i, j)].norm());
            defect = defect.max((a[(i, j)] - a[(j, i)]).norm());
        }
    }
    if scale > 0.0 {
        defect / scale
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{unit_screen, ScreenPanelMesh};
    use crate::quadrature::quad_regular_segments;

    fn unit_interval_mesh(h: f64) -> Arc<ScreenPanelMesh> {
        Arc::new(ScreenPanelMesh::build(&unit_screen(Ambient::Two), h).unwrap())
    }

    fn unit_square_mesh(h: f64) -> Arc<ScreenPanelMesh> {
        Arc::new(ScreenPanelMesh::build(&unit_screen(Ambient::Three), h).unwrap())
    }

    #[test]
    fn single_layer_symmetric_by_construction() {
        let mesh = unit_interval_mesh(0.25);
        let sys = assemble_single_layer(&mesh, Wavenumber::new(2.0).unwrap(), QuadSpec::default())
            .unwrap();
        assert_eq!(symmetry_defect(&sys.matrix), 0.0);
        let mesh3 = unit_square_mesh(0.75);
        let sys3 = assemble_single_layer(&mesh3, Wavenumber::new(2.0).unwrap(), QuadSpec::default())
            .unwrap();
        assert_eq!(symmetry_defect(&sys3.matrix), 0.0);
    }

    #[test]
    fn hypersingular_symmetric_by_construction() {
        let mesh = unit_interval_mesh(0.125);
        let sys =
            assemble_hypersingular(&mesh, Wavenumber::new(2.0).unwrap(), QuadSpec::default())
                .unwrap();
        assert!(symmetry_defect(&sys.matrix) < 1e-15);
        let mesh3 = unit_square_mesh(0.4);
        let sys3 =
            assemble_hypersingular(&mesh3, Wavenumber::new(2.0).unwrap(), QuadSpec::default())
                .unwrap();
        assert!(symmetry_defect(&sys3.matrix) < 1e-15);
    }

    #[test]
    fn hypersingular_rejects_empty_basis() {
        // a 2-triangle square has no interior vertices
        let mesh = unit_square_mesh(std::f64::consts::SQRT_2);
        match assemble_hypersingular(&mesh, Wavenumber::new(1.0).unwrap(), QuadSpec::default()) {
            Err(Error::EmptyBasis(_)) => {}
            Err(other) => panic!("expected EmptyBasis, got {other:?}"),
            Ok(_) => panic!("expected EmptyBasis, got a system"),
        }
    }

    #[test]
    fn quadrature_order_convergence_on_smooth_pair() {
        // entries at order q and q+4 differ by >= 10x less than q-4 and q
        let p = Segment { a: 0.0, b: 0.2 };
        let q = Segment { a: 1.3, b: 1.6 };
        let k = 3.0;
        let f = |x: f64, y: f64| phi_radial(Ambient::Two, k, (x - y).abs());
        let v5 = quad_regular_segments(p, q, 5, f);
        let v9 = quad_regular_segments(p, q, 9, f);
        let v13 = quad_regular_segments(p, q, 13, f);
        let coarse = (v5 - v9).norm();
        let fine = (v9 - v13).norm();
        assert!(fine * 10.0 <= coarse.max(1e-300), "coarse {coarse}, fine {fine}");
    }

    #[test]
    fn relabelled_mesh_gives_permuted_matrix() {
        let mesh = unit_interval_mesh(0.25);
        let sys = assemble_single_layer(&mesh, Wavenumber::new(2.0).unwrap(), QuadSpec::default())
            .unwrap();
        // reverse the panel order via the JSON surface
        let mut json = mesh.to_json();
        let panels = json["panels"].as_array().unwrap().clone();
        let reversed: Vec<_> = panels.into_iter().rev().collect();
        json["panels"] = serde_json::Value::Array(reversed);
        let mesh_rev = Arc::new(ScreenPanelMesh::from_json(&json).unwrap());
        let sys_rev =
            assemble_single_layer(&mesh_rev, Wavenumber::new(2.0).unwrap(), QuadSpec::default())
                .unwrap();
        let n = sys.matrix.nrows();
        for p in 0..n {
            for q in 0..n {
                let d = (sys.matrix[(p, q)] - sys_rev.matrix[(n - 1 - p, n - 1 - q)]).norm();
                assert!(d < 1e-14, "permutation mismatch at ({p},{q}): {d}");
            }
        }
    }

    #[test]
    fn hypersingular_matches_single_layer_route() {
        // Maue identity: A_hyp = k^2 * Mass_Phi - Stiff_Phi, with both terms
        // assembled through the single-layer machinery (hat and slope weights)
        let mesh = unit_interval_mesh(0.5); // 2 panels, 1 interior hat
        let k = 1.3;
        let sys = assemble_hypersingular(&mesh, Wavenumber::new(k).unwrap(), QuadSpec::default())
            .unwrap();
        assert_eq!(sys.matrix.nrows(), 1);
        let geoms = panel_geometry(&mesh);
        let mut mass = Complex64::default();
        let mut stiff = Complex64::default();
        for p in 0..2 {
            for q in 0..2 {
                if let (
                    PanelGeom::Seg { seg: sp, hats: hp, verts: vp, slopes: slp },
                    PanelGeom::Seg { seg: sq, hats: hq, verts: vq, slopes: slq },
                ) = (&geoms[p], &geoms[q])
                {
                    // local index of the interior vertex on each panel
                    let a = vp.iter().position(|&v| !mesh.is_boundary_vertex(v)).unwrap();
                    let b = vq.iter().position(|&v| !mesh.is_boundary_vertex(v)).unwrap();
                    mass += crate::quadrature::segment_pair_phi(k, *sp, *sq, hp[a], hq[b], 5, 12);
                    stiff += crate::quadrature::segment_pair_phi(
                        k,
                        *sp,
                        *sq,
                        Affine { c0: slp[a], c1: 0.0 },
                        Affine { c0: slq[b], c1: 0.0 },
                        5,
                        12,
                    );
                }
            }
        }
        let want = Complex64::new(k * k, 0.0) * mass - stiff;
        let got = sys.matrix[(0, 0)];
        assert!(
            (got - want).norm() <= 1e-8 * want.norm(),
            "hyp entry {got} vs single-layer route {want}"
        );
    }

    #[test]
    fn invertibility_scaled_sigma_min_stable_under_refinement() {
        // Empirical coercivity proxy. The rough modes carry
        // ‖φ‖²_{H^{-1/2}} ~ h² |v|² for piecewise constants, so the scaling
        // that stays bounded away from zero is sigma_min(A) / h².
        let k = Wavenumber::new(5.0).unwrap();
        let mut scaled = Vec::new();
        for &h in &[0.125, 0.0625, 0.03125] {
            let mesh = unit_interval_mesh(h);
            let sys = assemble_single_layer(&mesh, k, QuadSpec::default()).unwrap();
            let smin = linalg::smallest_singular_value(&sys.matrix).unwrap();
            scaled.push(smin / (h * h));
        }
        for w in scaled.windows(2) {
            assert!(
                w[1] >= 0.5 * w[0],
                "scaled sigma_min dropped more than 2x per halving: {scaled:?}"
            );
        }
    }
}
