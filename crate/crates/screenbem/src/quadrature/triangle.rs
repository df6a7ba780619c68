//! Panel-pair integration for screens in 3D, where panels are coplanar
//! triangles in the plane x₃ = 0.
//!
//! The inner integral ∫_T Φ(|x-y|) w(y) dy is evaluated semi-analytically: a
//! signed fan around the projection of x reduces it to edge integrals whose
//! radial part is closed-form (the Jacobian ρ cancels the 1/r singularity),
//! leaving smooth 1D integrals over the edges. Outer integrals use Gauss
//! rules, subdivided and graded towards shared simplices for touching pairs.

use super::gauss::{gauss_on_interval, gauss_on_triangle};
#[cfg(test)]
use super::gauss::triangle_area;
use super::segment::integrate_segment_graded;
use num_complex::Complex64;
use std::f64::consts::PI;

pub type Triangle = [[f64; 2]; 3];

/// Affine weight w(y) = c0 + cx y₁ + cy y₂ on the screen plane.
#[derive(Debug, Clone, Copy)]
pub struct Affine2 {
    pub c0: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Affine2 {
    pub const ONE: Affine2 = Affine2 { c0: 1.0, cx: 0.0, cy: 0.0 };

    #[inline]
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        self.c0 + self.cx * p[0] + self.cy * p[1]
    }
}

#[inline]
fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn triangle_diameter(t: &Triangle) -> f64 {
    let e = |a: usize, b: usize| {
        ((t[a][0] - t[b][0]).powi(2) + (t[a][1] - t[b][1]).powi(2)).sqrt()
    };
    e(0, 1).max(e(1, 2)).max(e(2, 0))
}

/// ∫_0^R ρ Φ(√(ρ²+ε²)) dρ = (e^{ikS} - e^{ik|ε|})/(4πik), S = √(R²+ε²).
#[inline]
fn radial_m0(k: f64, r_upper: f64, eps: f64) -> Complex64 {
    let s = (r_upper * r_upper + eps * eps).sqrt();
    let e1 = Complex64::new(0.0, k * s).exp();
    let e0 = Complex64::new(0.0, k * eps.abs()).exp();
    (e1 - e0) / Complex64::new(0.0, 4.0 * PI * k)
}

/// ∫_0^R ρ² Φ(ρ) dρ for points in the screen plane (ε = 0):
/// (1/4π) [R e^{ikR}/(ik) - (e^{ikR} - 1)/(ik)²].
#[inline]
fn radial_m1(k: f64, r_upper: f64) -> Complex64 {
    let ik = Complex64::new(0.0, k);
    let e = Complex64::new(0.0, k * r_upper).exp();
    (e * r_upper / ik - (e - Complex64::new(1.0, 0.0)) / (ik * ik)) / (4.0 * PI)
}

/// ∫_T Φ(|x-y|) dy for x = (foot, height) anywhere off or on the plane.
pub fn triangle_potential_const(
    foot: [f64; 2],
    height: f64,
    tri: &Triangle,
    k: f64,
    theta_order: usize,
) -> Complex64 {
    fan_integrate(foot, height, tri, k, 1.0, [0.0, 0.0], theta_order)
}

/// ∫_T Φ(|x-y|) w(y) dy for x in the screen plane (used in assembly).
pub fn triangle_potential_affine(
    x: [f64; 2],
    tri: &Triangle,
    k: f64,
    w: Affine2,
    theta_order: usize,
) -> Complex64 {
    fan_integrate(x, 0.0, tri, k, w.eval(x), [w.cx, w.cy], theta_order)
}

/// Moments [∫_T Φ dy, ∫_T Φ y₁ dy, ∫_T Φ y₂ dy] for x in the screen plane,
/// from a single fan sweep; any affine weight is a combination of these.
pub fn triangle_potential_moments(
    x: [f64; 2],
    tri: &Triangle,
    k: f64,
    theta_order: usize,
) -> [Complex64; 3] {
    let scale = triangle_diameter(tri);
    let mut total = [Complex64::default(); 3];
    for i in 0..3 {
        let a = tri[i];
        let b = tri[(i + 1) % 3];
        let e = sub(b, a);
        let c_e = cross(sub(a, x), e);
        if c_e.abs() < 1e-14 * scale * scale {
            continue;
        }
        let elen2 = e[0] * e[0] + e[1] * e[1];
        let contrib = |tau: f64| -> [Complex64; 3] {
            let r = [a[0] + tau * e[0] - x[0], a[1] + tau * e[1] - x[1]];
            let r2 = r[0] * r[0] + r[1] * r[1];
            let rr = r2.sqrt();
            let m0 = radial_m0(k, rr, 0.0);
            let m1 = radial_m1(k, rr);
            let jac = c_e / r2;
            [
                m0 * jac,
                (m0 * x[0] + m1 * (r[0] / rr)) * jac,
                (m0 * x[1] + m1 * (r[1] / rr)) * jac,
            ]
        };
        let tau_star = ((x[0] - a[0]) * e[0] + (x[1] - a[1]) * e[1]) / elen2;
        let dist_line = c_e.abs() / elen2.sqrt();
        let smooth_scale = dist_line / elen2.sqrt();
        if (-0.5..=1.5).contains(&tau_star) && smooth_scale < 0.25 {
            for comp in 0..3 {
                total[comp] += integrate_segment_graded(
                    0.0,
                    1.0,
                    tau_star,
                    smooth_scale.max(1e-14),
                    theta_order,
                    |t| contrib(t)[comp],
                );
            }
        } else {
            for (t, wq) in gauss_on_interval(0.0, 1.0, theta_order) {
                let c = contrib(t);
                for comp in 0..3 {
                    total[comp] += c[comp] * wq;
                }
            }
        }
    }
    total
}

/// Galerkin block of a coplanar triangle pair: piecewise-constant entry and,
/// when requested, the 3x3 hat mass block.
#[derive(Debug, Clone, Copy, Default)]
pub struct TriPairBlock {
    pub s: Complex64,
    pub mass: [[Complex64; 3]; 3],
}

#[allow(clippy::too_many_arguments)]
pub fn triangle_pair_block(
    k: f64,
    tp: &Triangle,
    tq: &Triangle,
    hats_p: &[Affine2; 3],
    hats_q: &[Affine2; 3],
    need_mass: bool,
    config: PairConfig,
    singular_order: usize,
    theta_order: usize,
) -> TriPairBlock {
    let outer: Vec<Triangle> = match config {
        PairConfig::Far | PairConfig::Near => vec![*tp],
        PairConfig::Coincident => uniform_subdivide(tp, 1),
        PairConfig::SharedEdge(edge) => graded_subdivide(tp, &edge, 3),
        PairConfig::SharedVertex(v) => graded_subdivide(tp, &[v], 3),
    };
    let mut block = TriPairBlock::default();
    for t in &outer {
        for (x, wq) in gauss_on_triangle(t, singular_order) {
            let moments = triangle_potential_moments(x, tq, k, theta_order);
            block.s += moments[0] * wq;
            if need_mass {
                let hx = [hats_p[0].eval(x), hats_p[1].eval(x), hats_p[2].eval(x)];
                for (b, hat_b) in hats_q.iter().enumerate() {
                    let pot_b = moments[0] * hat_b.c0
                        + moments[1] * hat_b.cx
                        + moments[2] * hat_b.cy;
                    for a in 0..3 {
                        block.mass[a][b] += pot_b * (wq * hx[a]);
                    }
                }
            }
        }
    }
    block
}

/// Signed-fan reduction: Σ_edges ∫₀¹ g(R(τ)) c_e / R² dτ with the radial
/// integral in closed form; c_e = cross(A - x, B - A) is constant per edge
/// and vanishes exactly when x lies on the edge line (contribution zero).
fn fan_integrate(
    foot: [f64; 2],
    height: f64,
    tri: &Triangle,
    k: f64,
    w_at_foot: f64,
    w_grad: [f64; 2],
    theta_order: usize,
) -> Complex64 {
    let scale = triangle_diameter(tri);
    let with_grad = w_grad[0] != 0.0 || w_grad[1] != 0.0;
    debug_assert!(!with_grad || height == 0.0, "linear weight requires in-plane x");
    let mut total = Complex64::default();
    for i in 0..3 {
        let a = tri[i];
        let b = tri[(i + 1) % 3];
        let e = sub(b, a);
        let c_e = cross(sub(a, foot), e);
        if c_e.abs() < 1e-14 * scale * scale {
            continue;
        }
        let elen2 = e[0] * e[0] + e[1] * e[1];
        let integrand = |tau: f64| -> Complex64 {
            let r = [a[0] + tau * e[0] - foot[0], a[1] + tau * e[1] - foot[1]];
            let r2 = r[0] * r[0] + r[1] * r[1];
            let rr = r2.sqrt();
            let mut g = radial_m0(k, rr, height) * w_at_foot;
            if with_grad {
                g += radial_m1(k, rr) * ((w_grad[0] * r[0] + w_grad[1] * r[1]) / rr);
            }
            g * (c_e / r2)
        };
        // grade towards the projection of the foot point when it is close
        let tau_star = ((foot[0] - a[0]) * e[0] + (foot[1] - a[1]) * e[1]) / elen2;
        let dist_line = c_e.abs() / elen2.sqrt();
        let smooth_scale = (dist_line * dist_line + height * height).sqrt() / elen2.sqrt();
        total += if (-0.5..=1.5).contains(&tau_star) && smooth_scale < 0.25 {
            integrate_segment_graded(0.0, 1.0, tau_star, smooth_scale.max(1e-14), theta_order, integrand)
        } else {
            gauss_on_interval(0.0, 1.0, theta_order)
                .iter()
                .map(|&(t, wq)| integrand(t) * wq)
                .sum()
        };
    }
    total
}

// ---------------------------------------------------------------------------
// Pair integrals
// ---------------------------------------------------------------------------

/// Adjacency configuration of a coplanar triangle pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairConfig {
    Coincident,
    SharedEdge([[f64; 2]; 2]),
    SharedVertex([f64; 2]),
    Near,
    Far,
}

/// ∫_p ∫_q w_x(x) w_y(y) Φ(|x-y|) dy dx over coplanar triangles.
pub fn triangle_pair_phi(
    k: f64,
    tp: &Triangle,
    tq: &Triangle,
    wx: Affine2,
    wy: Affine2,
    config: PairConfig,
    regular_order: usize,
    singular_order: usize,
    theta_order: usize,
) -> Complex64 {
    match config {
        PairConfig::Far => {
            let rp = gauss_on_triangle(tp, regular_order);
            let rq = gauss_on_triangle(tq, regular_order);
            let mut sum = Complex64::default();
            for &(x, wq) in &rp {
                let wxx = wq * wx.eval(x);
                for &(y, wqy) in &rq {
                    let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
                    let kr = k * r;
                    sum += Complex64::new(kr.cos(), kr.sin()) / (4.0 * PI * r) * (wxx * wqy * wy.eval(y));
                }
            }
            sum
        }
        PairConfig::Near => outer_inner(k, &[*tp], tq, wx, wy, singular_order.max(8), theta_order),
        PairConfig::Coincident => {
            let outer = uniform_subdivide(tp, 1);
            outer_inner(k, &outer, tq, wx, wy, singular_order, theta_order)
        }
        PairConfig::SharedEdge(edge) => {
            let outer = graded_subdivide(tp, &edge, 3);
            outer_inner(k, &outer, tq, wx, wy, singular_order, theta_order)
        }
        PairConfig::SharedVertex(v) => {
            let outer = graded_subdivide(tp, &[v], 3);
            outer_inner(k, &outer, tq, wx, wy, singular_order, theta_order)
        }
    }
}

fn outer_inner(
    k: f64,
    outer_tris: &[Triangle],
    tq: &Triangle,
    wx: Affine2,
    wy: Affine2,
    order: usize,
    theta_order: usize,
) -> Complex64 {
    let mut sum = Complex64::default();
    for t in outer_tris {
        for (x, wq) in gauss_on_triangle(t, order) {
            sum += triangle_potential_affine(x, tq, k, wy, theta_order) * (wq * wx.eval(x));
        }
    }
    sum
}

/// Red refinement (midpoint split) applied `levels` times.
pub fn uniform_subdivide(tri: &Triangle, levels: usize) -> Vec<Triangle> {
    let mut tris = vec![*tri];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(tris.len() * 4);
        for t in &tris {
            next.extend_from_slice(&red_split(t));
        }
        tris = next;
    }
    tris
}

fn red_split(t: &Triangle) -> [Triangle; 4] {
    let m01 = midpoint(t[0], t[1]);
    let m12 = midpoint(t[1], t[2]);
    let m20 = midpoint(t[2], t[0]);
    [
        [t[0], m01, m20],
        [m01, t[1], m12],
        [m20, m12, t[2]],
        [m01, m12, m20],
    ]
}

fn midpoint(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

/// Subdivision graded towards a feature (a shared vertex or edge): children
/// touching the feature are refined further, others emitted as they are.
pub fn graded_subdivide(tri: &Triangle, feature: &[[f64; 2]], depth: usize) -> Vec<Triangle> {
    let tol = 1e-12 * triangle_diameter(tri).max(1.0);
    let mut out = Vec::new();
    let mut stack = vec![(*tri, depth)];
    while let Some((t, d)) = stack.pop() {
        if d == 0 || !touches_feature(&t, feature, tol) {
            out.push(t);
            continue;
        }
        for child in red_split(&t) {
            stack.push((child, d - 1));
        }
    }
    out
}

fn touches_feature(t: &Triangle, feature: &[[f64; 2]], tol: f64) -> bool {
    t.iter().any(|v| {
        let d = match feature.len() {
            1 => dist2(*v, feature[0]).sqrt(),
            _ => point_segment_distance(*v, feature[0], feature[1]),
        };
        d <= tol
    })
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

pub fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let e = sub(b, a);
    let l2 = e[0] * e[0] + e[1] * e[1];
    if l2 == 0.0 {
        return dist2(p, a).sqrt();
    }
    let t = (((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / l2).clamp(0.0, 1.0);
    dist2(p, [a[0] + t * e[0], a[1] + t * e[1]]).sqrt()
}

/// Generic tensor Gauss of a caller-supplied integrand over a triangle pair.
pub fn quad_regular_triangles<F>(tp: &Triangle, tq: &Triangle, order: usize, f: F) -> Complex64
where
    F: Fn([f64; 2], [f64; 2]) -> Complex64,
{
    let rp = gauss_on_triangle(tp, order);
    let rq = gauss_on_triangle(tq, order);
    let mut sum = Complex64::default();
    for &(x, wx) in &rp {
        for &(y, wy) in &rq {
            sum += f(x, y) * (wx * wy);
        }
    }
    sum
}
