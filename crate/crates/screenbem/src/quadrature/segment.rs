//! Panel-pair integration for screens in 2D, where panels are collinear
//! segments of the line x₂ = 0.
//!
//! Pairs that touch or nearly touch are computed by singularity subtraction:
//! Φ(r) = -(1/2π) J₀(kr) ln r + A(kr) with A entire, the weighted log moments
//! ∫∫ w(x,y) (x-y)^{2m} ln|x-y| evaluated in closed form and the remainder by
//! tensor Gauss. Well-separated pairs use plain tensor Gauss.

use super::gauss::gauss_on_interval;
use crate::specialfn::{hankel1_0, phi_radial, Ambient};
use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A segment [a, b] on the screen line, a < b.
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
}

impl Segment {
    pub fn len(&self) -> f64 {
        self.b - self.a
    }
}

/// Affine weight w(x) = c0 + c1 x on a segment.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    pub c0: f64,
    pub c1: f64,
}

impl Affine {
    pub const ONE: Affine = Affine { c0: 1.0, c1: 0.0 };

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.c0 + self.c1 * x
    }
}

/// Gate for the singularity-subtraction path: pairs closer than a few panel
/// lengths go through the exact log split, the rest through tensor Gauss.
pub fn segments_close(p: Segment, q: Segment) -> bool {
    let gap = (p.a.max(q.a) - p.b.min(q.b)).max(0.0);
    gap < 4.0 * p.len().max(q.len())
}

/// ∫_p ∫_q w_x(x) w_y(y) Φ(|x-y|) dy dx for collinear segments.
///
/// Dispatches on the gap between the segments: closed-form log split when the
/// pair is within a few panel lengths, tensor Gauss otherwise.
pub fn segment_pair_phi(
    k: f64,
    p: Segment,
    q: Segment,
    wx: Affine,
    wy: Affine,
    regular_order: usize,
    singular_order: usize,
) -> Complex64 {
    if !segments_close(p, q) {
        return segment_pair_gauss(k, p, q, wx, wy, regular_order);
    }
    let t_max = (p.b - q.a).abs().max((q.b - p.a).abs());
    if k * t_max > 10.0 {
        // log-split series would need too many terms: halve and recurse
        let pm = 0.5 * (p.a + p.b);
        let qm = 0.5 * (q.a + q.b);
        let parts_p = [Segment { a: p.a, b: pm }, Segment { a: pm, b: p.b }];
        let parts_q = [Segment { a: q.a, b: qm }, Segment { a: qm, b: q.b }];
        let mut sum = Complex64::default();
        for &sp in &parts_p {
            for &sq in &parts_q {
                sum += segment_pair_phi(k, sp, sq, wx, wy, regular_order, singular_order);
            }
        }
        return sum;
    }
    let log_part = log_weighted_bessel_moment(k, p, q, wx, wy, t_max);
    let smooth = smooth_remainder_gauss(k, p, q, wx, wy, singular_order.max(10));
    Complex64::new(-1.0 / (2.0 * PI), 0.0) * log_part + smooth
}

/// Galerkin block of a segment pair: the piecewise-constant entry `s` and,
/// when requested, the 2x2 hat mass block ∫∫ Φ λ_a(x) λ_b(y).
#[derive(Debug, Clone, Copy, Default)]
pub struct SegPairBlock {
    pub s: Complex64,
    pub mass: [[Complex64; 2]; 2],
}

pub fn segment_pair_block(
    k: f64,
    p: Segment,
    q: Segment,
    hats_p: [Affine; 2],
    hats_q: [Affine; 2],
    need_mass: bool,
    regular_order: usize,
    singular_order: usize,
) -> SegPairBlock {
    if !segments_close(p, q) {
        return segment_pair_gauss_block(k, p, q, hats_p, hats_q, need_mass, regular_order);
    }
    let t_max = (p.b - q.a).abs().max((q.b - p.a).abs());
    if k * t_max > 10.0 {
        let pm = 0.5 * (p.a + p.b);
        let qm = 0.5 * (q.a + q.b);
        let parts_p = [Segment { a: p.a, b: pm }, Segment { a: pm, b: p.b }];
        let parts_q = [Segment { a: q.a, b: qm }, Segment { a: qm, b: q.b }];
        let mut block = SegPairBlock::default();
        for &sp in &parts_p {
            for &sq in &parts_q {
                let sub = segment_pair_block(
                    k, sp, sq, hats_p, hats_q, need_mass, regular_order, singular_order,
                );
                block.s += sub.s;
                for a in 0..2 {
                    for b in 0..2 {
                        block.mass[a][b] += sub.mass[a][b];
                    }
                }
            }
        }
        return block;
    }
    let mut block = SegPairBlock::default();
    let clog = Complex64::new(-1.0 / (2.0 * PI), 0.0);
    block.s = clog * log_weighted_bessel_moment(k, p, q, Affine::ONE, Affine::ONE, t_max);
    if need_mass {
        for a in 0..2 {
            for b in 0..2 {
                block.mass[a][b] =
                    clog * log_weighted_bessel_moment(k, p, q, hats_p[a], hats_q[b], t_max);
            }
        }
    }
    // smooth remainder: one kernel pass accumulating all weights
    let scale = p.len().max(q.len());
    let order = singular_order.max(10);
    let rx = gauss_on_interval(p.a, p.b, order);
    let ry = gauss_on_interval(q.a, q.b, order);
    for &(x, wxq) in &rx {
        let hx = [hats_p[0].eval(x), hats_p[1].eval(x)];
        for &(y, wyq) in &ry {
            let f = smooth_remainder(k, (x - y).abs(), scale) * (wxq * wyq);
            block.s += f;
            if need_mass {
                let hy = [hats_q[0].eval(y), hats_q[1].eval(y)];
                for a in 0..2 {
                    for b in 0..2 {
                        block.mass[a][b] += f * (hx[a] * hy[b]);
                    }
                }
            }
        }
    }
    block
}

fn segment_pair_gauss_block(
    k: f64,
    p: Segment,
    q: Segment,
    hats_p: [Affine; 2],
    hats_q: [Affine; 2],
    need_mass: bool,
    order: usize,
) -> SegPairBlock {
    let rx = gauss_on_interval(p.a, p.b, order);
    let ry = gauss_on_interval(q.a, q.b, order);
    let mut block = SegPairBlock::default();
    for &(x, wxq) in &rx {
        let hx = [hats_p[0].eval(x), hats_p[1].eval(x)];
        for &(y, wyq) in &ry {
            let f = phi_radial(Ambient::Two, k, (x - y).abs()) * (wxq * wyq);
            block.s += f;
            if need_mass {
                let hy = [hats_q[0].eval(y), hats_q[1].eval(y)];
                for a in 0..2 {
                    for b in 0..2 {
                        block.mass[a][b] += f * (hx[a] * hy[b]);
                    }
                }
            }
        }
    }
    block
}

/// Plain tensor Gauss for a smooth pair.
pub fn segment_pair_gauss(
    k: f64,
    p: Segment,
    q: Segment,
    wx: Affine,
    wy: Affine,
    order: usize,
) -> Complex64 {
    let rx = gauss_on_interval(p.a, p.b, order);
    let ry = gauss_on_interval(q.a, q.b, order);
    let mut sum = Complex64::default();
    for &(x, wxq) in &rx {
        let wxx = wxq * wx.eval(x);
        for &(y, wyq) in &ry {
            let r = (x - y).abs();
            sum += phi_radial(Ambient::Two, k, r) * (wxx * wyq * wy.eval(y));
        }
    }
    sum
}

/// Generic tensor Gauss of a caller-supplied integrand over a segment pair.
pub fn quad_regular_segments<F>(p: Segment, q: Segment, order: usize, f: F) -> Complex64
where
    F: Fn(f64, f64) -> Complex64,
{
    let rx = gauss_on_interval(p.a, p.b, order);
    let ry = gauss_on_interval(q.a, q.b, order);
    let mut sum = Complex64::default();
    for &(x, wxq) in &rx {
        for &(y, wyq) in &ry {
            sum += f(x, y) * (wxq * wyq);
        }
    }
    sum
}

/// Entire remainder A(r) = Φ(r) + (1/2π) J₀(kr) ln r, with A(0) = i/4 -
/// (ln(k/2)+γ)/(2π); analytic in (x-y)², so tensor Gauss is spectral.
fn smooth_remainder(k: f64, r: f64, scale: f64) -> Complex64 {
    if r < 1e-14 * scale {
        return Complex64::new(-((0.5 * k).ln() + EULER_GAMMA) / (2.0 * PI), 0.25);
    }
    let h0 = hankel1_0(k * r);
    Complex64::new(0.0, 0.25) * h0 + Complex64::new(h0.re * r.ln() / (2.0 * PI), 0.0)
}

fn smooth_remainder_gauss(
    k: f64,
    p: Segment,
    q: Segment,
    wx: Affine,
    wy: Affine,
    order: usize,
) -> Complex64 {
    let scale = p.len().max(q.len());
    let rx = gauss_on_interval(p.a, p.b, order);
    let ry = gauss_on_interval(q.a, q.b, order);
    let mut sum = Complex64::default();
    for &(x, wxq) in &rx {
        let wxx = wxq * wx.eval(x);
        for &(y, wyq) in &ry {
            sum += smooth_remainder(k, (x - y).abs(), scale) * (wxx * wyq * wy.eval(y));
        }
    }
    sum
}

// ---------------------------------------------------------------------------
// Closed-form weighted log moments
// ---------------------------------------------------------------------------

/// ∫_p ∫_q w_x(x) w_y(y) J₀(k (x-y)) ln|x-y| dy dx, exactly (series in the
/// Bessel argument, each power integrated in closed form).
fn log_weighted_bessel_moment(
    k: f64,
    p: Segment,
    q: Segment,
    wx: Affine,
    wy: Affine,
    t_max: f64,
) -> Complex64 {
    // J0(kt) = sum c_m t^{2m}
    let q_arg = 0.25 * k * k;
    let mut coeff = 1.0;
    let mut total = 0.0;
    for m in 0..60 {
        if m > 0 {
            let mf = m as f64;
            coeff *= -q_arg / (mf * mf);
        }
        let bound = coeff.abs() * t_max.powi(2 * m as i32);
        total += coeff * log_moment(p, q, wx, wy, 2 * m);
        if bound < 1e-18 {
            break;
        }
    }
    Complex64::new(total, 0.0)
}

/// ∫_p ∫_q w_x(x) w_y(y) (x-y)^n ln|x-y| dy dx in closed form.
///
/// Substituting t = x-y reduces the double integral to pieces
/// ∫ t^n ln|t| P(t) dt with P piecewise polynomial (the inner x-integral),
/// each integrated via the antiderivative of t^m ln|t|.
pub(crate) fn log_moment(p: Segment, q: Segment, wx: Affine, wy: Affine, n: usize) -> f64 {
    let (a, b, c, d) = (p.a, p.b, q.a, q.b);
    // inner antiderivative W(x; t) = A(x) + t B(x) of wx(x) wy(x - t) in x
    let (p0, p1, q0, q1) = (wx.c0, wx.c1, wy.c0, wy.c1);
    let av = [0.0, p0 * q0, (p0 * q1 + p1 * q0) / 2.0, p1 * q1 / 3.0]; // A cubic
    let bv = [0.0, -q1 * p0, -q1 * p1 / 2.0]; // B quadratic

    let t_lo = a - d;
    let t_hi = b - c;
    let mut brk = vec![t_lo, t_hi, b - d, a - c, 0.0];
    brk.retain(|&t| t >= t_lo - 1e-300 && t <= t_hi + 1e-300);
    brk.sort_by(|x, y| x.partial_cmp(y).unwrap());
    brk.dedup_by(|x, y| (*x - *y).abs() < 1e-15 * (t_hi - t_lo).max(1.0));

    let mut total = 0.0;
    for w in brk.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 < 1e-300 {
            continue;
        }
        let tm = 0.5 * (t0 + t1);
        // active limits at the midpoint
        let upper = if b <= d + tm { Limit::Const(b) } else { Limit::Shift(d) };
        let lower = if a >= c + tm { Limit::Const(a) } else { Limit::Shift(c) };
        let poly = poly_sub(&w_as_poly(&av, &bv, upper), &w_as_poly(&av, &bv, lower));
        for (j, &pj) in poly.iter().enumerate() {
            if pj != 0.0 {
                total += pj * (log_antideriv(n + j, t1) - log_antideriv(n + j, t0));
            }
        }
    }
    total
}

#[derive(Clone, Copy)]
enum Limit {
    Const(f64),
    /// x = s + t
    Shift(f64),
}

/// W(x; t) = A(x) + t B(x) as a polynomial in t for the given limit rule.
fn w_as_poly(av: &[f64; 4], bv: &[f64; 3], limit: Limit) -> Vec<f64> {
    match limit {
        Limit::Const(v) => {
            let a = av[0] + v * (av[1] + v * (av[2] + v * av[3]));
            let b = bv[0] + v * (bv[1] + v * bv[2]);
            vec![a, b]
        }
        Limit::Shift(s) => {
            // A(s+t): shift the cubic; t*B(s+t): shift the quadratic, raise by t
            let a_sh = shift_poly(av, s);
            let b_sh = shift_poly(bv, s);
            let mut out = vec![0.0; a_sh.len().max(b_sh.len() + 1)];
            for (i, &v) in a_sh.iter().enumerate() {
                out[i] += v;
            }
            for (i, &v) in b_sh.iter().enumerate() {
                out[i + 1] += v;
            }
            out
        }
    }
}

/// Coefficients of p(s + t) in powers of t.
fn shift_poly(p: &[f64], s: f64) -> Vec<f64> {
    let n = p.len();
    let mut out = vec![0.0; n];
    for (deg, &coef) in p.iter().enumerate() {
        // (s+t)^deg = sum binom(deg, i) s^{deg-i} t^i
        let mut binom = 1.0;
        for i in 0..=deg {
            out[i] += coef * binom * s.powi((deg - i) as i32);
            binom *= (deg - i) as f64 / (i as f64 + 1.0);
        }
    }
    out
}

fn poly_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let mut out = vec![0.0; n];
    for (i, &v) in a.iter().enumerate() {
        out[i] += v;
    }
    for (i, &v) in b.iter().enumerate() {
        out[i] -= v;
    }
    out
}

/// Antiderivative of t^n ln|t|: t^{n+1} (ln|t|/(n+1) - 1/(n+1)^2), zero at 0.
fn log_antideriv(n: usize, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let np1 = (n + 1) as f64;
    t.powi(n as i32 + 1) * (t.abs().ln() / np1 - 1.0 / (np1 * np1))
}

/// ∫_p ∫_q w_x w_y ln|x-y|: the leading log moment, exposed for tests.
pub fn log_pair_integral(p: Segment, q: Segment, wx: Affine, wy: Affine) -> f64 {
    log_moment(p, q, wx, wy, 0)
}

// ---------------------------------------------------------------------------
// Graded composite rule for near-singular single integrals
// ---------------------------------------------------------------------------

/// Integrates f over [a, b] with geometric grading towards `foot`, resolving
/// integrand variation on the length scale `scale` near the foot point.
pub fn integrate_segment_graded<F>(
    a: f64,
    b: f64,
    foot: f64,
    scale: f64,
    order: usize,
    f: F,
) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let scale = scale.max(1e-14 * (b - a));
    let mut cuts = vec![a, b];
    let c = foot.clamp(a, b);
    // geometric breakpoints on both sides of the foot
    for side in [-1.0, 1.0] {
        let mut d = scale;
        loop {
            let t = c + side * d;
            if t <= a || t >= b {
                break;
            }
            cuts.push(t);
            d *= 2.0;
        }
    }
    if c > a && c < b {
        cuts.push(c);
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15 * (b - a));
    let mut sum = Complex64::default();
    for w in cuts.windows(2) {
        for (x, wq) in gauss_on_interval(w[0], w[1], order) {
            sum += f(x) * wq;
        }
    }
    sum
}
