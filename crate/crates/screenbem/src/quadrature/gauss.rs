//! Gauss–Legendre rules, cached per order, plus collapsed rules on triangles.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

static RULE_CACHE: Lazy<RwLock<HashMap<usize, Arc<Vec<(f64, f64)>>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Arc<Vec<(f64, f64)>> {
    assert!(n >= 1, "quadrature order must be at least 1");
    if let Some(rule) = RULE_CACHE.read().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    RULE_CACHE.write().unwrap().insert(n, rule.clone());
    rule
}

/// Newton iteration on the Legendre polynomial recurrence.
fn compute_gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    if n == 1 {
        return (x, 1.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// n-point rule mapped onto [a, b].
pub fn gauss_on_interval(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    rule.iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Collapsed tensor rule on a triangle given by its vertices; returns points
/// (in the plane) and weights summing to the triangle area.
pub fn gauss_on_triangle(tri: &[[f64; 2]; 3], order: usize) -> Vec<([f64; 2], f64)> {
    let rule = gauss_legendre(order);
    let area = triangle_area(tri);
    let mut out = Vec::with_capacity(order * order);
    for &(xu, wu) in rule.iter() {
        let u = 0.5 * (xu + 1.0);
        for &(xv, wv) in rule.iter() {
            let v = 0.5 * (xv + 1.0) * (1.0 - u);
            // reference weight: (1/4) du dv jacobian (1-u), times 2*area for the map
            let w = 0.25 * wu * wv * (1.0 - u) * 2.0 * area;
            let p = [
                tri[0][0] + u * (tri[1][0] - tri[0][0]) + v * (tri[2][0] - tri[0][0]),
                tri[0][1] + u * (tri[1][1] - tri[0][1]) + v * (tri[2][1] - tri[0][1]),
            ];
            out.push((p, w));
        }
    }
    out
}

pub fn triangle_area(tri: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((tri[1][0] - tri[0][0]) * (tri[2][1] - tri[0][1])
        - (tri[2][0] - tri[0][0]) * (tri[1][1] - tri[0][1]))
        .abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1
        for n in [1, 2, 5, 10, 20] {
            let rule = gauss_legendre(n);
            for d in 0..(2 * n) {
                let got: f64 = rule.iter().map(|&(x, w)| w * x.powi(d as i32)).sum();
                let want = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
                assert!((got - want).abs() < 1e-13, "n={n} degree={d}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn gauss_on_interval_integrates_exp() {
        let rule = gauss_on_interval(0.0, 2.0, 12);
        let got: f64 = rule.iter().map(|&(x, w)| w * x.exp()).sum();
        assert!((got - (2.0_f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn triangle_rule_weights_sum_to_area_and_integrate_linears() {
        let tri = [[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]];
        let rule = gauss_on_triangle(&tri, 6);
        let area: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert!((area - 1.0).abs() < 1e-13);
        // integral of x over this triangle = area * centroid_x = 1.0 * (2/3)
        let ix: f64 = rule.iter().map(|&(p, w)| w * p[0]).sum();
        assert!((ix - 2.0 / 3.0).abs() < 1e-13);
        let iy: f64 = rule.iter().map(|&(p, w)| w * p[1]).sum();
        assert!((iy - 1.0 / 3.0).abs() < 1e-13);
    }
}
