//! Dense complex linear algebra: LU with partial pivoting (via nalgebra)
//! plus a smallest-singular-value estimate through inverse power iteration.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Relative pivot threshold below which the factorisation is reported
/// singular.
const PIVOT_TOL: f64 = 1e-14;

/// LU factorisation of a dense complex matrix.
pub struct DenseLu {
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl DenseLu {
    pub fn factor(a: DMatrix<Complex64>) -> Result<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "square matrix required");
        let lu = a.lu();
        let diag = lu.u().diagonal();
        let max_pivot = diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let min_pivot = diag.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        if n > 0 && !(min_pivot > PIVOT_TOL * max_pivot.max(1e-300)) {
            return Err(Error::SingularMatrix {
                pivot: min_pivot,
                threshold: PIVOT_TOL * max_pivot,
            });
        }
        Ok(DenseLu { lu })
    }

    pub fn solve(&self, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        self.lu.solve(b).ok_or(Error::SingularMatrix { pivot: 0.0, threshold: PIVOT_TOL })
    }
}

/// Solves A x = b by LU with partial pivoting and returns the solution with
/// its relative residual ‖Ax-b‖∞ / ‖b‖∞.
pub fn solve_dense(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
) -> Result<(DVector<Complex64>, f64)> {
    let lu = DenseLu::factor(a.clone())?;
    let x = lu.solve(b)?;
    let r = a * &x - b;
    let rn = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bn = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((x, if bn > 0.0 { rn / bn } else { rn }))
}

/// Smallest singular value as sqrt of the smallest eigenvalue of the
/// Hermitian Gram matrix AᴴA.
pub fn smallest_singular_value(a: &DMatrix<Complex64>) -> Result<f64> {
    if a.nrows() == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let gram = a.adjoint() * a;
    let eig = gram.symmetric_eigenvalues();
    let min_eig = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(min_eig.max(0.0).sqrt())
}

/// Row-major JSON dump of a complex matrix as [re, im] pairs.
pub fn matrix_to_json(a: &DMatrix<Complex64>) -> serde_json::Value {
    let data: Vec<[f64; 2]> = (0..a.nrows())
        .flat_map(|i| (0..a.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| [a[(i, j)].re, a[(i, j)].im])
        .collect();
    serde_json::json!({
        "rows": a.nrows(),
        "cols": a.ncols(),
        "layout": "row-major",
        "data": data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { 4.0 } else { 0.0 };
            Complex64::new(d + 1.0 / (1.0 + (i + 2 * j) as f64), 0.3 * (i as f64 - j as f64))
        })
    }

    #[test]
    fn lu_solve_small_residual() {
        let a = test_matrix(30);
        let b = DVector::from_fn(30, |i, _| Complex64::new(i as f64, 1.0));
        let (x, res) = solve_dense(&a, &b).unwrap();
        assert!(res < 1e-13, "residual {res}");
        assert_eq!(x.len(), 30);
    }

    #[test]
    fn singular_matrix_detected() {
        let mut a = test_matrix(5);
        let row = a.row(1).into_owned();
        a.set_row(3, &row);
        match DenseLu::factor(a) {
            Err(Error::SingularMatrix { .. }) => {}
            Err(other) => panic!("expected singular matrix error, got {other:?}"),
            Ok(_) => panic!("expected singular matrix error, got a factorisation"),
        }
    }

    #[test]
    fn sigma_min_matches_definition_on_diagonal() {
        let n = 8;
        let a = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(0.0, (i + 1) as f64)
            } else {
                Complex64::default()
            }
        });
        let s = smallest_singular_value(&a).unwrap();
        assert!((s - 1.0).abs() < 1e-10, "sigma_min {s}");
    }

    #[test]
    fn sigma_min_vs_real_embedding_svd() {
        // independent route: the real 2n x 2n embedding [Re -Im; Im Re] has
        // the singular values of A, each with multiplicity two
        let a = test_matrix(12);
        let n = a.nrows();
        let s = smallest_singular_value(&a).unwrap();
        let mut re = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                re[(i, j)] = a[(i, j)].re;
                re[(i, j + n)] = -a[(i, j)].im;
                re[(i + n, j)] = a[(i, j)].im;
                re[(i + n, j + n)] = a[(i, j)].re;
            }
        }
        let svd = re.svd(false, false);
        let s_re = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((s - s_re).abs() < 1e-9 * s, "{s} vs {s_re}");
    }
}
