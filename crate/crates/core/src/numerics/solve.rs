use super::{ComplexMatrix, NumericsError, C64};

const HERMITIAN_TOL: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-12;

/// Solves `A·X = B` for Hermitian positive definite `A` by Cholesky.
///
/// A pivot below `1e-12·max diag(A)` is reported as `IllConditioned`: every
/// Cholesky pivot bounds the smallest eigenvalue from above, and the largest
/// diagonal bounds the largest eigenvalue from below.
pub fn solve_hermitian(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    let n = a.rows();
    if !a.is_square() {
        return Err(NumericsError::NotSquare(a.rows(), a.cols()));
    }
    if b.rows() != n {
        return Err(NumericsError::DimMismatch { expected: (n, b.cols()), found: b.shape() });
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(NumericsError::NonHermitian(defect));
    }
    let l = cholesky(a)?;

    let m = b.cols();
    let mut x = b.clone();
    // forward: L·Y = B
    for col in 0..m {
        for i in 0..n {
            let mut acc = x[(i, col)];
            for k in 0..i {
                acc -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = acc / l[(i, i)].re;
        }
        // backward: Lᴴ·X = Y
        for i in (0..n).rev() {
            let mut acc = x[(i, col)];
            for k in (i + 1)..n {
                acc -= l[(k, i)].conj() * x[(k, col)];
            }
            x[(i, col)] = acc / l[(i, i)].re;
        }
    }
    Ok(x)
}

/// Inverse of a Hermitian positive definite matrix.
pub fn inverse_hermitian(a: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    let inv = solve_hermitian(a, &ComplexMatrix::identity(a.rows()))?;
    // symmetrize round-off
    let n = inv.rows();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| (inv[(i, j)] + inv[(j, i)].conj()) * 0.5))
}

fn cholesky(a: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    let n = a.rows();
    let max_diag = (0..n).map(|i| a[(i, i)].re).fold(0.0, f64::max);
    if max_diag <= 0.0 {
        return Err(NumericsError::IllConditioned);
    }
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= PIVOT_TOL * max_diag {
            return Err(NumericsError::IllConditioned);
        }
        let ljj = d.sqrt();
        l[(j, j)] = C64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / ljj;
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let b = ComplexMatrix::from_fn(3, 2, |i, j| C64::new(i as f64, j as f64 - 1.0));
        let x = solve_hermitian(&ComplexMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_system() {
        let a = ComplexMatrix::from_real_diag(&[2.0, 4.0]);
        let x = solve_hermitian(&a, &ComplexMatrix::identity(2)).unwrap();
        assert!(x.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.5, 0.25])) < 1e-15);
    }

    #[test]
    fn singular_is_ill_conditioned() {
        let a = ComplexMatrix::from_fn(2, 2, |_, _| C64::new(1.0, 0.0));
        assert!(matches!(
            solve_hermitian(&a, &ComplexMatrix::identity(2)),
            Err(NumericsError::IllConditioned)
        ));
        let a = ComplexMatrix::from_real_diag(&[1.0, 1e-14]);
        assert!(matches!(inverse_hermitian(&a), Err(NumericsError::IllConditioned)));
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut a = ComplexMatrix::identity(2);
        a[(1, 0)] = C64::new(0.0, 0.5);
        assert!(matches!(
            solve_hermitian(&a, &ComplexMatrix::identity(2)),
            Err(NumericsError::NonHermitian(_))
        ));
    }
}
