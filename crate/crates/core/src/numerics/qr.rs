use super::{ComplexMatrix, NumericsError, C64};

const RANK_TOL: f64 = 1e-10;

/// Factors of `A = G·Q` for a wide `K × R` matrix (`K ≤ R`).
#[derive(Debug, Clone)]
pub struct QrFactors {
    /// `K × K` upper triangular with real non-negative diagonal.
    pub g: ComplexMatrix,
    /// `K × R` with orthonormal rows.
    pub q: ComplexMatrix,
}

impl QrFactors {
    pub fn diag(&self) -> Vec<f64> {
        (0..self.g.rows()).map(|i| self.g[(i, i)].re).collect()
    }
}

/// Row-wise Gram–Schmidt from the last row upwards, so that row `i` of `A`
/// only involves `q_i..q_K` and `G` comes out upper triangular.
///
/// Each projection pass is done twice ("twice is enough") to keep `Q·Qᴴ`
/// at machine precision for moderately conditioned inputs.
///
/// The rank test compares the smallest diagonal of `G` to the largest row
/// norm of `A`; that ratio upper-bounds `σ_min/σ_max`, so a failure here is
/// always a genuine rank deficiency at the `1e-10` level.
pub fn qr_decompose(a: &ComplexMatrix) -> Result<QrFactors, NumericsError> {
    let (k, r) = a.shape();
    if k > r {
        return Err(NumericsError::DimMismatch { expected: (k, k), found: (k, r) });
    }
    if !a.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let max_row_norm = (0..k).map(|i| a.row(i).norm()).fold(0.0, f64::max);
    if max_row_norm == 0.0 {
        return Err(NumericsError::RankDeficient);
    }

    let mut g = ComplexMatrix::zeros(k, k);
    let mut q = ComplexMatrix::zeros(k, r);
    for i in (0..k).rev() {
        let mut v: Vec<C64> = (0..r).map(|c| a[(i, c)]).collect();
        for _pass in 0..2 {
            for j in (i + 1)..k {
                // coefficient of q_j in row i: v · q_jᴴ
                let coef: C64 = (0..r).map(|c| v[c] * q[(j, c)].conj()).sum();
                g[(i, j)] += coef;
                for c in 0..r {
                    v[c] -= coef * q[(j, c)];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < RANK_TOL * max_row_norm {
            return Err(NumericsError::RankDeficient);
        }
        g[(i, i)] = C64::new(norm, 0.0);
        for c in 0..r {
            q[(i, c)] = v[c] / norm;
        }
    }
    Ok(QrFactors { g, q })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_scaled_identity() {
        let f = qr_decompose(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(f.g, ComplexMatrix::identity(3));
        assert_eq!(f.q, ComplexMatrix::identity(3));

        let f = qr_decompose(&ComplexMatrix::identity(2).scale_real(2.0)).unwrap();
        assert_eq!(f.g, ComplexMatrix::identity(2).scale_real(2.0));
        assert_eq!(f.q, ComplexMatrix::identity(2));
    }

    #[test]
    fn rank_deficient_rows() {
        let a = ComplexMatrix::from_fn(2, 3, |_, j| C64::new(j as f64 + 1.0, 0.0));
        assert!(matches!(qr_decompose(&a), Err(NumericsError::RankDeficient)));
        assert!(matches!(qr_decompose(&ComplexMatrix::zeros(2, 2)), Err(NumericsError::RankDeficient)));
    }

    #[test]
    fn tall_input_rejected() {
        assert!(qr_decompose(&ComplexMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn upper_triangular_structure() {
        let a = ComplexMatrix::from_fn(3, 4, |i, j| C64::new((i * 4 + j) as f64 % 5.0 + 1.0, (i as f64) - (j as f64)));
        let f = qr_decompose(&a).unwrap();
        for i in 0..3 {
            for j in 0..i {
                assert_eq!(f.g[(i, j)], C64::new(0.0, 0.0));
            }
            assert!(f.g[(i, i)].re > 0.0 && f.g[(i, i)].im == 0.0);
        }
        assert!(f.g.matmul(&f.q).max_abs_diff(&a) < 1e-12);
    }
}
