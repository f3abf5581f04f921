//! Cyclic Jacobi eigendecomposition for Hermitian matrices.
//!
//! Each rotation zeroes one off-diagonal pair `(p, q)` with the unitary
//!
//! ```text
//! G = [ c          s·e^{iα} ]
//!     [ -s·e^{-iα} c        ]      α = arg(a_pq)
//! ```
//!
//! which is the real Jacobi rotation conjugated by `diag(1, e^{-iα})`.
//! Sweeps run until the off-diagonal mass falls below `1e-15·‖A‖_F`.

use super::{ComplexMatrix, NumericsError, C64};

const HERMITIAN_TOL: f64 = 1e-8;
const MAX_SWEEPS: usize = 60;

/// Eigenpairs of a Hermitian matrix, eigenvalues in non-increasing order.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Columns are eigenvectors, paired with `values` by index.
    pub vectors: ComplexMatrix,
    pub values: Vec<f64>,
}

impl EigenDecomposition {
    /// `vectors · diag(values) · vectorsᴴ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for j in 0..n {
                scaled[(i, j)] *= self.values[j];
            }
        }
        scaled.matmul(&self.vectors.adjoint())
    }

    /// First `r` eigenvectors as an `n × r` matrix.
    pub fn leading_vectors(&self, r: usize) -> ComplexMatrix {
        let idx: Vec<usize> = (0..r).collect();
        self.vectors.select_columns(&idx)
    }
}

/// Eigendecomposition of a Hermitian (PSD in this crate's uses) matrix.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenDecomposition, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare(a.rows(), a.cols()));
    }
    if !a.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(NumericsError::NonHermitian(defect));
    }
    let n = a.rows();
    // work on the exactly Hermitian part
    let mut w = ComplexMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = w.frobenius_norm();

    if scale > 0.0 {
        let target = 1e-15 * scale;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&w) <= target {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut w, &mut v, p, q, scale);
                }
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep sweep order
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap_or(std::cmp::Ordering::Equal));
    Ok(EigenDecomposition {
        vectors: v.select_columns(&order),
        values: order.iter().map(|&i| diag[i]).collect(),
    })
}

fn off_diagonal_norm(w: &ComplexMatrix) -> f64 {
    let n = w.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += w[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate(w: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let apq = w[(p, q)];
    let r = apq.norm();
    if r <= 1e-300 || r < 1e-18 * scale {
        return;
    }
    let phase = apq / r;
    let app = w[(p, p)].re;
    let aqq = w[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let g_pp = C64::new(c, 0.0);
    let g_pq = phase * s;
    let g_qp = -phase.conj() * s;
    let g_qq = C64::new(c, 0.0);
    let n = w.rows();

    // W ← W·G
    for k in 0..n {
        let wkp = w[(k, p)];
        let wkq = w[(k, q)];
        w[(k, p)] = wkp * g_pp + wkq * g_qp;
        w[(k, q)] = wkp * g_pq + wkq * g_qq;
    }
    // W ← Gᴴ·W
    for k in 0..n {
        let wpk = w[(p, k)];
        let wqk = w[(q, k)];
        w[(p, k)] = g_pp.conj() * wpk + g_qp.conj() * wqk;
        w[(q, k)] = g_pq.conj() * wpk + g_qq.conj() * wqk;
    }
    w[(p, q)] = C64::new(0.0, 0.0);
    w[(q, p)] = C64::new(0.0, 0.0);
    w[(p, p)] = C64::new(w[(p, p)].re, 0.0);
    w[(q, q)] = C64::new(w[(q, q)].re, 0.0);

    // V ← V·G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}
