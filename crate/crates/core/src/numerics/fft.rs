use std::f64::consts::PI;

use super::{ComplexVector, NumericsError, C64};

/// Forward DFT `X[n] = Σ_m x[m]·e^{-j2πnm/N}`, no normalization.
///
/// Iterative radix-2 decimation in time; `N` must be a power of two.
pub fn fft(x: &ComplexVector) -> Result<ComplexVector, NumericsError> {
    let mut buf = x.as_slice().to_vec();
    fft_in_place(&mut buf)?;
    Ok(ComplexVector::from_vec(buf))
}

pub fn fft_in_place(buf: &mut [C64]) -> Result<(), NumericsError> {
    let n = buf.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(NumericsError::BadLength(n));
    }
    if n == 1 {
        return Ok(());
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = -2.0 * PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                // twiddles recomputed per butterfly to avoid accumulated drift
                let w = C64::from_polar(1.0, step * k as f64);
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
    Ok(())
}
