//! Two-dimensional transform backend.
//!
//! Arrays are `m×m`, row-major, with `data[a*m + b]` holding frequency
//! `(wrap(a), wrap(b))` in spectral space and grid node
//! `(ξ₁, ξ₂) = (2πa/m, 2πb/m)` in physical space.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math;

/// Unnormalized square 2D DFT.
///
/// `forward` computes `X[k] = Σ_j x[j] e^{-2πi j·k/m}` and `inverse` the same
/// sum with `+` sign; neither scales by `1/m²`.
pub trait Fft2 {
    fn forward(&self, data: &mut [Complex64], m: usize);
    fn inverse(&self, data: &mut [Complex64], m: usize);
}

impl<T: Fft2 + ?Sized> Fft2 for &T {
    fn forward(&self, data: &mut [Complex64], m: usize) {
        (**self).forward(data, m)
    }
    fn inverse(&self, data: &mut [Complex64], m: usize) {
        (**self).inverse(data, m)
    }
}

/// Frequency stored at array position `a` of an axis of length `m`.
#[inline]
pub fn wrap(a: usize, m: usize) -> i64 {
    if a <= m / 2 {
        a as i64
    } else {
        a as i64 - m as i64
    }
}

/// Array position of frequency `k` on an axis of length `m`.
#[inline]
pub fn unwrap(k: i64, m: usize) -> usize {
    k.rem_euclid(m as i64) as usize
}

/// Separable direct DFT, `O(m³)` per transform.
///
/// Slow but has no dependencies and no shared state; used as the
/// reference backend in this crate's own tests.
#[derive(Debug, Clone, Copy, Default)]
pub struct NaiveDft;

impl NaiveDft {
    fn transform(data: &mut [Complex64], m: usize, sign: f64) {
        assert_eq!(data.len(), m * m, "array is not m×m");
        let twiddle: Vec<Complex64> = (0..m)
            .map(|j| {
                let angle = sign * 2.0 * core::f64::consts::PI * j as f64 / m as f64;
                Complex64::new(math::cos(angle), math::sin(angle))
            })
            .collect();
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        // rows
        for a in 0..m {
            let row = &data[a * m..(a + 1) * m];
            for (k, out) in line.iter_mut().enumerate() {
                *out = row
                    .iter()
                    .enumerate()
                    .map(|(j, x)| x * twiddle[(j * k) % m])
                    .sum();
            }
            data[a * m..(a + 1) * m].copy_from_slice(&line);
        }
        // columns
        for b in 0..m {
            for (k, out) in line.iter_mut().enumerate() {
                *out = (0..m).map(|j| data[j * m + b] * twiddle[(j * k) % m]).sum();
            }
            for (k, v) in line.iter().enumerate() {
                data[k * m + b] = *v;
            }
        }
    }
}

impl Fft2 for NaiveDft {
    fn forward(&self, data: &mut [Complex64], m: usize) {
        Self::transform(data, m, -1.0);
    }
    fn inverse(&self, data: &mut [Complex64], m: usize) {
        Self::transform(data, m, 1.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_frequency_round_trip() {
        let m = 6;
        let mut data = vec![Complex64::new(0.0, 0.0); m * m];
        data[unwrap(1, m) * m + unwrap(-2, m)] = Complex64::new(1.0, 0.5);
        let orig = data.clone();
        NaiveDft.inverse(&mut data, m);
        // node (a,b): e^{i(ξ1 - 2ξ2)}
        let v = data[2 * m + 1];
        let angle = 2.0 * core::f64::consts::PI * (2.0 - 2.0) / m as f64;
        let expected = Complex64::new(1.0, 0.5) * Complex64::new(angle.cos(), angle.sin());
        assert!((v - expected).norm() < 1e-12);
        NaiveDft.forward(&mut data, m);
        for (x, y) in data.iter().zip(orig.iter()) {
            assert!((x / (m * m) as f64 - y).norm() < 1e-12);
        }
    }

    #[test]
    fn wrap_unwrap() {
        assert_eq!(wrap(0, 8), 0);
        assert_eq!(wrap(4, 8), 4);
        assert_eq!(wrap(5, 8), -3);
        assert_eq!(unwrap(-3, 8), 5);
    }
}
