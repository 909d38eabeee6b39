//! Truncated divergence-free vector fields on the torus `[0,2π)²`.
//!
//! A field is `u(ξ) = Σ_k u_k e_k(ξ)` over `k ∈ Z² \ {0}` with `|k|∞ ≤ N/2`,
//! on the orthonormal basis
//!
//! ```text
//! e_k(ξ) = k^⊥ / (2π|k|) · e^{ik·ξ},     k^⊥ = (−k₂, k₁),
//! ```
//!
//! and real fields satisfy `conj(u_k) = −u_{−k}`. Only the canonical half
//! of the lattice (`k₂ > 0`, or `k₂ = 0` and `k₁ > 0`) is stored; the partner
//! coefficient is implied, so the reality condition cannot be broken.
//!
//! All basis normalization lives here: the vector Fourier coefficient of
//! `u_k e_k` is `u_k k^⊥/(2π|k|)`, and the inverse projection is
//! `u_k = 2π k^⊥·ŵ_k/|k|` for a vector field with Fourier coefficients `ŵ_k`.
//! This projection is the Leray projection onto the `e_k` span.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fft::{unwrap, Fft2};
use crate::math;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerance for deciding that two conjugate-pair entries agree.
pub const CONJUGATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeIndex {
    pub k1: i64,
    pub k2: i64,
}

impl ModeIndex {
    pub const fn new(k1: i64, k2: i64) -> Self {
        Self { k1, k2 }
    }

    pub const fn norm_sq(self) -> i64 {
        self.k1 * self.k1 + self.k2 * self.k2
    }

    pub fn norm(self) -> f64 {
        math::sqrt(self.norm_sq() as f64)
    }

    pub const fn max_abs(self) -> i64 {
        let a = self.k1.abs();
        let b = self.k2.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub const fn is_zero(self) -> bool {
        self.k1 == 0 && self.k2 == 0
    }

    /// Representative of `{k, −k}` that is stored.
    pub const fn is_canonical(self) -> bool {
        self.k2 > 0 || (self.k2 == 0 && self.k1 > 0)
    }

    pub const fn neg(self) -> Self {
        Self::new(-self.k1, -self.k2)
    }

    /// `k^⊥ = (−k₂, k₁)`.
    pub const fn perp(self) -> (i64, i64) {
        (-self.k2, self.k1)
    }
}

/// Number of stored coefficients at resolution `n`.
pub const fn half_lattice_len(n: usize) -> usize {
    let h = n / 2;
    h + h * (n + 1)
}

/// Position of a canonical mode in storage order (rows of increasing `k₂`,
/// `k₁` increasing within a row).
pub fn canonical_position(n: usize, k: ModeIndex) -> Option<usize> {
    let h = (n / 2) as i64;
    if !k.is_canonical() || k.max_abs() > h {
        return None;
    }
    if k.k2 == 0 {
        Some((k.k1 - 1) as usize)
    } else {
        Some((h + (k.k2 - 1) * (n as i64 + 1) + (k.k1 + h)) as usize)
    }
}

/// Canonical modes of resolution `n` in storage order.
pub fn canonical_modes(n: usize) -> impl Iterator<Item = ModeIndex> + Clone {
    let h = (n / 2) as i64;
    let first = (1..=h).map(|k1| ModeIndex::new(k1, 0));
    let rest = (1..=h).flat_map(move |k2| (-h..=h).map(move |k1| ModeIndex::new(k1, k2)));
    first.chain(rest)
}

fn check_resolution(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::ResolutionMismatch(format!(
            "resolution N={n} must be even and at least 2"
        )));
    }
    Ok(())
}

/// Truncated real divergence-free field, stored on the canonical half-lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(n: usize) -> Result<Self> {
        check_resolution(n)?;
        Ok(Self {
            n,
            coeffs: vec![ZERO; half_lattice_len(n)],
        })
    }

    /// Builds a field from explicit coefficients, filling in conjugate
    /// partners. If both `k` and `−k` are listed they must satisfy
    /// `conj(u_k) = −u_{−k}` to within [`CONJUGATE_TOL`].
    pub fn from_modes(n: usize, modes: &[(ModeIndex, Complex64)]) -> Result<Self> {
        let mut field = Self::zeros(n)?;
        let mut seen = vec![0u8; field.coeffs.len()];
        for &(k, value) in modes {
            if k.is_zero() {
                return Err(Error::ZeroMode);
            }
            if k.max_abs() > (n / 2) as i64 {
                return Err(Error::ModeOutOfRange {
                    k1: k.k1,
                    k2: k.k2,
                    n,
                });
            }
            let (canon, stored, bit) = if k.is_canonical() {
                (k, value, 1u8)
            } else {
                (k.neg(), -value.conj(), 2u8)
            };
            let pos = canonical_position(n, canon).expect("canonical mode in range");
            if seen[pos] & bit != 0 {
                return Err(Error::DuplicateMode { k1: k.k1, k2: k.k2 });
            }
            if seen[pos] != 0 {
                let existing = field.coeffs[pos];
                let scale = existing.norm().max(stored.norm()).max(1.0);
                if (existing - stored).norm() > CONJUGATE_TOL * scale {
                    return Err(Error::InconsistentConjugatePair {
                        k1: canon.k1,
                        k2: canon.k2,
                    });
                }
            }
            seen[pos] |= bit;
            field.coeffs[pos] = stored;
        }
        Ok(field)
    }

    /// Wraps coefficients already in canonical storage order.
    pub fn from_canonical(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        check_resolution(n)?;
        if coeffs.len() != half_lattice_len(n) {
            return Err(Error::ResolutionMismatch(format!(
                "{} coefficients given, N={n} needs {}",
                coeffs.len(),
                half_lattice_len(n)
            )));
        }
        Ok(Self { n, coeffs })
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `e_k` for any `k`; zero outside the resolved set.
    pub fn coeff(&self, k: ModeIndex) -> Complex64 {
        if k.is_zero() {
            return ZERO;
        }
        if k.is_canonical() {
            canonical_position(self.n, k).map_or(ZERO, |p| self.coeffs[p])
        } else {
            canonical_position(self.n, k.neg()).map_or(ZERO, |p| -self.coeffs[p].conj())
        }
    }

    /// Canonical modes with their coefficients, in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (ModeIndex, Complex64)> + '_ {
        canonical_modes(self.n).zip(self.coeffs.iter().copied())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// New field with each canonical coefficient replaced by `f(k, u_k)`.
    ///
    /// `f` must commute with the conjugate symmetry, i.e. be real-linear
    /// with a real multiplier depending only on `|k|` or similar.
    pub fn map_modes(&self, mut f: impl FnMut(ModeIndex, Complex64) -> Complex64) -> Self {
        Self {
            n: self.n,
            coeffs: self.iter().map(|(k, c)| f(k, c)).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map_modes(|_, c| c * factor)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ResolutionMismatch(format!(
                "N={} vs N={}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(1.0, other, -1.0)
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x * a + y * b)
                .collect(),
        })
    }

    /// Multiplies the coefficient at storage position `i` by `factors[i]`.
    pub(crate) fn scaled_by(&self, factors: &[f64]) -> Self {
        debug_assert_eq!(factors.len(), self.coeffs.len());
        Self {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(factors)
                .map(|(c, f)| c * *f)
                .collect(),
        }
    }

    /// `self += a·other`, in place.
    pub(crate) fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
    }

    /// `L₂` inner product `Σ_k u_k conj(v_k)` over the full lattice (real).
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(2.0
            * self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| (a * b.conj()).re)
                .sum::<f64>())
    }

    /// `Σ_k |u_k|²` over the full lattice, the squared `L₂` norm.
    pub fn l2_norm_sq(&self) -> f64 {
        2.0 * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        math::sqrt(self.l2_norm_sq())
    }

    /// Squared `H^s_2` norm `Σ_k |k|^{2s}|u_k|²`, exact by Parseval.
    pub fn hilbert_norm_sq(&self, s: f64) -> f64 {
        2.0 * self
            .iter()
            .map(|(k, c)| c.norm_sqr() * math::powf(k.norm_sq() as f64, s))
            .sum::<f64>()
    }

    pub fn hilbert_norm(&self, s: f64) -> f64 {
        math::sqrt(self.hilbert_norm_sq(s))
    }

    /// Largest `|u_k|`.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Keeps modes with `|k|∞ ≤ cutoff`.
    pub fn truncate_linf(&self, cutoff: i64) -> Self {
        self.map_modes(|k, c| if k.max_abs() <= cutoff { c } else { ZERO })
    }

    /// Keeps modes with `|k| ≤ cutoff` (Euclidean).
    pub fn low_pass(&self, cutoff: i64) -> Self {
        self.map_modes(|k, c| {
            if k.norm_sq() <= cutoff * cutoff {
                c
            } else {
                ZERO
            }
        })
    }

    /// Support of the 2/3-rule Galerkin space: `|k|∞ ≤ ⌊N/3⌋`.
    pub fn dealias_cutoff(n: usize) -> i64 {
        (n / 3) as i64
    }

    pub fn dealiased(&self) -> Self {
        self.truncate_linf(Self::dealias_cutoff(self.n))
    }

    /// Same coefficients at another resolution (zero-padded or truncated).
    pub fn with_resolution(&self, n: usize) -> Result<Self> {
        let mut out = Self::zeros(n)?;
        for (k, c) in self.iter() {
            if let Some(p) = canonical_position(n, k) {
                out.coeffs[p] = c;
            }
        }
        Ok(out)
    }

    /// Vector Fourier coefficient `(c₁, c₂) = u_k k^⊥/(2π|k|)` for canonical `k`.
    pub fn vector_coeff(k: ModeIndex, u: Complex64) -> (Complex64, Complex64) {
        let (p1, p2) = k.perp();
        let scale = 1.0 / (2.0 * PI * k.norm());
        (u * (p1 as f64 * scale), u * (p2 as f64 * scale))
    }

    /// Inverse of [`Self::vector_coeff`] composed with the Leray projection:
    /// `2π k^⊥·(w₁, w₂)/|k|`.
    pub fn project_coeff(k: ModeIndex, w1: Complex64, w2: Complex64) -> Complex64 {
        let (p1, p2) = k.perp();
        (w1 * p1 as f64 + w2 * p2 as f64) * (2.0 * PI / k.norm())
    }
}

/// Samples of a vector field on the uniform `m×m` grid of `[0,2π)²`,
/// `values[i*m + j]` at `(2πi/m, 2πj/m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub m: usize,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl GridField {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            u1: vec![0.0; m * m],
            u2: vec![0.0; m * m],
        }
    }

    /// Samples `f(ξ₁, ξ₂)` at every node.
    pub fn from_fn(m: usize, mut f: impl FnMut(f64, f64) -> (f64, f64)) -> Self {
        let mut g = Self::zeros(m);
        let h = 2.0 * PI / m as f64;
        for i in 0..m {
            for j in 0..m {
                let (a, b) = f(i as f64 * h, j as f64 * h);
                g.u1[i * m + j] = a;
                g.u2[i * m + j] = b;
            }
        }
        g
    }

    pub fn max_abs(&self) -> f64 {
        self.u1
            .iter()
            .zip(&self.u2)
            .map(|(a, b)| math::sqrt(a * a + b * b))
            .fold(0.0, f64::max)
    }

    /// Grid means of both components.
    pub fn mean(&self) -> (f64, f64) {
        let len = (self.m * self.m) as f64;
        (
            self.u1.iter().sum::<f64>() / len,
            self.u2.iter().sum::<f64>() / len,
        )
    }
}

/// Samples of a scalar on the uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    pub m: usize,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Coefficients `ψ_k` of the stream function on `{e^{ik·ξ}/(2π)}`, stored
/// for canonical `k` (`ψ_{−k} = conj(ψ_k)`), with `u = ∇^⊥ψ`.
///
/// Per mode `ψ_k = −i u_k/|k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamFunction {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl StreamFunction {
    pub fn of(u: &SpectralField) -> Self {
        Self {
            n: u.n,
            coeffs: u
                .iter()
                .map(|(k, c)| Complex64::new(0.0, -1.0) * c / k.norm())
                .collect(),
        }
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, k: ModeIndex) -> Complex64 {
        if k.is_zero() {
            return ZERO;
        }
        if k.is_canonical() {
            canonical_position(self.n, k).map_or(ZERO, |p| self.coeffs[p])
        } else {
            canonical_position(self.n, k.neg()).map_or(ZERO, |p| self.coeffs[p].conj())
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeIndex, Complex64)> + '_ {
        canonical_modes(self.n).zip(self.coeffs.iter().copied())
    }
}

/// Transform context: an FFT backend and the grid oversampling factor.
#[derive(Debug, Clone)]
pub struct Spectral<F> {
    fft: F,
    oversample: usize,
}

impl<F: Fft2> Spectral<F> {
    /// Default oversampling `M = 2N`.
    pub fn new(fft: F) -> Self {
        Self { fft, oversample: 2 }
    }

    pub fn with_oversample(fft: F, oversample: usize) -> Result<Self> {
        if oversample < 2 {
            return Err(Error::InvalidArgument(format!(
                "oversample factor {oversample} < 2 aliases quadratic products"
            )));
        }
        Ok(Self { fft, oversample })
    }

    pub fn fft(&self) -> &F {
        &self.fft
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    /// Grid size used for a field of resolution `n`.
    pub fn grid_size(&self, n: usize) -> usize {
        self.oversample * n
    }

    fn check_grid(n: usize, m: usize) -> Result<()> {
        // At m = n the ±N/2 modes alias onto each other.
        if m <= n {
            return Err(Error::ResolutionMismatch(format!(
                "grid M={m} must exceed N={n}"
            )));
        }
        Ok(())
    }

    /// Evaluates two real fields given by their Fourier coefficients on the
    /// canonical modes of resolution `n`; returns the grid samples.
    pub(crate) fn synthesize_pair(
        &self,
        n: usize,
        m: usize,
        mut coeff: impl FnMut(usize, ModeIndex) -> (Complex64, Complex64),
    ) -> (Vec<f64>, Vec<f64>) {
        let mut z = vec![ZERO; m * m];
        for (pos, k) in canonical_modes(n).enumerate() {
            let (a, b) = coeff(pos, k);
            let i = Complex64::new(0.0, 1.0);
            z[unwrap(k.k1, m) * m + unwrap(k.k2, m)] = a + i * b;
            z[unwrap(-k.k1, m) * m + unwrap(-k.k2, m)] = a.conj() + i * b.conj();
        }
        self.fft.inverse(&mut z, m);
        (
            z.iter().map(|c| c.re).collect(),
            z.iter().map(|c| c.im).collect(),
        )
    }

    /// Forward transform of two real grids; the returned closure-free table
    /// yields normalized Fourier coefficients through [`PairSpectrum::get`].
    pub(crate) fn analyze_pair(&self, m: usize, w1: &[f64], w2: &[f64]) -> PairSpectrum {
        let mut z: Vec<Complex64> = w1
            .iter()
            .zip(w2)
            .map(|(a, b)| Complex64::new(*a, *b))
            .collect();
        self.fft.forward(&mut z, m);
        let scale = 1.0 / (m * m) as f64;
        for c in &mut z {
            *c *= scale;
        }
        PairSpectrum { m, z }
    }

    /// Grid samples of `u` on an `m×m` grid, `m > N`.
    pub fn to_grid(&self, u: &SpectralField, m: usize) -> Result<GridField> {
        Self::check_grid(u.n, m)?;
        let coeffs = &u.coeffs;
        let (u1, u2) =
            self.synthesize_pair(u.n, m, |pos, k| SpectralField::vector_coeff(k, coeffs[pos]));
        Ok(GridField { m, u1, u2 })
    }

    /// [`Self::to_grid`] at the default grid size.
    pub fn grid(&self, u: &SpectralField) -> GridField {
        self.to_grid(u, self.grid_size(u.n))
            .expect("default grid exceeds resolution")
    }

    /// Projects grid samples onto the divergence-free basis up to resolution
    /// `n` (Leray projection + truncation). Requires `m > n`.
    pub fn from_grid(&self, grid: &GridField, n: usize) -> Result<SpectralField> {
        check_resolution(n)?;
        Self::check_grid(n, grid.m)?;
        let spec = self.analyze_pair(grid.m, &grid.u1, &grid.u2);
        let coeffs = canonical_modes(n)
            .map(|k| {
                let (w1, w2) = spec.get(k);
                SpectralField::project_coeff(k, w1, w2)
            })
            .collect();
        Ok(SpectralField { n, coeffs })
    }

    /// Spectral derivatives of grid data: `∂ⱼuᵢ` for the four index pairs,
    /// returned as `[∂₁u₁, ∂₂u₁, ∂₁u₂, ∂₂u₂]`.
    pub fn grid_gradient(&self, grid: &GridField) -> [Vec<f64>; 4] {
        let m = grid.m;
        let spec = self.analyze_pair(m, &grid.u1, &grid.u2);
        let half = (m / 2) as i64;
        // all resolvable modes except the Nyquist line
        let n = 2 * (half - 1).max(1) as usize;
        let i = Complex64::new(0.0, 1.0);
        let (d11, d21) = self.synthesize_pair(n, m, |_, k| {
            let (w1, _) = spec.get(k);
            (i * k.k1 as f64 * w1, i * k.k2 as f64 * w1)
        });
        let (d12, d22) = self.synthesize_pair(n, m, |_, k| {
            let (_, w2) = spec.get(k);
            (i * k.k1 as f64 * w2, i * k.k2 as f64 * w2)
        });
        [d11, d21, d12, d22]
    }

    /// `[∂₁u₁, ∂₂u₁, ∂₁u₂, ∂₂u₂]` of a spectral field on an `m×m` grid.
    pub fn gradient_to_grid(&self, u: &SpectralField, m: usize) -> Result<[Vec<f64>; 4]> {
        Self::check_grid(u.n, m)?;
        let i = Complex64::new(0.0, 1.0);
        let coeffs = &u.coeffs;
        let (d11, d21) = self.synthesize_pair(u.n, m, |pos, k| {
            let (c1, _) = SpectralField::vector_coeff(k, coeffs[pos]);
            (i * k.k1 as f64 * c1, i * k.k2 as f64 * c1)
        });
        let (d12, d22) = self.synthesize_pair(u.n, m, |pos, k| {
            let (_, c2) = SpectralField::vector_coeff(k, coeffs[pos]);
            (i * k.k1 as f64 * c2, i * k.k2 as f64 * c2)
        });
        Ok([d11, d21, d12, d22])
    }

    /// `(max|∇·u|, max|∇u|)` on the grid, derivatives taken spectrally.
    pub fn divergence_check(&self, grid: &GridField) -> (f64, f64) {
        let [d11, d21, d12, d22] = self.grid_gradient(grid);
        let mut max_div = 0.0f64;
        let mut max_grad = 0.0f64;
        for idx in 0..grid.m * grid.m {
            max_div = max_div.max((d11[idx] + d22[idx]).abs());
            let frob = d11[idx] * d11[idx]
                + d21[idx] * d21[idx]
                + d12[idx] * d12[idx]
                + d22[idx] * d22[idx];
            max_grad = max_grad.max(math::sqrt(frob));
        }
        (max_div, max_grad)
    }

    /// `ψ` sampled on an `m×m` grid.
    pub fn stream_to_grid(&self, psi: &StreamFunction, m: usize) -> Result<ScalarGrid> {
        Self::check_grid(psi.n, m)?;
        let coeffs = &psi.coeffs;
        let norm = 1.0 / (2.0 * PI);
        let (values, _) = self.synthesize_pair(psi.n, m, |pos, _| (coeffs[pos] * norm, ZERO));
        Ok(ScalarGrid { m, values })
    }

    /// `∇^⊥ψ = (−∂₂ψ, ∂₁ψ)` sampled on an `m×m` grid.
    pub fn stream_perp_gradient(&self, psi: &StreamFunction, m: usize) -> Result<GridField> {
        Self::check_grid(psi.n, m)?;
        let coeffs = &psi.coeffs;
        let norm = 1.0 / (2.0 * PI);
        let i = Complex64::new(0.0, 1.0);
        let (u1, u2) = self.synthesize_pair(psi.n, m, |pos, k| {
            let c = coeffs[pos] * norm;
            (-(i * k.k2 as f64) * c, i * k.k1 as f64 * c)
        });
        Ok(GridField { m, u1, u2 })
    }
}

/// Normalized spectrum of a packed pair of real grids.
pub(crate) struct PairSpectrum {
    m: usize,
    z: Vec<Complex64>,
}

impl PairSpectrum {
    /// Fourier coefficients `(ŵ₁(k), ŵ₂(k))` of the two packed real grids.
    pub(crate) fn get(&self, k: ModeIndex) -> (Complex64, Complex64) {
        let m = self.m;
        let zk = self.z[unwrap(k.k1, m) * m + unwrap(k.k2, m)];
        let zmk = self.z[unwrap(-k.k1, m) * m + unwrap(-k.k2, m)].conj();
        let w1 = (zk + zmk) * 0.5;
        let w2 = (zk - zmk) * Complex64::new(0.0, -0.5);
        (w1, w2)
    }
}

/// Random field `u_k = amplitude·|k|^{−γ} ξ_k` with `ξ_k` complex standard
/// normal (`E|ξ|² = 1`). Each `ξ_k` comes from the ChaCha8 stream `k` of
/// the seed, so a sample at resolution `N` is the truncation of the sample
/// at any larger resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RandomFieldSpec {
    pub gamma: f64,
    pub seed: u64,
    pub amplitude: f64,
    /// Keep only `|k|∞ ≤ cutoff`; `None` keeps every resolved mode.
    pub cutoff: Option<i64>,
}

impl RandomFieldSpec {
    pub fn new(gamma: f64, seed: u64) -> Self {
        Self {
            gamma,
            seed,
            amplitude: 1.0,
            cutoff: None,
        }
    }

    pub fn amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn cutoff(mut self, cutoff: i64) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn sample(&self, n: usize) -> Result<SpectralField> {
        let mut field = SpectralField::zeros(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let half = core::f64::consts::FRAC_1_SQRT_2;
        for (k, slot) in canonical_modes(n).zip(field.coeffs.iter_mut()) {
            if self.cutoff.is_some_and(|c| k.max_abs() > c) {
                continue;
            }
            rng.set_stream(((k.k1 as u32 as u64) << 32) | k.k2 as u32 as u64);
            rng.set_word_pos(0);
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let weight = self.amplitude * math::powf(k.norm(), -self.gamma);
            *slot = Complex64::new(re * half, im * half) * weight;
        }
        Ok(field)
    }
}

/// Random field over all resolved modes; see [`RandomFieldSpec`].
pub fn random_field(n: usize, gamma: f64, seed: u64) -> Result<SpectralField> {
    RandomFieldSpec::new(gamma, seed).sample(n)
}

/// Decay exponent whose ensemble sits at the borderline of `H^σ_2`:
/// `Σ|k|^{2σ−2γ}` diverges logarithmically when `γ = σ + 1`.
pub fn critical_gamma(sigma: f64) -> f64 {
    sigma + 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft::NaiveDft;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn storage_order_round_trips() {
        for n in [2usize, 4, 6, 8] {
            let modes: Vec<_> = canonical_modes(n).collect();
            assert_eq!(modes.len(), half_lattice_len(n));
            for (i, k) in modes.iter().enumerate() {
                assert_eq!(canonical_position(n, *k), Some(i));
                assert!(k.is_canonical());
            }
        }
    }

    #[test]
    fn from_modes_fills_partner() {
        let u = SpectralField::from_modes(8, &[(ModeIndex::new(2, 0), c(1.0, 0.0))]).unwrap();
        assert_eq!(u.coeff(ModeIndex::new(-2, 0)), c(-1.0, 0.0));
        let v = SpectralField::from_modes(8, &[(ModeIndex::new(-1, -3), c(0.5, 2.0))]).unwrap();
        assert_eq!(v.coeff(ModeIndex::new(1, 3)), c(-0.5, 2.0));
    }

    #[test]
    fn from_modes_errors() {
        let k = ModeIndex::new(2, 0);
        assert_eq!(
            SpectralField::from_modes(8, &[(k, c(1.0, 0.0)), (k.neg(), c(1.0, 0.0))]),
            Err(Error::InconsistentConjugatePair { k1: 2, k2: 0 })
        );
        assert!(SpectralField::from_modes(8, &[(k, c(1.0, 0.0)), (k.neg(), c(-1.0, 0.0))]).is_ok());
        assert_eq!(
            SpectralField::from_modes(8, &[(ModeIndex::new(0, 0), c(1.0, 0.0))]),
            Err(Error::ZeroMode)
        );
        assert!(matches!(
            SpectralField::from_modes(8, &[(ModeIndex::new(5, 0), c(1.0, 0.0))]),
            Err(Error::ModeOutOfRange { .. })
        ));
        assert!(SpectralField::zeros(7).is_err());
    }

    #[test]
    fn empty_mode_list_is_zero_field() {
        let u = SpectralField::from_modes(8, &[]).unwrap();
        assert!(u.is_zero());
        assert_eq!(u.l2_norm(), 0.0);
    }

    #[test]
    fn single_mode_grid_values() {
        let sp = Spectral::new(NaiveDft);
        let u = SpectralField::from_modes(8, &[(ModeIndex::new(2, 0), c(1.0, 0.0))]).unwrap();
        let g = sp.to_grid(&u, 16).unwrap();
        let h = 2.0 * PI / 16.0;
        for i in 0..16 {
            for j in 0..16 {
                let x1 = i as f64 * h;
                assert!(g.u1[i * 16 + j].abs() < 1e-14);
                assert!((g.u2[i * 16 + j] - (2.0 * x1).cos() / PI).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn grid_must_exceed_resolution() {
        let sp = Spectral::new(NaiveDft);
        let u = SpectralField::zeros(8).unwrap();
        assert!(matches!(
            sp.to_grid(&u, 8),
            Err(Error::ResolutionMismatch(_))
        ));
    }

    #[test]
    fn gradient_fields_project_to_zero() {
        let sp = Spectral::new(NaiveDft);
        // ∇cos(ξ₁+ξ₂) = −sin(ξ₁+ξ₂)(1,1)
        let g = GridField::from_fn(12, |a, b| (-(a + b).sin(), -(a + b).sin()));
        let u = sp.from_grid(&g, 4).unwrap();
        assert!(u.max_abs_coeff() < 1e-14);
    }

    #[test]
    fn stream_function_of_shear_mode_is_sine() {
        let sp = Spectral::new(NaiveDft);
        let u = SpectralField::from_modes(8, &[(ModeIndex::new(2, 0), c(1.0, 0.0))]).unwrap();
        let psi = StreamFunction::of(&u);
        let grid = sp.stream_to_grid(&psi, 16).unwrap();
        let h = 2.0 * PI / 16.0;
        for i in 0..16 {
            for j in 0..16 {
                let expected = (2.0 * i as f64 * h).sin() / (2.0 * PI);
                assert!((grid.values[i * 16 + j] - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn random_field_is_deterministic() {
        let a = random_field(8, 1.0, 42).unwrap();
        let b = random_field(8, 1.0, 42).unwrap();
        let d = random_field(8, 1.0, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, d);
        let cut = RandomFieldSpec::new(1.0, 42).cutoff(2).sample(8).unwrap();
        for (k, v) in cut.iter() {
            if k.max_abs() > 2 {
                assert_eq!(v, ZERO);
            } else {
                assert_eq!(v, a.coeff(k));
            }
        }
    }

    #[test]
    fn random_fields_are_nested_in_resolution() {
        let coarse = random_field(8, 1.5, 7).unwrap();
        let fine = random_field(16, 1.5, 7).unwrap();
        for (k, v) in coarse.iter() {
            assert_eq!(v, fine.coeff(k));
        }
    }

    #[test]
    fn inner_product_matches_parseval_sum() {
        let a = random_field(6, 0.5, 1).unwrap();
        let b = random_field(6, 0.5, 2).unwrap();
        let full: f64 = (-3..=3)
            .flat_map(|k1| (-3..=3).map(move |k2| ModeIndex::new(k1, k2)))
            .filter(|k| !k.is_zero())
            .map(|k| (a.coeff(k) * b.coeff(k).conj()).re)
            .sum();
        assert!((a.inner(&b).unwrap() - full).abs() < 1e-13);
    }
}
