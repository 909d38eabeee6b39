//! `L_p`, `H^s_p` and `B^s_{p,q}` norms of truncated fields.
//!
//! Dyadic blocks follow `Δ_m u = Σ_{2^m<|k|≤2^{m+1}} u_k e_k` for `m ≥ 1`,
//! with block 0 widened to `0 < |k| ≤ 2` so that `|k| = 1` is covered.
//! `L_p` integrals are trapezoid sums on the transform grid; for `p = 2` the
//! sum is exact on trigonometric polynomials and is taken from the
//! coefficients directly.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::field::{canonical_modes, GridField, ModeIndex, ScalarGrid, Spectral, SpectralField};
use crate::math;
use crate::rational::{self, Rational};

/// Convention string attached to every [`NormReport`].
pub const BLOCK0_CONVENTION: &str =
    "block 0 = {0 < |k| <= 2}; block m >= 1 = {2^m < |k| <= 2^(m+1)}";

/// The exponent tuple `(s, p, q, r)`, exact, with `1 < p, q, r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BesovParams {
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub s: Rational,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub p: Rational,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub q: Rational,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub r: Rational,
}

impl BesovParams {
    pub fn new(s: Rational, p: Rational, q: Rational, r: Rational) -> Result<Self> {
        let one = rational::int(1);
        for (name, v) in [("p", p), ("q", q), ("r", r)] {
            if v <= one {
                return Err(Error::InvalidArgument(alloc::format!(
                    "{name} = {} must exceed 1",
                    rational::format(&v)
                )));
            }
        }
        Ok(Self { s, p, q, r })
    }

    /// Parses each exponent from an `a/b` string.
    pub fn parse(s: &str, p: &str, q: &str, r: &str) -> Result<Self> {
        Self::new(
            rational::parse(s)?,
            rational::parse(p)?,
            rational::parse(q)?,
            rational::parse(r)?,
        )
    }

    /// `−s + 2 − 2/r`, the regularity index of admissible initial data.
    pub fn initial_regularity(&self) -> Rational {
        -self.s + rational::int(2) - rational::int(2) / self.r
    }

    /// `2/p + 2/r − 1`.
    pub fn critical_index(&self) -> Rational {
        rational::int(2) / self.p + rational::int(2) / self.r - rational::int(1)
    }

    pub fn s_f64(&self) -> f64 {
        rational::to_f64(&self.s)
    }
    pub fn p_f64(&self) -> f64 {
        rational::to_f64(&self.p)
    }
    pub fn q_f64(&self) -> f64 {
        rational::to_f64(&self.q)
    }
    pub fn r_f64(&self) -> f64 {
        rational::to_f64(&self.r)
    }
}

/// Block index of a mode with `|k|² = norm_sq`.
pub fn block_index(norm_sq: i64) -> usize {
    let mut m = 0usize;
    let mut upper = 4i64;
    while norm_sq > upper {
        m += 1;
        upper *= 4;
    }
    m
}

/// Partition of the resolved canonical modes into dyadic blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicDecomposition {
    n: usize,
    blocks: Vec<Vec<ModeIndex>>,
}

impl DyadicDecomposition {
    pub fn new(n: usize) -> Self {
        let mut blocks: Vec<Vec<ModeIndex>> = Vec::new();
        for k in canonical_modes(n) {
            let m = block_index(k.norm_sq());
            if blocks.len() <= m {
                blocks.resize_with(m + 1, Vec::new);
            }
            blocks[m].push(k);
        }
        Self { n, blocks }
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    /// Canonical modes of each block; index = block number.
    pub fn blocks(&self) -> &[Vec<ModeIndex>] {
        &self.blocks
    }

    /// Restriction `Δ_m u`.
    pub fn block_field(&self, u: &SpectralField, m: usize) -> SpectralField {
        u.map_modes(|k, c| {
            if block_index(k.norm_sq()) == m {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NormKind {
    #[cfg_attr(feature = "serde", serde(rename = "L_p"))]
    Lebesgue,
    #[cfg_attr(feature = "serde", serde(rename = "H^s_p"))]
    Sobolev,
    #[cfg_attr(feature = "serde", serde(rename = "B^s_pq"))]
    Besov,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockNorm {
    pub m: usize,
    /// `‖Δ_m u‖_{L_p}`.
    pub lp: f64,
    /// `2^{ms}‖Δ_m u‖_{L_p}`.
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormReport {
    pub kind: NormKind,
    pub s: f64,
    pub p: f64,
    pub q: Option<f64>,
    #[cfg_attr(feature = "serde", serde(rename = "N"))]
    pub n: usize,
    #[cfg_attr(feature = "serde", serde(rename = "M"))]
    pub m: usize,
    pub value: f64,
    pub blocks: Vec<BlockNorm>,
    pub block_convention: String,
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "integrability exponent p={p} must be finite and >= 1"
        )));
    }
    Ok(())
}

fn quadrature(m: usize, pointwise: impl Iterator<Item = f64>, p: f64) -> f64 {
    let cell = (2.0 * core::f64::consts::PI / m as f64).powi(2);
    let sum: f64 = pointwise.map(|a| math::powf(a, p)).sum();
    math::powf(cell * sum, 1.0 / p)
}

/// `((2π/M)² Σ_nodes |u|^p)^{1/p}` with `|·|` the Euclidean magnitude.
pub fn lp_norm(grid: &GridField, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(quadrature(
        grid.m,
        grid.u1
            .iter()
            .zip(&grid.u2)
            .map(|(a, b)| math::sqrt(a * a + b * b)),
        p,
    ))
}

pub fn lp_norm_scalar(grid: &ScalarGrid, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(quadrature(grid.m, grid.values.iter().map(|v| v.abs()), p))
}

/// `‖u‖_{L_p}` on the default transform grid.
pub fn field_lp_norm<F: Fft2>(sp: &Spectral<F>, u: &SpectralField, p: f64) -> Result<f64> {
    check_p(p)?;
    if p == 2.0 {
        return Ok(u.l2_norm());
    }
    lp_norm(&sp.grid(u), p)
}

/// `‖Σ u_k|k|^s e_k‖_{L_p}`.
pub fn sobolev_norm<F: Fft2>(sp: &Spectral<F>, u: &SpectralField, s: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    if p == 2.0 {
        return Ok(u.hilbert_norm(s));
    }
    let weighted = u.map_modes(|k, c| c * math::powf(k.norm_sq() as f64, 0.5 * s));
    lp_norm(&sp.grid(&weighted), p)
}

/// `(Σ_m (2^{ms}‖Δ_m u‖_{L_p})^q)^{1/q}` with per-block detail.
pub fn besov_norm<F: Fft2>(
    sp: &Spectral<F>,
    u: &SpectralField,
    s: f64,
    p: f64,
    q: f64,
) -> Result<NormReport> {
    check_p(p)?;
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "summability exponent q={q} must be finite and >= 1"
        )));
    }
    let n = u.resolution();
    let dyadic = DyadicDecomposition::new(n);
    let mut blocks = Vec::with_capacity(dyadic.blocks().len());
    for m in 0..dyadic.blocks().len() {
        let part = dyadic.block_field(u, m);
        let lp = if part.is_zero() {
            0.0
        } else {
            field_lp_norm(sp, &part, p)?
        };
        blocks.push(BlockNorm {
            m,
            lp,
            contribution: math::exp2(m as f64 * s) * lp,
        });
    }
    let value = math::powf(
        blocks
            .iter()
            .map(|b| math::powf(b.contribution, q))
            .sum::<f64>(),
        1.0 / q,
    );
    Ok(NormReport {
        kind: NormKind::Besov,
        s,
        p,
        q: Some(q),
        n,
        m: sp.grid_size(n),
        value,
        blocks,
        block_convention: String::from(BLOCK0_CONVENTION),
    })
}

/// Shorthand for the value of [`besov_norm`].
pub fn besov<F: Fft2>(sp: &Spectral<F>, u: &SpectralField, s: f64, p: f64, q: f64) -> Result<f64> {
    Ok(besov_norm(sp, u, s, p, q)?.value)
}

/// `‖u‖_{B^{s_θ}} / (‖u‖_{B^{s₀}}^{1−θ} ‖u‖_{B^{s₁}}^θ)` with
/// `s_θ = (1−θ)s₀ + θs₁`; `None` when the denominator vanishes.
pub fn interpolation_ratio<F: Fft2>(
    sp: &Spectral<F>,
    u: &SpectralField,
    s0: f64,
    s1: f64,
    p: f64,
    q: f64,
    theta: f64,
) -> Result<Option<f64>> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "interpolation parameter θ={theta} outside (0,1)"
        )));
    }
    let mid = besov(sp, u, (1.0 - theta) * s0 + theta * s1, p, q)?;
    let lo = besov(sp, u, s0, p, q)?;
    let hi = besov(sp, u, s1, p, q)?;
    let denom = math::powf(lo, 1.0 - theta) * math::powf(hi, theta);
    Ok((denom > 0.0).then(|| mid / denom))
}

/// A smoothness/integrability/summability triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BesovSpace {
    pub s: Rational,
    pub p: Rational,
    pub q: Rational,
}

impl BesovSpace {
    pub fn new(s: Rational, p: Rational, q: Rational) -> Self {
        Self { s, p, q }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingCondition {
    pub name: String,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub lhs: Rational,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub rhs: Rational,
    pub holds: bool,
    pub tight: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingCertificate {
    pub holds: bool,
    pub conditions: Vec<EmbeddingCondition>,
}

impl EmbeddingCertificate {
    /// Failing conditions if any, otherwise the ones met with equality.
    pub fn binding(&self) -> Vec<&EmbeddingCondition> {
        let failing: Vec<_> = self.conditions.iter().filter(|c| !c.holds).collect();
        if failing.is_empty() {
            self.conditions.iter().filter(|c| c.tight).collect()
        } else {
            failing
        }
    }
}

/// Sufficient condition for `B^{s₁}_{p₁,q₁} ⊆ B^{s₂}_{p₂,q₂}` on the torus:
/// `s₁ − 2/p₁ ≥ s₂ − 2/p₂`, `p₁ ≤ p₂`, `q₁ ≤ q₂`.
pub fn check_embedding(source: BesovSpace, target: BesovSpace) -> EmbeddingCertificate {
    let two = rational::int(2);
    let cond = |name: &str, lhs: Rational, rhs: Rational| EmbeddingCondition {
        name: String::from(name),
        lhs,
        rhs,
        holds: lhs >= rhs,
        tight: lhs == rhs,
    };
    let conditions = alloc::vec![
        cond(
            "s1 - 2/p1 >= s2 - 2/p2",
            source.s - two / source.p,
            target.s - two / target.p
        ),
        cond("p2 >= p1", target.p, source.p),
        cond("q2 >= q1", target.q, source.q),
    ];
    EmbeddingCertificate {
        holds: conditions.iter().all(|c| c.holds),
        conditions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft::NaiveDft;
    use crate::rational::rat;
    use core::f64::consts::PI;

    fn shear(amplitude: f64) -> SpectralField {
        SpectralField::from_modes(8, &[(ModeIndex::new(2, 0), Complex64::new(amplitude, 0.0))])
            .unwrap()
    }

    #[test]
    fn block_partition_is_exhaustive() {
        let d = DyadicDecomposition::new(16);
        let total: usize = d.blocks().iter().map(|b| b.len()).sum();
        assert_eq!(total, crate::field::half_lattice_len(16));
        assert_eq!(block_index(1), 0);
        assert_eq!(block_index(4), 0);
        assert_eq!(block_index(5), 1);
        assert_eq!(block_index(16), 1);
        assert_eq!(block_index(17), 2);
    }

    #[test]
    fn single_mode_lp_norms() {
        let sp = Spectral::new(NaiveDft);
        let u = shear(1.0);
        let g = sp.grid(&u);
        assert!((lp_norm(&g, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-13);
        let expected = (3.0 / (2.0 * PI * PI)).powf(0.25);
        assert!((lp_norm(&g, 4.0).unwrap() - expected).abs() < 1e-13);
        assert!(lp_norm(&g, 0.5).is_err());
    }

    #[test]
    fn sobolev_and_besov_single_mode() {
        let sp = Spectral::new(NaiveDft);
        let u = shear(1.0);
        let h = sobolev_norm(&sp, &u, 1.0, 2.0).unwrap();
        assert!((h - 2.0 * 2f64.sqrt()).abs() < 1e-13);
        let h_grid = sobolev_norm(&sp, &u, 1.0, 3.0).unwrap();
        let direct = lp_norm(&sp.grid(&u.scale(2.0)), 3.0).unwrap();
        assert!((h_grid - direct).abs() < 1e-13);
        for s in [-1.0, 0.0, 2.5] {
            let b = besov(&sp, &u, s, 2.0, 3.0).unwrap();
            assert!((b - 2f64.sqrt()).abs() < 1e-13);
        }
        let four =
            SpectralField::from_modes(8, &[(ModeIndex::new(0, 4), Complex64::new(0.5, 0.0))])
                .unwrap();
        let b = besov(&sp, &four, 1.0, 2.0, 2.0).unwrap();
        assert!((b - 2.0 * 2f64.sqrt() * 0.5).abs() < 1e-13);
    }

    #[test]
    fn zero_field_norms_vanish() {
        let sp = Spectral::new(NaiveDft);
        let z = SpectralField::zeros(8).unwrap();
        let rep = besov_norm(&sp, &z, 1.0, 3.0, 2.0).unwrap();
        assert_eq!(rep.value, 0.0);
        assert_eq!(
            interpolation_ratio(&sp, &z, 0.0, 2.0, 2.0, 2.0, 0.5).unwrap(),
            None
        );
    }

    #[test]
    fn single_block_interpolation_is_one() {
        let sp = Spectral::new(NaiveDft);
        let u = SpectralField::from_modes(
            8,
            &[
                (ModeIndex::new(3, 1), Complex64::new(0.3, -0.2)),
                (ModeIndex::new(-2, 3), Complex64::new(0.1, 0.7)),
            ],
        )
        .unwrap();
        let ratio = interpolation_ratio(&sp, &u, -1.0, 3.0, 3.0, 2.0, 0.3)
            .unwrap()
            .unwrap();
        assert!((ratio - 1.0).abs() < 1e-13);
    }

    #[test]
    fn embedding_examples() {
        let p = rat(5, 2);
        let r = rat(3, 1);
        let s = rat(4, 3);
        let source = BesovSpace::new(rational::int(2) - s, p, rat(3, 1));
        let target = BesovSpace::new(
            rational::int(2) / p + rational::int(2) / r - rational::int(1),
            p,
            r,
        );
        assert!(check_embedding(source, target).holds);
        assert!(check_embedding(source, source).holds);
        let cert = check_embedding(
            BesovSpace::new(rat(0, 1), rat(2, 1), rat(2, 1)),
            BesovSpace::new(rat(1, 1), rat(2, 1), rat(2, 1)),
        );
        assert!(!cert.holds);
        assert_eq!(cert.binding().len(), 1);
        assert_eq!(cert.binding()[0].name, "s1 - 2/p1 >= s2 - 2/p2");
    }

    #[test]
    fn params_validate_and_index() {
        assert!(BesovParams::parse("4/3", "1", "3", "3").is_err());
        let bp = BesovParams::parse("9/10", "12", "2", "20/19").unwrap();
        assert_eq!(bp.initial_regularity(), rat(-4, 5));
    }
}
