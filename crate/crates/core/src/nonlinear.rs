//! The bilinear operator `B(u,v) = P[(u·∇)v]`, a brute-force convolution
//! oracle for it, the trilinear form `⟨B(u,v),w⟩`, and harnesses that
//! evaluate the bilinear estimates as empirical ratios over random ensembles.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::admissibility::{self, Exponents};
use crate::besov::{self, BesovParams};
use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::field::{canonical_modes, ModeIndex, RandomFieldSpec, Spectral, SpectralField};
use crate::math;
use crate::rational::{self, int, Rational};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest resolution the convolution oracle accepts by default.
pub const ORACLE_CAP: usize = 16;

/// Output support of `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Dealias {
    /// Keep `|k|∞ ≤ ⌊N/3⌋`.
    #[default]
    TwoThirds,
    /// Keep every resolved mode.
    None,
}

impl Dealias {
    pub fn cutoff(self, n: usize) -> i64 {
        match self {
            Dealias::TwoThirds => SpectralField::dealias_cutoff(n),
            Dealias::None => (n / 2) as i64,
        }
    }
}

fn same_resolution(u: &SpectralField, v: &SpectralField) -> Result<usize> {
    if u.resolution() != v.resolution() {
        return Err(Error::ResolutionMismatch(alloc::format!(
            "N={} vs N={}",
            u.resolution(),
            v.resolution()
        )));
    }
    Ok(u.resolution())
}

/// Pseudo-spectral `B(u,v)` with 2/3-rule output truncation.
pub fn bilinear_b<F: Fft2>(
    sp: &Spectral<F>,
    u: &SpectralField,
    v: &SpectralField,
) -> Result<SpectralField> {
    bilinear_b_with(sp, u, v, Dealias::TwoThirds)
}

/// Pseudo-spectral `B(u,v)`. The product is formed on the `M = oversample·N`
/// grid; with `M ≥ 2N` no product frequency aliases onto a resolved mode.
pub fn bilinear_b_with<F: Fft2>(
    sp: &Spectral<F>,
    u: &SpectralField,
    v: &SpectralField,
    dealias: Dealias,
) -> Result<SpectralField> {
    let n = same_resolution(u, v)?;
    let m = sp.grid_size(n);
    let ug = sp.to_grid(u, m)?;
    let [d11, d21, d12, d22] = sp.gradient_to_grid(v, m)?;
    let len = m * m;
    let mut w1 = Vec::with_capacity(len);
    let mut w2 = Vec::with_capacity(len);
    for idx in 0..len {
        let (a, b) = (ug.u1[idx], ug.u2[idx]);
        w1.push(a * d11[idx] + b * d21[idx]);
        w2.push(a * d12[idx] + b * d22[idx]);
    }
    let spec = sp.analyze_pair(m, &w1, &w2);
    let cutoff = dealias.cutoff(n);
    let coeffs = canonical_modes(n)
        .map(|k| {
            if k.max_abs() > cutoff {
                return ZERO;
            }
            let (c1, c2) = spec.get(k);
            SpectralField::project_coeff(k, c1, c2)
        })
        .collect();
    SpectralField::from_canonical(n, coeffs)
}

/// `B(u,v)` by direct summation over all mode pairs `a + b = k`.
pub fn bilinear_b_oracle(
    u: &SpectralField,
    v: &SpectralField,
    dealias: Dealias,
) -> Result<SpectralField> {
    bilinear_b_oracle_capped(u, v, dealias, ORACLE_CAP)
}

pub fn bilinear_b_oracle_capped(
    u: &SpectralField,
    v: &SpectralField,
    dealias: Dealias,
    cap: usize,
) -> Result<SpectralField> {
    let n = same_resolution(u, v)?;
    if n > cap {
        return Err(Error::OracleCapExceeded { n, cap });
    }
    let h = (n / 2) as i64;
    let cutoff = dealias.cutoff(n);
    let i = Complex64::new(0.0, 1.0);
    let lattice: Vec<ModeIndex> = (-h..=h)
        .flat_map(|a| (-h..=h).map(move |b| ModeIndex::new(a, b)))
        .filter(|k| !k.is_zero())
        .collect();
    let coeffs = canonical_modes(n)
        .map(|k| {
            if k.max_abs() > cutoff {
                return ZERO;
            }
            let mut w1 = ZERO;
            let mut w2 = ZERO;
            for &a in &lattice {
                let b = ModeIndex::new(k.k1 - a.k1, k.k2 - a.k2);
                if b.is_zero() || b.max_abs() > h {
                    continue;
                }
                let (ua1, ua2) = SpectralField::vector_coeff(a, u.coeff(a));
                let (vb1, vb2) = SpectralField::vector_coeff(b, v.coeff(b));
                // (u·∇) acting on e^{ib·ξ} contributes i(u_a·b)
                let advect = i * (ua1 * b.k1 as f64 + ua2 * b.k2 as f64);
                w1 += advect * vb1;
                w2 += advect * vb2;
            }
            SpectralField::project_coeff(k, w1, w2)
        })
        .collect();
    SpectralField::from_canonical(n, coeffs)
}

/// `⟨B(u,v), w⟩`.
pub fn trilinear<F: Fft2>(
    sp: &Spectral<F>,
    u: &SpectralField,
    v: &SpectralField,
    w: &SpectralField,
) -> Result<f64> {
    bilinear_b(sp, u, v)?.inner(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EstimateId {
    /// `‖B(u)‖_{B^{−s}_{p,q}} ≤ c‖u‖_{B^a_{p,q}}‖u‖_{B^b_{p,q}}`.
    Sti,
    /// `‖B(u)‖_{B^{−s}_{p,q}} ≤ c‖u‖^{2−α−β}_{B^{−s+2−2/r}_{p,r}}‖u‖^{α+β}_{B^{−s+2}_{p,q}}`.
    Sti2,
    /// `|⟨B(x),y⟩| ≤ ε‖x‖²_{H¹₂} + c_ε‖x‖²_{H⁰₂}‖y‖^q̃_{B^{2/p̃+2/q̃−1}_{p̃,q̃}}`.
    Energy,
    /// Links of the Hilbert-space trilinear bound.
    ClassicalTrilinear,
    /// The uniqueness contraction constant.
    Domina,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateSample {
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs/rhs`, absent when `rhs = 0`.
    pub ratio: Option<f64>,
}

impl EstimateSample {
    pub fn new(seed: u64, lhs: f64, rhs: f64) -> Self {
        Self {
            seed,
            lhs,
            rhs,
            ratio: (rhs > 0.0).then(|| lhs / rhs),
        }
    }
}

/// Random ensemble: member `i` uses seed `seed + i` and is dealiased.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleSpec {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub gamma: f64,
    pub amplitude: f64,
}

impl EnsembleSpec {
    pub fn new(n: usize, count: usize, seed: u64, gamma: f64) -> Self {
        Self {
            n,
            count,
            seed,
            gamma,
            amplitude: 1.0,
        }
    }

    pub fn member_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }

    pub fn member(&self, i: usize) -> Result<SpectralField> {
        Ok(RandomFieldSpec::new(self.gamma, self.member_seed(i))
            .amplitude(self.amplitude)
            .sample(self.n)?
            .dealiased())
    }

    /// A second, independent field for two-field estimates.
    pub fn partner(&self, i: usize) -> Result<SpectralField> {
        Ok(
            RandomFieldSpec::new(self.gamma, self.member_seed(i) ^ 0x9E37_79B9_7F4A_7C15)
                .amplitude(self.amplitude)
                .sample(self.n)?
                .dealiased(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateReport {
    pub id: EstimateId,
    pub params: Option<BesovParams>,
    pub n: usize,
    pub gamma: f64,
    pub samples: Vec<EstimateSample>,
    pub count: usize,
    /// Samples with a defined ratio.
    pub counted: usize,
    pub max_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
}

impl EstimateReport {
    pub fn from_samples(
        id: EstimateId,
        params: Option<BesovParams>,
        n: usize,
        gamma: f64,
        samples: Vec<EstimateSample>,
    ) -> Self {
        let ratios: Vec<f64> = samples.iter().filter_map(|s| s.ratio).collect();
        let counted = ratios.len();
        Self {
            id,
            params,
            n,
            gamma,
            count: samples.len(),
            counted,
            max_ratio: ratios.iter().copied().reduce(f64::max),
            mean_ratio: (counted > 0).then(|| ratios.iter().sum::<f64>() / counted as f64),
            samples,
        }
    }

    /// Concatenates the samples of two reports on the same estimate.
    pub fn merge(&self, other: &Self) -> Self {
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples);
        Self::from_samples(self.id, self.params, self.n, self.gamma, samples)
    }
}

/// Both sides of the nonlinear estimate chain for one field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSample {
    /// `‖B(u)‖_{B^{−s}_{p,q}}`.
    pub lhs: f64,
    /// `‖u‖_{B^a_{p,q}}‖u‖_{B^b_{p,q}}`.
    pub sti_rhs: f64,
    /// `‖u‖^{2−α−β}_{B^{−s+2−2/r}_{p,r}}‖u‖^{α+β}_{B^{−s+2}_{p,q}}`.
    pub sti2_rhs: f64,
}

pub fn chain_sample<F: Fft2>(
    sp: &Spectral<F>,
    params: &BesovParams,
    exps: &Exponents,
    u: &SpectralField,
) -> Result<ChainSample> {
    let (s, p, q, r) = (
        params.s_f64(),
        params.p_f64(),
        params.q_f64(),
        params.r_f64(),
    );
    let b = bilinear_b(sp, u, u)?;
    let lhs = besov::besov(sp, &b, -s, p, q)?;
    let a_norm = besov::besov(sp, u, rational::to_f64(&exps.a), p, q)?;
    let b_norm = if exps.a == exps.b {
        a_norm
    } else {
        besov::besov(sp, u, rational::to_f64(&exps.b), p, q)?
    };
    let ab = rational::to_f64(&(exps.alpha + exps.beta));
    let trace = besov::besov(sp, u, rational::to_f64(&params.initial_regularity()), p, r)?;
    let top = besov::besov(sp, u, 2.0 - s, p, q)?;
    Ok(ChainSample {
        lhs,
        sti_rhs: a_norm * b_norm,
        sti2_rhs: math::powf(trace, 2.0 - ab) * math::powf(top, ab),
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainReport {
    pub exponents: Exponents,
    pub sti: EstimateReport,
    pub sti2: EstimateReport,
}

/// Exponents for the chain, with their sign constraints re-checked.
pub fn chain_exponents(params: &BesovParams) -> Result<Exponents> {
    let e = admissibility::derive_exponents(params)?;
    let zero = int(0);
    if !(e.alpha > zero && e.beta > zero && e.alpha + e.beta < int(1)) {
        return Err(Error::InadmissibleParams(alloc::format!(
            "alpha = {}, beta = {} outside 0 < alpha, beta, alpha + beta < 1",
            rational::format(&e.alpha),
            rational::format(&e.beta)
        )));
    }
    Ok(e)
}

/// Assembles chain reports from per-member samples in ensemble order.
pub fn chain_report(
    params: &BesovParams,
    exponents: Exponents,
    ensemble: &EnsembleSpec,
    samples: &[ChainSample],
) -> ChainReport {
    let mk = |id, pick: fn(&ChainSample) -> f64| {
        EstimateReport::from_samples(
            id,
            Some(*params),
            ensemble.n,
            ensemble.gamma,
            samples
                .iter()
                .enumerate()
                .map(|(i, c)| EstimateSample::new(ensemble.member_seed(i), c.lhs, pick(c)))
                .collect(),
        )
    };
    ChainReport {
        exponents,
        sti: mk(EstimateId::Sti, |c| c.sti_rhs),
        sti2: mk(EstimateId::Sti2, |c| c.sti2_rhs),
    }
}

/// Sequential ensemble evaluation of the estimate chain.
pub fn verify_estimate_chain<F: Fft2>(
    sp: &Spectral<F>,
    params: &BesovParams,
    ensemble: &EnsembleSpec,
) -> Result<ChainReport> {
    let exps = chain_exponents(params)?;
    let samples = (0..ensemble.count)
        .map(|i| chain_sample(sp, params, &exps, &ensemble.member(i)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(chain_report(params, exps, ensemble, &samples))
}

/// Exponents `(p̃, q̃)` of the energy lemma, hypotheses checked exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaExponents {
    pub p: Rational,
    pub q: Rational,
}

impl LemmaExponents {
    pub fn new(p: Rational, q: Rational) -> Result<Self> {
        let two = int(2);
        if p < two {
            return Err(Error::HypothesisViolated("p >= 2".into()));
        }
        if q <= two {
            return Err(Error::HypothesisViolated("q > 2".into()));
        }
        if two / p + two / q - int(1) <= int(0) {
            return Err(Error::HypothesisViolated("2/p + 2/q - 1 > 0".into()));
        }
        Ok(Self { p, q })
    }

    /// Smoothness `2/p̃ + 2/q̃ − 1` of the `y` norm.
    pub fn smoothness(&self) -> Rational {
        int(2) / self.p + int(2) / self.q - int(1)
    }
}

/// Quantities of the energy lemma at one time instant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LemmaSample {
    /// `|⟨B(x,x), y⟩|`.
    pub lhs: f64,
    /// `‖x‖²_{H¹₂}`.
    pub dissipation: f64,
    /// `‖x‖²_{H⁰₂} ‖y‖^q̃_{B^{2/p̃+2/q̃−1}_{p̃,q̃}}`.
    pub coupling: f64,
    /// Smallest `c` making the inequality hold for this pair.
    pub pointwise_c: Option<f64>,
    /// Smallest `c` making it hold for every rescaling `y → μy`.
    pub scale_invariant_c: Option<f64>,
}

/// `c` such that `μL ≤ εH + c X μ^q` for all `μ > 0`.
pub fn scale_invariant_constant(
    lhs: f64,
    eps: f64,
    dissipation: f64,
    coupling: f64,
    q: f64,
) -> Option<f64> {
    if !(coupling > 0.0) {
        return None;
    }
    if lhs == 0.0 {
        return Some(0.0);
    }
    let mu = q * eps * dissipation / ((q - 1.0) * lhs);
    Some(eps * dissipation / ((q - 1.0) * coupling * math::powf(mu, q)))
}

pub fn energy_lemma_sample<F: Fft2>(
    sp: &Spectral<F>,
    x: &SpectralField,
    y: &SpectralField,
    eps: f64,
    exps: &LemmaExponents,
) -> Result<LemmaSample> {
    let lhs = trilinear(sp, x, x, y)?.abs();
    let dissipation = x.hilbert_norm_sq(1.0);
    let q = rational::to_f64(&exps.q);
    let y_norm = besov::besov(
        sp,
        y,
        rational::to_f64(&exps.smoothness()),
        rational::to_f64(&exps.p),
        q,
    )?;
    let coupling = x.l2_norm_sq() * math::powf(y_norm, q);
    Ok(LemmaSample {
        lhs,
        dissipation,
        coupling,
        pointwise_c: (coupling > 0.0).then(|| (lhs - eps * dissipation).max(0.0) / coupling),
        scale_invariant_c: scale_invariant_constant(lhs, eps, dissipation, coupling, q),
    })
}

/// Energy-lemma harness for one pair; the report ratio is the
/// scale-invariant constant.
pub fn verify_energy_lemma<F: Fft2>(
    sp: &Spectral<F>,
    x: &SpectralField,
    y: &SpectralField,
    eps: f64,
    exps: &LemmaExponents,
) -> Result<EstimateReport> {
    let s = energy_lemma_sample(sp, x, y, eps, exps)?;
    Ok(EstimateReport::from_samples(
        EstimateId::Energy,
        None,
        x.resolution(),
        f64::NAN,
        alloc::vec![lemma_estimate_sample(0, &s)],
    ))
}

pub fn lemma_estimate_sample(seed: u64, s: &LemmaSample) -> EstimateSample {
    EstimateSample {
        seed,
        lhs: s.lhs,
        rhs: s.coupling,
        ratio: s.scale_invariant_c,
    }
}

/// Sequential ensemble evaluation of the energy lemma.
pub fn energy_lemma_ensemble<F: Fft2>(
    sp: &Spectral<F>,
    ensemble: &EnsembleSpec,
    eps: f64,
    exps: &LemmaExponents,
) -> Result<EstimateReport> {
    let samples = (0..ensemble.count)
        .map(|i| {
            let s =
                energy_lemma_sample(sp, &ensemble.member(i)?, &ensemble.partner(i)?, eps, exps)?;
            Ok(lemma_estimate_sample(ensemble.member_seed(i), &s))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimateReport::from_samples(
        EstimateId::Energy,
        None,
        ensemble.n,
        ensemble.gamma,
        samples,
    ))
}

/// One link `lhs ≤ c·rhs` of the Hilbert-space trilinear chain.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainLink {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
}

impl ChainLink {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            ratio: (rhs > 0.0).then(|| lhs / rhs),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassicalChain {
    /// `|⟨B(x),y⟩| ≤ ‖x‖_{L₄}‖∇x‖_{L₂}‖y‖_{L₄}`; exact on the grid.
    pub holder: ChainLink,
    /// `‖x‖_{L₄}‖∇x‖_{L₂}‖y‖_{L₄} ≤ c‖x‖_{H^{1/2}}‖x‖_{H¹}‖y‖_{H^{1/2}}`; empirical.
    pub sobolev: ChainLink,
    /// `‖x‖²_{H^{1/2}} ≤ ‖x‖_{H⁰}‖x‖_{H¹}`; exact.
    pub interpolation: ChainLink,
    /// `‖x‖^{1/2}_{H⁰}‖x‖^{3/2}_{H¹}‖y‖_{H^{1/2}} ≤ ε‖x‖²_{H¹} + c_ε‖x‖²_{H⁰}‖y‖⁴_{H^{1/2}}`
    /// with `c_ε = 27/(256ε³)`; exact.
    pub young: ChainLink,
    pub eps: f64,
}

/// Evaluates each link of the classical trilinear chain for `x, y` in the
/// dealiased space.
pub fn verify_classical_trilinear<F: Fft2>(
    sp: &Spectral<F>,
    x: &SpectralField,
    y: &SpectralField,
    eps: f64,
) -> Result<ClassicalChain> {
    let n = same_resolution(x, y)?;
    let m = sp.grid_size(n);
    let lhs = trilinear(sp, x, x, y)?.abs();
    let xg = sp.to_grid(x, m)?;
    let yg = sp.to_grid(y, m)?;
    let x4 = besov::lp_norm(&xg, 4.0)?;
    let y4 = besov::lp_norm(&yg, 4.0)?;
    let grad = sp.gradient_to_grid(x, m)?;
    let cell = (2.0 * core::f64::consts::PI / m as f64).powi(2);
    let grad_sq: f64 = (0..m * m)
        .map(|i| grad.iter().map(|g| g[i] * g[i]).sum::<f64>())
        .sum::<f64>()
        * cell;
    let holder_rhs = x4 * math::sqrt(grad_sq) * y4;

    let x_half = x.hilbert_norm(0.5);
    let x_one = x.hilbert_norm(1.0);
    let x_zero = x.l2_norm();
    let y_half = y.hilbert_norm(0.5);
    let sobolev_rhs = x_half * x_one * y_half;

    let interp_lhs = x_half * x_half;
    let interp_rhs = x_zero * x_one;

    let young_lhs = math::sqrt(x_zero) * math::powf(x_one, 1.5) * y_half;
    let c_eps = 27.0 / (256.0 * eps * eps * eps);
    let young_rhs = eps * x_one * x_one + c_eps * x_zero * x_zero * math::powf(y_half, 4.0);

    Ok(ClassicalChain {
        holder: ChainLink::new(lhs, holder_rhs),
        sobolev: ChainLink::new(holder_rhs, sobolev_rhs),
        interpolation: ChainLink::new(interp_lhs, interp_rhs),
        young: ChainLink::new(young_lhs, young_rhs),
        eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft::NaiveDft;
    use crate::field::random_field;
    use core::f64::consts::PI;

    fn unit(n: usize, k1: i64, k2: i64) -> SpectralField {
        SpectralField::from_modes(n, &[(ModeIndex::new(k1, k2), Complex64::new(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn oracle_fixture_for_orthogonal_modes() {
        let u = unit(4, 1, 0);
        let v = unit(4, 0, 1);
        let b = bilinear_b_oracle(&u, &v, Dealias::TwoThirds).unwrap();
        let expected = Complex64::new(0.0, 1.0 / (2.0 * 2f64.sqrt() * PI));
        for (k, c) in b.iter() {
            if k == ModeIndex::new(1, 1) || k == ModeIndex::new(-1, 1) {
                assert!((c - expected).norm() < 1e-15, "{k:?} {c}");
            } else {
                assert_eq!(c, ZERO, "{k:?}");
            }
        }
        let sp = Spectral::new(NaiveDft);
        let fast = bilinear_b(&sp, &u, &v).unwrap();
        assert!(fast.sub(&b).unwrap().max_abs_coeff() < 1e-15);
        let sum = u.add(&v).unwrap();
        assert!(bilinear_b(&sp, &sum, &sum).unwrap().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn shear_mode_is_steady() {
        let sp = Spectral::new(NaiveDft);
        let u = unit(8, 2, 0);
        assert!(bilinear_b(&sp, &u, &u).unwrap().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn oracle_matches_pseudo_spectral() {
        let sp = Spectral::new(NaiveDft);
        for n in [4usize, 6, 8] {
            for seed in 0..3 {
                let u = random_field(n, 0.0, seed).unwrap();
                let v = random_field(n, 0.5, seed + 100).unwrap();
                for d in [Dealias::TwoThirds, Dealias::None] {
                    let a = bilinear_b_with(&sp, &u, &v, d).unwrap();
                    let b = bilinear_b_oracle(&u, &v, d).unwrap();
                    assert!(a.sub(&b).unwrap().max_abs_coeff() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn oracle_refuses_large_resolution() {
        let u = SpectralField::zeros(18).unwrap();
        assert_eq!(
            bilinear_b_oracle(&u, &u, Dealias::TwoThirds),
            Err(Error::OracleCapExceeded { n: 18, cap: 16 })
        );
    }

    #[test]
    fn galerkin_antisymmetry() {
        let sp = Spectral::new(NaiveDft);
        let u = random_field(12, 0.5, 1).unwrap().dealiased();
        let v = random_field(12, 0.5, 2).unwrap().dealiased();
        let w = random_field(12, 0.5, 3).unwrap().dealiased();
        let a = trilinear(&sp, &u, &v, &w).unwrap();
        let b = trilinear(&sp, &u, &w, &v).unwrap();
        assert!((a + b).abs() < 1e-13);
        assert!(trilinear(&sp, &u, &v, &v).unwrap().abs() < 1e-13);
    }

    #[test]
    fn lemma_hypotheses() {
        use crate::rational::rat;
        assert!(LemmaExponents::new(rat(5, 2), int(3)).is_ok());
        assert!(matches!(
            LemmaExponents::new(rat(3, 2), int(3)),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            LemmaExponents::new(int(4), int(2)),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            LemmaExponents::new(int(8), int(4)),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn scale_invariant_constant_is_tight() {
        let (l, eps, h, x, q) = (0.7, 0.25, 2.0, 0.3, 3.0);
        let c = scale_invariant_constant(l, eps, h, x, q).unwrap();
        let mut worst = f64::NEG_INFINITY;
        for i in 1..4000 {
            let mu = i as f64 * 0.01;
            worst = worst.max(mu * l - eps * h - c * x * mu.powf(q));
        }
        assert!(worst <= 1e-12 && worst > -1e-4, "{worst}");
    }

    #[test]
    fn classical_chain_zero_and_exact_links() {
        let sp = Spectral::new(NaiveDft);
        let z = SpectralField::zeros(12).unwrap();
        let y = random_field(12, 1.0, 9).unwrap().dealiased();
        let c = verify_classical_trilinear(&sp, &z, &y, 0.5).unwrap();
        assert_eq!(c.holder.lhs, 0.0);
        assert_eq!(c.interpolation.lhs, 0.0);
        let x = random_field(12, 1.0, 8).unwrap().dealiased();
        let c = verify_classical_trilinear(&sp, &x, &y, 0.5).unwrap();
        assert!(c.holder.ratio.unwrap() <= 1.0 + 1e-10);
        assert!(c.interpolation.ratio.unwrap() <= 1.0 + 1e-12);
        assert!(c.young.ratio.unwrap() <= 1.0 + 1e-12);
    }
}
