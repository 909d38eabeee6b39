//! The Stokes operator `A` (eigenvalues `|k|²` on `e_k`), its inverse and
//! semigroup, and the forced linear problem `u' + Au = f` solved per mode by
//! the Duhamel formula.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::besov::{self, BesovParams};
use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::field::{canonical_position, ModeIndex, RandomFieldSpec, Spectral, SpectralField};
use crate::math;
use crate::timenorm;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn apply_a(u: &SpectralField) -> SpectralField {
    u.map_modes(|k, c| c * k.norm_sq() as f64)
}

pub fn apply_inv_a(u: &SpectralField) -> SpectralField {
    u.map_modes(|k, c| c / k.norm_sq() as f64)
}

/// `e^{−tA}u`.
pub fn semigroup(u: &SpectralField, t: f64) -> Result<SpectralField> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(u.map_modes(|k, c| c * math::exp(-t * k.norm_sq() as f64)))
}

/// Time dependence of one forcing coefficient.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "law", rename_all = "snake_case"))]
pub enum TimeLaw {
    Constant {
        value: Complex64,
    },
    /// `amplitude · sin(ωt + φ)`.
    Sinusoid {
        amplitude: Complex64,
        omega: f64,
        phase: f64,
    },
    /// Piecewise constant: `values[j]` on `[j·dt, (j+1)·dt)`, the last value
    /// held afterwards.
    Sampled {
        dt: f64,
        values: Vec<Complex64>,
    },
}

impl TimeLaw {
    pub fn eval(&self, t: f64) -> Complex64 {
        match self {
            TimeLaw::Constant { value } => *value,
            TimeLaw::Sinusoid {
                amplitude,
                omega,
                phase,
            } => amplitude * math::sin(omega * t + phase),
            TimeLaw::Sampled { dt, values } => {
                if values.is_empty() {
                    return ZERO;
                }
                let j = libm::floor(t / dt).max(0.0) as usize;
                values[j.min(values.len() - 1)]
            }
        }
    }

    fn conj_neg(&self) -> Self {
        let f = |c: Complex64| -c.conj();
        match self {
            TimeLaw::Constant { value } => TimeLaw::Constant { value: f(*value) },
            TimeLaw::Sinusoid {
                amplitude,
                omega,
                phase,
            } => TimeLaw::Sinusoid {
                amplitude: f(*amplitude),
                omega: *omega,
                phase: *phase,
            },
            TimeLaw::Sampled { dt, values } => TimeLaw::Sampled {
                dt: *dt,
                values: values.iter().map(|c| f(*c)).collect(),
            },
        }
    }

    fn scaled(&self, a: f64) -> Self {
        match self {
            TimeLaw::Constant { value } => TimeLaw::Constant { value: value * a },
            TimeLaw::Sinusoid {
                amplitude,
                omega,
                phase,
            } => TimeLaw::Sinusoid {
                amplitude: amplitude * a,
                omega: *omega,
                phase: *phase,
            },
            TimeLaw::Sampled { dt, values } => TimeLaw::Sampled {
                dt: *dt,
                values: values.iter().map(|c| c * a).collect(),
            },
        }
    }

    /// `∫_{t₀}^{t₀+h} e^{−λ(t₀+h−τ)} f(τ) dτ`, in closed form.
    pub fn duhamel(&self, lambda: f64, t0: f64, h: f64) -> Complex64 {
        if h <= 0.0 {
            return ZERO;
        }
        match self {
            TimeLaw::Constant { value } => value * phi1(lambda, h),
            TimeLaw::Sinusoid {
                amplitude,
                omega,
                phase,
            } => amplitude * sinusoid_duhamel(lambda, *omega, omega * t0 + phase, h),
            TimeLaw::Sampled { dt, values } => {
                if values.is_empty() {
                    return ZERO;
                }
                let end = t0 + h;
                let mut acc = ZERO;
                let mut a = t0;
                while a < end {
                    let j = libm::floor(a / dt).max(0.0) as usize;
                    let piece_end = if j + 1 >= values.len() {
                        end
                    } else {
                        ((j + 1) as f64 * dt).min(end)
                    };
                    let b = if piece_end > a { piece_end } else { end };
                    let v = values[j.min(values.len() - 1)];
                    acc += v * (math::exp(-lambda * (end - b)) * phi1(lambda, b - a));
                    a = b;
                }
                acc
            }
        }
    }
}

/// `∫₀^h e^{−λ(h−τ)} dτ = (1 − e^{−λh})/λ`.
pub(crate) fn phi1(lambda: f64, h: f64) -> f64 {
    if lambda == 0.0 {
        h
    } else {
        -math::expm1(-lambda * h) / lambda
    }
}

/// `∫₀^h e^{−λ(h−τ)} sin(ωτ + φ) dτ = Im[e^{iφ}(e^{iωh} − e^{−λh})/(λ + iω)]`.
fn sinusoid_duhamel(lambda: f64, omega: f64, phase: f64, h: f64) -> f64 {
    let eiphi = Complex64::new(math::cos(phase), math::sin(phase));
    let num = Complex64::new(math::cos(omega * h), math::sin(omega * h))
        - Complex64::new(math::exp(-lambda * h), 0.0);
    (eiphi * num / Complex64::new(lambda, omega)).im
}

/// A forcing term `f(t) = Σ_k f_k(t) e_k`, stored on canonical modes.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForcingSpec {
    modes: Vec<(ModeIndex, TimeLaw)>,
}

impl ForcingSpec {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Entries given for `−k` are stored as the canonical partner.
    pub fn new(entries: Vec<(ModeIndex, TimeLaw)>) -> Result<Self> {
        let mut modes: Vec<(ModeIndex, TimeLaw)> = Vec::with_capacity(entries.len());
        for (k, law) in entries {
            if k.is_zero() {
                return Err(Error::ZeroMode);
            }
            let (k, law) = if k.is_canonical() {
                (k, law)
            } else {
                (k.neg(), law.conj_neg())
            };
            if modes.iter().any(|(j, _)| *j == k) {
                return Err(Error::DuplicateMode { k1: k.k1, k2: k.k2 });
            }
            modes.push((k, law));
        }
        modes.sort_by_key(|(k, _)| (k.k2, k.k1));
        Ok(Self { modes })
    }

    /// Time-constant forcing with the coefficients of `f`.
    pub fn constant(f: &SpectralField) -> Self {
        Self {
            modes: f
                .iter()
                .filter(|(_, c)| *c != ZERO)
                .map(|(k, c)| (k, TimeLaw::Constant { value: c }))
                .collect(),
        }
    }

    /// Constant-in-time random forcing, see [`RandomFieldSpec`].
    pub fn random(n: usize, spec: &RandomFieldSpec) -> Result<Self> {
        Ok(Self::constant(&spec.sample(n)?))
    }

    pub fn modes(&self) -> &[(ModeIndex, TimeLaw)] {
        &self.modes
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn check_resolution(&self, n: usize) -> Result<()> {
        let h = (n / 2) as i64;
        match self.modes.iter().find(|(k, _)| k.max_abs() > h) {
            Some((k, _)) => Err(Error::UnresolvedForcing {
                k1: k.k1,
                k2: k.k2,
                n,
            }),
            None => Ok(()),
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            modes: self.modes.iter().map(|(k, l)| (*k, l.scaled(a))).collect(),
        }
    }

    /// Keeps the modes accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(ModeIndex) -> bool) -> Self {
        Self {
            modes: self
                .modes
                .iter()
                .filter(|(k, _)| keep(*k))
                .cloned()
                .collect(),
        }
    }

    /// `f(t)` at resolution `n`.
    pub fn eval(&self, n: usize, t: f64) -> Result<SpectralField> {
        self.check_resolution(n)?;
        let mut coeffs = alloc::vec![ZERO; crate::field::half_lattice_len(n)];
        for (k, law) in &self.modes {
            coeffs[canonical_position(n, *k).expect("checked")] += law.eval(t);
        }
        SpectralField::from_canonical(n, coeffs)
    }

    /// `∫_{t₀}^{t₀+h} e^{−(t₀+h−τ)A} f(τ) dτ`.
    pub fn duhamel(&self, n: usize, t0: f64, h: f64) -> Result<SpectralField> {
        self.check_resolution(n)?;
        let mut coeffs = alloc::vec![ZERO; crate::field::half_lattice_len(n)];
        for (k, law) in &self.modes {
            coeffs[canonical_position(n, *k).expect("checked")] +=
                law.duhamel(k.norm_sq() as f64, t0, h);
        }
        SpectralField::from_canonical(n, coeffs)
    }
}

/// States of a solve at the sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&SpectralField> {
        self.states.last()
    }

    /// Linear interpolation between neighbouring samples.
    pub fn interpolate(&self, t: f64) -> SpectralField {
        let j = match self.times.iter().position(|&s| s >= t) {
            Some(0) => return self.states[0].clone(),
            Some(j) => j,
            None => return self.states[self.states.len() - 1].clone(),
        };
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        if t == t1 {
            return self.states[j].clone();
        }
        let w = (t - t0) / (t1 - t0);
        self.states[j - 1]
            .lin_comb(1.0 - w, &self.states[j], w)
            .expect("trajectory states share a resolution")
    }
}

/// Uniform sample times `j·T/steps`, `j = 0..=steps`.
pub fn uniform_times(horizon: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|j| horizon * j as f64 / steps as f64)
        .collect()
}

/// Exact per-mode solution of `u' + Au = f`, `u(0) = u₀`, sampled at
/// `steps + 1` uniform times on `[0, T]`. Each sample is computed from
/// `t = 0`, so there is no accumulated stepping error.
pub fn stokes_solve(
    u0: &SpectralField,
    forcing: &ForcingSpec,
    horizon: f64,
    steps: usize,
) -> Result<Trajectory> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "horizon T={horizon} must be positive"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step required".into()));
    }
    let n = u0.resolution();
    forcing.check_resolution(n)?;
    let times = uniform_times(horizon, steps);
    let mut states = Vec::with_capacity(times.len());
    for &t in &times {
        let mut u = semigroup(u0, t)?;
        if !forcing.is_zero() {
            u.axpy(1.0, &forcing.duhamel(n, 0.0, t)?);
        }
        states.push(u);
    }
    Ok(Trajectory { times, states })
}

/// `u' = f − Au` at time `t`.
pub fn time_derivative(u: &SpectralField, forcing: &ForcingSpec, t: f64) -> Result<SpectralField> {
    let mut d = apply_a(u).scale(-1.0);
    if !forcing.is_zero() {
        d.axpy(1.0, &forcing.eval(u.resolution(), t)?);
    }
    Ok(d)
}

/// `∫_{t₁}^{t₂} ‖e^{−tA}u₀‖²_{H¹₂} dt`, exact per mode.
pub fn dissipation_integral(u0: &SpectralField, t1: f64, t2: f64) -> f64 {
    2.0 * u0
        .iter()
        .map(|(k, c)| {
            let lam = k.norm_sq() as f64;
            // e^{−2λt₁} − e^{−2λt₂}, written to avoid cancellation
            let diff = math::exp(-2.0 * lam * t1) * -math::expm1(-2.0 * lam * (t2 - t1));
            c.norm_sqr() * 0.5 * diff
        })
        .sum::<f64>()
}

/// `½‖u(t₂)‖² − ½‖u(t₁)‖² + ∫_{t₁}^{t₂}‖u‖²_{H¹₂}` for the unforced flow.
pub fn energy_balance_residual(u0: &SpectralField, t1: f64, t2: f64) -> Result<f64> {
    let e1 = semigroup(u0, t1)?.l2_norm_sq();
    let e2 = semigroup(u0, t2)?.l2_norm_sq();
    Ok(0.5 * e2 - 0.5 * e1 + dissipation_integral(u0, t1, t2))
}

/// Discrete maximal-regularity quantities of a linear solve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearRegularityReport {
    /// `(∫ ‖u‖^r_{B^{−s+2}_{p,q}} + ‖u'‖^r_{B^{−s}_{p,q}} dt)^{1/r}`.
    pub w_norm: f64,
    /// `(∫‖f‖^r_{B^{−s}_{p,q}} dt)^{1/r}`.
    pub forcing_norm: f64,
    /// `‖u₀‖_{B^{−s+2−2/r}_{p,r}}`.
    pub initial_norm: f64,
    /// `w_norm / (forcing_norm + initial_norm)`.
    pub data_ratio: Option<f64>,
    /// `max_t ‖u(t)‖_{B^{−s+2−2/r}_{p,r}}`.
    pub sup_trace_norm: f64,
    /// `sup_trace_norm / w_norm`.
    pub trace_ratio: Option<f64>,
}

/// Sampled `t ↦ (‖u‖_{B^{−s+2}_{p,q}}, ‖u'‖_{B^{−s}_{p,q}}, ‖u‖_{B^{−s+2−2/r}_{p,r}})`.
pub(crate) fn w_samples<F: Fft2>(
    sp: &Spectral<F>,
    params: &BesovParams,
    traj: &Trajectory,
    derivative: impl Fn(usize) -> Result<SpectralField>,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (s, p, q, r) = (
        params.s_f64(),
        params.p_f64(),
        params.q_f64(),
        params.r_f64(),
    );
    let reg0 = crate::rational::to_f64(&params.initial_regularity());
    let mut hi = Vec::with_capacity(traj.len());
    let mut dt = Vec::with_capacity(traj.len());
    let mut trace = Vec::with_capacity(traj.len());
    for (i, u) in traj.states.iter().enumerate() {
        hi.push(besov::besov(sp, u, 2.0 - s, p, q)?);
        dt.push(besov::besov(sp, &derivative(i)?, -s, p, q)?);
        trace.push(besov::besov(sp, u, reg0, p, r)?);
    }
    Ok((hi, dt, trace))
}

/// `(∫ a^r + b^r dt)^{1/r}` on the sample grid.
pub(crate) fn w_norm_of(times: &[f64], hi: &[f64], dt: &[f64], r: f64) -> Result<f64> {
    let sum: Vec<f64> = hi
        .iter()
        .zip(dt)
        .map(|(a, b)| math::powf(*a, r) + math::powf(*b, r))
        .collect();
    Ok(math::powf(timenorm::trapezoid(times, &sum)?, 1.0 / r))
}

/// Evaluates the linear regularity estimate along a [`stokes_solve`]
/// trajectory; `u'` is taken from the equation.
pub fn linear_regularity<F: Fft2>(
    sp: &Spectral<F>,
    params: &BesovParams,
    traj: &Trajectory,
    forcing: &ForcingSpec,
) -> Result<LinearRegularityReport> {
    let (s, p, q, r) = (
        params.s_f64(),
        params.p_f64(),
        params.q_f64(),
        params.r_f64(),
    );
    let reg0 = crate::rational::to_f64(&params.initial_regularity());
    let (hi, dt, trace) = w_samples(sp, params, traj, |i| {
        time_derivative(&traj.states[i], forcing, traj.times[i])
    })?;
    let w_norm = w_norm_of(&traj.times, &hi, &dt, r)?;
    let n = traj.states[0].resolution();
    let mut fvals = Vec::with_capacity(traj.len());
    for &t in &traj.times {
        fvals.push(besov::besov(sp, &forcing.eval(n, t)?, -s, p, q)?);
    }
    let forcing_norm = timenorm::lr_norm(&traj.times, &fvals, r)?;
    let initial_norm = besov::besov(sp, &traj.states[0], reg0, p, r)?;
    let sup_trace_norm = timenorm::sup_norm(&trace);
    let data = forcing_norm + initial_norm;
    Ok(LinearRegularityReport {
        w_norm,
        forcing_norm,
        initial_norm,
        data_ratio: (data > 0.0).then(|| w_norm / data),
        sup_trace_norm,
        trace_ratio: (w_norm > 0.0).then(|| sup_trace_norm / w_norm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_field;

    fn mode(k1: i64, k2: i64) -> ModeIndex {
        ModeIndex::new(k1, k2)
    }

    #[test]
    fn operator_scales_by_eigenvalue() {
        let u = SpectralField::from_modes(8, &[(mode(2, 0), Complex64::new(1.5, -0.5))]).unwrap();
        assert_eq!(apply_a(&u).coeff(mode(2, 0)), Complex64::new(6.0, -2.0));
        assert_eq!(apply_inv_a(&apply_a(&u)), u);
    }

    #[test]
    fn semigroup_single_mode() {
        let u = SpectralField::from_modes(8, &[(mode(2, 0), Complex64::new(1.0, 0.0))]).unwrap();
        let v = semigroup(&u, 0.25).unwrap();
        assert!((v.coeff(mode(2, 0)).re - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(semigroup(&u, 0.0).unwrap(), u);
        assert_eq!(semigroup(&u, -1.0), Err(Error::NegativeTime(-1.0)));
    }

    #[test]
    fn constant_forcing_closed_form() {
        let k = mode(2, 0);
        let fk = Complex64::new(0.7, 0.2);
        let f = ForcingSpec::new(alloc::vec![(k, TimeLaw::Constant { value: fk })]).unwrap();
        let u0 = SpectralField::zeros(8).unwrap();
        let traj = stokes_solve(&u0, &f, 1.0, 4).unwrap();
        for (t, u) in traj.times.iter().zip(&traj.states) {
            let expected = fk / 4.0 * (1.0 - (-4.0 * t).exp());
            assert!((u.coeff(k) - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn negative_mode_forcing_uses_partner() {
        let f = ForcingSpec::new(alloc::vec![(
            mode(-1, 0),
            TimeLaw::Constant {
                value: Complex64::new(0.0, 1.0)
            }
        )])
        .unwrap();
        let v = f.eval(4, 0.0).unwrap();
        assert_eq!(v.coeff(mode(-1, 0)), Complex64::new(0.0, 1.0));
        assert_eq!(v.coeff(mode(1, 0)), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn sampled_duhamel_splits_at_breakpoints() {
        let law = TimeLaw::Sampled {
            dt: 0.5,
            values: alloc::vec![Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0)],
        };
        let lam = 2.0;
        let whole = law.duhamel(lam, 0.0, 1.5);
        let first = law.duhamel(lam, 0.0, 0.5);
        let rest = law.duhamel(lam, 0.5, 1.0);
        let combined = first * (-lam * 1.0f64).exp() + rest;
        assert!((whole - combined).norm() < 1e-15);
        let direct = 1.0 * (-(lam * 1.0f64)).exp() * (1.0 - (-lam * 0.5f64).exp()) / lam
            + 3.0 * (1.0 - (-lam * 1.0f64).exp()) / lam;
        assert!((whole.re - direct).abs() < 1e-15);
    }

    #[test]
    fn unresolved_forcing_rejected() {
        let f = ForcingSpec::new(alloc::vec![(
            mode(5, 0),
            TimeLaw::Constant {
                value: Complex64::new(1.0, 0.0)
            }
        )])
        .unwrap();
        let u0 = SpectralField::zeros(8).unwrap();
        assert!(matches!(
            stokes_solve(&u0, &f, 1.0, 2),
            Err(Error::UnresolvedForcing { k1: 5, .. })
        ));
    }

    #[test]
    fn free_decay_energy_balance() {
        let u = random_field(16, 1.0, 3).unwrap();
        let scale = u.l2_norm_sq();
        for (t1, t2) in [(0.0, 0.1), (0.05, 1.0), (0.3, 0.3001)] {
            let res = energy_balance_residual(&u, t1, t2).unwrap();
            assert!(res.abs() <= 1e-12 * scale, "{res}");
        }
    }
}
