//! Time integration of `u' + Au + B(u,u) = f` and the instrumentation around
//! it: local solve under the smallness bound with a Picard iteration, data
//! splitting into a small rough part `y` and a smooth part `x`, energy and
//! Gronwall monitoring for `x`, and the uniqueness probe.
//!
//! The integrator is Lawson's integrating-factor RK4: `A` and the forcing
//! are propagated exactly per mode, and RK4 is applied to `−B` in the
//! transformed variable. Scalar integrals that monitors need are advanced
//! with the same stages, so their quadrature error matches the state's.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::admissibility::{self, Verdict};
use crate::besov::{self, BesovParams};
use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::field::{canonical_modes, RandomFieldSpec, Spectral, SpectralField};
use crate::math;
use crate::nonlinear::{self, Dealias, LemmaExponents};
use crate::rational::{self, int, Rational};
use crate::stokes::{self, ForcingSpec, Trajectory};
use crate::timenorm;

/// Constants whose existence is proven but whose values are not; every
/// downstream check is conditional on the values stored here.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmpiricalConstants {
    /// Norm of the inverse linearized solution map, data → solution.
    pub norm_inv_d0phi: f64,
    /// Constant of `‖B(u)‖_{L^r B^{−s}} ≤ C₁ T^ε ‖u‖²_W`.
    pub c1: f64,
    /// Constant of `C_u(T) = C₂‖u‖_{L^r B^{2/p+2/r−1}_{p,q}}`.
    pub c2: f64,
    /// Constant of the uniqueness contraction.
    pub c3: f64,
    /// Energy-lemma constant `c_ε`; estimated along the trajectory if absent.
    pub lemma_c: Option<f64>,
    /// `false` while the values are placeholders.
    pub estimated: bool,
}

impl Default for EmpiricalConstants {
    fn default() -> Self {
        Self {
            norm_inv_d0phi: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            lemma_c: None,
            estimated: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Integrator {
    #[default]
    IfRk4,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SolverConfig {
    pub n: usize,
    pub dealias: Dealias,
    pub integrator: Integrator,
    pub dt: f64,
    pub horizon: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub constants: EmpiricalConstants,
    /// Starting Euclidean cutoff `K` of the data splitting.
    pub cutoff: i64,
    pub h_threshold: f64,
    pub y0_threshold: f64,
    /// `false` drops `B` and reduces the solver to the Stokes problem.
    pub nonlinear: bool,
    /// `ε` of the energy lemma used by the Gronwall monitor.
    pub lemma_eps: f64,
    /// Multiplier applied to observed maxima when estimating constants.
    pub safety: f64,
    pub probes: usize,
    /// Time samples used for time norms of forcing terms.
    pub forcing_samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::new(32)
    }
}

impl SolverConfig {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            dealias: Dealias::TwoThirds,
            integrator: Integrator::IfRk4,
            dt: 1e-3,
            horizon: 1.0,
            picard_tol: 1e-12,
            picard_max_iter: 60,
            constants: EmpiricalConstants::default(),
            cutoff: 1,
            h_threshold: 1e-2,
            y0_threshold: 1e-2,
            nonlinear: true,
            lemma_eps: 0.25,
            safety: 2.0,
            probes: 64,
            forcing_samples: 32,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n < 2 || self.n % 2 != 0 {
            return bad(alloc::format!("N={} must be even and >= 2", self.n));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(alloc::format!("dt={} must be positive", self.dt));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(alloc::format!("T={} must be positive", self.horizon));
        }
        if self.cutoff < 1 || self.cutoff > (self.n / 2) as i64 {
            return bad(alloc::format!("cutoff K={} outside [1, N/2]", self.cutoff));
        }
        if !(self.h_threshold > 0.0 && self.y0_threshold > 0.0) {
            return bad("smallness thresholds must be positive".into());
        }
        if !(self.lemma_eps > 0.0) || !(self.safety >= 1.0) {
            return bad("lemma_eps must be positive and safety >= 1".into());
        }
        if self.forcing_samples == 0 {
            return bad("forcing_samples must be positive".into());
        }
        Ok(())
    }

    /// Number of steps and the step actually used on `[0, horizon]`.
    pub fn time_grid(&self, horizon: f64) -> (usize, f64) {
        let steps = libm::ceil(horizon / self.dt - 1e-9).max(1.0) as usize;
        (steps, horizon / steps as f64)
    }

    /// Projects a field onto the Galerkin space of the configured rule.
    pub fn galerkin(&self, u: &SpectralField) -> SpectralField {
        u.truncate_linf(self.dealias.cutoff(u.resolution()))
    }

    pub fn galerkin_forcing(&self, f: &ForcingSpec) -> ForcingSpec {
        let cutoff = self.dealias.cutoff(self.n);
        f.filter(|k| k.max_abs() <= cutoff)
    }
}

/// Named columns sampled along a trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
    pub diagnostics: Vec<(String, f64)>,
}

impl TrajectoryRecord {
    pub fn new(times: Vec<f64>) -> Self {
        Self {
            times,
            ..Self::default()
        }
    }

    pub fn push(&mut self, name: &str, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.times.len());
        self.columns.push((String::from(name), values));
    }

    pub fn note(&mut self, name: &str, value: f64) {
        self.diagnostics.push((String::from(name), value));
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }
}

/// Per-mode exponential factors for one step size.
struct IfRk4 {
    h: f64,
    half: Vec<f64>,
    full: Vec<f64>,
}

/// Position inside a step at which a stage is evaluated: 0, ½ or 1.
type StageFrac = f64;

impl IfRk4 {
    fn new(n: usize, h: f64) -> Self {
        let (half, full) = canonical_modes(n)
            .map(|k| {
                let lam = k.norm_sq() as f64;
                (math::exp(-0.5 * h * lam), math::exp(-h * lam))
            })
            .unzip();
        Self { h, half, full }
    }

    /// One step of the system `uᵢ' + Auᵢ = Nᵢ(t, u) + fᵢ(t)`; `acc` receives
    /// the RK4 quadrature of `scalars` over the step.
    #[allow(clippy::too_many_arguments)]
    fn step<NL, SC>(
        &self,
        t: f64,
        u: &[SpectralField],
        forcing: &[&ForcingSpec],
        nl: &mut NL,
        scalars: &mut SC,
        acc: &mut [f64],
    ) -> Result<Vec<SpectralField>>
    where
        NL: FnMut(f64, StageFrac, &[SpectralField]) -> Result<Vec<SpectralField>>,
        SC: FnMut(f64, StageFrac, &[SpectralField], &[SpectralField]) -> Result<Vec<f64>>,
    {
        let h = self.h;
        let n = u[0].resolution();
        let mut base_half = Vec::with_capacity(u.len());
        let mut base_full = Vec::with_capacity(u.len());
        for (ui, fi) in u.iter().zip(forcing) {
            let mut a = ui.scaled_by(&self.half);
            let mut b = ui.scaled_by(&self.full);
            if !fi.is_zero() {
                a.axpy(1.0, &fi.duhamel(n, t, 0.5 * h)?);
                b.axpy(1.0, &fi.duhamel(n, t, h)?);
            }
            base_half.push(a);
            base_full.push(b);
        }

        let k1 = nl(t, 0.0, u)?;
        let s1 = scalars(t, 0.0, u, &k1)?;
        let u2: Vec<_> = base_half
            .iter()
            .zip(&k1)
            .map(|(b, k)| {
                let mut v = b.clone();
                v.axpy(0.5 * h, &k.scaled_by(&self.half));
                v
            })
            .collect();
        let k2 = nl(t + 0.5 * h, 0.5, &u2)?;
        let s2 = scalars(t + 0.5 * h, 0.5, &u2, &k2)?;
        let u3: Vec<_> = base_half
            .iter()
            .zip(&k2)
            .map(|(b, k)| {
                let mut v = b.clone();
                v.axpy(0.5 * h, k);
                v
            })
            .collect();
        let k3 = nl(t + 0.5 * h, 0.5, &u3)?;
        let s3 = scalars(t + 0.5 * h, 0.5, &u3, &k3)?;
        let u4: Vec<_> = base_full
            .iter()
            .zip(&k3)
            .map(|(b, k)| {
                let mut v = b.clone();
                v.axpy(h, &k.scaled_by(&self.half));
                v
            })
            .collect();
        let k4 = nl(t + h, 1.0, &u4)?;
        let s4 = scalars(t + h, 1.0, &u4, &k4)?;

        let out = (0..u.len())
            .map(|i| {
                let mut v = base_full[i].clone();
                v.axpy(h / 6.0, &k1[i].scaled_by(&self.full));
                let mid = k2[i].add(&k3[i]).expect("same resolution");
                v.axpy(h / 3.0, &mid.scaled_by(&self.half));
                v.axpy(h / 6.0, &k4[i]);
                v
            })
            .collect::<Vec<_>>();
        for (j, a) in acc.iter_mut().enumerate() {
            *a += h / 6.0 * (s1[j] + 2.0 * s2[j] + 2.0 * s3[j] + s4[j]);
        }
        if let Some(bad) = out.iter().find(|v| !v.is_finite()) {
            let _ = bad;
            return Err(Error::NonFiniteField { time: t + h });
        }
        Ok(out)
    }
}

fn no_scalars(_: f64, _: StageFrac, _: &[SpectralField], _: &[SpectralField]) -> Result<Vec<f64>> {
    Ok(Vec::new())
}

fn minus_b<F: Fft2>(
    sp: &Spectral<F>,
    cfg: &SolverConfig,
    u: &SpectralField,
    v: &SpectralField,
) -> Result<SpectralField> {
    if !cfg.nonlinear {
        return SpectralField::zeros(u.resolution());
    }
    Ok(nonlinear::bilinear_b_with(sp, u, v, cfg.dealias)?.scale(-1.0))
}

/// One integrating-factor RK4 step of `u' + Au + B(u,u) = f` from time `t`.
pub fn step<F: Fft2>(
    sp: &Spectral<F>,
    cfg: &SolverConfig,
    u: &SpectralField,
    forcing: &ForcingSpec,
    t: f64,
    dt: f64,
) -> Result<SpectralField> {
    let stepper = IfRk4::new(u.resolution(), dt);
    let mut nl =
        |_: f64, _: StageFrac, s: &[SpectralField]| Ok(vec![minus_b(sp, cfg, &s[0], &s[0])?]);
    let mut out = stepper.step(
        t,
        core::slice::from_ref(u),
        &[forcing],
        &mut nl,
        &mut no_scalars,
        &mut [],
    )?;
    Ok(out.remove(0))
}

/// Direct solve with energy bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutput {
    pub trajectory: Trajectory,
    pub record: TrajectoryRecord,
    /// Set when the run stopped at a non-finite state; the trajectory holds
    /// every healthy state up to that point.
    pub failure: Option<Error>,
}

/// Integrates `u' + Au + B(u,u) = f` on `[0, horizon]` after projecting the
/// data onto the Galerkin space. Records `‖u‖_{L₂}`, `‖u‖_{H¹₂}` and the
/// energy residual `½‖u‖² − ½‖u₀‖² + ∫‖u‖²_{H¹} + ∫⟨B(u,u),u⟩ − ∫⟨f,u⟩`.
pub fn solve<F: Fft2>(
    sp: &Spectral<F>,
    cfg: &SolverConfig,
    u0: &SpectralField,
    forcing: &ForcingSpec,
    horizon: f64,
) -> Result<SolveOutput> {
    cfg.validate()?;
    let n = u0.resolution();
    forcing.check_resolution(n)?;
    let u0 = cfg.galerkin(u0);
    let forcing = cfg.galerkin_forcing(forcing);
    let (steps, h) = cfg.time_grid(horizon);
    let stepper = IfRk4::new(n, h);
    let mut nl =
        |_: f64, _: StageFrac, s: &[SpectralField]| Ok(vec![minus_b(sp, cfg, &s[0], &s[0])?]);
    let f_ref = &forcing;
    let mut scalars = |t: f64, _: StageFrac, s: &[SpectralField], k: &[SpectralField]| {
        let u = &s[0];
        let fu = if f_ref.is_zero() {
            0.0
        } else {
            f_ref.eval(n, t)?.inner(u)?
        };
        Ok(vec![u.hilbert_norm_sq(1.0), -k[0].inner(u)?, fu])
    };
    let mut times = vec![0.0];
    let mut states = vec![u0.clone()];
    let mut acc = [0.0; 3];
    let mut accs = vec![acc];
    let mut failure = None;
    for j in 0..steps {
        let t = j as f64 * h;
        match stepper.step(t, &states[j..=j], &[f_ref], &mut nl, &mut scalars, &mut acc) {
            Ok(mut next) => {
                states.push(next.remove(0));
                times.push((j + 1) as f64 * h);
                accs.push(acc);
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let e0 = 0.5 * u0.l2_norm_sq();
    let mut record = TrajectoryRecord::new(times.clone());
    record.push("l2", states.iter().map(|u| u.l2_norm()).collect());
    record.push("h1", states.iter().map(|u| u.hilbert_norm(1.0)).collect());
    record.push(
        "energy_residual",
        states
            .iter()
            .zip(&accs)
            .map(|(u, a)| 0.5 * u.l2_norm_sq() - e0 + a[0] + a[1] - a[2])
            .collect(),
    );
    record.push("trilinear_integral", accs.iter().map(|a| a[1]).collect());
    record.note("dt", h);
    Ok(SolveOutput {
        trajectory: Trajectory { times, states },
        record,
        failure,
    })
}

/// [`solve`] that turns a blow-up into an error.
pub fn integrate<F: Fft2>(
    sp: &Spectral<F>,
    cfg: &SolverConfig,
    u0: &SpectralField,
    forcing: &ForcingSpec,
    horizon: f64,
) -> Result<Trajectory> {
    let out = solve(sp, cfg, u0, forcing, horizon)?;
    match out.failure {
        Some(e) => Err(e),
        None => Ok(out.trajectory),
    }
}

/// `(∫‖f‖^r_{B^{−s}_{p,q}} dt)^{1/r}` on `cfg.forcing_samples` intervals.
pub fn forcing_norm<F: Fft2>(
    sp: &Spectral<F>,
    params: &BesovParams,
    cfg: &SolverConfig,
    f: &ForcingSpec,
    n: usize,
    horizon: f64,
) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let times = stokes::uniform_times(horizon, cfg.forcing_samples);
    let mut vals = Vec::with_capacity(times.len());
    for &t in &times {
        vals.push(besov::besov(
            sp,
            &f.eval(n, t)?,
            -params.s_f64(),
            params.p_f64(),
            params.q_f64(),
        )?);
    }
    timenorm::lr_norm(&times, &vals, params.r_f64())
}

/// `‖u₀‖_{B^{−s+2−2/r}_{p,r}}`.
pub fn initial_norm<F: Fft2>(
    sp: &Spectral<F>,
    params: &BesovParams,
    u0: &SpectralField,
) -> Result<f64> {
    besov::besov(
        sp,
        u0,
        rational::to_f64(&params.initial_regularity()),
        params.p_f64(),
        params.r_f64(),
    )
}

/// `1/(4‖(d₀Φ)⁻¹‖²C₁)`.
pub fn picc_threshold(c: &EmpiricalConstants) -> f64 {
    1.0 / (4.0 * c.norm_inv_d0phi * c.norm_inv_d0phi * c.c1)
}

/// Supremum of times `T` with `data_norm·T^ε < threshold` (infinite for
/// zero data).
pub fn picc_time_bound(data_norm: f64, epsilon: f64, c: &EmpiricalConstants) -> Result<f64> {
    if !data_norm.is_finite() || data_norm < 0.0 {
        return Err(Error::PiccViolation { data_norm });
    }
    if data_norm == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(math::powf(picc_threshold(c) / data_norm, 1.0 / epsilon))
}

/// Exact form of [`picc_time_bound`] when `1/ε` is a positive integer.
pub fn picc_time_bound_exact(
    data_norm: Rational,
    norm_inv_d0phi: Rational,
    c1: Rational,
    epsilon: Rational,
) -> Option<Rational> {
    let inv = int(1) / epsilon;
    if !inv.is_integer() || inv <= int(0) || data_norm <= int(0) {
        return None;
    }
    let base = int(1) / (int(4) * norm_inv_d0phi * norm_inv_d0phi * c1 * data_norm);
    let e = i32::try_from(inv.to_integer()).ok()?;
    Some(num_traits::pow::Pow::pow(base, e))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PicardReport {
    pub iterations: usize,
    /// `max_t ‖u^{n+1} − u^n‖_{L₂}` per iteration.
    pub differences: Vec<f64>,
    /// Ratios of consecutive differences.
    pub factors: Vec<f64>,
    pub converged: bool,
}

impl PicardReport {
    pub fn max_factor(&self) -> Option<f64> {
        self.factors.iter().copied().reduce(f64::max)
    }
}

/// Weights of the exponential integrator with linear interpolation of the
/// source on one step: `w_{j+1} = e w_j + a g_j + b g_{j+1}`.
fn etd_weights(n: usize, h: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut e = Vec::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for k in canonical_modes(n) {
        let lam = k.norm_sq() as f64;
        let z = lam * h;
        let p1 = stokes::phi1(lam, h);
        // ∫₀^h e^{−λ(h−σ)} σ/h dσ = h Σ (−z)^j/(j+2)!
        let p2 = if z < 0.1 {
            let mut term = 0.5;
            let mut sum = 0.0;
            for j in 0..10 {
                sum += term;
                term *= -z / (j as f64 + 3.0);
            }
            h * sum
        } else {
            (1.0 - p1 / h) / lam
        };
        e.push(math::exp(-z));
        a.push(p1 - p2);
        b.push(p2);
    }
    (e, a, b)
}

/// Picard iteration `u^{n+1} = e^{−tA}u₀ + ∫e^{−(t−τ)A}(f − B(u^n))dτ` on a
/// uniform grid; the contraction factor is measured in `max_t ‖·‖_{L₂}`.
pub fn picard<F: Fft2>(
    sp: &Spectral<F>,
    cfg: &SolverConfig,
    u0: &SpectralField,
    forcing: &ForcingSpec,
    horizon: f64,
    steps: usize,
) -> Result<(PicardReport, Vec<SpectralField>)> {
    let n = u0.resolution();
    let h = horizon / steps as f64;
    let linear = stokes::stokes_solve(u0, forcing, horizon, steps)?.states;
    let (e, a, b) = etd_weights(n, h);
    let mut current = linear.clone();
    let mut report = PicardReport {
        iterations: 0,
        differences: Vec::new(),
        factors: Vec::new(),
        converged: false,
    };
    while report.iterations < cfg.picard_max_iter {
        report.iterations += 1;
        let g: Vec<SpectralField> = current
            .iter()
            .map(|u| minus_b(sp, cfg, u, u))
            .collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(steps + 1);
        let mut w = SpectralField::zeros(n)?;
        next.push(linear[0].clone());
        for j in 0..steps {
            let mut wn = w.scaled_by(&e);
            wn.axpy(1.0, &g[j].scaled_by(&a));
            wn.axpy(1.0, &g[j + 1].scaled_by(&b));
            next.push(linear[j + 1].add(&wn)?);
            w = wn;
        }
        let mut diff = 0.0f64;
        let mut size = 0.0f64;
        for (x, y) in next.iter().zip(&current) {
            diff = diff.max(x.sub(y)?.l2_norm());
            size = size.max(x.l2_norm());
        }
        if !diff.is_finite() {
            return Err(Error::NonConvergent {
                iterations: report.iterations,
                factor: f64::INFINITY,
            });
        }
        if let Some(&prev) = report.differences.last() {
            if prev > 0.0 {
                report.factors.push(diff / prev);
            }
        }
        report.differences.push(diff);
        current = next;
        if diff <= cfg.picard_tol * size || diff == 0.0 {
            report.converged = true;
            return Ok((report, current));
        }
    }
    Err(Error::NonConvergent {
        iterations: report.iterations,
        factor: report.factors.last().copied().unwrap_or(f64::NAN),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSolveReport {
    pub forcing_norm: f64,
    pub initial_norm: f64,
    /// `‖(f,u₀)‖_F`, the sum of the two norms above.
    pub data_norm: f64,
    pub epsilon: Rational,
    pub threshold: f64,
    pub t_bar: f64,
    /// `‖(f,u₀)‖_F · T̄^ε`, strictly below `threshold`.
    pub bound: f64,
    pub constants: EmpiricalConstants,
    pub trajectory: Trajectory,
    pub picard: PicardReport,
    /// `max_t ‖u_Picard − u_RK4‖_{L₂}` on the common grid.
    pub picard_vs_integrator: f64,
}

/// Local solve on the largest interval allowed by the smallness bound.
pub fn solve_local<F: Fft2>(
    sp: &Spectral<F>,
    u0: &SpectralField,
    forcing: &ForcingSpec,
    params: &BesovParams,
    cfg: &SolverConfig,
) -> Result<LocalSolveReport> {
    cfg.validate()?;
    let report = admissibility::check_local(params);
    if let Some(c) = report.first_violation() {
        return Err(Error::InadmissibleParams(alloc::format!(
            "({}) {}",
            c.id,
            c.statement
        )));
    }
    let exps = admissibility::derive_exponents(params)?;
    let n = u0.resolution();
    forcing.check_resolution(n)?;
    let u0 = cfg.galerkin(u0);
    let forcing = cfg.galerkin_forcing(forcing);
    let fnorm = forcing_norm(sp, params, cfg, &forcing, n, cfg.horizon)?;
    let inorm = initial_norm(sp, params, &u0)?;
    let data_norm = fnorm + inorm;
    let eps = rational::to_f64(&exps.epsilon);
    let threshold = picc_threshold(&cfg.constants);
    let limit = picc_time_bound(data_norm, eps, &cfg.constants)?;
    let mut t_bar = if limit > cfg.horizon {
        cfg.horizon
    } else {
        limit * (1.0 - 1e-9)
    };
    while data_norm * math::powf(t_bar, eps) >= threshold && t_bar > 0.0 {
        t_bar *= 0.5;
    }
    if !(t_bar > 0.0) {
        return Err(Error::PiccViolation { data_norm });
    }
    let (steps, _) = cfg.time_grid(t_bar);
    let trajectory = integrate(sp, cfg, &u0, &forcing, t_bar)?;
    let (picard, states) = picard(sp, cfg, &u0, &forcing, t_bar, steps)?;
    let mut gap = 0.0f64;
    for (a, b) in states.iter().zip(&trajectory.states) {
        gap = gap.max(a.sub(b)?.l2_norm());
    }
    Ok(LocalSolveReport {
        forcing_norm: fnorm,
        initial_norm: inorm,
        data_norm,
        epsilon: exps.epsilon,
        threshold,
        t_bar,
        bound: data_norm * math::powf(t_bar, eps),
        constants: cfg.constants,
        trajectory,
        picard,
        picard_vs_integrator: gap,
    })
}

/// Observed ratios from one probe of [`estimate_constants`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub inv_d0phi: Option<f64>,
    pub c1: Option<f64>,
    pub lemma_c: Option<f64>,
}

/// One probe: a random linear solve and a random pair for the energy lemma.
pub fn constant_probe<F: Fft2>(
    sp: &Spectral<F>,
    params: &BesovParams,
    cfg: &SolverConfig,
    gamma: f64,
    seed: u64,
) -> Result<ProbeSample> {
    let n = cfg.n;
    let u0 = cfg.galerkin(&RandomFieldSpec::new(gamma, seed).sample(n)?);
    let f = cfg.galerkin_forcing(&ForcingSpec::random(
        n,
        &RandomFieldSpec::new(gamma, seed ^ 0xA5A5_5A5A_0F0F_F0F0),
    )?);
    let steps = cfg.forcing_samples;
    let traj = stokes::stokes_solve(&u0, &f, cfg.horizon, steps)?;
    let lin = stokes::linear_regularity(sp, params, &traj, &f)?;
    let exps = admissibility::derive_exponents(params)?;
    let eps = rational::to_f64(&exps.epsilon);
    let (s, p, q, r) = (
        params.s_f64(),
        params.p_f64(),
        params.q_f64(),
        params.r_f64(),
    );
    let mut bvals = Vec::with_capacity(traj.len());
    for u in &traj.states {
        bvals.push(besov::besov(
            sp,
            &nonlinear::bilinear_b_with(sp, u, u, cfg.dealias)?,
            -s,
            p,
            q,
        )?);
    }
    let b_norm = timenorm::lr_norm(&traj.times, &bvals, r)?;
    let w2 = lin.w_norm * lin.w_norm * math::powf(cfg.horizon, eps);
    let lemma_c = match LemmaExponents::new(core::cmp::max(params.p, int(2)), params.r) {
        Ok(le) => {
            let x =
                cfg.galerkin(&RandomFieldSpec::new(gamma, seed.wrapping_mul(31) + 7).sample(n)?);
            nonlinear::energy_lemma_sample(sp, &x, &u0, cfg.lemma_eps, &le)?.scale_invariant_c
        }
        Err(_) => None,
    };
    Ok(ProbeSample {
        inv_d0phi: lin.data_ratio,
        c1: (w2 > 0.0).then(|| b_norm / w2),
        lemma_c,
    })
}

/// Maximum over probes times the safety factor; `c₂`, `c₃` stay at their
/// placeholder values.
pub fn constants_from_probes(samples: &[ProbeSample], safety: f64) -> EmpiricalConstants {
    let max_of = |pick: fn(&ProbeSample) -> Option<f64>| {
        samples
            .iter()
            .filter_map(pick)
            .reduce(f64::max)
            .map(|v| v * safety)
    };
    let base = EmpiricalConstants::default();
    EmpiricalConstants {
        norm_inv_d0phi: max_of(|s| s.inv_d0phi).unwrap_or(base.norm_inv_d0phi),
        c1: max_of(|s| s.c1).unwrap_or(base.c1),
        c2: base.c2,
        c3: base.c3,
        lemma_c: max_of(|s| s.lemma_c),
        estimated: true,
    }
}

/// Sequential probe ensemble, `cfg.probes` members with seeds `seed + i`.
pub fn estimate_constants<F: Fft2>(
    sp: &Spectral<F>,
    params: &BesovParams,
    cfg: &SolverConfig,
    gamma: f64,
    seed: u64,
) -> Result<EmpiricalConstants> {
    let samples = (0..cfg.probes)
        .map(|i| constant_probe(sp, params, cfg, gamma, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(constants_from_probes(&samples, cfg.safety))
}

/// `u₀ = x₀ + y₀`, `f = g + h` with `x₀, g` supported on `|k| ≤ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub cutoff: i64,
    pub x0: SpectralField,
    pub g: ForcingSpec,
    pub y0: SpectralField,
    pub h: ForcingSpec,
    /// `‖h‖_{L^r(0,T;B^{−s}_{p,q})}`.
    pub h_norm: f64,
    /// `‖y₀‖_{B^{−s+2−2/r}_{p,r}}`.
    pub y0_norm: f64,
}

impl Split {
    /// Everything in `(x₀, g)`.
    pub fn degenerate(u0: &SpectralField, f: &ForcingSpec) -> Result<Self> {
        Ok(Self {
            cutoff: (u0.resolution() / 2) as i64,
            x0: u0.clone(),
            g: f.clone(),
            y0: SpectralField::zeros(u0.resolution())?,
            h: ForcingSpec::zero(),
            h_norm: 0.0,
            y0_norm: 0.0,
        })
    }
}

/// Smallest Euclidean cutoff `K ≥ cfg.cutoff` whose high-pass remainders
/// are both below `eps_split`.
pub fn split_data<F: Fft2>(
    sp: &Spectral<F>,
    u0: &SpectralField,
    f: &ForcingSpec,
    params: &BesovParams,
    cfg: &SolverConfig,
    eps_split: f64,
) -> Result<Split> {
    if !(eps_split > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "splitting threshold {eps_split} must be positive"
        )));
    }
    let n = u0.resolution();
    f.check_resolution(n)?;
    let kmax = (n / 2) as i64;
    for k in cfg.cutoff.max(1)..=kmax {
        let g = f.filter(|m| m.norm_sq() <= k * k);
        let h = f.filter(|m| m.norm_sq() > k * k);
        let x0 = u0.low_pass(k);
        let y0 = u0.sub(&x0)?;
        let h_norm = forcing_norm(sp, params, cfg, &h, n, cfg.horizon)?;
        let y0_norm = initial_norm(sp, params, &y0)?;
        if h_norm < eps_split && y0_norm < eps_split {
            return Ok(Split {
                cutoff: k,
                x0,
                g,
                y0,
                h,
                h_norm,
                y0_norm,
            });
        }
    }
    Err(Error::CutoffExhausted { cutoff: kmax })
}

/// Solution of the small-data problem `y' + Ay + B(y,y) = h`.
#[derive(Debug, Clone, PartialEq)]
pub struct YSolution {
    pub y0: SpectralField,
    pub h: ForcingSpec,
    pub trajectory: Trajectory,
    /// Columns `l2`, `h1`, `besov_top` (`B^{−s+2}_{p,q}`), `besov_lemma`
    /// (`B^{2/p̃+2/q̃−1}_{p̃,q̃}`), `besov_trace` (`B^{−s+2−2/r}_{p,r}`).
    pub record: TrajectoryRecord,
    pub y0_norm: f64,
    pub h_norm: f64,
}

/// Exponents `(p̃, q̃) = (max(p,2), r)` of the energy lemma.
pub fn lemma_exponents(params: &BesovParams) -> Result<LemmaExponents> {
    LemmaExponents::new(core::cmp::max(params.p, int(2)), params.r)
}

pub fn solve_y<F: Fft2>(
    sp: &Spectral<F>,
    y0: &SpectralField,
    h: &ForcingSpec,
    params: &BesovParams,
    cfg: &SolverConfig,
) -> Result<YSolution> {
    cfg.validate()?;
    let n = y0.resolution();
    h.check_resolution(n)?;
    let y0 = cfg.galerkin(y0);
    let h = cfg.galerkin_forcing(h);
    let y0_norm = initial_norm(sp, params, &y0)?;
    let h_norm = forcing_norm(sp, params, cfg, &h, n, cfg.horizon)?;
    for (which, value, threshold) in [
        ("y0", y0_norm, cfg.y0_threshold),
        ("h", h_norm, cfg.h_threshold),
    ] {
        if !(value < threshold) {
            return Err(Error::SmallnessViolation {
                which: String::from(which),
                value,
                threshold,
            });
        }
    }
    let trajectory = integrate(sp, cfg, &y0, &h, cfg.horizon)?;
    let (s, p, q, r) = (
        params.s_f64(),
        params.p_f64(),
        params.q_f64(),
        params.r_f64(),
    );
    let reg0 = rational::to_f64(&params.initial_regularity());
    let lemma = lemma_exponents(params).ok();
    let mut record = TrajectoryRecord::new(trajectory.times.clone());
    let states = &trajectory.states;
    record.push("l2", states.iter().map(|u| u.l2_norm()).collect());
    record.push("h1", states.iter().map(|u| u.hilbert_norm(1.0)).collect());
    let mut top = Vec::with_capacity(states.len());
    let mut lem = Vec::with_capacity(states.len());
    let mut trace = Vec::with_capacity(states.len());
    for u in states {
        top.push(besov::besov(sp, u, 2.0 - s, p, q)?);
        trace.push(besov::besov(sp, u, reg0, p, r)?);
        lem.push(match &lemma {
            Some(le) => besov::besov(
                sp,
                u,
                rational::to_f64(&le.smoothness()),
                rational::to_f64(&le.p),
                rational::to_f64(&le.q),
            )?,
            None => f64::NAN,
        });
    }
    record.push("besov_top", top);
    record.push("besov_lemma", lem);
    record.push("besov_trace", trace);
    Ok(YSolution {
        y0,
        h,
        trajectory,
        record,
        y0_norm,
        h_norm,
    })
}

/// Solution of the `x` problem with its energy and Gronwall monitors.
#[derive(Debug, Clone, PartialEq)]
pub struct XSolution {
    pub trajectory: Trajectory,
    /// Columns: `x_l2_sq`, `dissipation` `∫‖x‖²_{H¹}`, `coupling` `∫⟨B(x,x),y⟩`,
    /// `forcing_work` `∫⟨g,x⟩`, `forcing_h_minus1` `∫‖g‖²_{H⁻¹}`,
    /// `energy_residual`, `energy_scale`, `energy_bound`, `lemma_c`,
    /// `gronwall_envelope`.
    pub record: TrajectoryRecord,
    /// Energy-lemma constant used by the envelope.
    pub lemma_c: Option<f64>,
    /// Samples where the monitored inequality or envelope is exceeded.
    pub energy_breaches: usize,
    pub gronwall_breaches: usize,
    /// Largest `|residual| / scale` of the energy identity.
    pub max_energy_residual: f64,
    /// `max_t ‖y_replayed − y_stored‖_{L₂}`.
    pub y_replay_deviation: f64,
}

/// Relative slack allowed by the energy and Gronwall monitors.
pub const MONITOR_TOL: f64 = 1e-6;

/// Integrates `x' + Ax + B(x,x) + B(x,y) + B(y,x) = g`. `y` is advanced
/// alongside with the same stages, so its stage values are exact.
pub fn solve_x<F: Fft2>(
    sp: &Spectral<F>,
    x0: &SpectralField,
    g: &ForcingSpec,
    y: &YSolution,
    params: &BesovParams,
    cfg: &SolverConfig,
) -> Result<XSolution> {
    cfg.validate()?;
    let n = x0.resolution();
    g.check_resolution(n)?;
    if y.trajectory.states[0].resolution() != n {
        return Err(Error::ResolutionMismatch(
            "x and y resolutions differ".into(),
        ));
    }
    let x0 = cfg.galerkin(x0);
    let g = cfg.galerkin_forcing(g);
    let (steps, h) = cfg.time_grid(cfg.horizon);
    if y.trajectory.len() != steps + 1 {
        return Err(Error::InvalidArgument(alloc::format!(
            "y trajectory has {} samples, the x grid needs {}",
            y.trajectory.len(),
            steps + 1
        )));
    }
    let stepper = IfRk4::new(n, h);
    let mut nl = |_: f64, _: StageFrac, s: &[SpectralField]| {
        let (x, yy) = (&s[0], &s[1]);
        let yb = minus_b(sp, cfg, yy, yy)?;
        let sum = x.add(yy)?;
        let full = minus_b(sp, cfg, &sum, &sum)?;
        Ok(vec![full.sub(&yb)?, yb])
    };
    let g_ref = &g;
    let mut scalars = |t: f64, _: StageFrac, s: &[SpectralField], _: &[SpectralField]| {
        let (x, yy) = (&s[0], &s[1]);
        let coupling = if cfg.nonlinear {
            nonlinear::bilinear_b_with(sp, x, x, cfg.dealias)?.inner(yy)?
        } else {
            0.0
        };
        let (work, hm1) = if g_ref.is_zero() {
            (0.0, 0.0)
        } else {
            let gt = g_ref.eval(n, t)?;
            (gt.inner(x)?, gt.hilbert_norm_sq(-1.0))
        };
        Ok(vec![x.hilbert_norm_sq(1.0), coupling, work, hm1])
    };
    let mut states = vec![x0.clone()];
    let mut ycur = y.trajectory.states[0].clone();
    let mut acc = [0.0; 4];
    let mut accs = vec![acc];
    let mut replay = 0.0f64;
    for j in 0..steps {
        let t = j as f64 * h;
        let pair = [states[j].clone(), ycur];
        let mut next = stepper.step(t, &pair, &[&g, &y.h], &mut nl, &mut scalars, &mut acc)?;
        ycur = next.pop().expect("two components");
        replay = replay.max(ycur.sub(&y.trajectory.states[j + 1])?.l2_norm());
        states.push(next.pop().expect("two components"));
        accs.push(acc);
    }
    let times = y.trajectory.times.clone();

    let phi: Vec<f64> = states.iter().map(|x| x.l2_norm_sq()).collect();
    let e0 = 0.5 * phi[0];
    let mut residual = Vec::with_capacity(phi.len());
    let mut scale = Vec::with_capacity(phi.len());
    let mut max_rel = 0.0f64;
    for (ph, a) in phi.iter().zip(&accs) {
        let r = 0.5 * ph + a[0] - e0 - a[1] - a[2];
        let sc = 0.5 * ph + a[0] + e0 + a[1].abs() + a[2].abs();
        if sc > 0.0 {
            max_rel = max_rel.max(r.abs() / sc);
        }
        residual.push(r);
        scale.push(sc);
    }

    // Gronwall monitor: φ(t) ≤ (φ₀ + 2G(t)) exp(2c ∫Y), Y = ‖y‖^q̃.
    let lemma = lemma_exponents(params).ok();
    let ynorm = y.record.column("besov_lemma").unwrap_or(&[]);
    let mut pointwise_c = Vec::with_capacity(states.len());
    let mut lemma_c = cfg.constants.lemma_c;
    let mut envelope = vec![f64::NAN; states.len()];
    let mut bound = vec![f64::NAN; states.len()];
    let mut energy_breaches = 0usize;
    let mut gronwall_breaches = 0usize;
    if let Some(le) = &lemma {
        let qt = rational::to_f64(&le.q);
        let big_y: Vec<f64> = ynorm.iter().map(|v| math::powf(*v, qt)).collect();
        for (x, yy) in states.iter().zip(&y.trajectory.states) {
            let lhs = if cfg.nonlinear {
                nonlinear::bilinear_b_with(sp, x, x, cfg.dealias)?
                    .inner(yy)?
                    .abs()
            } else {
                0.0
            };
            pointwise_c.push(
                nonlinear::scale_invariant_constant(
                    lhs,
                    cfg.lemma_eps,
                    x.hilbert_norm_sq(1.0),
                    x.l2_norm_sq()
                        * math::powf(
                            besov::besov(
                                sp,
                                yy,
                                rational::to_f64(&le.smoothness()),
                                rational::to_f64(&le.p),
                                qt,
                            )?,
                            qt,
                        ),
                    qt,
                )
                .unwrap_or(0.0),
            );
        }
        if lemma_c.is_none() {
            lemma_c = Some(pointwise_c.iter().copied().fold(0.0, f64::max) * cfg.safety);
        }
        let c = lemma_c.unwrap_or(0.0);
        let int_y = timenorm::cumulative_trapezoid(&times, &big_y)?;
        let xy: Vec<f64> = phi.iter().zip(&big_y).map(|(a, b)| a * b).collect();
        let int_xy = timenorm::cumulative_trapezoid(&times, &xy)?;
        let eps = cfg.lemma_eps;
        for i in 0..states.len() {
            let gi = accs[i][3];
            envelope[i] = (phi[0] + 2.0 * gi) * math::exp(2.0 * c * int_y[i]);
            if phi[i] > envelope[i] * (1.0 + MONITOR_TOL) {
                gronwall_breaches += 1;
            }
            // ½φ + ∫‖x‖²_{H¹} ≤ ½φ₀ + ε∫‖x‖²_{H¹} + c∫φY + ¼∫‖x‖²_{H¹} + ∫‖g‖²_{H⁻¹}
            bound[i] = e0 + (eps + 0.25) * accs[i][0] + c * int_xy[i] + gi;
            let lhs = 0.5 * phi[i] + accs[i][0];
            if lhs > bound[i] + MONITOR_TOL * scale[i] {
                energy_breaches += 1;
            }
        }
    }

    let mut record = TrajectoryRecord::new(times.clone());
    record.push("x_l2_sq", phi);
    record.push("dissipation", accs.iter().map(|a| a[0]).collect());
    record.push("coupling", accs.iter().map(|a| a[1]).collect());
    record.push("forcing_work", accs.iter().map(|a| a[2]).collect());
    record.push("forcing_h_minus1", accs.iter().map(|a| a[3]).collect());
    record.push("energy_residual", residual);
    record.push("energy_scale", scale);
    record.push("energy_bound", bound);
    if pointwise_c.len() == times.len() {
        record.push("lemma_c", pointwise_c);
    }
    record.push("gronwall_envelope", envelope);
    record.note("dt", h);
    record.note("lemma_c", lemma_c.unwrap_or(f64::NAN));
    Ok(XSolution {
        trajectory: Trajectory { times, states },
        record,
        lemma_c,
        energy_breaches,
        gronwall_breaches,
        max_energy_residual: max_rel,
        y_replay_deviation: replay,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitReport {
    pub split: Split,
    pub y: YSolution,
    pub x: XSolution,
    /// `u = x + y`.
    pub combined: Trajectory,
    pub direct: Trajectory,
    /// `‖u_split(t) − u_direct(t)‖_{L₂}` per sample.
    pub discrepancy: Vec<f64>,
    pub max_discrepancy: f64,
    /// `‖u‖_{L^r(0,T;B^{2/p+2/r−1}_{p,q})}` of the combined solution.
    pub lr_critical_norm: f64,
    /// `max_t ‖u‖_{B^{2/p−1}_{p,r}}`.
    pub sup_trace_norm: f64,
}

/// Splits the data, solves for `y` then `x`, and compares `x + y` with a
/// direct solve on the same grid.
pub fn solve_split<F: Fft2>(
    sp: &Spectral<F>,
    u0: &SpectralField,
    f: &ForcingSpec,
    params: &BesovParams,
    cfg: &SolverConfig,
    eps_split: f64,
) -> Result<SplitReport> {
    cfg.validate()?;
    f.check_resolution(u0.resolution())?;
    let u0 = cfg.galerkin(u0);
    let f = cfg.galerkin_forcing(f);
    let split = split_data(sp, &u0, &f, params, cfg, eps_split)?;
    solve_split_from(sp, split, params, cfg)
}

/// [`solve_split`] for a prepared decomposition.
pub fn solve_split_from<F: Fft2>(
    sp: &Spectral<F>,
    split: Split,
    params: &BesovParams,
    cfg: &SolverConfig,
) -> Result<SplitReport> {
    let gate = admissibility::check_global(params);
    if gate.verdict() != Verdict::Pass {
        let c = gate
            .first_violation()
            .expect("non-pass report has a violation");
        return Err(Error::InadmissibleParams(alloc::format!(
            "({}) {}",
            c.id,
            c.statement
        )));
    }
    let y = solve_y(sp, &split.y0, &split.h, params, cfg)?;
    let x = solve_x(sp, &split.x0, &split.g, &y, params, cfg)?;
    let u0 = split.x0.add(&split.y0)?;
    let mut f_modes: Vec<_> = split.g.modes().to_vec();
    f_modes.extend(split.h.modes().iter().cloned());
    let f = ForcingSpec::new(f_modes)?;
    let direct = integrate(sp, cfg, &u0, &f, cfg.horizon)?;
    let combined_states: Vec<SpectralField> = x
        .trajectory
        .states
        .iter()
        .zip(&y.trajectory.states)
        .map(|(a, b)| a.add(b))
        .collect::<Result<_>>()?;
    let discrepancy: Vec<f64> = combined_states
        .iter()
        .zip(&direct.states)
        .map(|(a, b)| a.sub(b).map(|d| d.l2_norm()))
        .collect::<Result<_>>()?;
    let (p, q, r) = (params.p_f64(), params.q_f64(), params.r_f64());
    let crit = rational::to_f64(&params.critical_index());
    let trace_s = 2.0 / p - 1.0;
    let mut crit_vals = Vec::with_capacity(combined_states.len());
    let mut trace_vals = Vec::with_capacity(combined_states.len());
    for u in &combined_states {
        crit_vals.push(besov::besov(sp, u, crit, p, q)?);
        trace_vals.push(besov::besov(sp, u, trace_s, p, r)?);
    }
    let times = x.trajectory.times.clone();
    Ok(SplitReport {
        lr_critical_norm: timenorm::lr_norm(&times, &crit_vals, r)?,
        sup_trace_norm: timenorm::sup_norm(&trace_vals),
        max_discrepancy: discrepancy.iter().copied().fold(0.0, f64::max),
        discrepancy,
        combined: Trajectory {
            times,
            states: combined_states,
        },
        direct,
        split,
        y,
        x,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    /// `(T, C_u(T))` for `T = horizon·2^{−j}`, `j = 0..=levels`.
    pub c_u: Vec<(f64, f64)>,
    pub strictly_decreasing: bool,
    /// `‖δ(t)‖_{L₂}` per sample.
    pub delta_norms: Vec<f64>,
    /// `‖δ₀‖ exp(∫₀^t ‖∇ũ‖_∞)` per sample.
    pub envelope: Vec<f64>,
    pub envelope_breaches: usize,
    /// Whether `δ₀ = 0` produced an identically zero trajectory.
    pub zero_start_exact: bool,
}

/// Number of halvings of the horizon in the `C_u(T)` sequence.
pub const UNIQUENESS_LEVELS: usize = 8;

fn stage_state(traj: &Trajectory, j: usize, frac: StageFrac) -> Result<SpectralField> {
    if frac == 0.0 {
        Ok(traj.states[j].clone())
    } else if frac == 1.0 {
        Ok(traj.states[j + 1].clone())
    } else {
        traj.states[j].lin_comb(1.0 - frac, &traj.states[j + 1], frac)
    }
}

fn integrate_difference<F: Fft2>(
    sp: &Spectral<F>,
    cfg: &SolverConfig,
    u: &Trajectory,
    ut: &Trajectory,
    delta0: &SpectralField,
) -> Result<Vec<SpectralField>> {
    let zero = ForcingSpec::zero();
    let mut states = vec![delta0.clone()];
    for j in 0..u.len() - 1 {
        let h = u.times[j + 1] - u.times[j];
        let stepper = IfRk4::new(delta0.resolution(), h);
        let mut nl = |_: f64, frac: StageFrac, s: &[SpectralField]| {
            let uj = stage_state(u, j, frac)?;
            let utj = stage_state(ut, j, frac)?;
            let a = minus_b(sp, cfg, &uj, &s[0])?;
            let b = minus_b(sp, cfg, &s[0], &utj)?;
            Ok(vec![a.add(&b)?])
        };
        let next = stepper.step(
            u.times[j],
            &states[j..=j],
            &[&zero],
            &mut nl,
            &mut no_scalars,
            &mut [],
        )?;
        states.extend(next);
    }
    Ok(states)
}

/// Estimates `C_u(T)` for shrinking `T` and integrates the difference
/// equation `δ' + Aδ + B(u,δ) + B(δ,ũ) = 0` from `δ₀`.
pub fn uniqueness_probe<F: Fft2>(
    sp: &Spectral<F>,
    u: &Trajectory,
    ut: &Trajectory,
    params: &BesovParams,
    cfg: &SolverConfig,
    delta0: &SpectralField,
) -> Result<UniquenessReport> {
    if u.times != ut.times || u.len() < 2 {
        return Err(Error::InvalidArgument(
            "trajectories must share a time grid with at least two samples".into(),
        ));
    }
    let (p, q, r) = (params.p_f64(), params.q_f64(), params.r_f64());
    let crit = rational::to_f64(&params.critical_index());
    let norms = u
        .states
        .iter()
        .map(|s| besov::besov(sp, s, crit, p, q))
        .collect::<Result<Vec<_>>>()?;
    let horizon = u.times[u.len() - 1] - u.times[0];
    let mut c_u = Vec::with_capacity(UNIQUENESS_LEVELS + 1);
    for level in 0..=UNIQUENESS_LEVELS {
        let t = u.times[0] + horizon / (1u64 << level) as f64;
        c_u.push((
            t,
            cfg.constants.c2 * timenorm::lr_norm_until(&u.times, &norms, r, t)?,
        ));
    }
    let strictly_decreasing = c_u.windows(2).all(|w| w[1].1 < w[0].1);

    let zero = SpectralField::zeros(delta0.resolution())?;
    let zero_run = integrate_difference(sp, cfg, u, ut, &zero)?;
    let zero_start_exact = zero_run
        .iter()
        .all(|s| s.coeffs().iter().all(|c| c.re == 0.0 && c.im == 0.0));

    let delta0 = cfg.galerkin(delta0);
    let run = integrate_difference(sp, cfg, u, ut, &delta0)?;
    let delta_norms: Vec<f64> = run.iter().map(|d| d.l2_norm()).collect();
    let m = sp.grid_size(delta0.resolution());
    let mut grad_sup = Vec::with_capacity(ut.len());
    for s in &ut.states {
        let g = sp.gradient_to_grid(s, m)?;
        let sup = (0..m * m)
            .map(|i| math::sqrt(g.iter().map(|c| c[i] * c[i]).sum::<f64>()))
            .fold(0.0, f64::max);
        grad_sup.push(sup);
    }
    let int_grad = timenorm::cumulative_trapezoid(&u.times, &grad_sup)?;
    let d0 = delta0.l2_norm();
    let envelope: Vec<f64> = int_grad.iter().map(|i| d0 * math::exp(*i)).collect();
    let envelope_breaches = delta_norms
        .iter()
        .zip(&envelope)
        .filter(|(d, e)| **d > **e * (1.0 + MONITOR_TOL))
        .count();
    Ok(UniquenessReport {
        c_u,
        strictly_decreasing,
        delta_norms,
        envelope,
        envelope_breaches,
        zero_start_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft::NaiveDft;
    use crate::field::{random_field, ModeIndex};
    use crate::rational::rat;
    use num_complex::Complex64;

    fn global_params() -> BesovParams {
        BesovParams::new(rat(4, 3), rat(5, 2), int(3), int(3)).unwrap()
    }

    #[test]
    fn linear_step_matches_semigroup() {
        let sp = Spectral::new(NaiveDft);
        let mut cfg = SolverConfig::new(8);
        cfg.nonlinear = false;
        let u = random_field(8, 0.5, 4).unwrap();
        let v = step(&sp, &cfg, &u, &ForcingSpec::zero(), 0.0, 0.01).unwrap();
        let exact = stokes::semigroup(&u, 0.01).unwrap();
        assert!(v.sub(&exact).unwrap().max_abs_coeff() <= 1e-14 * u.max_abs_coeff());
    }

    #[test]
    fn shear_mode_decays_exactly() {
        let sp = Spectral::new(NaiveDft);
        let cfg = SolverConfig::new(8);
        let u = SpectralField::from_modes(8, &[(ModeIndex::new(2, 0), Complex64::new(1.0, 0.0))])
            .unwrap();
        let v = step(&sp, &cfg, &u, &ForcingSpec::zero(), 0.0, 0.05).unwrap();
        let exact = stokes::semigroup(&u, 0.05).unwrap();
        assert!(v.sub(&exact).unwrap().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn blow_up_reports_time() {
        let sp = Spectral::new(NaiveDft);
        let cfg = SolverConfig::new(8);
        let u = random_field(8, 0.0, 1).unwrap().scale(f64::MAX);
        assert!(matches!(
            step(&sp, &cfg, &cfg.galerkin(&u), &ForcingSpec::zero(), 0.0, 0.1),
            Err(Error::NonFiniteField { .. })
        ));
    }

    #[test]
    fn picc_bound_scaling_is_exact() {
        let eps = rat(1, 10);
        let a = picc_time_bound_exact(rat(3, 2), int(2), int(5), eps).unwrap();
        let b = picc_time_bound_exact(rat(3, 4), int(2), int(5), eps).unwrap();
        assert_eq!(b, a * int(1024));
        assert!(picc_time_bound_exact(int(1), int(1), int(1), rat(2, 7)).is_none());
    }

    #[test]
    fn zero_data_local_solve() {
        let sp = Spectral::new(NaiveDft);
        let mut cfg = SolverConfig::new(8);
        cfg.dt = 0.05;
        let z = SpectralField::zeros(8).unwrap();
        let rep = solve_local(&sp, &z, &ForcingSpec::zero(), &global_params(), &cfg).unwrap();
        assert_eq!(rep.t_bar, cfg.horizon);
        assert!(rep.trajectory.states.iter().all(|s| s.is_zero()));
        assert!(rep.picard.converged);
    }

    #[test]
    fn etd_weights_small_and_large_agree() {
        let (_, a1, b1) = etd_weights(8, 0.1 / 32.0 * (1.0 - 1e-13));
        let (_, a2, b2) = etd_weights(8, 0.1 / 32.0 * (1.0 + 1e-13));
        for i in 0..a1.len() {
            assert!((a1[i] - a2[i]).abs() < 1e-14);
            assert!((b1[i] - b2[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn split_low_pass_data_is_trivial() {
        let sp = Spectral::new(NaiveDft);
        let cfg = SolverConfig::new(8);
        let u0 = random_field(8, 1.0, 2).unwrap().low_pass(1);
        let f = ForcingSpec::constant(&random_field(8, 1.0, 3).unwrap().low_pass(1));
        let s = split_data(&sp, &u0, &f, &global_params(), &cfg, 1e-6).unwrap();
        assert_eq!(s.cutoff, 1);
        assert!(s.y0.is_zero());
        assert!(s.h.is_zero());
    }

    #[test]
    fn smallness_is_enforced() {
        let sp = Spectral::new(NaiveDft);
        let cfg = SolverConfig::new(8);
        let y0 = random_field(8, 0.0, 2).unwrap();
        assert!(matches!(
            solve_y(&sp, &y0, &ForcingSpec::zero(), &global_params(), &cfg),
            Err(Error::SmallnessViolation { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::new(8);
        cfg.cutoff = 5;
        assert!(cfg.validate().is_err());
        let mut cfg = SolverConfig::new(8);
        cfg.dt = 0.0;
        assert!(cfg.validate().is_err());
        assert_eq!(SolverConfig::new(8).time_grid(1.0), (1000, 1e-3));
    }
}
