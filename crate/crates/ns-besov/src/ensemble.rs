//! Ensemble evaluations parallelized over members.
//!
//! Members are independent and results are collected in member order, so
//! reports are identical to the sequential versions in the core crate
//! whatever the thread count.

use ns_besov_core::besov::BesovParams;
use ns_besov_core::nonlinear::{
    self, ChainReport, EnsembleSpec, EstimateId, EstimateReport, LemmaExponents,
};
use ns_besov_core::solver::{self, EmpiricalConstants, SolverConfig};
use rayon::prelude::*;

use crate::Spectral;

pub fn estimate_chain(
    sp: &Spectral,
    params: &BesovParams,
    ensemble: &EnsembleSpec,
) -> ns_besov_core::Result<ChainReport> {
    let exps = nonlinear::chain_exponents(params)?;
    let samples = (0..ensemble.count)
        .into_par_iter()
        .map(|i| nonlinear::chain_sample(sp, params, &exps, &ensemble.member(i)?))
        .collect::<ns_besov_core::Result<Vec<_>>>()?;
    Ok(nonlinear::chain_report(params, exps, ensemble, &samples))
}

pub fn energy_lemma(
    sp: &Spectral,
    ensemble: &EnsembleSpec,
    eps: f64,
    exps: &LemmaExponents,
) -> ns_besov_core::Result<EstimateReport> {
    let samples = (0..ensemble.count)
        .into_par_iter()
        .map(|i| {
            let s = nonlinear::energy_lemma_sample(
                sp,
                &ensemble.member(i)?,
                &ensemble.partner(i)?,
                eps,
                exps,
            )?;
            Ok(nonlinear::lemma_estimate_sample(
                ensemble.member_seed(i),
                &s,
            ))
        })
        .collect::<ns_besov_core::Result<Vec<_>>>()?;
    Ok(EstimateReport::from_samples(
        EstimateId::Energy,
        None,
        ensemble.n,
        ensemble.gamma,
        samples,
    ))
}

/// Probe estimate of the solver constants with probes `seed + i`.
pub fn estimate_constants(
    sp: &Spectral,
    params: &BesovParams,
    cfg: &SolverConfig,
    gamma: f64,
    seed: u64,
) -> ns_besov_core::Result<EmpiricalConstants> {
    let samples = (0..cfg.probes)
        .into_par_iter()
        .map(|i| solver::constant_probe(sp, params, cfg, gamma, seed.wrapping_add(i as u64)))
        .collect::<ns_besov_core::Result<Vec<_>>>()?;
    Ok(solver::constants_from_probes(&samples, cfg.safety))
}
