//! Discrete norms of sampled time series: composite trapezoid for integrals
//! and `L^r` norms, max over samples for sup norms.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

fn check_grid(times: &[f64], values: &[f64]) -> Result<()> {
    if times.len() != values.len() {
        return Err(Error::InvalidArgument(alloc::format!(
            "{} times vs {} values",
            times.len(),
            values.len()
        )));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "sample times must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `∫ values dt` by the composite trapezoid rule.
pub fn trapezoid(times: &[f64], values: &[f64]) -> Result<f64> {
    check_grid(times, values)?;
    Ok(times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum())
}

/// Running trapezoid integral, starting at 0 at the first sample.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    check_grid(times, values)?;
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    if !values.is_empty() {
        out.push(0.0);
    }
    for (t, v) in times.windows(2).zip(values.windows(2)) {
        acc += 0.5 * (t[1] - t[0]) * (v[0] + v[1]);
        out.push(acc);
    }
    Ok(out)
}

/// `(∫ |v|^r dt)^{1/r}` by the composite trapezoid rule.
pub fn lr_norm(times: &[f64], values: &[f64], r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "time exponent r={r} < 1"
        )));
    }
    let powered: Vec<f64> = values.iter().map(|v| math::powf(v.abs(), r)).collect();
    Ok(math::powf(trapezoid(times, &powered)?, 1.0 / r))
}

/// `(∫₀^T |v|^r dt)^{1/r}` for `T` inside the sample range; the integrand
/// is linearly interpolated on the last partial interval.
pub fn lr_norm_until(times: &[f64], values: &[f64], r: f64, horizon: f64) -> Result<f64> {
    check_grid(times, values)?;
    let powered: Vec<f64> = values.iter().map(|v| math::powf(v.abs(), r)).collect();
    let mut acc = 0.0;
    for (t, v) in times.windows(2).zip(powered.windows(2)) {
        if horizon <= t[0] {
            break;
        }
        if horizon >= t[1] {
            acc += 0.5 * (t[1] - t[0]) * (v[0] + v[1]);
        } else {
            let frac = (horizon - t[0]) / (t[1] - t[0]);
            let end = v[0] + frac * (v[1] - v[0]);
            acc += 0.5 * (horizon - t[0]) * (v[0] + end);
        }
    }
    Ok(math::powf(acc, 1.0 / r))
}

/// `max |v|` over samples; 0 for an empty series.
pub fn sup_norm(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let t = [0.0, 0.5, 1.5, 2.0];
        let v: Vec<f64> = t.iter().map(|x| 3.0 * x + 1.0).collect();
        assert!((trapezoid(&t, &v).unwrap() - 8.0).abs() < 1e-14);
        let c = cumulative_trapezoid(&t, &v).unwrap();
        assert_eq!(c.len(), 4);
        assert!((c[3] - 8.0).abs() < 1e-14);
    }

    #[test]
    fn lr_of_constant() {
        let t: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let v = vec![2.0; 11];
        assert!((lr_norm(&t, &v, 3.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((lr_norm_until(&t, &v, 2.0, 0.25).unwrap() - 2.0 * 0.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_unsorted_times() {
        assert!(trapezoid(&[0.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(trapezoid(&[0.0], &[1.0, 1.0]).is_err());
    }
}
