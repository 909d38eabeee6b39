//! [`Fft2`] backed by `rustfft`, with plans cached per size.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use ns_besov_core::{Complex64, Fft2};
use rustfft::{Fft, FftDirection, FftPlanner};

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

/// Cloning shares the plan cache; the backend is `Send + Sync` and gives
/// bit-identical results regardless of which thread calls it.
#[derive(Clone, Default)]
pub struct RustFft {
    plans: Arc<Mutex<PlanCache>>,
}

impl std::fmt::Debug for RustFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RustFft").finish_non_exhaustive()
    }
}

impl RustFft {
    pub fn new() -> Self {
        Self::default()
    }

    fn plan(&self, m: usize, forward: bool) -> Arc<dyn Fft<f64>> {
        let mut cache = self.plans.lock().unwrap_or_else(|e| e.into_inner());
        cache
            .entry((m, forward))
            .or_insert_with(|| {
                let dir = if forward {
                    FftDirection::Forward
                } else {
                    FftDirection::Inverse
                };
                FftPlanner::new().plan_fft(m, dir)
            })
            .clone()
    }

    fn transform(&self, data: &mut [Complex64], m: usize, forward: bool) {
        assert_eq!(data.len(), m * m, "array is not m×m");
        let plan = self.plan(m, forward);
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, m);
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, m);
    }
}

fn transpose(data: &mut [Complex64], m: usize) {
    for a in 0..m {
        for b in a + 1..m {
            data.swap(a * m + b, b * m + a);
        }
    }
}

impl Fft2 for RustFft {
    fn forward(&self, data: &mut [Complex64], m: usize) {
        self.transform(data, m, true);
    }

    fn inverse(&self, data: &mut [Complex64], m: usize) {
        self.transform(data, m, false);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ns_besov_core::NaiveDft;

    #[test]
    fn agrees_with_direct_dft() {
        for m in [4usize, 6, 12, 16] {
            let data: Vec<Complex64> = (0..m * m)
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
                .collect();
            for forward in [true, false] {
                let mut a = data.clone();
                let mut b = data.clone();
                if forward {
                    RustFft::new().forward(&mut a, m);
                    NaiveDft.forward(&mut b, m);
                } else {
                    RustFft::new().inverse(&mut a, m);
                    NaiveDft.inverse(&mut b, m);
                }
                let err = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-11 * (m * m) as f64, "m={m} err={err}");
            }
        }
    }
}
