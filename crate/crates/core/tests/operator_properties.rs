use ns_besov_core::besov;
use ns_besov_core::field::{RandomFieldSpec, StreamFunction};
use ns_besov_core::nonlinear::{self, Dealias};
use ns_besov_core::stokes;
use ns_besov_core::{GridField, NaiveDft, Spectral, SpectralField};
use proptest::prelude::*;

fn sp() -> Spectral<NaiveDft> {
    Spectral::new(NaiveDft)
}

fn sample(seed: u64, gamma: f64, n: usize) -> SpectralField {
    RandomFieldSpec::new(gamma, seed).sample(n).unwrap()
}

fn triple() -> impl Strategy<Value = (SpectralField, SpectralField, SpectralField)> {
    (
        any::<u64>(),
        0.0f64..2.5,
        prop::sample::select(vec![4usize, 6, 8]),
    )
        .prop_map(|(seed, gamma, n)| {
            (
                sample(seed, gamma, n),
                sample(seed ^ 1, gamma, n),
                sample(seed ^ 2, gamma, n),
            )
        })
}

fn close(a: &SpectralField, b: &SpectralField, scale: f64) -> bool {
    a.sub(b).unwrap().max_abs_coeff() <= 1e-12 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval((u, _, _) in triple()) {
        let g = sp().grid(&u);
        let grid = besov::lp_norm(&g, 2.0).unwrap();
        prop_assert!((grid - u.l2_norm()).abs() <= 1e-12 * u.l2_norm().max(1.0));
    }

    #[test]
    fn leray_projection_is_idempotent((u, _, _) in triple(), a in -3.0f64..3.0) {
        let s = sp();
        let n = u.resolution();
        let m = s.grid_size(n);
        prop_assert_eq!(s.from_grid(&s.grid(&u), n).unwrap().sub(&u).unwrap().max_abs_coeff() < 1e-13, true);
        // A gradient field plus a solenoidal one: projection removes the gradient.
        let h = 2.0 * std::f64::consts::PI / m as f64;
        let ug = s.grid(&u);
        let mixed = GridField::from_fn(m, |x, y| {
            let i = (x / h).round() as usize % m;
            let j = (y / h).round() as usize % m;
            let idx = i * m + j;
            (ug.u1[idx] + a * x.cos() * y.sin(), ug.u2[idx] + a * x.sin() * y.cos())
        });
        let once = s.from_grid(&mixed, n).unwrap();
        prop_assert!(close(&once, &u, u.max_abs_coeff()));
        let twice = s.from_grid(&s.grid(&once), n).unwrap();
        prop_assert!(close(&once, &twice, once.max_abs_coeff()));
    }

    #[test]
    fn grids_are_divergence_free((u, _, _) in triple()) {
        let (div, grad) = sp().divergence_check(&sp().grid(&u));
        prop_assert!(div <= 1e-11 * grad.max(1.0), "div={div} grad={grad}");
    }

    #[test]
    fn stream_function_recovers_field((u, _, _) in triple()) {
        let s = sp();
        let m = s.grid_size(u.resolution());
        let psi = StreamFunction::of(&u);
        let g = s.stream_perp_gradient(&psi, m).unwrap();
        let direct = s.to_grid(&u, m).unwrap();
        for i in 0..m * m {
            prop_assert!((g.u1[i] - direct.u1[i]).abs() < 1e-12 * direct.max_abs().max(1.0));
            prop_assert!((g.u2[i] - direct.u2[i]).abs() < 1e-12 * direct.max_abs().max(1.0));
        }
    }

    #[test]
    fn bilinear_is_linear((u, v, w) in triple(), a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let s = sp();
        let comb = u.lin_comb(a, &w, b).unwrap();
        let lhs = nonlinear::bilinear_b(&s, &comb, &v).unwrap();
        let rhs = nonlinear::bilinear_b(&s, &u, &v).unwrap().lin_comb(a, &nonlinear::bilinear_b(&s, &w, &v).unwrap(), b).unwrap();
        prop_assert!(close(&lhs, &rhs, lhs.max_abs_coeff()));
        let lhs = nonlinear::bilinear_b(&s, &v, &comb).unwrap();
        let rhs = nonlinear::bilinear_b(&s, &v, &u).unwrap().lin_comb(a, &nonlinear::bilinear_b(&s, &v, &w).unwrap(), b).unwrap();
        prop_assert!(close(&lhs, &rhs, lhs.max_abs_coeff()));
    }

    #[test]
    fn trilinear_is_antisymmetric((u, v, w) in triple()) {
        let s = sp();
        let (u, v, w) = (u.dealiased(), v.dealiased(), w.dealiased());
        let a = nonlinear::trilinear(&s, &u, &v, &w).unwrap();
        let b = nonlinear::trilinear(&s, &u, &w, &v).unwrap();
        let scale = u.hilbert_norm(1.0) * v.hilbert_norm(1.0) * w.hilbert_norm(1.0);
        prop_assert!((a + b).abs() <= 1e-12 * scale.max(1.0), "{a} vs {b}");
    }

    #[test]
    fn pseudo_spectral_matches_convolution((u, v, _) in triple()) {
        for dealias in [Dealias::TwoThirds, Dealias::None] {
            let fast = nonlinear::bilinear_b_with(&sp(), &u, &v, dealias).unwrap();
            let slow = nonlinear::bilinear_b_oracle(&u, &v, dealias).unwrap();
            prop_assert!(fast.sub(&slow).unwrap().max_abs_coeff() <= 1e-12);
        }
    }

    #[test]
    fn stokes_operator_inverse((u, _, _) in triple()) {
        let back = stokes::apply_inv_a(&stokes::apply_a(&u));
        prop_assert!(close(&back, &u, u.max_abs_coeff()));
    }

    #[test]
    fn semigroup_law((u, _, _) in triple(), t in 0.0f64..0.5, s in 0.0f64..0.5) {
        let a = stokes::semigroup(&stokes::semigroup(&u, t).unwrap(), s).unwrap();
        let b = stokes::semigroup(&u, t + s).unwrap();
        prop_assert!(a.sub(&b).unwrap().max_abs_coeff() <= 1e-14 * u.max_abs_coeff().max(1e-300));
    }
}
