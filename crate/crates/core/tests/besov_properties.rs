use ns_besov_core::besov::{self, besov_norm};
use ns_besov_core::field::RandomFieldSpec;
use ns_besov_core::{NaiveDft, Spectral, SpectralField};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn field() -> impl Strategy<Value = SpectralField> {
    (
        any::<u64>(),
        0.0f64..3.0,
        prop::sample::select(vec![4usize, 6, 8]),
        0.01f64..10.0,
    )
        .prop_map(|(seed, gamma, n, amp)| {
            RandomFieldSpec::new(gamma, seed)
                .amplitude(amp)
                .sample(n)
                .unwrap()
        })
}

fn sp() -> Spectral<NaiveDft> {
    Spectral::new(NaiveDft)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn monotone_in_smoothness(u in field(), s0 in -2.0f64..2.0, ds in 0.0f64..2.0, p in 1.1f64..6.0, q in 1.1f64..6.0) {
        let lo = besov::besov(&sp(), &u, s0, p, q).unwrap();
        let hi = besov::besov(&sp(), &u, s0 + ds, p, q).unwrap();
        prop_assert!(lo <= hi * (1.0 + TOL), "{lo} > {hi}");
    }

    #[test]
    fn monotone_in_summability(u in field(), s in -2.0f64..2.0, p in 1.1f64..6.0, q0 in 1.0f64..6.0, dq in 0.0f64..6.0) {
        let big = besov::besov(&sp(), &u, s, p, q0).unwrap();
        let small = besov::besov(&sp(), &u, s, p, q0 + dq).unwrap();
        prop_assert!(small <= big * (1.0 + TOL), "{small} > {big}");
    }

    #[test]
    fn homogeneous(u in field(), lambda in -50.0f64..50.0, s in -2.0f64..2.0, p in 1.1f64..6.0, q in 1.1f64..6.0) {
        let base = besov::besov(&sp(), &u, s, p, q).unwrap();
        let scaled = besov::besov(&sp(), &u.scale(lambda), s, p, q).unwrap();
        prop_assert!((scaled - lambda.abs() * base).abs() <= 1e-11 * lambda.abs() * base + 1e-300);
    }

    #[test]
    fn hilbert_envelope(u in field(), s in -2.0f64..2.0) {
        let b = besov::besov(&sp(), &u, s, 2.0, 2.0).unwrap();
        let h = besov::sobolev_norm(&sp(), &u, s, 2.0).unwrap();
        let (lo, hi) = if s >= 0.0 { (1.0, 2f64.powf(s)) } else { (2f64.powf(s), 1.0) };
        prop_assert!(h >= lo * b * (1.0 - TOL) && h <= hi * b * (1.0 + TOL), "H={h} B={b} s={s}");
    }
}

#[test]
fn blocks_partition_the_field() {
    let u = RandomFieldSpec::new(0.5, 3).sample(16).unwrap();
    let dyadic = besov::DyadicDecomposition::new(16);
    let mut sum = SpectralField::zeros(16).unwrap();
    for m in 0..dyadic.blocks().len() {
        sum = sum.add(&dyadic.block_field(&u, m)).unwrap();
    }
    assert_eq!(sum, u);
}

#[test]
fn single_mode_report() {
    use ns_besov_core::{Complex64, ModeIndex};
    let u =
        SpectralField::from_modes(8, &[(ModeIndex::new(3, 0), Complex64::new(1.0, 0.0))]).unwrap();
    let rep = besov_norm(&sp(), &u, 1.0, 2.0, 2.0).unwrap();
    let active: Vec<_> = rep.blocks.iter().filter(|b| b.lp > 0.0).collect();
    assert_eq!(active.len(), 1);
    assert_eq!(active[0].m, 1);
    assert!((rep.value - 2.0 * u.l2_norm()).abs() < 1e-14);
}
