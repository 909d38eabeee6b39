use std::path::Path;

use ns_besov::artifact::fmt_f64;
use ns_besov::scenario::Scenario;
use ns_besov::snapshot;
use ns_besov_core::field::RandomFieldSpec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snapshot_round_trip(seed in any::<u64>(), gamma in 0.0f64..3.0, n in prop::sample::select(vec![2usize, 4, 8, 16]), t in 0.0f64..100.0) {
        let u = RandomFieldSpec::new(gamma, seed).sample(n).unwrap();
        let mut bytes = Vec::new();
        snapshot::write(&mut bytes, t, &u).unwrap();
        prop_assert_eq!(bytes.len(), 4 + 4 + 4 + 8 + 16 * u.coeffs().len());
        let back = snapshot::read(bytes.as_slice()).unwrap();
        prop_assert_eq!(back.time.to_bits(), t.to_bits());
        prop_assert_eq!(back.field, u);
    }

    #[test]
    fn float_text_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}

fn shipped(name: &str) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name);
    Scenario::load(&path).unwrap()
}

#[test]
fn shipped_scenarios_round_trip() {
    for name in ["quick.toml", "global_split.toml"] {
        let sc = shipped(name);
        let again = Scenario::parse(&sc.to_toml()).unwrap();
        assert_eq!(again, sc, "{name}");
        assert_eq!(again.hash(), sc.hash());
        assert!(sc.gate_report().all_pass(), "{name}");
    }
}

#[test]
fn hash_tracks_content() {
    let a = shipped("quick.toml");
    let mut b = a.clone();
    b.solver.dt /= 2.0;
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn snapshot_initial_data_is_resampled() {
    let dir = tempfile::tempdir().unwrap();
    let u = RandomFieldSpec::new(1.0, 3).sample(16).unwrap();
    snapshot::save(&dir.path().join("u.bnsf"), 0.5, &u).unwrap();
    let text = "name = \"s\"\n[params]\ns = \"4/3\"\np = \"5/2\"\nr = 3\n[solver]\nn = 8\n[initial]\nkind = \"snapshot\"\npath = \"u.bnsf\"\n";
    let sc = Scenario::parse(text).unwrap();
    let v = sc.initial_field(dir.path()).unwrap();
    assert_eq!(v, u.with_resolution(8).unwrap());
}
