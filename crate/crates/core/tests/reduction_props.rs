mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramify_core::{analyze, reduce_representative, AnalysisConfig, ExtensionKind, ExtensionReport, Q};

use common::*;

fn same_invariants(a: &ExtensionReport, b: &ExtensionReport) -> bool {
    (a.kind, &a.break_a, &a.break_a2) == (b.kind, &b.break_a, &b.break_a2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_differs_by_a_wp_image(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = field([2, 3, 5][rng.gen_range(0..3)]);
        let a = random_element(&mut rng, &f);
        let nf = reduce_representative(&a, &AnalysisConfig::default()).unwrap();
        let diff = nf.a_input.sub(&nf.a_reduced).unwrap().sub(&nf.x_recorded.artin_schreier().unwrap()).unwrap();
        prop_assert!(diff.is_zero_known());
    }

    #[test]
    fn invariants_survive_wp_shift(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = field([2, 3, 5][rng.gen_range(0..3)]);
        let a = random_element(&mut rng, &f);
        let x = random_x(&mut rng, &f, 8);
        let b = a.add(&x.artin_schreier().unwrap()).unwrap();
        let cfg = AnalysisConfig::default();
        prop_assert!(same_invariants(&analyze(&a, &cfg).unwrap(), &analyze(&b, &cfg).unwrap()));
    }

    #[test]
    fn invariants_survive_prime_field_scaling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = [3, 5][rng.gen_range(0..2)];
        let f = field(p);
        let a = random_element(&mut rng, &f);
        let c = mono(&f, f.from_int(rng.gen_range(2..p as i64)), 0, 0);
        let cfg = AnalysisConfig::default();
        let ra = analyze(&a, &cfg).unwrap();
        let rc = analyze(&a.mul(&c).unwrap(), &cfg).unwrap();
        prop_assert!(same_invariants(&ra, &rc));
    }

    #[test]
    fn integral_terms_do_not_matter(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = field([2, 3][rng.gen_range(0..2)]);
        let a = random_element(&mut rng, &f);
        let extra = mono(&f, f.from_int(1), rng.gen_range(-4..=4), rng.gen_range(1..=4));
        let cfg = AnalysisConfig::default();
        let ra = analyze(&a, &cfg).unwrap();
        let rb = analyze(&a.add(&extra).unwrap(), &cfg).unwrap();
        prop_assert!(same_invariants(&ra, &rb));
    }

    #[test]
    fn deeper_fierce_terms_raise_the_break(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = field([2, 3][rng.gen_range(0..2)]);
        let a = random_fierce(&mut rng, &f, 10);
        let cfg = AnalysisConfig::default();
        let nf = reduce_representative(&a, &cfg).unwrap();
        prop_assume!(nf.kind == ExtensionKind::Fierce);
        let deepest = a.terms().map(|(e, _)| -*e).max().unwrap();
        let d = deepest.to_integer() + rng.gen_range(1..5);
        let deeper = a.add(&mono(&f, f.from_int(1), 1, -d)).unwrap();
        let nd = reduce_representative(&deeper, &cfg).unwrap();
        prop_assert!(nd.break_a() > nf.break_a());
    }

    #[test]
    fn report_json_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = field([2, 3, 5][rng.gen_range(0..3)]);
        let rep = analyze(&random_element(&mut rng, &f), &AnalysisConfig::default()).unwrap();
        let back: ExtensionReport = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
        prop_assert_eq!(back, rep);
    }
}

#[test]
fn one_over_pi_is_constant_of_depth_one() {
    let f = field(3);
    let nf = reduce_representative(&mono(&f, f.from_int(1), 0, -1), &AnalysisConfig::default()).unwrap();
    assert_eq!(nf.kind, ExtensionKind::Constant);
    assert_eq!(nf.constant_depth(), Some(Q::from_integer(1)));
}
