use std::sync::Arc;

use dpalg_core::coeff::{binomial, gamma_compose_coeff, gamma_product_coeff, Ring};
use dpalg_core::dpcore::{divided_power, AlgebraSpec, DPElement};
use dpalg_core::laws::{check_dp_axioms, random_element, FreeDp};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rings() -> Vec<Ring> {
    vec![
        Ring::Integers,
        Ring::integers_mod(4).unwrap(),
        Ring::integers_mod(5).unwrap(),
        Ring::integers_mod(6).unwrap(),
    ]
}

#[test]
fn axioms_hold_across_configurations() {
    for ring in rings() {
        for rank in 1..=2 {
            for n in [6, 10] {
                let spec = AlgebraSpec::uniform(ring.clone(), rank, n).unwrap();
                let alg = FreeDp { spec: spec.clone() };
                let report = check_dp_axioms(&alg, 200, 17, n, |rng| random_element(&spec, rng));
                assert!(report.passed(), "{ring} rank {rank} N {n}: {report:?}");
                assert!(report.records.iter().all(|r| r.checked == 200));
            }
        }
    }
}

#[test]
fn weighted_generators() {
    let spec = AlgebraSpec::new(Ring::Integers, vec![1, 2, 3], 9).unwrap();
    let alg = FreeDp { spec: spec.clone() };
    let report = check_dp_axioms(&alg, 200, 3, 9, |rng| random_element(&spec, rng));
    assert!(report.passed(), "{report:?}");
}

fn sample(spec: &Arc<AlgebraSpec>, seed: u64) -> DPElement {
    random_element(spec, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #[test]
    fn gamma_n_times_n_factorial_is_power(seed in any::<u64>(), n in 1u64..=5) {
        let spec = AlgebraSpec::uniform(Ring::Integers, 2, 10).unwrap();
        let a = sample(&spec, seed);
        let mut fact = BigInt::from(1);
        for k in 2..=n {
            fact *= k;
        }
        prop_assert_eq!(divided_power(n, &a).scale(&fact), a.pow(n));
    }

    #[test]
    fn product_rule_coefficients(m in 1u64..30, n in 1u64..30) {
        prop_assert_eq!(gamma_product_coeff(m, n), binomial(m + n, m));
    }

    #[test]
    fn composition_coefficients_are_associative(a in 1u64..5, b in 1u64..5, c in 1u64..4) {
        // g_a(g_b(g_c x)) computed in the two possible groupings
        let left = num_traits::pow(gamma_compose_coeff(b, c), a as usize) * gamma_compose_coeff(a, b * c);
        let right = gamma_compose_coeff(a, b) * gamma_compose_coeff(a * b, c);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn divided_powers_respect_reduction(seed in any::<u64>(), n in 1u64..=6) {
        // computing over Z and reducing mod 6 agrees with computing over Z/6
        let z = AlgebraSpec::uniform(Ring::Integers, 2, 8).unwrap();
        let z6 = AlgebraSpec::uniform(Ring::integers_mod(6).unwrap(), 2, 8).unwrap();
        let a = sample(&z, seed);
        let a6 = DPElement::from_terms(&z6, a.terms().iter().map(|(m, c)| (m.clone(), c.clone())));
        let g = divided_power(n, &a);
        let g6 = DPElement::from_terms(&z6, g.terms().iter().map(|(m, c)| (m.clone(), c.clone())));
        prop_assert_eq!(divided_power(n, &a6), g6);
    }
}
