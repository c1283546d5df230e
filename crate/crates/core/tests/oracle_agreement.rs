use dpalg_core::coeff::Ring;
use dpalg_core::dpcore::AlgebraSpec;
use dpalg_core::kahler::{omega_free_basis, presentation_of_omega};
use dpalg_core::oracle::{i_mod_i_squared, verify_indecomposables, verify_main_theorem, InvariantFactors};
use num_bigint::BigInt;

fn factors(v: &[i64]) -> InvariantFactors {
    InvariantFactors(v.iter().map(|&x| BigInt::from(x)).collect())
}

#[test]
fn rank_one_quotient_over_z() {
    let spec = AlgebraSpec::uniform(Ring::Integers, 1, 6).unwrap();
    let q = i_mod_i_squared(&spec);
    let got: Vec<InvariantFactors> = q.slices.iter().map(|s| s.invariant_factors.clone()).collect();
    assert_eq!(
        got,
        vec![
            factors(&[0]),
            factors(&[2, 0]),
            factors(&[6, 0]),
            factors(&[2, 6, 0]),
            factors(&[2, 30, 0]),
            factors(&[2, 30, 0]),
        ]
    );
}

#[test]
fn theorem_on_small_grid() {
    for ring in [Ring::Integers, Ring::integers_mod(4).unwrap(), Ring::integers_mod(6).unwrap()] {
        for rank in 1..=2 {
            for n in [2, 4] {
                let spec = AlgebraSpec::uniform(ring.clone(), rank, n).unwrap();
                let report = verify_main_theorem(&spec, 50, 9);
                assert!(report.passed(), "{ring} rank {rank} N {n}: {:?}", report.laws.failures().collect::<Vec<_>>());
            }
        }
    }
}

#[test]
fn theorem_with_unequal_weights() {
    let spec = AlgebraSpec::new(Ring::integers_mod(6).unwrap(), vec![1, 2], 5).unwrap();
    assert!(verify_main_theorem(&spec, 50, 1).passed());
}

#[test]
fn three_constructions_agree() {
    // I/I^2, the relation presentation and U(A) (x) V, slice by slice
    for ring in [Ring::Integers, Ring::integers_mod(4).unwrap()] {
        let spec = AlgebraSpec::uniform(ring.clone(), 2, 4).unwrap();
        let q = i_mod_i_squared(&spec);
        let pres = presentation_of_omega(&spec);
        for ((a, b), c) in q.slices.iter().zip(&pres.slices).zip(omega_free_basis(&spec)) {
            assert_eq!(a.invariant_factors, b.invariant_factors());
            assert_eq!(a.invariant_factors, c.invariant_factors(&ring));
        }
    }
}

#[test]
fn indecomposables_rank_two() {
    for ring in [Ring::Integers, Ring::integers_mod(6).unwrap()] {
        for n in 1..=6 {
            let spec = AlgebraSpec::uniform(ring.clone(), 2, n).unwrap();
            assert!(verify_indecomposables(&spec).passed(), "{ring} N {n}");
        }
    }
}
