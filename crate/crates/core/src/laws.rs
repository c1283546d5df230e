//! A generic randomized checker for the divided power axioms, usable on any
//! structure that exposes sum, scalar multiple, product and `g_n`.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::Serialize;

use crate::coeff::{gamma_compose_coeff, gamma_product_coeff, pow_in, Ring};
use crate::dpcore::{basis_of_weight, divided_power, AlgebraSpec, DPElement};

/// A commutative non-unital algebra with divided powers.
pub trait DpAlgebra {
    type Elem: Clone + PartialEq + Debug;

    fn ring(&self) -> &Ring;
    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, r: &BigInt, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn gamma(&self, n: u64, a: &Self::Elem) -> Self::Elem;

    fn pow(&self, a: &Self::Elem, n: u64) -> Self::Elem {
        let mut out = a.clone();
        for _ in 1..n {
            out = self.mul(&out, a);
        }
        out
    }
}

/// The free truncated DP algebra as a [`DpAlgebra`].
#[derive(Debug, Clone)]
pub struct FreeDp {
    pub spec: Arc<AlgebraSpec>,
}

impl DpAlgebra for FreeDp {
    type Elem = DPElement;

    fn ring(&self) -> &Ring {
        self.spec.ring()
    }
    fn zero(&self) -> DPElement {
        DPElement::zero(&self.spec)
    }
    fn add(&self, a: &DPElement, b: &DPElement) -> DPElement {
        a + b
    }
    fn scale(&self, r: &BigInt, a: &DPElement) -> DPElement {
        a.scale(r)
    }
    fn mul(&self, a: &DPElement, b: &DPElement) -> DPElement {
        a * b
    }
    fn gamma(&self, n: u64, a: &DPElement) -> DPElement {
        divided_power(n, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawRecord {
    pub law: String,
    pub status: Status,
    pub checked: usize,
    pub counterexample: Option<String>,
}

/// Outcome of a batch of law checks: one record per named law, holding the
/// first counterexample found.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub records: Vec<LawRecord>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn status(&self, law: &str) -> Option<Status> {
        self.records.iter().find(|r| r.law == law).map(|r| r.status)
    }

    /// Registers one check of `law`; `context` is only evaluated on failure.
    pub fn check(&mut self, law: &str, ok: bool, context: impl FnOnce() -> String) {
        let idx = match self.records.iter().position(|r| r.law == law) {
            Some(i) => i,
            None => {
                self.records.push(LawRecord {
                    law: law.to_string(),
                    status: Status::Pass,
                    checked: 0,
                    counterexample: None,
                });
                self.records.len() - 1
            }
        };
        let rec = &mut self.records[idx];
        rec.checked += 1;
        if !ok && rec.status == Status::Pass {
            rec.status = Status::Fail;
            rec.counterexample = Some(context());
        }
    }

    pub fn merge(&mut self, other: Report) {
        for r in other.records {
            match self.records.iter_mut().find(|s| s.law == r.law) {
                Some(s) => {
                    s.checked += r.checked;
                    if s.status == Status::Pass && r.status == Status::Fail {
                        s.status = Status::Fail;
                        s.counterexample = r.counterexample;
                    }
                }
                None => self.records.push(r),
            }
        }
    }
}

pub const GAMMA_ONE: &str = "gamma_1_identity";
pub const GAMMA_SUM: &str = "gamma_of_sum";
pub const GAMMA_PRODUCT: &str = "gamma_of_product";
pub const GAMMA_SCALAR: &str = "gamma_of_scalar_multiple";
pub const GAMMA_PRODUCT_RULE: &str = "gamma_product_rule";
pub const GAMMA_COMPOSITION: &str = "gamma_composition";

/// Draws an index `n >= 1`, half the time from `1..=3`.
pub fn draw_index(rng: &mut ChaCha8Rng, max_n: u64) -> u64 {
    if max_n <= 3 || rng.gen_bool(0.5) {
        rng.gen_range(1..=max_n.min(3))
    } else {
        rng.gen_range(1..=max_n)
    }
}

/// Runs every divided power axiom on `samples` random draws.
pub fn check_dp_axioms<A: DpAlgebra>(
    alg: &A,
    samples: usize,
    seed: u64,
    max_n: u64,
    mut sample: impl FnMut(&mut ChaCha8Rng) -> A::Elem,
) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new();
    for _ in 0..samples {
        let a = sample(&mut rng);
        let b = sample(&mut rng);
        let r = BigInt::from(rng.gen_range(-5i64..=5));
        let n = draw_index(&mut rng, max_n);
        let m = draw_index(&mut rng, max_n);
        check_axioms_at(alg, &mut report, &a, &b, &r, m, n);
    }
    report
}

/// All axioms at one point.
pub fn check_axioms_at<A: DpAlgebra>(
    alg: &A,
    report: &mut Report,
    a: &A::Elem,
    b: &A::Elem,
    r: &BigInt,
    m: u64,
    n: u64,
) {
    report.check(GAMMA_ONE, alg.gamma(1, a) == *a, || format!("a = {a:?}"));

    let lhs = alg.gamma(n, &alg.add(a, b));
    let mut rhs = alg.add(&alg.gamma(n, a), &alg.gamma(n, b));
    for i in 1..n {
        rhs = alg.add(&rhs, &alg.mul(&alg.gamma(i, a), &alg.gamma(n - i, b)));
    }
    report.check(GAMMA_SUM, lhs == rhs, || format!("n = {n}, a = {a:?}, b = {b:?}"));

    let lhs = alg.gamma(n, &alg.mul(a, b));
    let rhs = alg.mul(&alg.pow(a, n), &alg.gamma(n, b));
    report.check(GAMMA_PRODUCT, lhs == rhs, || format!("n = {n}, a = {a:?}, b = {b:?}"));

    let lhs = alg.gamma(n, &alg.scale(r, b));
    let rhs = alg.scale(&pow_in(alg.ring(), r, n), &alg.gamma(n, b));
    report.check(GAMMA_SCALAR, lhs == rhs, || format!("n = {n}, r = {r}, b = {b:?}"));

    let lhs = alg.mul(&alg.gamma(m, a), &alg.gamma(n, a));
    let rhs = alg.scale(&gamma_product_coeff(m, n), &alg.gamma(m + n, a));
    report.check(GAMMA_PRODUCT_RULE, lhs == rhs, || format!("m = {m}, n = {n}, a = {a:?}"));

    let lhs = alg.gamma(m, &alg.gamma(n, a));
    let rhs = alg.scale(&gamma_compose_coeff(m, n), &alg.gamma(m * n, a));
    report.check(GAMMA_COMPOSITION, lhs == rhs, || format!("m = {m}, n = {n}, a = {a:?}"));
}

/// A random element with one to three terms, each of random weight and a
/// nonzero coefficient in `[-5, 5]`.
pub fn random_element(spec: &Arc<AlgebraSpec>, rng: &mut ChaCha8Rng) -> DPElement {
    let mut out = DPElement::zero(spec);
    let bases: BTreeMap<u64, _> = (1..=spec.truncation())
        .map(|w| (w, basis_of_weight(spec, w).expect("within truncation")))
        .filter(|(_, b)| !b.is_empty())
        .collect();
    let weights: Vec<u64> = bases.keys().copied().collect();
    for _ in 0..rng.gen_range(1..=3) {
        // favour low weights so that divided powers stay inside the truncation
        let w = weights[rng.gen_range(0..weights.len()).min(rng.gen_range(0..weights.len()))];
        let basis = &bases[&w];
        let m = basis[rng.gen_range(0..basis.len())].clone();
        let mut c = 0;
        while c == 0 {
            c = rng.gen_range(-5i64..=5);
        }
        out.add_term(m, BigInt::from(c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_keeps_first_counterexample() {
        let mut r = Report::new();
        r.check("law", true, || unreachable!());
        r.check("law", false, || "first".into());
        r.check("law", false, || "second".into());
        assert!(!r.passed());
        assert_eq!(r.records[0].checked, 3);
        assert_eq!(r.records[0].counterexample.as_deref(), Some("first"));
    }

    #[test]
    fn free_algebra_axioms_small() {
        for ring in [Ring::Integers, Ring::integers_mod(6).unwrap()] {
            let spec = AlgebraSpec::uniform(ring, 2, 6).unwrap();
            let alg = FreeDp { spec: spec.clone() };
            let report = check_dp_axioms(&alg, 50, 1, 6, |rng| random_element(&spec, rng));
            assert!(report.passed(), "{report:?}");
            assert_eq!(report.records.len(), 6);
        }
    }
}
