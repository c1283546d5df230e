//! Brute-force constructions that cross-check the closed forms: the
//! coproduct `A ∐ A`, the kernel `I` of the fold map, `I/I^2` with its
//! induced divided powers, and the indecomposables `A/A^2`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeff::{primes_up_to, Ring};
use crate::dpcore::{
    basis_of_weight, divided_power, dp_map_apply, full_basis, mul_monomials, weight_components, AlgebraSpec,
    DPElement, DPMonomial, DpError,
};
use crate::kahler::{indecomposables, omega_free_basis, universal_derivation, OmegaBasisElement, OmegaElement};
use crate::laws::{draw_index, random_element, DpAlgebra, Report};

pub use crate::linalg::{
    contains, coordinates, hermite_rows, kernel, kernel_mod, smith_normal_form, IntegerMatrix, InvariantFactors,
};

/// Which copies of the generators a coproduct monomial touches:
/// `A (x) R`, `A (x) B` or `R (x) B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Component {
    Left,
    Mixed,
    Right,
}

/// `A ∐ B` for free `A`, `B`, realized as the free algebra on the
/// concatenated generators.
#[derive(Debug, Clone)]
pub struct Coproduct {
    pub spec: Arc<AlgebraSpec>,
    pub left: Arc<AlgebraSpec>,
    pub right: Arc<AlgebraSpec>,
    in1: Vec<DPElement>,
    in2: Vec<DPElement>,
}

pub fn coproduct(a: &Arc<AlgebraSpec>, b: &Arc<AlgebraSpec>) -> Result<Coproduct, DpError> {
    if a.ring() != b.ring() {
        return Err(DpError::RingMismatch(a.ring().clone(), b.ring().clone()));
    }
    let weights: Vec<u64> = a.generator_weights().iter().chain(b.generator_weights()).copied().collect();
    let spec = AlgebraSpec::new(a.ring().clone(), weights, a.truncation().min(b.truncation()))?;
    let k = a.generator_count();
    let in1 = (0..k).map(|i| DPElement::generator(&spec, i)).collect();
    let in2 = (0..b.generator_count()).map(|i| DPElement::generator(&spec, k + i)).collect();
    Ok(Coproduct { spec, left: a.clone(), right: b.clone(), in1, in2 })
}

impl Coproduct {
    pub fn in_1(&self, a: &DPElement) -> DPElement {
        dp_map_apply(&self.spec, &self.in1, a).expect("element of the left factor")
    }

    pub fn in_2(&self, b: &DPElement) -> DPElement {
        dp_map_apply(&self.spec, &self.in2, b).expect("element of the right factor")
    }

    pub fn component(&self, m: &DPMonomial) -> Component {
        let k = self.left.generator_count();
        let left = m.factors().iter().any(|&(i, _)| i < k);
        let right = m.factors().iter().any(|&(i, _)| i >= k);
        match (left, right) {
            (true, false) => Component::Left,
            (false, true) => Component::Right,
            _ => Component::Mixed,
        }
    }

    /// The weight-`w` basis split into the three components.
    pub fn components(&self, w: u64) -> BTreeMap<Component, Vec<DPMonomial>> {
        let mut out: BTreeMap<Component, Vec<DPMonomial>> = BTreeMap::new();
        for m in basis_of_weight(&self.spec, w).expect("within truncation") {
            out.entry(self.component(&m)).or_default().push(m);
        }
        out
    }

    /// The fold map `∇: A ∐ A -> A` (only meaningful when both factors agree).
    pub fn fold(&self, x: &DPElement) -> DPElement {
        let images: Vec<DPElement> = (0..self.left.generator_count())
            .chain(0..self.right.generator_count())
            .map(|i| DPElement::generator(&self.left, i))
            .collect();
        dp_map_apply(&self.left, &images, x).expect("element of the coproduct")
    }

    /// `in_2(a) - in_1(a)`, which lies in the kernel of the fold.
    pub fn delta(&self, a: &DPElement) -> DPElement {
        &self.in_2(a) - &self.in_1(a)
    }
}

fn vector_of(basis_index: &BTreeMap<DPMonomial, usize>, x: &DPElement) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); basis_index.len()];
    for (m, c) in x.terms() {
        v[basis_index[m]] += c;
    }
    v
}

fn element_of(spec: &Arc<AlgebraSpec>, basis: &[DPMonomial], v: &[BigInt]) -> DPElement {
    DPElement::from_terms(spec, basis.iter().cloned().zip(v.iter().cloned()))
}

fn modulus_rows(ring: &Ring, n: usize) -> Vec<Vec<BigInt>> {
    match ring.modulus() {
        None => Vec::new(),
        Some(m) => (0..n)
            .map(|i| {
                let mut r = vec![BigInt::zero(); n];
                r[i] = m.clone();
                r
            })
            .collect(),
    }
}

/// The weight-`w` part of the fold kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelSlice {
    pub weight: u64,
    /// Coproduct basis of weight `w` (the fold matrix columns).
    pub basis: Vec<DPMonomial>,
    pub fold: IntegerMatrix,
    /// Hermite basis of the kernel lattice; over `Z/m` it contains `m Z^n`.
    pub kernel: Vec<Vec<BigInt>>,
}

/// Gradewise kernel of `∇: A ∐ A -> A`.
pub fn fold_kernel(spec: &Arc<AlgebraSpec>) -> (Coproduct, Vec<KernelSlice>) {
    let cop = coproduct(spec, spec).expect("same ring");
    let slices = (1..=spec.truncation())
        .map(|w| {
            let basis = basis_of_weight(&cop.spec, w).expect("within truncation");
            let targets = basis_of_weight(spec, w).expect("within truncation");
            let index: BTreeMap<DPMonomial, usize> = targets.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            let mut entries = vec![vec![BigInt::zero(); basis.len()]; targets.len()];
            for (col, m) in basis.iter().enumerate() {
                let image = cop.fold(&DPElement::monomial(&cop.spec, m.clone(), 1));
                for (row, c) in vector_of(&index, &image).into_iter().enumerate() {
                    entries[row][col] = c;
                }
            }
            let fold = IntegerMatrix::new(entries, basis.len())
                .with_labels(targets.iter().map(|m| m.to_string()).collect(), basis.iter().map(|m| m.to_string()).collect());
            let kernel = match spec.ring().modulus() {
                None => kernel(&fold),
                Some(m) => kernel_mod(&fold, m),
            };
            KernelSlice { weight: w, basis, fold, kernel }
        })
        .collect();
    (cop, slices)
}

/// The weight-`w` part of `I/I^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientSlice {
    pub weight: u64,
    pub basis: Vec<DPMonomial>,
    /// Hermite basis of `I` (lifted to a lattice in `Z^n`).
    pub ideal: Vec<Vec<BigInt>>,
    /// Hermite basis of `I^2` plus, over `Z/m`, `m Z^n`.
    pub square: Vec<Vec<BigInt>>,
    pub invariant_factors: InvariantFactors,
}

/// Induced `phi_p`: images of the `I`-basis of weight `w` under `g_p`, in
/// `I`-basis coordinates of weight `p w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiTable {
    pub p: u64,
    pub weight: u64,
    pub images: Vec<Vec<BigInt>>,
}

#[derive(Debug, Clone)]
pub struct IModISquared {
    pub coproduct: Coproduct,
    pub slices: Vec<QuotientSlice>,
    pub phi_tables: Vec<PhiTable>,
    indices: Vec<BTreeMap<DPMonomial, usize>>,
}

/// `I/I^2` gradewise, with `I^2` spanned by products of kernel basis vectors.
pub fn i_mod_i_squared(spec: &Arc<AlgebraSpec>) -> IModISquared {
    let (cop, kernels) = fold_kernel(spec);
    let ring = spec.ring();
    let indices: Vec<BTreeMap<DPMonomial, usize>> = kernels
        .iter()
        .map(|k| k.basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect())
        .collect();
    let elements: Vec<Vec<DPElement>> = kernels
        .iter()
        .map(|k| {
            k.kernel
                .iter()
                .map(|v| element_of(&cop.spec, &k.basis, v))
                .filter(|e| !e.is_zero())
                .collect()
        })
        .collect();
    let mut slices = Vec::new();
    for (wi, k) in kernels.iter().enumerate() {
        let w = k.weight;
        let mut gens = modulus_rows(ring, k.basis.len());
        for w1 in 1..=w / 2 {
            let (lo, hi) = (&elements[(w1 - 1) as usize], &elements[(w - w1 - 1) as usize]);
            for (i, u) in lo.iter().enumerate() {
                let start = if w1 * 2 == w { i } else { 0 };
                for v in &hi[start..] {
                    gens.push(vector_of(&indices[wi], &(u * v)));
                }
            }
        }
        let square = hermite_rows(gens, k.basis.len());
        let coords: Vec<Vec<BigInt>> = square
            .iter()
            .map(|row| coordinates(&k.kernel, row).expect("I^2 lies in I"))
            .collect();
        let invariant_factors = InvariantFactors::cokernel(&coords, k.kernel.len());
        slices.push(QuotientSlice { weight: w, basis: k.basis.clone(), ideal: k.kernel.clone(), square, invariant_factors });
    }
    let n = spec.truncation();
    let mut phi_tables = Vec::new();
    for p in primes_up_to(n) {
        for w in 1..=n / p {
            let src = &slices[(w - 1) as usize];
            let dst = &slices[(p * w - 1) as usize];
            let images = src
                .ideal
                .iter()
                .map(|v| {
                    let g = divided_power(p, &element_of(&cop.spec, &src.basis, v));
                    let target = vector_of(&indices[(p * w - 1) as usize], &g);
                    coordinates(&dst.ideal, &target).expect("I is closed under divided powers")
                })
                .collect();
            phi_tables.push(PhiTable { p, weight: w, images });
        }
    }
    IModISquared { coproduct: cop, slices, phi_tables, indices }
}

impl IModISquared {
    fn check(&self, x: &DPElement, pick: impl Fn(&QuotientSlice) -> &Vec<Vec<BigInt>>) -> bool {
        weight_components(x).into_iter().all(|(w, part)| {
            let slice = &self.slices[(w - 1) as usize];
            contains(pick(slice), &vector_of(&self.indices[(w - 1) as usize], &part))
        })
    }

    pub fn in_ideal(&self, x: &DPElement) -> bool {
        self.check(x, |s| &s.ideal)
    }

    pub fn in_square(&self, x: &DPElement) -> bool {
        self.check(x, |s| &s.square)
    }

    pub fn spans_ideal_mod_square(&self, w: u64, elements: &[DPElement]) -> bool {
        let slice = &self.slices[(w - 1) as usize];
        let mut rows = slice.square.clone();
        rows.extend(elements.iter().map(|e| vector_of(&self.indices[(w - 1) as usize], e)));
        hermite_rows(rows, slice.basis.len()) == slice.ideal
    }

    /// The comparison map `Omega -> I/I^2`:
    /// `b (x) phi_n (x) dx_i -> in_1(b) g_n(in_2 x_i - in_1 x_i)`.
    pub fn theta(&self, w: &OmegaElement) -> DPElement {
        let cop = &self.coproduct;
        let spec = &cop.left;
        let mut out = DPElement::zero(&cop.spec);
        for (i, phi, b, c) in w.basis_terms() {
            let dx = cop.delta(&DPElement::generator(spec, i));
            let mut term = divided_power(phi.degree(), &dx);
            if let Some(b) = b {
                term = &cop.in_1(&DPElement::monomial(spec, b, 1)) * &term;
            }
            out = &out + &term.scale(&c);
        }
        out
    }
}

/// Oracle and closed-form invariant factors of one weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceComparison {
    pub weight: u64,
    pub oracle: InvariantFactors,
    pub closed_form: InvariantFactors,
}

impl SliceComparison {
    pub fn equal(&self) -> bool {
        self.oracle == self.closed_form
    }
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub slices: Vec<SliceComparison>,
    pub laws: Report,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.slices.iter().all(SliceComparison::equal) && self.laws.passed()
    }
}

pub const INVARIANTS_MATCH: &str = "invariant_factors_match";
pub const THETA_WELL_DEFINED: &str = "comparison_map_well_defined";
pub const THETA_SURJECTIVE: &str = "comparison_map_surjective";
pub const THETA_PHI: &str = "phi_p_compatible";
pub const THETA_A_ACTION: &str = "a_action_compatible";
pub const THETA_D: &str = "universal_derivation_matches";
pub const FOLD_LEIBNIZ: &str = "fold_derivation_leibniz";
pub const FOLD_GAMMA: &str = "fold_derivation_gamma_law";

/// Compares `I/I^2` with `U(A) (x) V` gradewise.
///
/// Equal invariant factors plus a surjective comparison map give an
/// isomorphism of abelian groups; the remaining checks show it respects the
/// `A`-action, the `phi_p` and the derivations.
pub fn verify_main_theorem(spec: &Arc<AlgebraSpec>, samples: usize, seed: u64) -> TheoremReport {
    let q = i_mod_i_squared(spec);
    let ring = spec.ring();
    let n = spec.truncation();
    let closed = omega_free_basis(spec);
    let mut laws = Report::new();
    let slices: Vec<SliceComparison> = q
        .slices
        .iter()
        .zip(&closed)
        .map(|(s, c)| SliceComparison {
            weight: s.weight,
            oracle: s.invariant_factors.clone(),
            closed_form: c.invariant_factors(ring),
        })
        .collect();
    for s in &slices {
        laws.check(INVARIANTS_MATCH, s.equal(), || format!("weight {}: {} vs {}", s.weight, s.oracle, s.closed_form));
    }

    let basis_theta: Vec<(OmegaBasisElement, DPElement)> = closed
        .iter()
        .flat_map(|s| s.elements.iter())
        .map(|e| (e.clone(), q.theta(&e.element(spec))))
        .collect();
    for (e, t) in &basis_theta {
        let order = e.order(ring);
        let ok = q.in_ideal(t) && (order.is_zero() || q.in_square(&t.scale(&order)));
        laws.check(THETA_WELL_DEFINED, ok, || format!("{e}"));
    }
    for s in &closed {
        let images: Vec<DPElement> =
            basis_theta.iter().filter(|(e, _)| e.weight(spec) == s.weight).map(|(_, t)| t.clone()).collect();
        laws.check(THETA_SURJECTIVE, q.spans_ideal_mod_square(s.weight, &images), || format!("weight {}", s.weight));
    }
    for p in primes_up_to(n) {
        for (e, t) in &basis_theta {
            if p * e.weight(spec) > n {
                continue;
            }
            let moved = q.theta(&e.element(spec).phi_n(p));
            let diff = &divided_power(p, t) - &moved;
            laws.check(THETA_PHI, q.in_square(&diff), || format!("p = {p}, {e}"));
        }
    }
    let cop = &q.coproduct;
    for mono in full_basis(spec) {
        let a = DPElement::monomial(spec, mono.clone(), 1);
        let wa = mono.weight(spec);
        for (e, t) in &basis_theta {
            if wa + e.weight(spec) > n {
                continue;
            }
            let diff = &(&cop.in_2(&a) * t) - &q.theta(&e.element(spec).left_mul_algebra(&a));
            laws.check(THETA_A_ACTION, q.in_square(&diff), || format!("{mono} . {e}"));
        }
        let diff = &q.theta(&universal_derivation(&a)) - &cop.delta(&a);
        laws.check(THETA_D, q.in_square(&diff), || format!("d({mono})"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let a = random_element(spec, &mut rng);
        let b = random_element(spec, &mut rng);
        let (da, db) = (cop.delta(&a), cop.delta(&b));
        let lhs = cop.delta(&(&a * &b));
        let rhs = &(&cop.in_1(&a) * &db) + &(&cop.in_1(&b) * &da);
        laws.check(FOLD_LEIBNIZ, q.in_square(&(&lhs - &rhs)), || format!("a = {a}, b = {b}"));
        let m = draw_index(&mut rng, n.max(2));
        let lhs = cop.delta(&divided_power(m, &a));
        let mut rhs = divided_power(m, &da);
        for j in 1..m {
            rhs = &rhs + &(&cop.in_1(&divided_power(m - j, &a)) * &divided_power(j, &da));
        }
        laws.check(FOLD_GAMMA, q.in_square(&(&lhs - &rhs)), || format!("n = {m}, a = {a}"));
    }
    TheoremReport { slices, laws }
}

#[derive(Debug, Clone)]
pub struct IndecomposablesReport {
    pub slices: Vec<SliceComparison>,
}

impl IndecomposablesReport {
    pub fn passed(&self) -> bool {
        self.slices.iter().all(SliceComparison::equal)
    }
}

/// `A/A^2` by brute force, against the closed form.
pub fn verify_indecomposables(spec: &Arc<AlgebraSpec>) -> IndecomposablesReport {
    let closed = indecomposables(spec);
    let slices = (1..=spec.truncation())
        .map(|w| {
            let basis = basis_of_weight(spec, w).expect("within truncation");
            let index: BTreeMap<DPMonomial, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            let mut rows = modulus_rows(spec.ring(), basis.len());
            for w1 in 1..=w / 2 {
                let lo = basis_of_weight(spec, w1).expect("within truncation");
                let hi = basis_of_weight(spec, w - w1).expect("within truncation");
                for u in &lo {
                    for v in &hi {
                        if let Some((c, m)) = mul_monomials(spec, u, v) {
                            let mut row = vec![BigInt::zero(); basis.len()];
                            row[index[&m]] = c;
                            rows.push(row);
                        }
                    }
                }
            }
            SliceComparison {
                weight: w,
                oracle: InvariantFactors::cokernel(&rows, basis.len()),
                closed_form: closed.invariant_factors(w),
            }
        })
        .collect();
    IndecomposablesReport { slices }
}

/// `A x B` with componentwise operations.
#[derive(Debug, Clone)]
pub struct DirectProduct<A, B> {
    pub left: A,
    pub right: B,
}

impl<A: DpAlgebra, B: DpAlgebra> DirectProduct<A, B> {
    pub fn new(left: A, right: B) -> Result<DirectProduct<A, B>, DpError> {
        if left.ring() != right.ring() {
            return Err(DpError::RingMismatch(left.ring().clone(), right.ring().clone()));
        }
        Ok(DirectProduct { left, right })
    }

    pub fn project_left(&self, x: &(A::Elem, B::Elem)) -> A::Elem {
        x.0.clone()
    }

    pub fn project_right(&self, x: &(A::Elem, B::Elem)) -> B::Elem {
        x.1.clone()
    }
}

impl<A: DpAlgebra, B: DpAlgebra> DpAlgebra for DirectProduct<A, B> {
    type Elem = (A::Elem, B::Elem);

    fn ring(&self) -> &Ring {
        self.left.ring()
    }
    fn zero(&self) -> Self::Elem {
        (self.left.zero(), self.right.zero())
    }
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        (self.left.add(&x.0, &y.0), self.right.add(&x.1, &y.1))
    }
    fn scale(&self, r: &BigInt, x: &Self::Elem) -> Self::Elem {
        (self.left.scale(r, &x.0), self.right.scale(r, &x.1))
    }
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        (self.left.mul(&x.0, &y.0), self.right.mul(&x.1, &y.1))
    }
    fn gamma(&self, n: u64, x: &Self::Elem) -> Self::Elem {
        (self.left.gamma(n, &x.0), self.right.gamma(n, &x.1))
    }
}

/// The terminal DP algebra `0`.
#[derive(Debug, Clone)]
pub struct ZeroAlgebra {
    pub ring: Ring,
}

impl DpAlgebra for ZeroAlgebra {
    type Elem = ();

    fn ring(&self) -> &Ring {
        &self.ring
    }
    fn zero(&self) {}
    fn add(&self, _: &(), _: &()) {}
    fn scale(&self, _: &BigInt, _: &()) {}
    fn mul(&self, _: &(), _: &()) {}
    fn gamma(&self, _: u64, _: &()) {}
}

pub const SUM_PRESERVES_PRODUCTS: &str = "sum_preserves_products";
pub const SUM_PRESERVES_GAMMA: &str = "sum_preserves_gamma";

/// Whether `(a, b) -> a + b` is a DP algebra map `A x A -> A` on random
/// samples. It is for algebras with trivial multiplication and fails for
/// free ones.
pub fn addition_is_dp_map<A: DpAlgebra>(
    alg: &A,
    samples: usize,
    seed: u64,
    max_n: u64,
    mut sample: impl FnMut(&mut ChaCha8Rng) -> A::Elem,
) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new();
    for _ in 0..samples {
        let (a, b, c, d) = (sample(&mut rng), sample(&mut rng), sample(&mut rng), sample(&mut rng));
        // (a, b)(c, d) = (ac, bd)
        let lhs = alg.add(&alg.mul(&a, &c), &alg.mul(&b, &d));
        let rhs = alg.mul(&alg.add(&a, &b), &alg.add(&c, &d));
        report.check(SUM_PRESERVES_PRODUCTS, lhs == rhs, || format!("{a:?}, {b:?}, {c:?}, {d:?}"));
        let n = draw_index(&mut rng, max_n);
        let lhs = alg.add(&alg.gamma(n, &a), &alg.gamma(n, &b));
        let rhs = alg.gamma(n, &alg.add(&a, &b));
        report.check(SUM_PRESERVES_GAMMA, lhs == rhs, || format!("n = {n}, {a:?}, {b:?}"));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beck::{verify_abelian_structure, AbelianStructure, UModule};
    use crate::dpcore::gamma_gen;
    use crate::laws::FreeDp;

    fn spec(ring: Ring, rank: usize, n: u64) -> Arc<AlgebraSpec> {
        AlgebraSpec::uniform(ring, rank, n).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn coproduct_of_rank_one() {
        let a = spec(Ring::Integers, 1, 4);
        let cop = coproduct(&a, &a).unwrap();
        assert_eq!(cop.spec.generator_count(), 2);
        let x = gamma_gen(&a, 0, 1);
        assert_eq!(cop.in_1(&x).to_string(), "x1");
        assert_eq!(cop.in_2(&x).to_string(), "x2");
        let parts = cop.components(2);
        assert_eq!(parts[&Component::Left][0].to_string(), "g2(x1)");
        assert_eq!(parts[&Component::Mixed][0].to_string(), "x1*x2");
        assert_eq!(parts[&Component::Right][0].to_string(), "g2(x2)");
        // g_2(x' x'') = x'^2 g_2(x'') = 2 g2(x') g2(x''), still mixed
        let mixed = divided_power(2, &(&cop.in_1(&x) * &cop.in_2(&x)));
        assert_eq!(mixed.to_string(), "2*g2(x1)*g2(x2)");
        assert!(mixed.terms().keys().all(|m| cop.component(m) == Component::Mixed));
        let other = spec(Ring::integers_mod(4).unwrap(), 1, 4);
        assert!(coproduct(&a, &other).is_err());
    }

    #[test]
    fn components_partition_each_weight() {
        let a = spec(Ring::Integers, 2, 5);
        let b = AlgebraSpec::new(Ring::Integers, vec![1, 2], 6).unwrap();
        let cop = coproduct(&a, &b).unwrap();
        assert_eq!(cop.spec.truncation(), 5);
        for w in 1..=5 {
            let parts = cop.components(w);
            let total: usize = parts.values().map(Vec::len).sum();
            assert_eq!(total, basis_of_weight(&cop.spec, w).unwrap().len());
            // A (x) R and R (x) B are copies of the factors' own bases
            let left = parts.get(&Component::Left).map_or(0, Vec::len);
            let right = parts.get(&Component::Right).map_or(0, Vec::len);
            assert_eq!(left, basis_of_weight(&a, w).unwrap().len());
            assert_eq!(right, basis_of_weight(&b, w).unwrap().len());
        }
    }

    #[test]
    fn fold_kernel_small() {
        let a = spec(Ring::Integers, 1, 2);
        let (cop, slices) = fold_kernel(&a);
        assert_eq!(slices[0].fold.entries, vec![big(&[1, 1])]);
        assert_eq!(slices[0].kernel, vec![big(&[1, -1])]);
        assert_eq!(slices[1].fold.entries, vec![big(&[1, 2, 1])]);
        assert_eq!(slices[1].kernel.len(), 2);
        // the fold splits both inclusions, so no kernel vector is a pure in_1 or in_2 image
        for s in &slices {
            for v in &s.kernel {
                let e = element_of(&cop.spec, &s.basis, v);
                let comps: Vec<Component> = e.terms().keys().map(|m| cop.component(m)).collect();
                assert!(!comps.iter().all(|c| *c == Component::Left));
                assert!(!comps.iter().all(|c| *c == Component::Right));
            }
        }
    }

    #[test]
    fn quotient_rank_one_weight_two() {
        let a = spec(Ring::Integers, 1, 2);
        let q = i_mod_i_squared(&a);
        assert_eq!(q.slices[0].invariant_factors, InvariantFactors(big(&[0])));
        assert_eq!(q.slices[1].invariant_factors, InvariantFactors(big(&[2, 0])));
        // induced phi_2 of [x' - x''] is the class of g_2(x' - x'')
        let table = q.phi_tables.iter().find(|t| t.p == 2 && t.weight == 1).unwrap();
        let image = element_of(&q.coproduct.spec, &q.slices[1].basis, &{
            let mut v = vec![BigInt::zero(); q.slices[1].basis.len()];
            for (c, row) in table.images[0].iter().zip(&q.slices[1].ideal) {
                for (x, r) in v.iter_mut().zip(row) {
                    *x += c * r;
                }
            }
            v
        });
        let x = gamma_gen(&a, 0, 1);
        let expected = divided_power(2, &(&q.coproduct.in_1(&x) - &q.coproduct.in_2(&x)));
        assert_eq!(image, expected);
        assert!(!q.in_square(&expected));
    }

    #[test]
    fn main_theorem_small_cases() {
        for (ring, rank, n) in [
            (Ring::Integers, 1, 1),
            (Ring::Integers, 1, 4),
            (Ring::integers_mod(6).unwrap(), 2, 3),
            (Ring::integers_mod(4).unwrap(), 1, 4),
        ] {
            let report = verify_main_theorem(&spec(ring.clone(), rank, n), 30, 2);
            assert!(report.passed(), "{ring} rank {rank} N {n}: {:?} {:?}", report.slices, report.laws);
        }
    }

    #[test]
    fn gradewise_stability() {
        for ring in [Ring::Integers, Ring::integers_mod(6).unwrap()] {
            let low = i_mod_i_squared(&spec(ring.clone(), 1, 4));
            let high = i_mod_i_squared(&spec(ring.clone(), 1, 6));
            for (a, b) in low.slices.iter().zip(&high.slices) {
                assert_eq!(a, b);
            }
            let (_, k_low) = fold_kernel(&spec(ring.clone(), 2, 3));
            let (_, k_high) = fold_kernel(&spec(ring, 2, 5));
            for (a, b) in k_low.iter().zip(&k_high) {
                assert_eq!(a.kernel, b.kernel);
            }
        }
    }

    #[test]
    fn indecomposables_oracle() {
        let report = verify_indecomposables(&spec(Ring::Integers, 1, 12));
        assert!(report.passed(), "{:?}", report.slices);
        let report = verify_indecomposables(&spec(Ring::integers_mod(2).unwrap(), 1, 3));
        assert!(report.passed());
        assert!(report.slices[2].oracle.is_trivial());
        let report = verify_indecomposables(&spec(Ring::Integers, 3, 2));
        assert_eq!(report.slices[0].oracle, InvariantFactors(big(&[0, 0, 0])));
    }

    #[test]
    fn direct_products() {
        let a = spec(Ring::Integers, 1, 6);
        let prod = DirectProduct::new(FreeDp { spec: a.clone() }, FreeDp { spec: a.clone() }).unwrap();
        let x = gamma_gen(&a, 0, 1);
        let pair = (x.clone(), x.scale(&BigInt::from(2)));
        let g = prod.gamma(3, &pair);
        assert_eq!(g, (divided_power(3, &x), divided_power(3, &pair.1)));
        assert_eq!(prod.project_left(&g), gamma_gen(&a, 0, 3));
        let report = crate::laws::check_dp_axioms(&prod, 40, 4, 6, |rng| {
            (random_element(&a, rng), random_element(&a, rng))
        });
        assert!(report.passed());

        let with_zero = DirectProduct::new(ZeroAlgebra { ring: Ring::Integers }, FreeDp { spec: a.clone() }).unwrap();
        let e = ((), x.clone());
        assert_eq!(with_zero.project_right(&with_zero.gamma(2, &e)), divided_power(2, &x));
        assert!(DirectProduct::new(ZeroAlgebra { ring: Ring::integers_mod(3).unwrap() }, FreeDp { spec: a.clone() }).is_err());

        // addition is a DP map exactly when the multiplication is trivial
        let free = addition_is_dp_map(&FreeDp { spec: a.clone() }, 30, 1, 6, |rng| random_element(&a, rng));
        assert!(!free.passed());
        let module = UModule::trivial_u0(&a, 1, 6);
        let abelian = AbelianStructure::new(module.clone());
        assert!(verify_abelian_structure(&abelian, 50, 2).passed());
        let report = addition_is_dp_map(&abelian, 50, 3, 16, |rng| module.random_vector(rng));
        assert!(report.passed(), "{report:?}");
    }
}
