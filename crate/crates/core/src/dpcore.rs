//! Weight-truncated free divided power algebras `Gamma_R(V)` on finitely many
//! generators.
//!
//! A basis of `Gamma_R(V)` is given by the monomials
//! `g_{e_1}(x_{i_1}) * ... * g_{e_k}(x_{i_k})` with strictly increasing
//! generator indices. Everything of weight above the truncation bound is
//! identified with zero; that set is a DP ideal because products and divided
//! powers never lower weight.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::coeff::{binomial, gamma_compose_coeff, pow_in, Ring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DpError {
    #[error("invalid algebra spec: {0}")]
    BadSpec(String),
    #[error("operands live in different algebras")]
    SpecMismatch,
    #[error("expected {expected} generator images, got {got}")]
    GeneratorCountMismatch { expected: usize, got: usize },
    #[error("generator index {index} out of range for {count} generators")]
    GeneratorOutOfRange { index: usize, count: usize },
    #[error("weight {weight} exceeds truncation {truncation}")]
    BeyondTruncation { weight: u64, truncation: u64 },
    #[error("rings differ: {0} vs {1}")]
    RingMismatch(Ring, Ring),
}

/// Free DP algebra on generators of the given weights, truncated above weight
/// `truncation`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraSpec {
    ring: Ring,
    weights: Vec<u64>,
    truncation: u64,
}

impl AlgebraSpec {
    pub fn new(ring: Ring, weights: Vec<u64>, truncation: u64) -> Result<Arc<AlgebraSpec>, DpError> {
        if weights.is_empty() {
            return Err(DpError::BadSpec("need at least one generator".into()));
        }
        if truncation == 0 {
            return Err(DpError::BadSpec("truncation must be positive".into()));
        }
        if let Some(&w) = weights.iter().find(|&&w| w == 0 || w > truncation) {
            return Err(DpError::BadSpec(format!(
                "generator weight {w} must lie in 1..={truncation}"
            )));
        }
        Ok(Arc::new(AlgebraSpec { ring, weights, truncation }))
    }

    /// All generators of weight 1.
    pub fn uniform(ring: Ring, generator_count: usize, truncation: u64) -> Result<Arc<AlgebraSpec>, DpError> {
        AlgebraSpec::new(ring, vec![1; generator_count], truncation)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generator_count(&self) -> usize {
        self.weights.len()
    }

    pub fn generator_weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn generator_weight(&self, i: usize) -> u64 {
        self.weights[i]
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    /// Same generators and ring, different truncation.
    pub fn with_truncation(&self, truncation: u64) -> Result<Arc<AlgebraSpec>, DpError> {
        AlgebraSpec::new(self.ring.clone(), self.weights.clone(), truncation)
    }
}

/// A basis monomial `prod g_{e}(x_i)`, factors sorted by generator index.
///
/// Monomials are ordered by their dense exponent vectors, larger exponents on
/// earlier generators first; for two generators of weight one this lists
/// weight two as `g2(x1), x1*x2, g2(x2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DPMonomial {
    factors: Vec<(usize, u64)>,
}

impl DPMonomial {
    /// Panics on an empty factor list, unsorted indices or zero exponents.
    pub fn new(factors: Vec<(usize, u64)>) -> DPMonomial {
        assert!(!factors.is_empty(), "non-unital algebra has no empty monomial");
        assert!(factors.windows(2).all(|w| w[0].0 < w[1].0), "generator indices must increase");
        assert!(factors.iter().all(|&(_, e)| e >= 1), "exponents must be positive");
        DPMonomial { factors }
    }

    pub fn gamma(i: usize, e: u64) -> DPMonomial {
        DPMonomial::new(vec![(i, e)])
    }

    pub fn factors(&self) -> &[(usize, u64)] {
        &self.factors
    }

    pub fn weight(&self, spec: &AlgebraSpec) -> u64 {
        self.factors.iter().map(|&(i, e)| e * spec.weights[i]).sum()
    }

    pub fn exponent(&self, i: usize) -> u64 {
        self.factors.iter().find(|f| f.0 == i).map_or(0, |f| f.1)
    }

    /// Generator indices are shifted by `offset` (used for coproducts).
    pub fn shifted(&self, offset: usize) -> DPMonomial {
        DPMonomial { factors: self.factors.iter().map(|&(i, e)| (i + offset, e)).collect() }
    }
}

impl Ord for DPMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Less,
                (None, Some(_)) => return Ordering::Greater,
                (Some(&(ga, ea)), Some(&(gb, eb))) => match ga.cmp(&gb) {
                    // generator ga is missing from `other`
                    Ordering::Less => return Ordering::Less,
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Equal => {
                        if ea != eb {
                            return eb.cmp(&ea);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for DPMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DPMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &(i, e)) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "g{}(x{})", e, i + 1)?;
            }
        }
        Ok(())
    }
}

/// Product of two basis monomials: coefficient and monomial, or `None` when
/// the product lies beyond the truncation.
pub fn mul_monomials(spec: &AlgebraSpec, a: &DPMonomial, b: &DPMonomial) -> Option<(BigInt, DPMonomial)> {
    if a.weight(spec) + b.weight(spec) > spec.truncation {
        return None;
    }
    let mut coeff = BigInt::one();
    let mut factors = Vec::with_capacity(a.factors.len() + b.factors.len());
    let (mut i, mut j) = (0, 0);
    while i < a.factors.len() || j < b.factors.len() {
        match (a.factors.get(i), b.factors.get(j)) {
            (Some(&fa), Some(&fb)) if fa.0 == fb.0 => {
                coeff *= binomial(fa.1 + fb.1, fa.1);
                factors.push((fa.0, fa.1 + fb.1));
                i += 1;
                j += 1;
            }
            (Some(&fa), Some(&fb)) if fa.0 < fb.0 => {
                factors.push(fa);
                i += 1;
            }
            (Some(&fa), None) => {
                factors.push(fa);
                i += 1;
            }
            (_, Some(&fb)) => {
                factors.push(fb);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    Some((coeff, DPMonomial { factors }))
}

/// A finite linear combination of basis monomials in canonical form: no zero
/// coefficients, coefficients reduced in the base ring, weights within the
/// truncation.
#[derive(Debug, Clone)]
pub struct DPElement {
    spec: Arc<AlgebraSpec>,
    terms: BTreeMap<DPMonomial, BigInt>,
}

impl PartialEq for DPElement {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec) && self.terms == other.terms
    }
}

impl Eq for DPElement {}

impl DPElement {
    pub fn zero(spec: &Arc<AlgebraSpec>) -> DPElement {
        DPElement { spec: spec.clone(), terms: BTreeMap::new() }
    }

    /// `coeff * mono`, zero if the monomial is beyond the truncation.
    pub fn monomial(spec: &Arc<AlgebraSpec>, mono: DPMonomial, coeff: impl Into<BigInt>) -> DPElement {
        let mut out = DPElement::zero(spec);
        out.add_term(mono, coeff.into());
        out
    }

    pub fn from_terms(spec: &Arc<AlgebraSpec>, terms: impl IntoIterator<Item = (DPMonomial, BigInt)>) -> DPElement {
        let mut out = DPElement::zero(spec);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    /// The generator `x_i` (zero-based index).
    pub fn generator(spec: &Arc<AlgebraSpec>, i: usize) -> DPElement {
        gamma_gen(spec, i, 1)
    }

    pub fn spec(&self) -> &Arc<AlgebraSpec> {
        &self.spec
    }

    pub fn ring(&self) -> &Ring {
        &self.spec.ring
    }

    pub fn terms(&self) -> &BTreeMap<DPMonomial, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &DPMonomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Adds `coeff * mono` in place, keeping canonical form.
    pub fn add_term(&mut self, mono: DPMonomial, coeff: BigInt) {
        if mono.weight(&self.spec) > self.spec.truncation {
            return;
        }
        let coeff = self.spec.ring.reduce(&coeff);
        if coeff.is_zero() {
            return;
        }
        let ring = &self.spec.ring;
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let c = o.get_mut();
                *c += coeff;
                ring.reduce_in_place(c);
                if c.is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn same_spec(&self, other: &DPElement) -> Result<(), DpError> {
        if Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec {
            Ok(())
        } else {
            Err(DpError::SpecMismatch)
        }
    }

    pub fn try_add(&self, other: &DPElement) -> Result<DPElement, DpError> {
        self.same_spec(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, r: &BigInt) -> DPElement {
        let mut out = DPElement::zero(&self.spec);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * r);
        }
        out
    }

    pub fn neg(&self) -> DPElement {
        self.scale(&BigInt::from(-1))
    }

    pub fn try_sub(&self, other: &DPElement) -> Result<DPElement, DpError> {
        self.try_add(&other.neg())
    }

    /// Bilinear product; same-generator factors merge via the product rule.
    pub fn try_mul(&self, other: &DPElement) -> Result<DPElement, DpError> {
        self.same_spec(other)?;
        let mut out = DPElement::zero(&self.spec);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((k, m)) = mul_monomials(&self.spec, ma, mb) {
                    out.add_term(m, k * ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// `self^n` for `n >= 1` by repeated multiplication.
    pub fn pow(&self, n: u64) -> DPElement {
        assert!(n >= 1, "non-unital algebra: no zeroth power");
        let mut out = self.clone();
        for _ in 1..n {
            out = &out * self;
        }
        out
    }

    /// Lowest weight of a stored monomial.
    pub fn min_weight(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.weight(&self.spec)).min()
    }

    /// Re-homes the element in another spec with the same generators, dropping
    /// whatever lies beyond the new truncation.
    pub fn retruncate(&self, spec: &Arc<AlgebraSpec>) -> DPElement {
        DPElement::from_terms(spec, self.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }
}

impl std::ops::Add for &DPElement {
    type Output = DPElement;
    fn add(self, rhs: &DPElement) -> DPElement {
        self.try_add(rhs).expect("DP elements from different algebras")
    }
}

impl std::ops::Sub for &DPElement {
    type Output = DPElement;
    fn sub(self, rhs: &DPElement) -> DPElement {
        self.try_sub(rhs).expect("DP elements from different algebras")
    }
}

impl std::ops::Mul for &DPElement {
    type Output = DPElement;
    fn mul(self, rhs: &DPElement) -> DPElement {
        self.try_mul(rhs).expect("DP elements from different algebras")
    }
}

impl fmt::Display for DPElement {
    /// Terms sorted by weight, then monomial order; unit coefficients elided.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| (a.0.weight(&self.spec), a.0).cmp(&(b.0.weight(&self.spec), b.0)));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

/// The basis element `g_n(x_i)`; zero when `n * w_i` exceeds the truncation.
pub fn gamma_gen(spec: &Arc<AlgebraSpec>, i: usize, n: u64) -> DPElement {
    assert!(n >= 1, "g_0 does not exist in a non-unital algebra");
    assert!(i < spec.generator_count(), "generator index out of range");
    DPElement::monomial(spec, DPMonomial::gamma(i, n), 1)
}

/// `g_j` of a single basis monomial.
///
/// A single factor uses the composition coefficient; otherwise the first
/// factor is peeled off with `g_j(ab) = a^j g_j(b)`.
pub fn gamma_of_monomial(spec: &Arc<AlgebraSpec>, j: u64, mono: &DPMonomial) -> DPElement {
    if j == 1 {
        return DPElement::monomial(spec, mono.clone(), 1);
    }
    if j * mono.weight(spec) > spec.truncation {
        return DPElement::zero(spec);
    }
    let (first, rest) = mono.factors.split_first().expect("monomials are non-empty");
    let (i, e) = *first;
    if rest.is_empty() {
        return DPElement::monomial(spec, DPMonomial::gamma(i, j * e), gamma_compose_coeff(j, e));
    }
    let head = DPElement::monomial(spec, DPMonomial::gamma(i, e), 1).pow(j);
    let tail = gamma_of_monomial(spec, j, &DPMonomial { factors: rest.to_vec() });
    &head * &tail
}

/// `g_n(a)` for an arbitrary element, by multinomial expansion over the terms
/// of `a`: `g_n(sum c_k m_k) = sum prod c_k^{n_k} g_{n_k}(m_k)` over
/// compositions `sum n_k = n`.
pub fn divided_power(n: u64, a: &DPElement) -> DPElement {
    assert!(n >= 1, "g_0 does not exist in a non-unital algebra");
    if n == 1 {
        return a.clone();
    }
    let spec = a.spec.clone();
    let terms: Vec<(&DPMonomial, &BigInt, u64)> =
        a.terms.iter().map(|(m, c)| (m, c, m.weight(&spec))).collect();
    let mut out = DPElement::zero(&spec);
    let mut parts: Vec<u64> = vec![0; terms.len()];
    expand_compositions(&spec, &terms, 0, n, spec.truncation, &mut parts, &mut out);
    out
}

fn expand_compositions(
    spec: &Arc<AlgebraSpec>,
    terms: &[(&DPMonomial, &BigInt, u64)],
    k: usize,
    remaining: u64,
    budget: u64,
    parts: &mut Vec<u64>,
    out: &mut DPElement,
) {
    if remaining == 0 {
        let mut scalar = BigInt::one();
        let mut product: Option<DPElement> = None;
        for (idx, &nk) in parts.iter().enumerate().take(k) {
            if nk == 0 {
                continue;
            }
            let (m, c, _) = terms[idx];
            scalar *= pow_in(&spec.ring, c, nk);
            let factor = gamma_of_monomial(spec, nk, m);
            product = Some(match product {
                None => factor,
                Some(p) => &p * &factor,
            });
            if product.as_ref().is_some_and(DPElement::is_zero) {
                return;
            }
        }
        if let Some(p) = product {
            for (m, c) in p.terms {
                out.add_term(m, c * &scalar);
            }
        }
        return;
    }
    if k == terms.len() {
        return;
    }
    let w = terms[k].2;
    let max_here = remaining.min(budget / w);
    for nk in 0..=max_here {
        parts[k] = nk;
        expand_compositions(spec, terms, k + 1, remaining - nk, budget - nk * w, parts, out);
    }
    parts[k] = 0;
}

/// Splits `a` by monomial weight.
pub fn weight_components(a: &DPElement) -> BTreeMap<u64, DPElement> {
    let mut out: BTreeMap<u64, DPElement> = BTreeMap::new();
    for (m, c) in &a.terms {
        out.entry(m.weight(&a.spec))
            .or_insert_with(|| DPElement::zero(&a.spec))
            .add_term(m.clone(), c.clone());
    }
    out
}

/// All basis monomials of weight exactly `w`, in monomial order.
pub fn basis_of_weight(spec: &AlgebraSpec, w: u64) -> Result<Vec<DPMonomial>, DpError> {
    if w > spec.truncation {
        return Err(DpError::BeyondTruncation { weight: w, truncation: spec.truncation });
    }
    let mut out = Vec::new();
    if w == 0 {
        return Ok(out);
    }
    let mut current = Vec::new();
    enumerate_monomials(spec, 0, w, &mut current, &mut out);
    out.sort();
    Ok(out)
}

fn enumerate_monomials(
    spec: &AlgebraSpec,
    gen: usize,
    remaining: u64,
    current: &mut Vec<(usize, u64)>,
    out: &mut Vec<DPMonomial>,
) {
    if remaining == 0 {
        out.push(DPMonomial { factors: current.clone() });
        return;
    }
    if gen == spec.weights.len() {
        return;
    }
    let w = spec.weights[gen];
    for e in (0..=remaining / w).rev() {
        if e > 0 {
            current.push((gen, e));
        }
        enumerate_monomials(spec, gen + 1, remaining - e * w, current, out);
        if e > 0 {
            current.pop();
        }
    }
}

/// Every basis monomial of weight `1..=truncation`, weight by weight.
pub fn full_basis(spec: &AlgebraSpec) -> Vec<DPMonomial> {
    (1..=spec.truncation)
        .flat_map(|w| basis_of_weight(spec, w).expect("weight within truncation"))
        .collect()
}

/// Applies the DP algebra map out of the free algebra determined by the
/// images of the generators: `prod g_{e_i}(x_i) -> prod g_{e_i}(image_i)`.
pub fn dp_map_apply(
    target: &Arc<AlgebraSpec>,
    images: &[DPElement],
    a: &DPElement,
) -> Result<DPElement, DpError> {
    let expected = a.spec.generator_count();
    if images.len() != expected {
        return Err(DpError::GeneratorCountMismatch { expected, got: images.len() });
    }
    if a.spec.ring != target.ring {
        return Err(DpError::RingMismatch(a.spec.ring.clone(), target.ring.clone()));
    }
    if images.iter().any(|im| im.same_spec(&DPElement::zero(target)).is_err()) {
        return Err(DpError::SpecMismatch);
    }
    let mut out = DPElement::zero(target);
    for (m, c) in &a.terms {
        let mut product: Option<DPElement> = None;
        for &(i, e) in &m.factors {
            let factor = divided_power(e, &images[i]);
            product = Some(match product {
                None => factor,
                Some(p) => &p * &factor,
            });
        }
        for (mm, cc) in product.expect("monomials are non-empty").terms {
            out.add_term(mm, cc * c);
        }
    }
    Ok(out)
}
