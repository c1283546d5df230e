//! The enveloping bimodule-algebras `U(0) = R[phi_p]/(p phi_p)` and
//! `U(A) = A_+ (x) U(0)`.
//!
//! Elements are stored with their ring coefficients on the left of each
//! phi-monomial. Multiplying a phi-monomial of degree `n` past a scalar `r`
//! produces `r^n`, and past an element of `A` produces zero, so the ring is
//! not central.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::coeff::{pow_in, prime_power, Ring};
use crate::dpcore::{AlgebraSpec, DPElement, DpError};

/// A basis monomial of `U(0)`: the unit or `phi_p^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhiMonomial {
    Unit,
    Phi { p: u64, e: u32 },
}

impl PhiMonomial {
    pub fn degree(&self) -> u64 {
        match *self {
            PhiMonomial::Unit => 1,
            PhiMonomial::Phi { p, e } => p.pow(e),
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match *self {
            PhiMonomial::Unit => None,
            PhiMonomial::Phi { p, .. } => Some(p),
        }
    }

    /// Product in `U(0)`; `None` when it vanishes (`phi_p phi_q = 0`, `p != q`).
    pub fn mul(&self, other: &PhiMonomial) -> Option<PhiMonomial> {
        match (*self, *other) {
            (PhiMonomial::Unit, x) | (x, PhiMonomial::Unit) => Some(x),
            (PhiMonomial::Phi { p, e }, PhiMonomial::Phi { p: q, e: f }) => {
                (p == q).then_some(PhiMonomial::Phi { p, e: e + f })
            }
        }
    }
}

impl Ord for PhiMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.degree(), self.prime().unwrap_or(0)).cmp(&(other.degree(), other.prime().unwrap_or(0)))
    }
}

impl PartialOrd for PhiMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PhiMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PhiMonomial::Unit => write!(f, "1"),
            PhiMonomial::Phi { p, e: 1 } => write!(f, "phi{p}"),
            PhiMonomial::Phi { p, e } => write!(f, "phi{p}^{e}"),
        }
    }
}

/// `phi_n`: the unit for `n = 1`, `phi_p^e` for `n = p^e`, and `None` (zero)
/// otherwise.
pub fn phi_of(n: u64) -> Option<PhiMonomial> {
    assert!(n >= 1, "phi_0 is undefined");
    if n == 1 {
        return Some(PhiMonomial::Unit);
    }
    prime_power(n).map(|(p, e)| PhiMonomial::Phi { p, e })
}

/// Basis of `U(0)` up to degree `cap` with the additive order of each
/// coefficient group: `0` (free) for the unit, `p` for `phi_p^e`. Terms whose
/// coefficient group `R/p` vanishes are omitted.
pub fn u0_basis_up_to(cap: u64, ring: &Ring) -> Vec<(PhiMonomial, BigInt)> {
    let mut out = vec![(PhiMonomial::Unit, BigInt::zero())];
    for n in 2..=cap {
        if let Some(PhiMonomial::Phi { p, e }) = phi_of(n) {
            if ring.phi_modulus(p) > 1 {
                out.push((PhiMonomial::Phi { p, e }, BigInt::from(p)));
            }
        }
    }
    out
}

/// An element `(a, r)` of the unitalization `A_+ = A (+) R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedElement {
    pub scalar: BigInt,
    pub algebra: DPElement,
}

impl AugmentedElement {
    pub fn zero(spec: &Arc<AlgebraSpec>) -> AugmentedElement {
        AugmentedElement { scalar: BigInt::zero(), algebra: DPElement::zero(spec) }
    }

    pub fn scalar(spec: &Arc<AlgebraSpec>, r: impl Into<BigInt>) -> AugmentedElement {
        AugmentedElement { scalar: spec.ring().reduce(&r.into()), algebra: DPElement::zero(spec) }
    }

    pub fn from_algebra(a: DPElement) -> AugmentedElement {
        AugmentedElement { scalar: BigInt::zero(), algebra: a }
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero() && self.algebra.is_zero()
    }

    pub fn add(&self, other: &AugmentedElement) -> AugmentedElement {
        let ring = self.algebra.ring();
        AugmentedElement { scalar: ring.reduce(&(&self.scalar + &other.scalar)), algebra: &self.algebra + &other.algebra }
    }

    pub fn scale(&self, r: &BigInt) -> AugmentedElement {
        let ring = self.algebra.ring();
        AugmentedElement { scalar: ring.reduce(&(&self.scalar * r)), algebra: self.algebra.scale(r) }
    }

    /// `(a, r)(b, s) = (ab + rb + sa, rs)`.
    pub fn mul(&self, other: &AugmentedElement) -> AugmentedElement {
        let ring = self.algebra.ring();
        let mut algebra = &self.algebra * &other.algebra;
        if !self.scalar.is_zero() {
            algebra = &algebra + &other.algebra.scale(&self.scalar);
        }
        if !other.scalar.is_zero() {
            algebra = &algebra + &self.algebra.scale(&other.scalar);
        }
        AugmentedElement { scalar: ring.reduce(&(&self.scalar * &other.scalar)), algebra }
    }

    /// All coefficients reduced into `[0, q)`.
    pub fn reduced_mod(&self, q: u64) -> AugmentedElement {
        let q = BigInt::from(q);
        let spec = self.algebra.spec();
        AugmentedElement {
            scalar: self.scalar.mod_floor(&q),
            algebra: DPElement::from_terms(
                spec,
                self.algebra.terms().iter().map(|(m, c)| (m.clone(), c.mod_floor(&q))),
            ),
        }
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, phi: &PhiMonomial, first: &mut bool) -> fmt::Result {
        let suffix = match phi {
            PhiMonomial::Unit => String::new(),
            other => format!("*{other}"),
        };
        let mut put = |f: &mut fmt::Formatter<'_>, c: &BigInt, body: Option<String>| -> fmt::Result {
            let sep = match (*first, c.is_negative()) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            *first = false;
            let abs = c.abs();
            match body {
                None if suffix.is_empty() => write!(f, "{sep}{abs}"),
                None if abs.is_one() => write!(f, "{sep}{}", &suffix[1..]),
                None => write!(f, "{sep}{abs}{suffix}"),
                Some(b) if abs.is_one() => write!(f, "{sep}{b}{suffix}"),
                Some(b) => write!(f, "{sep}{abs}*{b}{suffix}"),
            }
        };
        if !self.scalar.is_zero() {
            put(f, &self.scalar, None)?;
        }
        for (m, c) in self.algebra.terms() {
            put(f, c, Some(m.to_string()))?;
        }
        Ok(())
    }
}

/// An element of `U(A)` in canonical form: each `phi_p^e` coefficient is
/// reduced mod `p` (mod `gcd(p, m)` over `Z/m`), zero coefficients dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvelopeElement {
    spec: Arc<AlgebraSpec>,
    terms: BTreeMap<PhiMonomial, AugmentedElement>,
}

impl EnvelopeElement {
    pub fn zero(spec: &Arc<AlgebraSpec>) -> EnvelopeElement {
        EnvelopeElement { spec: spec.clone(), terms: BTreeMap::new() }
    }

    /// `coeff (x) phi`.
    pub fn term(spec: &Arc<AlgebraSpec>, coeff: AugmentedElement, phi: PhiMonomial) -> EnvelopeElement {
        let mut out = EnvelopeElement::zero(spec);
        out.add_term(phi, coeff);
        out
    }

    pub fn unit(spec: &Arc<AlgebraSpec>) -> EnvelopeElement {
        EnvelopeElement::term(spec, AugmentedElement::scalar(spec, 1), PhiMonomial::Unit)
    }

    pub fn scalar(spec: &Arc<AlgebraSpec>, r: impl Into<BigInt>) -> EnvelopeElement {
        EnvelopeElement::term(spec, AugmentedElement::scalar(spec, r), PhiMonomial::Unit)
    }

    /// `a (x) 1`.
    pub fn from_algebra(a: &DPElement) -> EnvelopeElement {
        EnvelopeElement::term(a.spec(), AugmentedElement::from_algebra(a.clone()), PhiMonomial::Unit)
    }

    /// `1 (x) phi`.
    pub fn phi(spec: &Arc<AlgebraSpec>, phi: PhiMonomial) -> EnvelopeElement {
        EnvelopeElement::term(spec, AugmentedElement::scalar(spec, 1), phi)
    }

    pub fn spec(&self) -> &Arc<AlgebraSpec> {
        &self.spec
    }

    pub fn terms(&self) -> &BTreeMap<PhiMonomial, AugmentedElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, phi: &PhiMonomial) -> AugmentedElement {
        self.terms.get(phi).cloned().unwrap_or_else(|| AugmentedElement::zero(&self.spec))
    }

    pub fn add_term(&mut self, phi: PhiMonomial, coeff: AugmentedElement) {
        let merged = match self.terms.remove(&phi) {
            Some(old) => old.add(&coeff),
            None => coeff,
        };
        let merged = match phi.prime() {
            None => merged,
            Some(p) => {
                let q = self.spec.ring().phi_modulus(p);
                if q == 1 {
                    return;
                }
                merged.reduced_mod(q)
            }
        };
        if !merged.is_zero() {
            self.terms.insert(phi, merged);
        }
    }

    pub fn add(&self, other: &EnvelopeElement) -> EnvelopeElement {
        let mut out = self.clone();
        for (phi, c) in &other.terms {
            out.add_term(*phi, c.clone());
        }
        out
    }

    pub fn scale(&self, r: &BigInt) -> EnvelopeElement {
        let mut out = EnvelopeElement::zero(&self.spec);
        for (phi, c) in &self.terms {
            out.add_term(*phi, c.scale(r));
        }
        out
    }

    pub fn neg(&self) -> EnvelopeElement {
        self.scale(&BigInt::from(-1))
    }

    /// Left multiplication by `a (x) 1`.
    pub fn left_mul_algebra(&self, a: &AugmentedElement) -> EnvelopeElement {
        let mut out = EnvelopeElement::zero(&self.spec);
        for (phi, c) in &self.terms {
            out.add_term(*phi, a.mul(c));
        }
        out
    }

    /// Keeps only the terms accepted by `keep`, applied to the phi-degree and
    /// the weight of each A_+ basis element (`0` for the scalar part).
    pub fn filter_weights(&self, keep: impl Fn(u64, u64) -> bool) -> EnvelopeElement {
        let mut out = EnvelopeElement::zero(&self.spec);
        for (phi, c) in &self.terms {
            let deg = phi.degree();
            let scalar = if keep(deg, 0) { c.scalar.clone() } else { BigInt::zero() };
            let algebra = DPElement::from_terms(
                &self.spec,
                c.algebra
                    .terms()
                    .iter()
                    .filter(|(m, _)| keep(deg, m.weight(&self.spec)))
                    .map(|(m, c)| (m.clone(), c.clone())),
            );
            out.add_term(*phi, AugmentedElement { scalar, algebra });
        }
        out
    }

    pub fn try_mul(&self, other: &EnvelopeElement) -> Result<EnvelopeElement, DpError> {
        if !(Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec) {
            return Err(DpError::SpecMismatch);
        }
        Ok(envelope_mul(self, other))
    }
}

/// Product in `U(A)`.
///
/// `(c (x) mu)((b, s) (x) nu)` is `c (b, s) (x) nu` when `mu` is the unit and
/// `c s^{deg mu} (x) mu nu` otherwise, because `phi_p` kills `A` and twists
/// scalars by `r -> r^p`.
pub fn envelope_mul(u: &EnvelopeElement, v: &EnvelopeElement) -> EnvelopeElement {
    let ring = u.spec.ring();
    let mut out = EnvelopeElement::zero(&u.spec);
    for (mu, c) in &u.terms {
        for (nu, d) in &v.terms {
            match mu {
                PhiMonomial::Unit => out.add_term(*nu, c.mul(d)),
                _ => {
                    if d.scalar.is_zero() {
                        continue;
                    }
                    let Some(prod) = mu.mul(nu) else { continue };
                    let twisted = pow_in(ring, &d.scalar, mu.degree());
                    out.add_term(prod, c.scale(&twisted));
                }
            }
        }
    }
    out
}

impl std::ops::Mul for &EnvelopeElement {
    type Output = EnvelopeElement;
    fn mul(self, rhs: &EnvelopeElement) -> EnvelopeElement {
        self.try_mul(rhs).expect("envelope elements over different algebras")
    }
}

impl std::ops::Add for &EnvelopeElement {
    type Output = EnvelopeElement;
    fn add(self, rhs: &EnvelopeElement) -> EnvelopeElement {
        EnvelopeElement::add(self, rhs)
    }
}

impl fmt::Display for EnvelopeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (phi, c) in &self.terms {
            c.fmt_with(f, phi, &mut first)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpcore::gamma_gen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn phi(p: u64, e: u32) -> PhiMonomial {
        PhiMonomial::Phi { p, e }
    }

    fn z(n: u64) -> Arc<AlgebraSpec> {
        AlgebraSpec::uniform(Ring::Integers, 1, n).unwrap()
    }

    #[test]
    fn multiplication_table() {
        let s = z(6);
        let x = EnvelopeElement::from_algebra(&DPElement::generator(&s, 0));
        let phi2 = EnvelopeElement::phi(&s, phi(2, 1));
        let phi3 = EnvelopeElement::phi(&s, phi(3, 1));

        let xphi2 = &x * &phi2;
        assert_eq!(xphi2.terms().len(), 1);
        assert_eq!(xphi2.coefficient(&phi(2, 1)).algebra, DPElement::generator(&s, 0));
        assert!((&phi2 * &x).is_zero());
        assert!((&phi2 * &phi3).is_zero());
        assert_eq!(&phi2 * &phi2, EnvelopeElement::phi(&s, phi(2, 2)));

        // phi_2 * 5 = 25 phi_2 = phi_2 mod 2
        let five = EnvelopeElement::scalar(&s, 5);
        assert_eq!(&phi2 * &five, phi2);
        // 5 * phi_2 is also phi_2 after reduction, but phi_3 * 2 = 8 phi_3 = 2 phi_3
        let two = EnvelopeElement::scalar(&s, 2);
        assert_eq!(&phi3 * &two, phi3.scale(&BigInt::from(2)));
    }

    #[test]
    fn phi_indices() {
        assert_eq!(phi_of(1), Some(PhiMonomial::Unit));
        assert_eq!(phi_of(8), Some(phi(2, 3)));
        assert_eq!(phi_of(6), None);
        assert_eq!(phi_of(7), Some(phi(7, 1)));
    }

    #[test]
    fn u0_bases() {
        let b = u0_basis_up_to(5, &Ring::Integers);
        let expected: Vec<_> = [(PhiMonomial::Unit, 0), (phi(2, 1), 2), (phi(3, 1), 3), (phi(2, 2), 2), (phi(5, 1), 5)]
            .into_iter()
            .map(|(m, a)| (m, BigInt::from(a)))
            .collect();
        assert_eq!(b, expected);
        assert_eq!(u0_basis_up_to(1, &Ring::Integers), vec![(PhiMonomial::Unit, BigInt::zero())]);
        let z3 = Ring::integers_mod(3).unwrap();
        assert_eq!(
            u0_basis_up_to(4, &z3),
            vec![(PhiMonomial::Unit, BigInt::zero()), (phi(3, 1), BigInt::from(3))]
        );
    }

    #[test]
    fn phi_coefficients_reduce() {
        let s = z(6);
        let e = EnvelopeElement::term(&s, AugmentedElement::scalar(&s, 7), phi(3, 1));
        assert_eq!(e.coefficient(&phi(3, 1)).scalar, BigInt::from(1));
        assert!(e.scale(&BigInt::from(3)).is_zero());

        let s3 = AlgebraSpec::uniform(Ring::integers_mod(3).unwrap(), 1, 6).unwrap();
        assert!(EnvelopeElement::phi(&s3, phi(2, 1)).is_zero());
    }

    // p and q^p both annihilate phi_p phi_q; they are coprime, so the product
    // must vanish over Z.
    #[test]
    fn distinct_primes_annihilate() {
        for (p, q) in [(2u64, 3u64), (3, 2), (2, 5), (5, 7)] {
            let qp = BigInt::from(q).pow(p as u32);
            assert!(BigInt::from(p).gcd(&qp).is_one());
        }
    }

    fn random_envelope(spec: &Arc<AlgebraSpec>, rng: &mut ChaCha8Rng) -> EnvelopeElement {
        let phis = u0_basis_up_to(spec.truncation(), spec.ring());
        let basis = crate::dpcore::full_basis(spec);
        let mut out = EnvelopeElement::zero(spec);
        for _ in 0..rng.gen_range(1..=3) {
            let (phi, _) = phis[rng.gen_range(0..phis.len())];
            let mut coeff = AugmentedElement::scalar(spec, rng.gen_range(-4..=4));
            if rng.gen_bool(0.6) {
                let m = basis[rng.gen_range(0..basis.len())].clone();
                coeff = coeff.add(&AugmentedElement::from_algebra(DPElement::monomial(spec, m, rng.gen_range(-4..=4))));
            }
            out.add_term(phi, coeff);
        }
        out
    }

    #[test]
    fn associativity_and_torsion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for ring in [Ring::Integers, Ring::integers_mod(4).unwrap(), Ring::integers_mod(6).unwrap()] {
            let s = AlgebraSpec::uniform(ring, 2, 6).unwrap();
            for _ in 0..200 {
                let (a, b, c) = (random_envelope(&s, &mut rng), random_envelope(&s, &mut rng), random_envelope(&s, &mut rng));
                assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                for phi in (&a * &b).terms().keys() {
                    if let Some(p) = phi.prime() {
                        let single = EnvelopeElement::term(&s, (&a * &b).coefficient(phi), *phi);
                        assert!(single.scale(&BigInt::from(p)).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn algebra_terms_multiply_as_in_unitalization() {
        let s = z(6);
        let x = DPElement::generator(&s, 0);
        let g2 = gamma_gen(&s, 0, 2);
        let a = EnvelopeElement::from_algebra(&x).add(&EnvelopeElement::scalar(&s, 3));
        let b = EnvelopeElement::from_algebra(&g2);
        assert_eq!(&a * &b, &b * &a);
        // (x + 3) g2 = 3 g3 + 3 g2
        let expected = EnvelopeElement::from_algebra(&(&(&x * &g2) + &g2.scale(&BigInt::from(3))));
        assert_eq!(&a * &b, expected);
    }

    #[test]
    fn degrees_multiply() {
        let phis: Vec<_> = u0_basis_up_to(30, &Ring::Integers).into_iter().map(|(m, _)| m).collect();
        for a in &phis {
            for b in &phis {
                if let Some(c) = a.mul(b) {
                    assert_eq!(c.degree(), a.degree() * b.degree());
                }
            }
        }
    }

    #[test]
    fn display() {
        let s = z(6);
        let x = DPElement::generator(&s, 0);
        let e = EnvelopeElement::from_algebra(&x).add(&EnvelopeElement::phi(&s, phi(2, 2)));
        assert_eq!(e.to_string(), "x1 + phi2^2");
    }
}
