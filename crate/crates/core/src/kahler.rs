//! DP derivations and Kähler differentials of free truncated DP algebras.
//!
//! For `A` free on `V`, `Omega = U(A) (x) V`: an element is a map from
//! generator index to its `U(A)` coefficient. The same free-module code also
//! represents `U(A) (x) A`, keyed by basis monomials, which carries the
//! relation presentation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::beck::{ActionMatrix, ModuleVector, UModule};
use crate::coeff::{primes_up_to, Ring};
use crate::dpcore::{basis_of_weight, divided_power, full_basis, gamma_gen, AlgebraSpec, DPElement, DPMonomial};
use crate::envelope::{phi_of, u0_basis_up_to, AugmentedElement, EnvelopeElement, PhiMonomial};
use crate::laws::{draw_index, random_element, Report};
use crate::linalg::{kernel, IntegerMatrix, InvariantFactors};

/// A basis key of a free `U(A)`-module, with the weight it contributes.
pub trait Key: Ord + Clone + fmt::Debug {
    fn key_weight(&self, spec: &AlgebraSpec) -> u64;
    /// Renders `body (x) key`, where `body` is `None` for the bare unit.
    fn attach(&self, body: Option<String>) -> String;
}

impl Key for usize {
    fn key_weight(&self, spec: &AlgebraSpec) -> u64 {
        spec.generator_weight(*self)
    }
    fn attach(&self, body: Option<String>) -> String {
        match body {
            None => format!("dx{}", self + 1),
            Some(b) => format!("{b}*dx{}", self + 1),
        }
    }
}

impl Key for DPMonomial {
    fn key_weight(&self, spec: &AlgebraSpec) -> u64 {
        self.weight(spec)
    }
    fn attach(&self, body: Option<String>) -> String {
        format!("{} (x) {self}", body.unwrap_or_else(|| "1".into()))
    }
}

/// An element of the free left `U(A)`-module on keys `K`, truncated: a term
/// `(b (x) phi) (x) k` has weight `wt(b) + deg(phi) wt(k)` and is dropped
/// above the truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeUElement<K: Key> {
    spec: Arc<AlgebraSpec>,
    terms: BTreeMap<K, EnvelopeElement>,
}

/// `Omega^DP = U(A) (x) V`, keyed by generator index.
pub type OmegaElement = FreeUElement<usize>;

/// `U(A) (x) A`, keyed by basis monomial.
pub type TensorElement = FreeUElement<DPMonomial>;

impl<K: Key> FreeUElement<K> {
    pub fn zero(spec: &Arc<AlgebraSpec>) -> Self {
        FreeUElement { spec: spec.clone(), terms: BTreeMap::new() }
    }

    /// `u (x) key`.
    pub fn term(key: K, u: EnvelopeElement) -> Self {
        let mut out = FreeUElement::zero(u.spec());
        out.add_term(key, u);
        out
    }

    /// `1 (x) key`.
    pub fn basis(spec: &Arc<AlgebraSpec>, key: K) -> Self {
        FreeUElement::term(key, EnvelopeElement::unit(spec))
    }

    pub fn spec(&self) -> &Arc<AlgebraSpec> {
        &self.spec
    }

    pub fn terms(&self) -> &BTreeMap<K, EnvelopeElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &K) -> EnvelopeElement {
        self.terms.get(key).cloned().unwrap_or_else(|| EnvelopeElement::zero(&self.spec))
    }

    pub fn add_term(&mut self, key: K, u: EnvelopeElement) {
        let n = self.spec.truncation();
        let kw = key.key_weight(&self.spec);
        let u = u.filter_weights(|deg, wt| wt + deg * kw <= n);
        let merged = match self.terms.remove(&key) {
            Some(old) => old.add(&u),
            None => u,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, u) in &other.terms {
            out.add_term(k.clone(), u.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &BigInt) -> Self {
        self.map(|u| u.scale(r))
    }

    pub fn neg(&self) -> Self {
        self.scale(&BigInt::from(-1))
    }

    /// Left multiplication by `v` in `U(A)`.
    pub fn left_mul(&self, v: &EnvelopeElement) -> Self {
        self.map(|u| v * u)
    }

    pub fn left_mul_algebra(&self, a: &DPElement) -> Self {
        self.map(|u| u.left_mul_algebra(&AugmentedElement::from_algebra(a.clone())))
    }

    /// `phi_n` acting on the left; zero unless `n` is 1 or a prime power.
    pub fn phi_n(&self, n: u64) -> Self {
        match phi_of(n) {
            None => FreeUElement::zero(&self.spec),
            Some(phi) => self.left_mul(&EnvelopeElement::phi(&self.spec, phi)),
        }
    }

    fn map(&self, f: impl Fn(&EnvelopeElement) -> EnvelopeElement) -> Self {
        let mut out = FreeUElement::zero(&self.spec);
        for (k, u) in &self.terms {
            out.add_term(k.clone(), f(u));
        }
        out
    }

    /// Flat list of `(key, phi, b, coefficient)` with `b = None` for the
    /// scalar part of the `A_+` coefficient.
    pub fn basis_terms(&self) -> Vec<(K, PhiMonomial, Option<DPMonomial>, BigInt)> {
        let mut out = Vec::new();
        for (k, u) in &self.terms {
            for (phi, c) in u.terms() {
                if !c.scalar.is_zero() {
                    out.push((k.clone(), *phi, None, c.scalar.clone()));
                }
                for (m, x) in c.algebra.terms() {
                    out.push((k.clone(), *phi, Some(m.clone()), x.clone()));
                }
            }
        }
        out
    }
}

impl<K: Key> std::ops::Add for &FreeUElement<K> {
    type Output = FreeUElement<K>;
    fn add(self, rhs: &FreeUElement<K>) -> FreeUElement<K> {
        FreeUElement::add(self, rhs)
    }
}

impl<K: Key> std::ops::Sub for &FreeUElement<K> {
    type Output = FreeUElement<K>;
    fn sub(self, rhs: &FreeUElement<K>) -> FreeUElement<K> {
        FreeUElement::sub(self, rhs)
    }
}

impl<K: Key> fmt::Display for FreeUElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.basis_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (key, phi, b, c)) in terms.iter().enumerate() {
            let mut parts: Vec<String> = Vec::new();
            let abs = num_traits::Signed::abs(c);
            if !abs.is_one() {
                parts.push(abs.to_string());
            }
            if let Some(b) = b {
                parts.push(b.to_string());
            }
            if *phi != PhiMonomial::Unit {
                parts.push(phi.to_string());
            }
            let body = (!parts.is_empty()).then(|| parts.join("*"));
            let neg = num_traits::Signed::is_negative(c);
            let sep = match (idx == 0, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            write!(f, "{sep}{}", key.attach(body))?;
        }
        Ok(())
    }
}

/// `1 (x) dx_i`.
pub fn dx(spec: &Arc<AlgebraSpec>, i: usize) -> OmegaElement {
    OmegaElement::basis(spec, i)
}

fn monomial_or_one(spec: &Arc<AlgebraSpec>, factors: Vec<(usize, u64)>) -> AugmentedElement {
    if factors.is_empty() {
        AugmentedElement::scalar(spec, 1)
    } else {
        AugmentedElement::from_algebra(DPElement::monomial(spec, DPMonomial::new(factors), 1))
    }
}

/// The `U(A)`-coefficient of `dx_i` in `d g_e(x_i)`:
/// `sum_{j=1..e} g_{e-j}(x_i) (x) phi_j`, with `g_0 = 1`.
fn d_gamma_coefficient(spec: &Arc<AlgebraSpec>, i: usize, e: u64) -> EnvelopeElement {
    let mut out = EnvelopeElement::zero(spec);
    for j in 1..=e {
        let Some(phi) = phi_of(j) else { continue };
        let coeff = if j == e {
            AugmentedElement::scalar(spec, 1)
        } else {
            AugmentedElement::from_algebra(gamma_gen(spec, i, e - j))
        };
        out.add_term(phi, coeff);
    }
    out
}

fn d_monomial(spec: &Arc<AlgebraSpec>, mono: &DPMonomial) -> OmegaElement {
    let mut out = OmegaElement::zero(spec);
    let factors = mono.factors();
    for (k, &(i, e)) in factors.iter().enumerate() {
        let rest: Vec<(usize, u64)> =
            factors.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, f)| *f).collect();
        let rest = monomial_or_one(spec, rest);
        out.add_term(i, d_gamma_coefficient(spec, i, e).left_mul_algebra(&rest));
    }
    out
}

/// The universal DP derivation `d: A -> Omega`, extended linearly from basis
/// monomials by the Leibniz rule across factors.
pub fn universal_derivation(a: &DPElement) -> OmegaElement {
    let spec = a.spec();
    let mut out = OmegaElement::zero(spec);
    for (m, c) in a.terms() {
        out = &out + &d_monomial(spec, m).scale(c);
    }
    out
}

/// `d g_n(a) + sum_{i+j=n} (-1)^i g_i(a) d g_j(a)`, which equals `phi_n(da)`.
pub fn phi_inversion(n: u64, a: &DPElement) -> OmegaElement {
    assert!(n >= 1, "phi_0 is undefined");
    let mut out = universal_derivation(&divided_power(n, a));
    for i in 1..n {
        let term = universal_derivation(&divided_power(n - i, a)).left_mul_algebra(&divided_power(i, a));
        out = if i % 2 == 0 { &out + &term } else { &out - &term };
    }
    out
}

/// One `Z`-basis element `b (x) phi (x) dx_i` of `Omega`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaBasisElement {
    /// `None` for the unit of `A_+`.
    pub coeff: Option<DPMonomial>,
    pub phi: PhiMonomial,
    pub generator: usize,
    /// `0` for a free `R`-summand, `p` for `R/p` (the `phi_p^e` terms).
    pub annihilator: BigInt,
}

impl OmegaBasisElement {
    pub fn weight(&self, spec: &AlgebraSpec) -> u64 {
        self.coeff.as_ref().map_or(0, |m| m.weight(spec)) + self.phi.degree() * spec.generator_weight(self.generator)
    }

    /// Additive order as an abelian group, `0` meaning infinite.
    pub fn order(&self, ring: &Ring) -> BigInt {
        ring.effective_annihilator(&self.annihilator)
    }

    pub fn element(&self, spec: &Arc<AlgebraSpec>) -> OmegaElement {
        let c = match &self.coeff {
            None => AugmentedElement::scalar(spec, 1),
            Some(m) => AugmentedElement::from_algebra(DPElement::monomial(spec, m.clone(), 1)),
        };
        OmegaElement::term(self.generator, EnvelopeElement::term(spec, c, self.phi))
    }
}

impl fmt::Display for OmegaBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(m) = &self.coeff {
            parts.push(m.to_string());
        }
        if self.phi != PhiMonomial::Unit {
            parts.push(self.phi.to_string());
        }
        let body = (!parts.is_empty()).then(|| parts.join("*"));
        write!(f, "{}", self.generator.attach(body))
    }
}

/// The weight-`w` part of `U(A) (x) V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaSlice {
    pub weight: u64,
    pub elements: Vec<OmegaBasisElement>,
}

impl OmegaSlice {
    pub fn invariant_factors(&self, ring: &Ring) -> InvariantFactors {
        let orders: Vec<BigInt> = self.elements.iter().map(|e| e.order(ring)).collect();
        InvariantFactors::from_orders(&orders)
    }
}

/// `Z`-basis of `Omega = U(A) (x) V` weight by weight. Within a weight:
/// generator, then phi-monomial, then coefficient monomial.
pub fn omega_free_basis(spec: &AlgebraSpec) -> Vec<OmegaSlice> {
    let n = spec.truncation();
    let phis = u0_basis_up_to(n, spec.ring());
    (1..=n)
        .map(|w| {
            let mut elements = Vec::new();
            for i in 0..spec.generator_count() {
                let wi = spec.generator_weight(i);
                for (phi, ann) in &phis {
                    let top = phi.degree() * wi;
                    if top > w {
                        continue;
                    }
                    let coeffs: Vec<Option<DPMonomial>> = if top == w {
                        vec![None]
                    } else {
                        basis_of_weight(spec, w - top).expect("below truncation").into_iter().map(Some).collect()
                    };
                    for coeff in coeffs {
                        elements.push(OmegaBasisElement { coeff, phi: *phi, generator: i, annihilator: ann.clone() });
                    }
                }
            }
            OmegaSlice { weight: w, elements }
        })
        .collect()
}

/// `Omega` as a `UModule` on the flattened [`omega_free_basis`].
#[derive(Debug, Clone)]
pub struct OmegaModule {
    pub module: UModule,
    pub basis: Vec<OmegaBasisElement>,
    index: BTreeMap<(usize, PhiMonomial, Option<DPMonomial>), usize>,
}

impl OmegaModule {
    pub fn new(spec: &Arc<AlgebraSpec>) -> OmegaModule {
        let basis: Vec<OmegaBasisElement> = omega_free_basis(spec).into_iter().flat_map(|s| s.elements).collect();
        let index = basis
            .iter()
            .enumerate()
            .map(|(k, e)| ((e.generator, e.phi, e.coeff.clone()), k))
            .collect();
        let placeholder = UModule::new(spec, basis.iter().map(|e| e.annihilator.clone()).collect(), BTreeMap::new(), BTreeMap::new())
            .expect("no tables yet");
        let mut out = OmegaModule { module: placeholder, basis, index };
        let elements: Vec<OmegaElement> = out.basis.iter().map(|e| e.element(spec)).collect();
        let table = |f: &dyn Fn(&OmegaElement) -> OmegaElement| {
            let mut m = ActionMatrix::zero(elements.len());
            for (col, e) in elements.iter().enumerate() {
                for (row, v) in out.coordinates(&f(e)).into_iter().enumerate() {
                    if !v.is_zero() {
                        m.set(row, col, v);
                    }
                }
            }
            m
        };
        let mut a_action = BTreeMap::new();
        for mono in full_basis(spec) {
            let a = DPElement::monomial(spec, mono.clone(), 1);
            let m = table(&|e| e.left_mul_algebra(&a));
            if (0..m.dim()).any(|c| !m.column(c).iter().all(Zero::is_zero)) {
                a_action.insert(mono, m);
            }
        }
        let mut phi_action = BTreeMap::new();
        for p in primes_up_to(spec.truncation()) {
            if spec.ring().phi_modulus(p) > 1 {
                phi_action.insert(p, table(&|e| e.phi_n(p)));
            }
        }
        let annihilators = out.basis.iter().map(|e| e.annihilator.clone()).collect();
        let labels = out.basis.iter().map(|e| e.to_string()).collect();
        out.module = UModule::new(spec, annihilators, a_action, phi_action)
            .expect("tables built on the module basis")
            .with_labels(labels);
        out
    }

    pub fn coordinates(&self, w: &OmegaElement) -> ModuleVector {
        let mut v = vec![BigInt::zero(); self.basis.len()];
        for (g, phi, b, c) in w.basis_terms() {
            let k = self.index[&(g, phi, b)];
            v[k] += c;
        }
        let ring = self.module.spec().ring();
        for (x, e) in v.iter_mut().zip(&self.basis) {
            let d = e.order(ring);
            if !d.is_zero() {
                *x = x.mod_floor(&d);
            }
        }
        v
    }

    pub fn element(&self, v: &[BigInt]) -> OmegaElement {
        let spec = self.module.spec();
        let mut out = OmegaElement::zero(spec);
        for (e, c) in self.basis.iter().zip(v) {
            if !c.is_zero() {
                out = &out + &e.element(spec).scale(c);
            }
        }
        out
    }

    /// The universal derivation as a table on basis monomials.
    pub fn universal_table(&self) -> DerivationTable {
        let spec = self.module.spec();
        full_basis(spec)
            .into_iter()
            .map(|m| {
                let v = self.coordinates(&universal_derivation(&DPElement::monomial(spec, m.clone(), 1)));
                (m, v)
            })
            .collect()
    }
}

/// A linear map `A -> M` given on basis monomials; absent monomials map to 0.
pub type DerivationTable = BTreeMap<DPMonomial, ModuleVector>;

pub fn apply_table(module: &UModule, s: &DerivationTable, a: &DPElement) -> ModuleVector {
    let mut out = module.zero_vector();
    for (m, c) in a.terms() {
        if let Some(v) = s.get(m) {
            out = module.add(&out, &module.scale(c, v));
        }
    }
    out
}

/// The DP derivation with `s(x_i) = images[i]`, computed inside `M` from the
/// two derivation laws alone.
pub fn derivation_from_generators(module: &UModule, images: &[ModuleVector]) -> DerivationTable {
    let spec = module.spec().clone();
    assert_eq!(images.len(), spec.generator_count(), "one image per generator");
    let gamma_value = |i: usize, e: u64| {
        let m = &images[i];
        let mut out = module.phi_n(e, m);
        for j in 1..e {
            out = module.add(&out, &module.act(&gamma_gen(&spec, i, e - j), &module.phi_n(j, m)));
        }
        out
    };
    full_basis(&spec)
        .into_iter()
        .map(|mono| {
            let factors = mono.factors();
            let mut out = module.zero_vector();
            for (k, &(i, e)) in factors.iter().enumerate() {
                let rest: Vec<(usize, u64)> =
                    factors.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, f)| *f).collect();
                out = module.add(&out, &module.act_augmented(&monomial_or_one(&spec, rest), &gamma_value(i, e)));
            }
            (mono, out)
        })
        .collect()
}

/// `f o d` for the `U(A)`-map `f: Omega -> M` with `f(dx_i) = images[i]`.
pub fn compose_with_universal(module: &UModule, images: &[ModuleVector]) -> DerivationTable {
    let spec = module.spec().clone();
    full_basis(&spec)
        .into_iter()
        .map(|mono| {
            let d = universal_derivation(&DPElement::monomial(&spec, mono.clone(), 1));
            (mono, apply_omega_map(module, images, &d))
        })
        .collect()
}

/// `f(w)` for the `U(A)`-map with `f(dx_i) = images[i]`.
pub fn apply_omega_map(module: &UModule, images: &[ModuleVector], w: &OmegaElement) -> ModuleVector {
    let mut out = module.zero_vector();
    for (i, u) in w.terms() {
        out = module.add(&out, &module.act_envelope(u, &images[*i]));
    }
    out
}

pub const DERIVATION_LEIBNIZ: &str = "derivation_leibniz";
pub const DERIVATION_GAMMA: &str = "derivation_gamma_law";
pub const PHI_KILLS_D_PRODUCT: &str = "phi_p_of_d_product_vanishes";
pub const PHI_KILLS_D_GAMMA_OTHER: &str = "phi_p_of_d_gamma_q_vanishes";
pub const PHI_OF_D_GAMMA_SAME: &str = "phi_p_of_d_gamma_p_is_phi_p_squared";

fn top_weight(a: &DPElement) -> u64 {
    a.terms().keys().map(|m| m.weight(a.spec())).max().unwrap_or(0)
}

/// Randomized check that `s` is a DP derivation into `module`, together
/// with the three consequences for `phi_p`. Inputs are drawn so that every
/// product and divided power stays inside the truncation.
pub fn is_dp_derivation(s: &DerivationTable, module: &UModule, samples: usize, seed: u64) -> Report {
    let spec = module.spec().clone();
    let n_max = spec.truncation();
    let primes: Vec<u64> = primes_up_to(n_max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new();
    let sv = |a: &DPElement| apply_table(module, s, a);
    for _ in 0..samples {
        let a = random_element(&spec, &mut rng);
        let b = random_element(&spec, &mut rng);
        let (wa, wb) = (top_weight(&a), top_weight(&b));
        let (sa, sb) = (sv(&a), sv(&b));
        if wa + wb <= n_max {
            let ab = &a * &b;
            let lhs = sv(&ab);
            let rhs = module.add(&module.act(&a, &sb), &module.act(&b, &sa));
            report.check(DERIVATION_LEIBNIZ, module.is_zero(&module.sub(&lhs, &rhs)), || format!("a = {a}, b = {b}"));
            let sab = sv(&ab);
            for &p in &primes {
                report.check(PHI_KILLS_D_PRODUCT, module.is_zero(&module.phi(p, &sab)), || {
                    format!("p = {p}, a = {a}, b = {b}")
                });
            }
        }
        let cap = if a.is_zero() { 0 } else { n_max / wa };
        if cap >= 2 {
            let n = 1 + draw_index(&mut rng, cap - 1);
            let lhs = sv(&divided_power(n, &a));
            let mut rhs = module.phi_n(n, &sa);
            for j in 1..n {
                rhs = module.add(&rhs, &module.act(&divided_power(n - j, &a), &module.phi_n(j, &sa)));
            }
            report.check(DERIVATION_GAMMA, module.is_zero(&module.sub(&lhs, &rhs)), || format!("n = {n}, a = {a}"));
        }
        for &p in &primes {
            if p > cap {
                break;
            }
            let lhs = module.phi(p, &sv(&divided_power(p, &a)));
            let rhs = module.phi(p, &module.phi(p, &sa));
            report.check(PHI_OF_D_GAMMA_SAME, module.is_zero(&module.sub(&lhs, &rhs)), || {
                format!("p = {p}, a = {a}")
            });
            for &q in primes.iter().filter(|&&q| q != p && q <= cap) {
                let v = module.phi(p, &sv(&divided_power(q, &a)));
                report.check(PHI_KILLS_D_GAMMA_OTHER, module.is_zero(&v), || format!("p = {p}, q = {q}, a = {a}"));
            }
        }
    }
    report
}

/// Checks both derivation laws for `d` directly in `Omega` on random inputs.
/// The laws hold exactly, truncation included, because `d` preserves weight.
pub fn check_universal_derivation(spec: &Arc<AlgebraSpec>, samples: usize, seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new();
    let max_n = spec.truncation().max(2);
    for _ in 0..samples {
        let a = random_element(spec, &mut rng);
        let b = random_element(spec, &mut rng);
        let (da, db) = (universal_derivation(&a), universal_derivation(&b));
        let lhs = universal_derivation(&(&a * &b));
        let rhs = &da.left_mul_algebra(&b) + &db.left_mul_algebra(&a);
        report.check(DERIVATION_LEIBNIZ, lhs == rhs, || format!("a = {a}, b = {b}"));
        let n = draw_index(&mut rng, max_n);
        let lhs = universal_derivation(&divided_power(n, &a));
        let mut rhs = da.phi_n(n);
        for j in 1..n {
            rhs = &rhs + &da.phi_n(j).left_mul_algebra(&divided_power(n - j, &a));
        }
        report.check(DERIVATION_GAMMA, lhs == rhs, || format!("n = {n}, a = {a}"));
    }
    report
}

/// The three `phi_p` identities for `d`, on every basis monomial and basis
/// pair, for all primes up to the truncation.
pub fn remark_identities(spec: &Arc<AlgebraSpec>) -> Report {
    let mut report = Report::new();
    let n = spec.truncation();
    let primes = primes_up_to(n);
    let basis = full_basis(spec);
    let elems: Vec<DPElement> = basis.iter().map(|m| DPElement::monomial(spec, m.clone(), 1)).collect();
    for (k, a) in elems.iter().enumerate() {
        for b in &elems[k..] {
            if top_weight(a) + top_weight(b) > n {
                continue;
            }
            let d_ab = universal_derivation(&(a * b));
            for &p in &primes {
                report.check(PHI_KILLS_D_PRODUCT, d_ab.phi_n(p).is_zero(), || format!("p = {p}, a = {a}, b = {b}"));
            }
        }
        let da = universal_derivation(a);
        for &p in &primes {
            let lhs = universal_derivation(&divided_power(p, a)).phi_n(p);
            report.check(PHI_OF_D_GAMMA_SAME, lhs == da.phi_n(p).phi_n(p), || format!("p = {p}, a = {a}"));
            for &q in primes.iter().filter(|&&q| q != p) {
                let v = universal_derivation(&divided_power(q, a)).phi_n(p);
                report.check(PHI_KILLS_D_GAMMA_OTHER, v.is_zero(), || format!("p = {p}, q = {q}, a = {a}"));
            }
        }
    }
    report
}

/// The `U(A)`-map `f` with `s = f o d`, determined by `f(dx_i) = s(x_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub images: Vec<ModuleVector>,
    /// `f(d mu) = s(mu)` for every basis monomial.
    pub agrees: bool,
    /// No other choice of `f(dx_i)` satisfies the linear system.
    pub unique: bool,
}

/// Factors a derivation table through `d`, then checks uniqueness by
/// computing the kernel of `(y_i) -> (sum_i (d mu)_i . y_i)_mu` modulo the
/// annihilators of `M`.
pub fn factor_through_omega(s: &DerivationTable, module: &UModule) -> Factorization {
    let spec = module.spec().clone();
    let k = spec.generator_count();
    let dim = module.dim();
    let zero = module.zero_vector();
    let images: Vec<ModuleVector> = (0..k)
        .map(|i| s.get(&DPMonomial::gamma(i, 1)).cloned().unwrap_or_else(|| zero.clone()))
        .collect();
    let basis = full_basis(&spec);
    let ds: Vec<OmegaElement> =
        basis.iter().map(|m| universal_derivation(&DPElement::monomial(&spec, m.clone(), 1))).collect();
    let agrees = basis.iter().zip(&ds).all(|(m, d)| {
        let want = s.get(m).cloned().unwrap_or_else(|| zero.clone());
        module.is_zero(&module.sub(&apply_omega_map(module, &images, d), &want))
    });

    // columns: unknown coordinates y_{i,j}, then one slack column per torsion target row
    let unknowns = k * dim;
    let mut columns: Vec<Vec<BigInt>> = Vec::with_capacity(unknowns);
    for i in 0..k {
        for j in 0..dim {
            let mut trial = vec![zero.clone(); k];
            trial[i] = module.basis_vector(j);
            columns.push(ds.iter().flat_map(|d| apply_omega_map(module, &trial, d)).collect());
        }
    }
    let rows = basis.len() * dim;
    let slack: Vec<(usize, BigInt)> =
        (0..rows).map(|r| (r, module.order(r % dim))).filter(|(_, d)| !d.is_zero()).collect();
    let entries: Vec<Vec<BigInt>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigInt> = columns.iter().map(|c| c[r].clone()).collect();
            row.extend(slack.iter().map(|(sr, d)| if *sr == r { -d.clone() } else { BigInt::zero() }));
            row
        })
        .collect();
    let ker = kernel(&IntegerMatrix::new(entries, unknowns + slack.len()));
    let unique = ker.iter().all(|v| {
        (0..unknowns).all(|c| {
            let d = module.order(c % dim);
            if d.is_zero() {
                v[c].is_zero()
            } else {
                (&v[c] % &d).is_zero()
            }
        })
    });
    Factorization { images, agrees, unique }
}

/// Which sign the `g_i(a) phi_j (x) a` terms carry in the divided power
/// relations of the presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationSign {
    /// `1 (x) g_n a - phi_n (x) a - sum g_i(a) phi_j (x) a`, matching the
    /// derivation law.
    Minus,
    /// `1 (x) g_n a - phi_n (x) a + sum g_i(a) phi_j (x) a`.
    Plus,
}

/// One weight of `(U(A) (x) A)/S`: the generator labels and the relation rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationSlice {
    pub weight: u64,
    pub relations: IntegerMatrix,
}

impl PresentationSlice {
    pub fn generators(&self) -> &[String] {
        &self.relations.col_labels
    }

    pub fn invariant_factors(&self) -> InvariantFactors {
        InvariantFactors::cokernel(&self.relations.entries, self.relations.cols)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaPresentation {
    pub slices: Vec<PresentationSlice>,
}

type TensorColumn = (DPMonomial, PhiMonomial, Option<DPMonomial>);

/// `Z`-basis of the weight-`w` part of `U(A) (x) A` with additive orders.
fn tensor_generators(spec: &AlgebraSpec, w: u64) -> Vec<(TensorColumn, BigInt)> {
    let ring = spec.ring();
    let phis = u0_basis_up_to(w, ring);
    let mut out = Vec::new();
    for k in 1..=w {
        for mu in basis_of_weight(spec, k).expect("below truncation") {
            for (phi, ann) in &phis {
                let top = phi.degree() * k;
                if top > w {
                    continue;
                }
                let order = ring.effective_annihilator(ann);
                if top == w {
                    out.push(((mu.clone(), *phi, None), order));
                } else {
                    for b in basis_of_weight(spec, w - top).expect("below truncation") {
                        out.push(((mu.clone(), *phi, Some(b)), order.clone()));
                    }
                }
            }
        }
    }
    out
}

fn homogeneous_weight(t: &TensorElement) -> Option<u64> {
    let spec = t.spec();
    t.basis_terms()
        .first()
        .map(|(mu, phi, b, _)| b.as_ref().map_or(0, |b| b.weight(spec)) + phi.degree() * mu.weight(spec))
}

/// The presentation `(U(A) (x) A)/S` with the sign fixed by the derivation
/// law.
pub fn presentation_of_omega(spec: &Arc<AlgebraSpec>) -> OmegaPresentation {
    presentation_with_sign(spec, RelationSign::Minus)
}

/// `S` is generated by `a (x) b - 1 (x) ab + b (x) a` on basis pairs and the
/// divided power relations on basis monomials, then closed under left
/// multiplication by `U(A)` basis elements up to the truncation.
pub fn presentation_with_sign(spec: &Arc<AlgebraSpec>, sign: RelationSign) -> OmegaPresentation {
    let n = spec.truncation();
    let basis = full_basis(spec);
    let alg = |m: &DPMonomial| DPElement::monomial(spec, m.clone(), 1);
    let one_tensor = |a: &DPElement| {
        let mut t = TensorElement::zero(spec);
        for (m, c) in a.terms() {
            t.add_term(m.clone(), EnvelopeElement::scalar(spec, c.clone()));
        }
        t
    };

    let mut seeds: Vec<(String, TensorElement)> = Vec::new();
    for (k, mu) in basis.iter().enumerate() {
        for nu in &basis[k..] {
            if mu.weight(spec) + nu.weight(spec) > n {
                continue;
            }
            let r = &(&TensorElement::term(nu.clone(), EnvelopeElement::from_algebra(&alg(mu)))
                - &one_tensor(&(&alg(mu) * &alg(nu))))
                + &TensorElement::term(mu.clone(), EnvelopeElement::from_algebra(&alg(nu)));
            seeds.push((format!("leibniz({mu}, {nu})"), r));
        }
    }
    for mu in &basis {
        let a = alg(mu);
        for m in 2..=n / mu.weight(spec) {
            let mut r = one_tensor(&divided_power(m, &a));
            if let Some(phi) = phi_of(m) {
                r = &r - &TensorElement::term(mu.clone(), EnvelopeElement::phi(spec, phi));
            }
            for j in 1..m {
                let Some(phi) = phi_of(j) else { continue };
                let coeff = AugmentedElement::from_algebra(divided_power(m - j, &a));
                let t = TensorElement::term(mu.clone(), EnvelopeElement::term(spec, coeff, phi));
                r = match sign {
                    RelationSign::Minus => &r - &t,
                    RelationSign::Plus => &r + &t,
                };
            }
            seeds.push((format!("gamma{m}({mu})"), r));
        }
    }

    // closure under U(A): every (b (x) phi) r with b = 1 or a basis monomial
    let mut by_weight: BTreeMap<u64, Vec<(String, TensorElement)>> = BTreeMap::new();
    let phis = u0_basis_up_to(n, spec.ring());
    for (label, r) in seeds {
        let Some(w) = homogeneous_weight(&r) else { continue };
        for (phi, _) in &phis {
            let top = phi.degree() * w;
            if top > n {
                continue;
            }
            let mut coeffs: Vec<(String, AugmentedElement)> = vec![(String::new(), AugmentedElement::scalar(spec, 1))];
            for extra in 1..=n - top {
                for b in basis_of_weight(spec, extra).expect("below truncation") {
                    coeffs.push((format!("{b}*"), AugmentedElement::from_algebra(alg(&b))));
                }
            }
            for (prefix, c) in coeffs {
                let u = EnvelopeElement::term(spec, c, *phi);
                let moved = r.left_mul(&u);
                let Some(wt) = homogeneous_weight(&moved) else { continue };
                let phi_label = if *phi == PhiMonomial::Unit { String::new() } else { format!("{phi}*") };
                by_weight.entry(wt).or_default().push((format!("{prefix}{phi_label}{label}"), moved));
            }
        }
    }

    let slices = (1..=n)
        .map(|w| {
            let gens = tensor_generators(spec, w);
            let index: BTreeMap<&TensorColumn, usize> = gens.iter().enumerate().map(|(i, (c, _))| (c, i)).collect();
            let mut rows = Vec::new();
            let mut labels = Vec::new();
            for (label, r) in by_weight.remove(&w).unwrap_or_default() {
                let mut row = vec![BigInt::zero(); gens.len()];
                for (mu, phi, b, c) in r.basis_terms() {
                    row[index[&(mu, phi, b)]] += c;
                }
                rows.push(row);
                labels.push(label);
            }
            for (i, (_, order)) in gens.iter().enumerate() {
                if !order.is_zero() {
                    let mut row = vec![BigInt::zero(); gens.len()];
                    row[i] = order.clone();
                    rows.push(row);
                    labels.push(format!("order({i})"));
                }
            }
            let col_labels = gens
                .iter()
                .map(|((mu, phi, b), _)| {
                    let mut parts = Vec::new();
                    if let Some(b) = b {
                        parts.push(b.to_string());
                    }
                    if *phi != PhiMonomial::Unit {
                        parts.push(phi.to_string());
                    }
                    mu.attach((!parts.is_empty()).then(|| parts.join("*")))
                })
                .collect();
            let cols = gens.len();
            PresentationSlice { weight: w, relations: IntegerMatrix::new(rows, cols).with_labels(labels, col_labels) }
        })
        .collect();
    OmegaPresentation { slices }
}

/// One summand `R/annihilator` of `A/A^2`, spanned by `g_n(x_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSummand {
    pub weight: u64,
    pub generator: usize,
    /// `0` for `R` itself (the class of `x_i`), `p` for `g_{p^e}(x_i)`.
    pub annihilator: BigInt,
}

/// The indecomposables `A/A^2 = U(0) (x) V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QModuleDescription {
    pub ring: Ring,
    pub summands: Vec<QSummand>,
}

impl QModuleDescription {
    pub fn at_weight(&self, w: u64) -> Vec<&QSummand> {
        self.summands.iter().filter(|s| s.weight == w).collect()
    }

    pub fn invariant_factors(&self, w: u64) -> InvariantFactors {
        let orders: Vec<BigInt> =
            self.at_weight(w).iter().map(|s| self.ring.effective_annihilator(&s.annihilator)).collect();
        InvariantFactors::from_orders(&orders)
    }
}

/// Closed form for `A/A^2`: `x_i` free in weight `w_i`, and `g_{p^e}(x_i)`
/// of order `p` in weight `p^e w_i` whenever `R/p` is nonzero.
pub fn indecomposables(spec: &AlgebraSpec) -> QModuleDescription {
    let n = spec.truncation();
    let ring = spec.ring().clone();
    let mut summands = Vec::new();
    for i in 0..spec.generator_count() {
        let wi = spec.generator_weight(i);
        for m in 1..=n / wi {
            let ann = match phi_of(m) {
                Some(PhiMonomial::Unit) => BigInt::zero(),
                Some(PhiMonomial::Phi { p, .. }) if ring.phi_modulus(p) > 1 => BigInt::from(p),
                _ => continue,
            };
            summands.push(QSummand { weight: m * wi, generator: i, annihilator: ann });
        }
    }
    summands.sort_by_key(|s| (s.weight, s.generator));
    QModuleDescription { ring, summands }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpcore::gamma_gen;

    fn spec(ring: Ring, rank: usize, n: u64) -> Arc<AlgebraSpec> {
        AlgebraSpec::uniform(ring, rank, n).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn derivative_examples() {
        let s = spec(Ring::Integers, 2, 4);
        let x = gamma_gen(&s, 0, 1);
        let y = gamma_gen(&s, 1, 1);
        assert_eq!(universal_derivation(&x), dx(&s, 0));
        assert_eq!(universal_derivation(&gamma_gen(&s, 0, 2)).to_string(), "x1*dx1 + phi2*dx1");
        assert_eq!(
            universal_derivation(&gamma_gen(&s, 0, 4)).to_string(),
            "g3(x1)*dx1 + g2(x1)*phi2*dx1 + x1*phi3*dx1 + phi2^2*dx1"
        );
        assert_eq!(universal_derivation(&(&x * &y)).to_string(), "x2*dx1 + x1*dx2");
        assert_eq!(universal_derivation(&x.scale(&BigInt::from(-3))).to_string(), "-3*dx1");
    }

    #[test]
    fn phi_coefficients_reduce_in_derivatives() {
        // d(g_2(3x)) = 9 d g_2(x): the phi_2 coefficient 9 reduces to 1
        let s = spec(Ring::Integers, 1, 4);
        let three_x = gamma_gen(&s, 0, 1).scale(&BigInt::from(3));
        assert_eq!(universal_derivation(&divided_power(2, &three_x)).to_string(), "9*x1*dx1 + phi2*dx1");
        // over Z/2 the phi_3 term of d g_4 disappears
        let s = spec(Ring::integers_mod(2).unwrap(), 1, 4);
        assert_eq!(universal_derivation(&gamma_gen(&s, 0, 4)).to_string(), "g3(x1)*dx1 + g2(x1)*phi2*dx1 + phi2^2*dx1");
    }

    #[test]
    fn free_basis_slices() {
        let s = spec(Ring::Integers, 1, 6);
        let slices = omega_free_basis(&s);
        let show = |w: usize| -> Vec<(String, i64)> {
            slices[w - 1]
                .elements
                .iter()
                .map(|e| (e.to_string(), i64::try_from(&e.annihilator).unwrap()))
                .collect()
        };
        assert_eq!(show(1), vec![("dx1".to_string(), 0)]);
        assert_eq!(show(2), vec![("x1*dx1".to_string(), 0), ("phi2*dx1".to_string(), 2)]);
        assert_eq!(
            show(6),
            vec![
                ("g5(x1)*dx1".to_string(), 0),
                ("g4(x1)*phi2*dx1".to_string(), 2),
                ("g3(x1)*phi3*dx1".to_string(), 3),
                ("g2(x1)*phi2^2*dx1".to_string(), 2),
                ("x1*phi5*dx1".to_string(), 5),
            ]
        );
        assert_eq!(slices[5].invariant_factors(s.ring()), InvariantFactors(big(&[2, 30, 0])));
        for slice in &slices {
            assert!(slice.elements.iter().all(|e| e.weight(&s) == slice.weight));
        }
    }

    #[test]
    fn inversion_formula() {
        let s = spec(Ring::Integers, 1, 12);
        let x = gamma_gen(&s, 0, 1);
        assert_eq!(phi_inversion(2, &x).to_string(), "phi2*dx1");
        assert_eq!(phi_inversion(4, &x).to_string(), "phi2^2*dx1");
        for n in 2..=12 {
            let expected = match phi_of(n) {
                Some(phi) => OmegaElement::term(0, EnvelopeElement::phi(&s, phi)),
                None => OmegaElement::zero(&s),
            };
            assert_eq!(phi_inversion(n, &x), expected, "n = {n}");
        }
    }

    #[test]
    fn derivation_laws_for_d() {
        for ring in [Ring::Integers, Ring::integers_mod(4).unwrap(), Ring::integers_mod(6).unwrap()] {
            for rank in 1..=2 {
                let s = spec(ring.clone(), rank, 6);
                let report = check_universal_derivation(&s, 60, 7);
                assert!(report.passed(), "{ring} rank {rank}: {report:?}");
            }
        }
    }

    #[test]
    fn phi_identities_small() {
        let report = remark_identities(&spec(Ring::Integers, 2, 5));
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.records.len(), 3);
    }

    #[test]
    fn omega_module_is_a_beck_module() {
        let s = spec(Ring::Integers, 1, 5);
        let omega = OmegaModule::new(&s);
        omega.module.validate().unwrap();
        let report = crate::beck::verify_beck_axioms(&omega.module, 40, 3);
        assert!(report.passed(), "{report:?}");
        let d = omega.universal_table();
        let report = is_dp_derivation(&d, &omega.module, 100, 5);
        assert!(report.passed(), "{report:?}");
        let w = universal_derivation(&gamma_gen(&s, 0, 4));
        assert_eq!(omega.element(&omega.coordinates(&w)), w);
    }

    #[test]
    fn corrupted_derivation_is_caught() {
        let s = spec(Ring::Integers, 1, 6);
        let omega = OmegaModule::new(&s);
        let mut d = omega.universal_table();
        let g2 = DPMonomial::gamma(0, 2);
        let bumped = omega.module.add(&d[&g2], &omega.coordinates(&dx(&s, 0).left_mul_algebra(&gamma_gen(&s, 0, 1))));
        d.insert(g2, bumped);
        let report = is_dp_derivation(&d, &omega.module, 200, 11);
        assert_eq!(report.status(DERIVATION_GAMMA), Some(crate::laws::Status::Fail));
    }

    #[test]
    fn derivations_factor_through_d() {
        let s = spec(Ring::Integers, 2, 4);
        let cyclic = UModule::cyclic(&s, 2, &[(2, 1)]);
        let u0 = UModule::trivial_u0(&s, 1, 4);
        let omega = OmegaModule::new(&s);
        for module in [cyclic, u0, omega.module.clone()] {
            let images: Vec<ModuleVector> = (0..2).map(|i| module.basis_vector(i % module.dim())).collect();
            let s_laws = derivation_from_generators(&module, &images);
            assert!(is_dp_derivation(&s_laws, &module, 80, 1).passed());
            assert_eq!(s_laws, compose_with_universal(&module, &images));
            let f = factor_through_omega(&s_laws, &module);
            assert!(f.agrees && f.unique, "{f:?}");
            assert_eq!(f.images, images);
        }
        // d itself factors through the identity of Omega
        let f = factor_through_omega(&omega.universal_table(), &omega.module);
        assert!(f.agrees && f.unique);
    }

    #[test]
    fn presentation_matches_closed_form() {
        for ring in [Ring::Integers, Ring::integers_mod(6).unwrap()] {
            let s = spec(ring.clone(), 1, 6);
            let pres = presentation_of_omega(&s);
            for (slice, closed) in pres.slices.iter().zip(omega_free_basis(&s)) {
                assert_eq!(slice.invariant_factors(), closed.invariant_factors(&ring), "{ring} weight {}", slice.weight);
            }
        }
        let s = spec(Ring::Integers, 1, 3);
        let pres = presentation_of_omega(&s);
        assert!(pres.slices[0].relations.rows() == 0);
        assert_eq!(pres.slices[1].invariant_factors(), InvariantFactors(big(&[2, 0])));
        assert_eq!(pres.slices[2].invariant_factors(), InvariantFactors(big(&[6, 0])));
        // with the opposite sign x dx becomes torsion already in weight 2
        let plus = presentation_with_sign(&s, RelationSign::Plus);
        assert_eq!(plus.slices[1].invariant_factors(), InvariantFactors(big(&[2, 4])));
        assert_ne!(plus.slices[2].invariant_factors(), InvariantFactors(big(&[6, 0])));
    }

    #[test]
    fn presentation_rank_two() {
        let s = spec(Ring::Integers, 2, 4);
        let pres = presentation_of_omega(&s);
        for (slice, closed) in pres.slices.iter().zip(omega_free_basis(&s)) {
            assert_eq!(slice.invariant_factors(), closed.invariant_factors(s.ring()));
            assert_eq!(slice.generators().len(), slice.relations.cols);
        }
    }

    #[test]
    fn indecomposable_tables() {
        let q = indecomposables(&spec(Ring::Integers, 1, 12));
        let table: Vec<(u64, i64)> =
            q.summands.iter().map(|s| (s.weight, i64::try_from(&s.annihilator).unwrap())).collect();
        assert_eq!(table, vec![(1, 0), (2, 2), (3, 3), (4, 2), (5, 5), (7, 7), (8, 2), (9, 3), (11, 11)]);
        for w in [6, 10, 12] {
            assert!(q.invariant_factors(w).is_trivial());
        }
        let q = indecomposables(&spec(Ring::Integers, 1, 1));
        assert_eq!(q.summands.len(), 1);
        let q = indecomposables(&spec(Ring::integers_mod(2).unwrap(), 2, 3));
        assert_eq!(q.invariant_factors(1), InvariantFactors(big(&[2, 2])));
        assert_eq!(q.at_weight(2).len(), 2);
        assert!(q.at_weight(3).is_empty());
    }
}
