//! Beck modules over a DP algebra `A`, given as action tables on a finite
//! basis, and the square-zero extension `A (+) M` with its divided powers.
//!
//! A module is `(+)_i R/d_i` (`d_i = 0` for a free summand). `A` acts through
//! one matrix per basis monomial and each `phi_p` through one matrix, applied
//! after raising coordinates to the `p`-th power so that
//! `phi_p(r x) = r^p phi_p(x)` holds by construction.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coeff::{pow_in, prime_power, Ring};
use crate::dpcore::{divided_power, mul_monomials, AlgebraSpec, DPElement, DPMonomial};
use crate::envelope::{u0_basis_up_to, AugmentedElement, EnvelopeElement, PhiMonomial};
use crate::laws::{check_axioms_at, draw_index, random_element, DpAlgebra, Report};

pub type ModuleVector = Vec<BigInt>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("matrix has dimension {got}, module has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("column {col} of {table} is not killed by its annihilator")]
    IllDefinedColumn { table: String, col: usize },
    #[error("p * phi_{p} is nonzero on basis vector {col}")]
    PhiNotTorsion { p: u64, col: usize },
    #[error("phi_{p} does not kill {mono} * e_{col}")]
    PhiOnMultiple { p: u64, mono: String, col: usize },
    #[error("action of {left} * {right} disagrees with the action of their product")]
    NotMultiplicative { left: String, right: String },
    #[error("modules over different algebras")]
    SpecMismatch,
}

/// Sparse square integer matrix acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionMatrix {
    cols: Vec<BTreeMap<usize, BigInt>>,
}

impl ActionMatrix {
    pub fn zero(dim: usize) -> ActionMatrix {
        ActionMatrix { cols: vec![BTreeMap::new(); dim] }
    }

    pub fn identity(dim: usize) -> ActionMatrix {
        let mut m = ActionMatrix::zero(dim);
        for i in 0..dim {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// From dense rows.
    pub fn from_rows(rows: &[Vec<i64>]) -> ActionMatrix {
        let mut m = ActionMatrix::zero(rows.len());
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, BigInt::from(v));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn set(&mut self, row: usize, col: usize, v: BigInt) {
        if v.is_zero() {
            self.cols[col].remove(&row);
        } else {
            self.cols[col].insert(row, v);
        }
    }

    pub fn get(&self, row: usize, col: usize) -> BigInt {
        self.cols[col].get(&row).cloned().unwrap_or_default()
    }

    pub fn column(&self, col: usize) -> ModuleVector {
        let mut v = vec![BigInt::zero(); self.dim()];
        for (r, x) in &self.cols[col] {
            v[*r] = x.clone();
        }
        v
    }

    pub fn apply(&self, v: &[BigInt]) -> ModuleVector {
        let mut out = vec![BigInt::zero(); self.dim()];
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (r, a) in &self.cols[c] {
                out[*r] += a * x;
            }
        }
        out
    }
}

/// A finitely generated Beck module over the free truncated DP algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UModule {
    spec: Arc<AlgebraSpec>,
    annihilators: Vec<BigInt>,
    a_action: BTreeMap<DPMonomial, ActionMatrix>,
    phi_action: BTreeMap<u64, ActionMatrix>,
    labels: Vec<String>,
}

impl UModule {
    /// Builds a module from its tables without validation; see [`UModule::validate`].
    pub fn new(
        spec: &Arc<AlgebraSpec>,
        annihilators: Vec<BigInt>,
        a_action: BTreeMap<DPMonomial, ActionMatrix>,
        phi_action: BTreeMap<u64, ActionMatrix>,
    ) -> Result<UModule, ModuleError> {
        let dim = annihilators.len();
        for m in a_action.values().chain(phi_action.values()) {
            if m.dim() != dim {
                return Err(ModuleError::Dimension { expected: dim, got: m.dim() });
            }
        }
        let labels = (0..dim).map(|i| format!("e{}", i + 1)).collect();
        Ok(UModule { spec: spec.clone(), annihilators, a_action, phi_action, labels })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> UModule {
        assert_eq!(labels.len(), self.dim());
        self.labels = labels;
        self
    }

    pub fn zero(spec: &Arc<AlgebraSpec>) -> UModule {
        UModule::new(spec, Vec::new(), BTreeMap::new(), BTreeMap::new()).expect("empty tables")
    }

    /// The cyclic module `R/d` on which `A` acts trivially and `phi_p` is
    /// multiplication by the given constant.
    pub fn cyclic(spec: &Arc<AlgebraSpec>, d: i64, phi: &[(u64, i64)]) -> UModule {
        let phi_action = phi.iter().map(|&(p, c)| (p, ActionMatrix::from_rows(&[vec![c]]))).collect();
        UModule::new(spec, vec![BigInt::from(d)], BTreeMap::new(), phi_action).expect("1x1 tables")
    }

    /// `U(0) (x) V` for `V = R^rank`, truncated above phi-degree `cap`, with `A`
    /// acting through the augmentation (i.e. by zero).
    pub fn trivial_u0(spec: &Arc<AlgebraSpec>, rank: usize, cap: u64) -> UModule {
        let phis = u0_basis_up_to(cap, spec.ring());
        let basis: Vec<(usize, PhiMonomial, BigInt)> = (0..rank)
            .flat_map(|v| phis.iter().map(move |(phi, d)| (v, *phi, d.clone())))
            .collect();
        let index: BTreeMap<(usize, PhiMonomial), usize> =
            basis.iter().enumerate().map(|(i, (v, phi, _))| ((*v, *phi), i)).collect();
        let mut phi_action = BTreeMap::new();
        for p in crate::coeff::primes_up_to(cap) {
            let mut m = ActionMatrix::zero(basis.len());
            for (col, (v, phi, _)) in basis.iter().enumerate() {
                let Some(next) = phi.mul(&PhiMonomial::Phi { p, e: 1 }) else { continue };
                if let Some(&row) = index.get(&(*v, next)) {
                    m.set(row, col, BigInt::one());
                }
            }
            phi_action.insert(p, m);
        }
        let labels = basis.iter().map(|(v, phi, _)| format!("{phi}*v{}", v + 1)).collect();
        let annihilators = basis.into_iter().map(|(_, _, d)| d).collect();
        UModule::new(spec, annihilators, BTreeMap::new(), phi_action)
            .expect("consistent tables")
            .with_labels(labels)
    }

    pub fn direct_sum(&self, other: &UModule) -> Result<UModule, ModuleError> {
        if self.spec != other.spec {
            return Err(ModuleError::SpecMismatch);
        }
        let (n1, n2) = (self.dim(), other.dim());
        let glue = |a: Option<&ActionMatrix>, b: Option<&ActionMatrix>| {
            let mut m = ActionMatrix::zero(n1 + n2);
            if let Some(a) = a {
                for (c, col) in a.cols.iter().enumerate() {
                    for (r, v) in col {
                        m.set(*r, c, v.clone());
                    }
                }
            }
            if let Some(b) = b {
                for (c, col) in b.cols.iter().enumerate() {
                    for (r, v) in col {
                        m.set(r + n1, c + n1, v.clone());
                    }
                }
            }
            m
        };
        let monos: std::collections::BTreeSet<_> = self.a_action.keys().chain(other.a_action.keys()).cloned().collect();
        let a_action = monos
            .into_iter()
            .map(|mu| {
                let m = glue(self.a_action.get(&mu), other.a_action.get(&mu));
                (mu, m)
            })
            .collect();
        let primes: std::collections::BTreeSet<_> = self.phi_action.keys().chain(other.phi_action.keys()).copied().collect();
        let phi_action = primes
            .into_iter()
            .map(|p| (p, glue(self.phi_action.get(&p), other.phi_action.get(&p))))
            .collect();
        let annihilators = self.annihilators.iter().chain(&other.annihilators).cloned().collect();
        let labels = self.labels.iter().chain(&other.labels).cloned().collect();
        Ok(UModule::new(&self.spec, annihilators, a_action, phi_action)?.with_labels(labels))
    }

    pub fn spec(&self) -> &Arc<AlgebraSpec> {
        &self.spec
    }

    pub fn ring(&self) -> &Ring {
        self.spec.ring()
    }

    pub fn dim(&self) -> usize {
        self.annihilators.len()
    }

    pub fn annihilators(&self) -> &[BigInt] {
        &self.annihilators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn a_action(&self) -> &BTreeMap<DPMonomial, ActionMatrix> {
        &self.a_action
    }

    pub fn phi_action(&self) -> &BTreeMap<u64, ActionMatrix> {
        &self.phi_action
    }

    pub fn phi_action_mut(&mut self) -> &mut BTreeMap<u64, ActionMatrix> {
        &mut self.phi_action
    }

    pub fn a_action_mut(&mut self) -> &mut BTreeMap<DPMonomial, ActionMatrix> {
        &mut self.a_action
    }

    /// Additive order of basis vector `i` (`0` = infinite).
    pub fn order(&self, i: usize) -> BigInt {
        self.ring().effective_annihilator(&self.annihilators[i])
    }

    pub fn zero_vector(&self) -> ModuleVector {
        vec![BigInt::zero(); self.dim()]
    }

    pub fn basis_vector(&self, i: usize) -> ModuleVector {
        let mut v = self.zero_vector();
        v[i] = BigInt::one();
        v
    }

    pub fn reduce(&self, v: &[BigInt]) -> ModuleVector {
        v.iter()
            .enumerate()
            .map(|(i, x)| {
                let d = self.order(i);
                if d.is_zero() {
                    x.clone()
                } else {
                    x.mod_floor(&d)
                }
            })
            .collect()
    }

    pub fn is_zero(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn add(&self, x: &[BigInt], y: &[BigInt]) -> ModuleVector {
        self.reduce(&x.iter().zip(y).map(|(a, b)| a + b).collect::<Vec<_>>())
    }

    pub fn sub(&self, x: &[BigInt], y: &[BigInt]) -> ModuleVector {
        self.reduce(&x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>())
    }

    pub fn scale(&self, r: &BigInt, x: &[BigInt]) -> ModuleVector {
        self.reduce(&x.iter().map(|a| a * r).collect::<Vec<_>>())
    }

    /// `a . y`; monomials without a table act by zero.
    pub fn act(&self, a: &DPElement, y: &[BigInt]) -> ModuleVector {
        let mut out = self.zero_vector();
        for (mu, c) in a.terms() {
            if let Some(m) = self.a_action.get(mu) {
                for (o, v) in out.iter_mut().zip(m.apply(y)) {
                    *o += c * v;
                }
            }
        }
        self.reduce(&out)
    }

    pub fn act_augmented(&self, a: &AugmentedElement, y: &[BigInt]) -> ModuleVector {
        let scaled = self.scale(&a.scalar, y);
        self.add(&scaled, &self.act(&a.algebra, y))
    }

    /// `phi_p(y)`, semilinear: coordinates are raised to the `p`-th power first.
    pub fn phi(&self, p: u64, y: &[BigInt]) -> ModuleVector {
        match self.phi_action.get(&p) {
            None => self.zero_vector(),
            Some(m) => {
                let twisted: Vec<BigInt> = y.iter().map(|r| pow_in(self.ring(), r, p)).collect();
                self.reduce(&m.apply(&twisted))
            }
        }
    }

    /// `phi_n(y)`: identity for `n = 1`, `phi_p^e` for `n = p^e`, zero otherwise.
    pub fn phi_n(&self, n: u64, y: &[BigInt]) -> ModuleVector {
        if n == 1 {
            return self.reduce(y);
        }
        match prime_power(n) {
            None => self.zero_vector(),
            Some((p, e)) => (0..e).fold(self.reduce(y), |acc, _| self.phi(p, &acc)),
        }
    }

    pub fn phi_monomial(&self, phi: &PhiMonomial, y: &[BigInt]) -> ModuleVector {
        self.phi_n(phi.degree(), y)
    }

    /// Left action of `U(A)`: `(c (x) phi) . y = c . (phi . y)`.
    pub fn act_envelope(&self, u: &EnvelopeElement, y: &[BigInt]) -> ModuleVector {
        let mut out = self.zero_vector();
        for (phi, c) in u.terms() {
            let moved = self.phi_monomial(phi, y);
            out = self.add(&out, &self.act_augmented(c, &moved));
        }
        out
    }

    /// Checks the structural invariants of a `U(A)`-module.
    pub fn validate(&self) -> Result<(), ModuleError> {
        let dim = self.dim();
        let tables = self
            .a_action
            .iter()
            .map(|(mu, m)| (mu.to_string(), m))
            .chain(self.phi_action.iter().map(|(p, m)| (format!("phi_{p}"), m)));
        for (name, m) in tables {
            for col in 0..dim {
                let d = self.order(col);
                if !d.is_zero() && !self.is_zero(&self.scale(&d, &m.column(col))) {
                    return Err(ModuleError::IllDefinedColumn { table: name.clone(), col });
                }
            }
        }
        for &p in self.phi_action.keys() {
            for col in 0..dim {
                let image = self.phi(p, &self.basis_vector(col));
                if !self.is_zero(&self.scale(&BigInt::from(p), &image)) {
                    return Err(ModuleError::PhiNotTorsion { p, col });
                }
                for mu in self.a_action.keys() {
                    let a = DPElement::monomial(&self.spec, mu.clone(), 1);
                    let ay = self.act(&a, &self.basis_vector(col));
                    if !self.is_zero(&self.phi(p, &ay)) {
                        return Err(ModuleError::PhiOnMultiple { p, mono: mu.to_string(), col });
                    }
                }
            }
        }
        for (mu, m_mu) in &self.a_action {
            for (nu, m_nu) in &self.a_action {
                let product = match mul_monomials(&self.spec, mu, nu) {
                    Some((c, rho)) => DPElement::monomial(&self.spec, rho, c),
                    None => DPElement::zero(&self.spec),
                };
                for col in 0..dim {
                    let lhs = self.reduce(&m_mu.apply(&m_nu.apply(&self.basis_vector(col))));
                    let rhs = self.act(&product, &self.basis_vector(col));
                    if !self.is_zero(&self.sub(&lhs, &rhs)) {
                        return Err(ModuleError::NotMultiplicative { left: mu.to_string(), right: nu.to_string() });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn random_vector(&self, rng: &mut ChaCha8Rng) -> ModuleVector {
        let v: Vec<BigInt> = (0..self.dim()).map(|_| BigInt::from(rng.gen_range(-4i64..=4))).collect();
        self.reduce(&v)
    }
}

/// An element `(a, x)` of `A (+) M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemidirectElement {
    pub a: DPElement,
    pub x: ModuleVector,
}

/// The square-zero extension `A (+) M` as a DP algebra.
#[derive(Debug, Clone, Copy)]
pub struct Semidirect<'m> {
    pub module: &'m UModule,
}

impl<'m> Semidirect<'m> {
    pub fn new(module: &'m UModule) -> Semidirect<'m> {
        Semidirect { module }
    }

    pub fn element(&self, a: DPElement, x: ModuleVector) -> SemidirectElement {
        SemidirectElement { a, x: self.module.reduce(&x) }
    }
}

/// `(a, x)(b, y) = (ab, a y + b x)`.
pub fn semidirect_mul(module: &UModule, u: &SemidirectElement, v: &SemidirectElement) -> SemidirectElement {
    SemidirectElement {
        a: &u.a * &v.a,
        x: module.add(&module.act(&u.a, &v.x), &module.act(&v.a, &u.x)),
    }
}

/// `g_n(a, x) = (g_n a, phi_n x + sum_{i+j=n} g_i(a) phi_j(x))`, `i, j >= 1`.
pub fn semidirect_gamma(module: &UModule, n: u64, u: &SemidirectElement) -> SemidirectElement {
    assert!(n >= 1, "g_0 does not exist in a non-unital algebra");
    let mut x = module.phi_n(n, &u.x);
    if !u.a.is_zero() {
        for i in 1..n {
            let phi_j = module.phi_n(n - i, &u.x);
            if module.is_zero(&phi_j) {
                continue;
            }
            x = module.add(&x, &module.act(&divided_power(i, &u.a), &phi_j));
        }
    }
    SemidirectElement { a: divided_power(n, &u.a), x }
}

impl DpAlgebra for Semidirect<'_> {
    type Elem = SemidirectElement;

    fn ring(&self) -> &Ring {
        self.module.ring()
    }
    fn zero(&self) -> SemidirectElement {
        SemidirectElement { a: DPElement::zero(self.module.spec()), x: self.module.zero_vector() }
    }
    fn add(&self, u: &SemidirectElement, v: &SemidirectElement) -> SemidirectElement {
        SemidirectElement { a: &u.a + &v.a, x: self.module.add(&u.x, &v.x) }
    }
    fn scale(&self, r: &BigInt, u: &SemidirectElement) -> SemidirectElement {
        SemidirectElement { a: u.a.scale(r), x: self.module.scale(r, &u.x) }
    }
    fn mul(&self, u: &SemidirectElement, v: &SemidirectElement) -> SemidirectElement {
        semidirect_mul(self.module, u, v)
    }
    fn gamma(&self, n: u64, u: &SemidirectElement) -> SemidirectElement {
        semidirect_gamma(self.module, n, u)
    }
}

pub const PHI_KILLS_MULTIPLES: &str = "phi_p_kills_a_multiples";

fn index_bound(spec: &AlgebraSpec) -> u64 {
    spec.truncation().max(8)
}

/// Runs the full DP axiom suite on `A (+) M`, plus `phi_p(a y) = 0`.
pub fn verify_beck_axioms(module: &UModule, samples: usize, seed: u64) -> Report {
    use rand::SeedableRng;
    let spec = module.spec().clone();
    let alg = Semidirect::new(module);
    let max_n = index_bound(&spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new();
    let sample = |rng: &mut ChaCha8Rng| {
        let a = if rng.gen_bool(0.25) { DPElement::zero(&spec) } else { random_element(&spec, rng) };
        let x = module.random_vector(rng);
        alg.element(a, x)
    };
    let primes = crate::coeff::primes_up_to(max_n);
    for _ in 0..samples {
        let u = sample(&mut rng);
        let v = sample(&mut rng);
        let r = BigInt::from(rng.gen_range(-5i64..=5));
        let n = draw_index(&mut rng, max_n);
        let m = draw_index(&mut rng, max_n);
        check_axioms_at(&alg, &mut report, &u, &v, &r, m, n);

        let p = primes[rng.gen_range(0..primes.len())];
        let ay = module.act(&u.a, &v.x);
        report.check(PHI_KILLS_MULTIPLES, module.is_zero(&module.phi(p, &ay)), || {
            format!("p = {p}, a = {}, y = {:?}", u.a, v.x)
        });
    }
    report
}

/// A trivial-product DP algebra: a module whose divided powers are the
/// `phi_n`, optionally with some `g_n` replaced by an arbitrary table.
#[derive(Debug, Clone)]
pub struct AbelianStructure {
    pub module: UModule,
    pub overrides: BTreeMap<u64, ActionMatrix>,
}

impl AbelianStructure {
    pub fn new(module: UModule) -> AbelianStructure {
        AbelianStructure { module, overrides: BTreeMap::new() }
    }

    pub fn with_override(mut self, n: u64, m: ActionMatrix) -> AbelianStructure {
        self.overrides.insert(n, m);
        self
    }
}

impl DpAlgebra for AbelianStructure {
    type Elem = ModuleVector;

    fn ring(&self) -> &Ring {
        self.module.ring()
    }
    fn zero(&self) -> ModuleVector {
        self.module.zero_vector()
    }
    fn add(&self, a: &ModuleVector, b: &ModuleVector) -> ModuleVector {
        self.module.add(a, b)
    }
    fn scale(&self, r: &BigInt, a: &ModuleVector) -> ModuleVector {
        self.module.scale(r, a)
    }
    fn mul(&self, _: &ModuleVector, _: &ModuleVector) -> ModuleVector {
        self.module.zero_vector()
    }
    fn gamma(&self, n: u64, a: &ModuleVector) -> ModuleVector {
        match self.overrides.get(&n) {
            Some(m) => {
                let twisted: Vec<BigInt> = a.iter().map(|r| pow_in(self.ring(), r, n)).collect();
                self.module.reduce(&m.apply(&twisted))
            }
            None => self.module.phi_n(n, a),
        }
    }
}

pub const VANISHES_OFF_PRIME_POWERS: &str = "gamma_n_zero_unless_prime_power";
pub const GAMMA_P_ADDITIVE: &str = "gamma_p_additive";
pub const P_GAMMA_P_ZERO: &str = "p_gamma_p_zero";
pub const GAMMA_P_POWER: &str = "gamma_p^e_is_iterated_gamma_p";
pub const GAMMA_P_SEMILINEAR: &str = "gamma_p_semilinear";
pub const ADDITION_IS_DP_MAP: &str = "addition_is_dp_map";

/// Checks the structure theory of trivial-product DP algebras on sampled
/// elements, together with the generic axioms.
pub fn verify_abelian_structure(structure: &AbelianStructure, samples: usize, seed: u64) -> Report {
    use rand::SeedableRng;
    let module = &structure.module;
    let max_n = 16u64;
    let primes = crate::coeff::primes_up_to(max_n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new();
    for _ in 0..samples {
        let x = module.random_vector(&mut rng);
        let y = module.random_vector(&mut rng);
        let r = BigInt::from(rng.gen_range(-5i64..=5));
        let p = primes[rng.gen_range(0..primes.len())];

        for n in (2..=max_n).filter(|&n| prime_power(n).is_none()) {
            let g = structure.gamma(n, &x);
            report.check(VANISHES_OFF_PRIME_POWERS, module.is_zero(&g), || format!("n = {n}, x = {x:?}"));
        }
        let lhs = structure.gamma(p, &module.add(&x, &y));
        let rhs = module.add(&structure.gamma(p, &x), &structure.gamma(p, &y));
        report.check(GAMMA_P_ADDITIVE, lhs == rhs, || format!("p = {p}, x = {x:?}, y = {y:?}"));

        let gp = structure.gamma(p, &x);
        report.check(P_GAMMA_P_ZERO, module.is_zero(&module.scale(&BigInt::from(p), &gp)), || {
            format!("p = {p}, x = {x:?}")
        });

        let mut e = 1;
        while p.pow(e + 1) <= max_n {
            e += 1;
        }
        let e = rng.gen_range(1..=e);
        let direct = structure.gamma(p.pow(e), &x);
        let iterated = (0..e).fold(x.clone(), |acc, _| structure.gamma(p, &acc));
        report.check(GAMMA_P_POWER, direct == iterated, || format!("p = {p}, e = {e}, x = {x:?}"));

        let lhs = structure.gamma(p, &module.scale(&r, &x));
        let rhs = module.scale(&pow_in(module.ring(), &r, p), &structure.gamma(p, &x));
        report.check(GAMMA_P_SEMILINEAR, lhs == rhs, || format!("p = {p}, r = {r}, x = {x:?}"));

        // the sum map M x M -> M commutes with every g_n
        let n = draw_index(&mut rng, max_n);
        let lhs = structure.gamma(n, &module.add(&x, &y));
        let rhs = module.add(&structure.gamma(n, &x), &structure.gamma(n, &y));
        report.check(ADDITION_IS_DP_MAP, lhs == rhs, || format!("n = {n}, x = {x:?}, y = {y:?}"));

        let m = draw_index(&mut rng, max_n);
        check_axioms_at(structure, &mut report, &x, &y, &r, m, n);
    }
    report
}
