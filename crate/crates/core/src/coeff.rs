//! Coefficient rings and the integer coefficients appearing in the divided
//! power identities.
//!
//! Everything is computed over arbitrary-precision integers first and only
//! reduced at the end, so composite moduli are handled correctly even when a
//! denominator shares a factor with the modulus.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoeffError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(BigInt),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
}

/// The base ring: either the integers or a residue ring `Z/m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ring {
    Integers,
    IntegersMod(BigInt),
}

impl Ring {
    pub fn integers_mod(m: impl Into<BigInt>) -> Result<Ring, CoeffError> {
        let m = m.into();
        if m < BigInt::from(2) {
            return Err(CoeffError::BadModulus(m));
        }
        Ok(Ring::IntegersMod(m))
    }

    pub fn modulus(&self) -> Option<&BigInt> {
        match self {
            Ring::Integers => None,
            Ring::IntegersMod(m) => Some(m),
        }
    }

    /// Canonical representative: unchanged over `Z`, in `[0, m)` over `Z/m`.
    pub fn reduce(&self, x: &BigInt) -> BigInt {
        match self {
            Ring::Integers => x.clone(),
            Ring::IntegersMod(m) => x.mod_floor(m),
        }
    }

    pub fn reduce_in_place(&self, x: &mut BigInt) {
        if let Ring::IntegersMod(m) = self {
            if x.is_negative() || &*x >= m {
                *x = x.mod_floor(m);
            }
        }
    }

    /// Additive order of the torsion summand `R/d` as an abelian group, with
    /// `0` meaning infinite. `d = 0` denotes a free summand.
    pub fn effective_annihilator(&self, d: &BigInt) -> BigInt {
        match self {
            Ring::Integers => d.abs(),
            Ring::IntegersMod(m) => d.gcd(m),
        }
    }

    /// The characteristic-`p` coefficient modulus for a `phi_p` term: `p`
    /// over `Z`, `gcd(p, m)` over `Z/m` (1 means the term dies).
    pub fn phi_modulus(&self, p: u64) -> u64 {
        match self {
            Ring::Integers => p,
            Ring::IntegersMod(m) => BigInt::from(p).gcd(m).to_u64().unwrap_or(1),
        }
    }

    pub fn scalar(&self, value: impl Into<BigInt>) -> Scalar {
        Scalar::new(value.into(), self.clone())
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::IntegersMod(m) => write!(f, "Z/{m}"),
        }
    }
}

/// A ring element in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    value: BigInt,
    ring: Ring,
}

impl Scalar {
    pub fn new(value: BigInt, ring: Ring) -> Scalar {
        let value = ring.reduce(&value);
        Scalar { value, ring }
    }

    pub fn one(ring: &Ring) -> Scalar {
        Scalar::new(BigInt::one(), ring.clone())
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check_ring(other)?;
        Ok(Scalar::new(&self.value + &other.value, self.ring.clone()))
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check_ring(other)?;
        Ok(Scalar::new(&self.value * &other.value, self.ring.clone()))
    }

    fn check_ring(&self, other: &Scalar) -> Result<(), CoeffError> {
        if self.ring != other.ring {
            return Err(CoeffError::RingMismatch(self.ring.clone(), other.ring.clone()));
        }
        Ok(())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `r^n` in the ring of `r`, with `r^0 = 1`.
pub fn scalar_pow(r: &Scalar, n: u64) -> Scalar {
    Scalar::new(pow_in(&r.ring, &r.value, n), r.ring.clone())
}

/// `r^n` reduced in `ring`, using modular exponentiation over `Z/m`.
pub fn pow_in(ring: &Ring, r: &BigInt, n: u64) -> BigInt {
    match ring {
        Ring::Integers => num_traits::pow(r.clone(), n as usize),
        Ring::IntegersMod(m) => r.mod_floor(m).modpow(&BigInt::from(n), m),
    }
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

const PASCAL_ROWS: usize = 64;

fn pascal() -> &'static [[u64; PASCAL_ROWS]; PASCAL_ROWS] {
    static TABLE: OnceLock<Box<[[u64; PASCAL_ROWS]; PASCAL_ROWS]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Box::new([[0u64; PASCAL_ROWS]; PASCAL_ROWS]);
        for n in 0..PASCAL_ROWS {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1] + t[n - 1][k];
            }
        }
        t
    })
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    if (n as usize) < PASCAL_ROWS {
        return BigInt::from(pascal()[n as usize][k as usize]);
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// `(m+n)! / (m! n!)`, the coefficient in `g_m(a) g_n(a) = C g_{m+n}(a)`.
pub fn gamma_product_coeff(m: u64, n: u64) -> BigInt {
    factorial(m + n) / (factorial(m) * factorial(n))
}

/// `(mn)! / (m! (n!)^m)`, the coefficient in `g_m(g_n(a)) = C g_{mn}(a)`.
pub fn gamma_compose_coeff(m: u64, n: u64) -> BigInt {
    let denom = factorial(m) * num_traits::pow(factorial(n), m as usize);
    let (q, r) = factorial(m * n).div_rem(&denom);
    debug_assert!(r.is_zero());
    q
}

/// gcd of the binomial coefficients `C(n, i)` for `0 < i < n`.
pub fn gcd_middle_binomials(n: u64) -> BigInt {
    assert!(n >= 2, "gcd_middle_binomials needs n >= 2");
    (1..n).fold(BigInt::zero(), |g, i| g.gcd(&binomial(n, i)))
}

/// `(kp)! / (k! (p!)^k)` reduced mod `p`.
pub fn cartan_congruence_residue(k: u64, p: u64) -> Result<Scalar, CoeffError> {
    if !is_prime(p) {
        return Err(CoeffError::NotPrime(p));
    }
    let ring = Ring::integers_mod(p)?;
    Ok(Scalar::new(gamma_compose_coeff(k, p), ring))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some((p, e))` when `n = p^e` with `p` prime and `e >= 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut rest = n;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}
