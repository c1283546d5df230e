//! JSON encoding of algebra and Omega elements.
//!
//! ```text
//! {"ring": "z" | {"zmod": M}, "trunc": N,
//!  "terms": [{"coeff": "-3", "monomial": [[i, e], ...]}, ...]}
//! ```
//!
//! Generator indices are 1-based. An Omega element lists one record per
//! `(dx_i, phi)` pair: `{"dx": i, "phi": "unit" | [p, e], "aug_scalar": "s",
//! "terms": [...]}` where the terms are the algebra part of its `A_+`
//! coefficient.

use std::sync::Arc;

use dpalg_core::coeff::Ring;
use dpalg_core::dpcore::{AlgebraSpec, DPElement, DPMonomial};
use dpalg_core::envelope::{AugmentedElement, EnvelopeElement, PhiMonomial};
use dpalg_core::kahler::OmegaElement;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZTag {
    #[serde(rename = "z")]
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitTag {
    #[serde(rename = "unit")]
    Unit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RingJson {
    Integers(ZTag),
    Mod { zmod: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiJson {
    Unit(UnitTag),
    Power(u64, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub monomial: Vec<(usize, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub ring: RingJson,
    pub trunc: u64,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaTermJson {
    pub dx: usize,
    pub phi: PhiJson,
    pub aug_scalar: String,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaJson {
    pub ring: RingJson,
    pub trunc: u64,
    pub terms: Vec<OmegaTermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("JSON describes {found} but the algebra is {expected}")]
    SpecMismatch { expected: String, found: String },
    #[error("bad coefficient {0:?}")]
    BadCoefficient(String),
    #[error("generator index {0} out of range")]
    BadGenerator(usize),
    #[error("monomial {0:?} must be nonempty with increasing generators and positive exponents")]
    BadMonomial(Vec<(usize, u64)>),
    #[error("phi exponent [{0}, {1}] is not a prime power phi")]
    BadPhi(u64, u32),
    #[error("modulus does not fit in 64 bits")]
    HugeModulus,
}

pub fn ring_json(ring: &Ring) -> Result<RingJson, JsonError> {
    Ok(match ring {
        Ring::Integers => RingJson::Integers(ZTag::Z),
        Ring::IntegersMod(m) => RingJson::Mod { zmod: m.to_u64().ok_or(JsonError::HugeModulus)? },
    })
}

fn terms_json(e: &DPElement) -> Vec<TermJson> {
    let spec = e.spec();
    let mut terms: Vec<_> = e.terms().iter().collect();
    terms.sort_by(|a, b| (a.0.weight(spec), a.0).cmp(&(b.0.weight(spec), b.0)));
    terms
        .into_iter()
        .map(|(m, c)| TermJson {
            coeff: c.to_string(),
            monomial: m.factors().iter().map(|&(i, e)| (i + 1, e)).collect(),
        })
        .collect()
}

pub fn element_json(e: &DPElement) -> Result<ElementJson, JsonError> {
    Ok(ElementJson { ring: ring_json(e.ring())?, trunc: e.spec().truncation(), terms: terms_json(e) })
}

pub fn omega_json(w: &OmegaElement) -> Result<OmegaJson, JsonError> {
    let spec = w.spec();
    let mut terms = Vec::new();
    for (i, u) in w.terms() {
        for (phi, c) in u.terms() {
            let phi = match *phi {
                PhiMonomial::Unit => PhiJson::Unit(UnitTag::Unit),
                PhiMonomial::Phi { p, e } => PhiJson::Power(p, e),
            };
            terms.push(OmegaTermJson {
                dx: i + 1,
                phi,
                aug_scalar: c.scalar.to_string(),
                terms: terms_json(&c.algebra),
            });
        }
    }
    Ok(OmegaJson { ring: ring_json(spec.ring())?, trunc: spec.truncation(), terms })
}

fn check_spec(ring: &RingJson, trunc: u64, spec: &AlgebraSpec) -> Result<(), JsonError> {
    let expected = (ring_json(spec.ring())?, spec.truncation());
    if expected != (ring.clone(), trunc) {
        return Err(JsonError::SpecMismatch {
            expected: format!("{} truncated at {}", spec.ring(), spec.truncation()),
            found: format!("{ring:?} truncated at {trunc}"),
        });
    }
    Ok(())
}

fn coefficient(s: &str) -> Result<BigInt, JsonError> {
    s.parse().map_err(|_| JsonError::BadCoefficient(s.to_string()))
}

fn element_from_terms(terms: &[TermJson], spec: &Arc<AlgebraSpec>) -> Result<DPElement, JsonError> {
    let mut out = DPElement::zero(spec);
    for t in terms {
        let mut factors = Vec::with_capacity(t.monomial.len());
        for &(i, e) in &t.monomial {
            if i == 0 || i > spec.generator_count() {
                return Err(JsonError::BadGenerator(i));
            }
            factors.push((i - 1, e));
        }
        let ordered = factors.windows(2).all(|w| w[0].0 < w[1].0);
        if factors.is_empty() || !ordered || factors.iter().any(|&(_, e)| e == 0) {
            return Err(JsonError::BadMonomial(t.monomial.clone()));
        }
        out.add_term(DPMonomial::new(factors), coefficient(&t.coeff)?);
    }
    Ok(out)
}

pub fn element_from_json(j: &ElementJson, spec: &Arc<AlgebraSpec>) -> Result<DPElement, JsonError> {
    check_spec(&j.ring, j.trunc, spec)?;
    element_from_terms(&j.terms, spec)
}

pub fn omega_from_json(j: &OmegaJson, spec: &Arc<AlgebraSpec>) -> Result<OmegaElement, JsonError> {
    check_spec(&j.ring, j.trunc, spec)?;
    let mut out = OmegaElement::zero(spec);
    for t in &j.terms {
        if t.dx == 0 || t.dx > spec.generator_count() {
            return Err(JsonError::BadGenerator(t.dx));
        }
        let phi = match t.phi {
            PhiJson::Unit(_) => PhiMonomial::Unit,
            PhiJson::Power(p, e) if e >= 1 && dpalg_core::coeff::is_prime(p) => PhiMonomial::Phi { p, e },
            PhiJson::Power(p, e) => return Err(JsonError::BadPhi(p, e)),
        };
        let coeff = AugmentedElement {
            scalar: spec.ring().reduce(&coefficient(&t.aug_scalar)?),
            algebra: element_from_terms(&t.terms, spec)?,
        };
        out = &out + &OmegaElement::term(t.dx - 1, EnvelopeElement::term(spec, coeff, phi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dpalg_core::dpcore::gamma_gen;
    use dpalg_core::kahler::universal_derivation;

    #[test]
    fn layout() {
        let spec = AlgebraSpec::uniform(Ring::Integers, 2, 6).unwrap();
        let e = &gamma_gen(&spec, 0, 2).scale(&BigInt::from(-3)) + &DPElement::generator(&spec, 1);
        let text = serde_json::to_string(&element_json(&e).unwrap()).unwrap();
        assert_eq!(
            text,
            r#"{"ring":"z","trunc":6,"terms":[{"coeff":"1","monomial":[[2,1]]},{"coeff":"-3","monomial":[[1,2]]}]}"#
        );
        let back: ElementJson = serde_json::from_str(&text).unwrap();
        assert_eq!(element_from_json(&back, &spec).unwrap(), e);

        let spec6 = AlgebraSpec::uniform(Ring::integers_mod(6).unwrap(), 1, 4).unwrap();
        let w = universal_derivation(&gamma_gen(&spec6, 0, 4));
        let text = serde_json::to_string(&omega_json(&w).unwrap()).unwrap();
        assert!(text.starts_with(r#"{"ring":{"zmod":6},"trunc":4,"terms":[{"dx":1,"phi":"unit""#), "{text}");
        assert!(text.contains(r#""phi":[2,1]"#));
        let back: OmegaJson = serde_json::from_str(&text).unwrap();
        assert_eq!(omega_from_json(&back, &spec6).unwrap(), w);
        assert!(matches!(omega_from_json(&back, &spec), Err(JsonError::SpecMismatch { .. })));
    }
}
