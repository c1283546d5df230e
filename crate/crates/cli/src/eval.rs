//! Evaluation of parsed terms in a truncated free DP algebra.

use std::sync::Arc;

use dpalg_core::dpcore::{divided_power, AlgebraSpec, DPElement};
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::parse::TermAst;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("cannot add the nonzero scalar {0} to an algebra element (the algebra has no unit)")]
    ScalarInSum(BigInt),
    #[error("cannot take g{n} of the nonzero scalar {scalar}")]
    ScalarUnderGamma { n: u64, scalar: BigInt },
    #[error("the nonzero scalar {0} is not an element of the algebra")]
    BareScalar(BigInt),
}

/// Intermediate value: integer literals stay scalars until they meet an
/// algebra element.
#[derive(Debug, Clone)]
enum Value {
    Scalar(BigInt),
    Element(DPElement),
}

fn value(spec: &Arc<AlgebraSpec>, ast: &TermAst) -> Result<Value, EvalError> {
    Ok(match ast {
        TermAst::IntLiteral(n) => Value::Scalar(n.clone()),
        TermAst::Gen(i) => Value::Element(DPElement::generator(spec, i - 1)),
        TermAst::Product(factors) => {
            let mut acc = Value::Scalar(BigInt::from(1));
            for f in factors {
                acc = match (acc, value(spec, f)?) {
                    (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a * b),
                    (Value::Scalar(r), Value::Element(e)) | (Value::Element(e), Value::Scalar(r)) => {
                        Value::Element(e.scale(&r))
                    }
                    (Value::Element(a), Value::Element(b)) => Value::Element(&a * &b),
                };
            }
            acc
        }
        TermAst::Sum(terms) => {
            let mut scalar = BigInt::zero();
            let mut element: Option<DPElement> = None;
            for t in terms {
                match value(spec, t)? {
                    Value::Scalar(r) => scalar += r,
                    Value::Element(e) => {
                        element = Some(match element {
                            Some(acc) => &acc + &e,
                            None => e,
                        })
                    }
                }
            }
            match element {
                None => Value::Scalar(scalar),
                Some(e) if scalar.is_zero() => Value::Element(e),
                Some(_) => return Err(EvalError::ScalarInSum(scalar)),
            }
        }
        TermAst::Gamma(n, inner) => match value(spec, inner)? {
            Value::Element(e) => Value::Element(divided_power(*n, &e)),
            Value::Scalar(r) if r.is_zero() => Value::Element(DPElement::zero(spec)),
            Value::Scalar(r) => return Err(EvalError::ScalarUnderGamma { n: *n, scalar: r }),
        },
    })
}

/// Evaluates `ast` to a normalized element. The literal `0` (and any scalar
/// expression equal to zero) denotes the zero element.
pub fn eval(ast: &TermAst, spec: &Arc<AlgebraSpec>) -> Result<DPElement, EvalError> {
    match value(spec, ast)? {
        Value::Element(e) => Ok(e),
        Value::Scalar(r) if r.is_zero() => Ok(DPElement::zero(spec)),
        Value::Scalar(r) => Err(EvalError::BareScalar(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use dpalg_core::coeff::Ring;

    fn show(input: &str, ring: Ring, gens: usize, trunc: u64) -> String {
        let spec = AlgebraSpec::uniform(ring, gens, trunc).unwrap();
        eval(&parse(input, gens).unwrap(), &spec).unwrap().to_string()
    }

    #[test]
    fn examples() {
        assert_eq!(show("g2(x1)*g3(x1)", Ring::Integers, 1, 8), "10*g5(x1)");
        assert_eq!(show("x1*x1", Ring::Integers, 1, 8), "2*g2(x1)");
        assert_eq!(show("g2(g2(x1))", Ring::Integers, 1, 8), "3*g4(x1)");
        assert_eq!(show("g2(x1)*g3(x1)", Ring::integers_mod(5).unwrap(), 1, 8), "0");
        assert_eq!(show("0 - x1 + x1", Ring::Integers, 1, 3), "0");
        assert_eq!(show("x1*x1*x1*x1", Ring::Integers, 1, 3), "0");
        assert_eq!(show("2*3*x2 - x1", Ring::Integers, 2, 3), "-x1 + 6*x2");
    }

    #[test]
    fn scalar_misuse() {
        let spec = AlgebraSpec::uniform(Ring::Integers, 1, 4).unwrap();
        let run = |s: &str| eval(&parse(s, 1).unwrap(), &spec);
        assert_eq!(run("1 + x1"), Err(EvalError::ScalarInSum(BigInt::from(1))));
        assert!(matches!(run("g2(3)"), Err(EvalError::ScalarUnderGamma { n: 2, .. })));
        assert_eq!(run("7"), Err(EvalError::BareScalar(BigInt::from(7))));
        assert!(run("0").unwrap().is_zero());
        assert!(run("g3(0)").unwrap().is_zero());
        assert!(run("2 - 2 + x1").is_ok());
    }
}
