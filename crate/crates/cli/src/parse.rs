//! Surface syntax for elements of a free DP algebra.
//!
//! ```text
//! expr   := term (('+' | '-') term)*      leading '-' allowed
//! term   := factor ('*' factor)*
//! factor := INT | 'x' INT | 'g' INT '(' expr ')' | '(' expr ')'
//! ```
//!
//! Whitespace is ignored between tokens. Subtraction is stored as a product
//! with the literal `-1`.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermAst {
    Sum(Vec<TermAst>),
    Product(Vec<TermAst>),
    IntLiteral(BigInt),
    /// 1-based generator index.
    Gen(usize),
    Gamma(u64, Box<TermAst>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {}, found {found}", expected.join(" or "))]
    Syntax { expected: Vec<String>, found: String },
    #[error("unknown generator x{index} (declared generators: x1..x{count})")]
    UnknownGenerator { index: BigInt, count: usize },
    #[error("exponent must be >= 1, got g{0}")]
    BadExponent(BigInt),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    X,
    G,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::X => write!(f, "'x'"),
            Tok::G => write!(f, "'g'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(input[start..i].parse().expect("ascii digits"))));
                continue;
            }
            b'x' => Tok::X,
            b'g' => Tok::G,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                let found = input[i..].chars().next().expect("in bounds");
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::Syntax {
                        expected: vec!["a term".into()],
                        found: format!("{found:?}"),
                    },
                });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    out.push((input.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    generator_count: usize,
}

const FACTOR_START: [&str; 4] = ["integer", "'x'", "'g'", "'('"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Syntax {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found: self.peek().to_string(),
            },
        })
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[name])
        }
    }

    fn int(&mut self) -> Result<(usize, BigInt), ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok((at, n))
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn expr(&mut self) -> Result<TermAst, ParseError> {
        let mut terms = Vec::new();
        let negate_first = *self.peek() == Tok::Minus;
        if negate_first {
            self.bump();
        }
        let first = self.term()?;
        terms.push(if negate_first { negate(first) } else { first });
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(negate(t));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().expect("one term") } else { TermAst::Sum(terms) })
    }

    fn term(&mut self) -> Result<TermAst, ParseError> {
        let mut factors = vec![self.factor()?];
        while *self.peek() == Tok::Star {
            self.bump();
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 { factors.pop().expect("one factor") } else { TermAst::Product(factors) })
    }

    fn factor(&mut self) -> Result<TermAst, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(TermAst::IntLiteral(n))
            }
            Tok::X => {
                self.bump();
                let (at, n) = self.int()?;
                let index = usize::try_from(&n).ok().filter(|&i| i >= 1 && i <= self.generator_count);
                match index {
                    Some(i) => Ok(TermAst::Gen(i)),
                    None => Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::UnknownGenerator { index: n, count: self.generator_count },
                    }),
                }
            }
            Tok::G => {
                self.bump();
                let (at, n) = self.int()?;
                let Some(n_small) = u64::try_from(&n).ok().filter(|&k| k >= 1) else {
                    return Err(ParseError { offset: at, kind: ParseErrorKind::BadExponent(n) });
                };
                self.expect(Tok::LParen, "'('")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(TermAst::Gamma(n_small, Box::new(inner)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => self.fail(&FACTOR_START),
        }
    }
}

fn negate(t: TermAst) -> TermAst {
    match t {
        TermAst::IntLiteral(n) => TermAst::IntLiteral(-n),
        TermAst::Product(mut fs) => {
            fs.insert(0, TermAst::IntLiteral(BigInt::from(-1)));
            TermAst::Product(fs)
        }
        other => TermAst::Product(vec![TermAst::IntLiteral(BigInt::from(-1)), other]),
    }
}

/// Parses `input` for an algebra with `generator_count` generators.
pub fn parse(input: &str, generator_count: usize) -> Result<TermAst, ParseError> {
    let toks = lex(input)?;
    let mut p = Parser { toks, pos: 0, generator_count };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        let mut expected = vec!["'+'", "'-'", "'*'"];
        if p.toks[..p.pos].iter().any(|(_, t)| *t == Tok::LParen) {
            expected.push("')'");
        }
        expected.push("end of input");
        return p.fail(&expected);
    }
    Ok(ast)
}
