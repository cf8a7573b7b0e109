//! Recursive-descent parser for polynomial text.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' signed_int)?
//! base   := int | int '/' int | ident | '(' expr ')'
//! ```
//!
//! `I` denotes the imaginary unit. Negative exponents are allowed only on
//! monomials (including nonzero constants).

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{Coeff, LaurentError, LaurentPolynomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownToken(char),
    Unexpected { found: String, expected: &'static str },
    UnexpectedEnd { expected: &'static str },
    NonIntegerExponent,
    ExponentOutOfRange,
    ZeroDenominator,
    NegativePowerOfNonMonomial,
}

/// Syntax error with the 0-based character offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnknownToken(c) => write!(f, "unknown token '{c}'")?,
            ParseErrorKind::Unexpected { found, expected } => write!(f, "expected {expected}, found '{found}'")?,
            ParseErrorKind::UnexpectedEnd { expected } => write!(f, "expected {expected}, found end of input")?,
            ParseErrorKind::NonIntegerExponent => write!(f, "exponent must be an integer")?,
            ParseErrorKind::ExponentOutOfRange => write!(f, "exponent out of range")?,
            ParseErrorKind::ZeroDenominator => write!(f, "zero denominator")?,
            ParseErrorKind::NegativePowerOfNonMonomial => write!(f, "negative exponent on a non-monomial")?,
        }
        write!(f, " at position {}", self.pos)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Dot,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Int(n) => n.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Dot => ".".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((start, Tok::Int(s.parse().unwrap())));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '.' => Tok::Dot,
            other => return Err(ParseError { pos: start, kind: ParseErrorKind::UnknownToken(other) }),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        match self.toks.get(self.at) {
            Some((p, t)) => ParseError { pos: *p, kind: ParseErrorKind::Unexpected { found: t.text(), expected } },
            None => ParseError { pos: self.end, kind: ParseErrorKind::UnexpectedEnd { expected } },
        }
    }

    fn expr(&mut self) -> Result<LaurentPolynomial, ParseError> {
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if neg {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPolynomial, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.at += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LaurentPolynomial, ParseError> {
        let base = self.base()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.at += 1;
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            true
        } else {
            false
        };
        let pos = self.pos();
        let k = match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                if matches!(self.peek(), Some(Tok::Dot) | Some(Tok::Slash)) {
                    return Err(ParseError { pos, kind: ParseErrorKind::NonIntegerExponent });
                }
                n.to_i32().ok_or(ParseError { pos, kind: ParseErrorKind::ExponentOutOfRange })?
            }
            Some(_) => return Err(ParseError { pos, kind: ParseErrorKind::NonIntegerExponent }),
            None => return Err(self.unexpected("integer exponent")),
        };
        let k = if neg { -k } else { k };
        base.pow(k).map_err(|e| match e {
            LaurentError::NonMonomialInverse => ParseError { pos, kind: ParseErrorKind::NegativePowerOfNonMonomial },
            _ => unreachable!("pow only fails on non-monomials"),
        })
    }

    fn base(&mut self) -> Result<LaurentPolynomial, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                let mut q = BigRational::from_integer(n);
                if self.peek() == Some(&Tok::Slash) {
                    self.at += 1;
                    let dpos = self.pos();
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) => {
                            self.at += 1;
                            if d.is_zero() {
                                return Err(ParseError { pos: dpos, kind: ParseErrorKind::ZeroDenominator });
                            }
                            q /= BigRational::from_integer(d);
                        }
                        _ => return Err(self.unexpected("integer denominator")),
                    }
                }
                if self.peek() == Some(&Tok::Dot) {
                    return Err(self.unexpected("operator"));
                }
                Ok(LaurentPolynomial::constant(Complex::new(q, BigRational::zero())))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if name == "I" {
                    Ok(LaurentPolynomial::constant(Coeff::i()))
                } else {
                    Ok(LaurentPolynomial::var(&name))
                }
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.unexpected("')'"));
                }
                self.at += 1;
                Ok(inner)
            }
            _ => {
                let _ = pos;
                Err(self.unexpected("number, variable or '('"))
            }
        }
    }
}

/// Parse polynomial text into a fully expanded [`LaurentPolynomial`].
/// Variables are ordered by first appearance; variables that cancel out are dropped.
pub fn parse(text: &str) -> Result<LaurentPolynomial, ParseError> {
    let toks = lex(text)?;
    let end = text.chars().count();
    // Register variables in order of first appearance.
    let mut order: Vec<String> = Vec::new();
    for (_, t) in &toks {
        if let Tok::Ident(s) = t {
            if s != "I" && !order.contains(s) {
                order.push(s.clone());
            }
        }
    }
    let mut p = Parser { toks, at: 0, end };
    let poly = p.expr()?;
    if p.at < p.toks.len() {
        return Err(p.unexpected("'+', '-', '*' or end of input"));
    }
    let used = poly.used_vars();
    let vars: Vec<String> = order.into_iter().filter(|v| used.contains(v)).collect();
    Ok(poly.with_vars(&vars).expect("all used variables are registered"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn int(n: i64) -> Coeff {
        super::super::coeff_from_int(n)
    }

    #[test]
    fn examples() {
        let p = parse("1+x+y+z").unwrap();
        assert_eq!(p.num_terms(), 4);
        assert!(p.terms().all(|(_, c)| c.is_one()));

        let p = parse("(1-x)*(1-y)+(1+x)*(1+y)*z").unwrap();
        assert_eq!(p.num_terms(), 8);
        assert_eq!(p.coeff(&[("x", 1), ("y", 1), ("z", 1)]), int(1));

        let p = parse("1+x+y^-1-(1+x+y)*z").unwrap();
        assert_eq!(p.coeff(&[("y", -1)]), int(1));
        assert_eq!(p.coeff(&[("y", 1), ("z", 1)]), int(-1));
        assert_eq!(p.vars(), ["x", "y", "z"]);
    }

    #[test]
    fn variable_order_is_first_appearance() {
        assert_eq!(parse("z*y+x1").unwrap().vars(), ["z", "y", "x1"]);
        assert_eq!(parse("x-x+y").unwrap().vars(), ["y"]);
    }

    #[test]
    fn gaussian_coefficients() {
        let p = parse("(1+2*I)*x - I").unwrap();
        assert_eq!(p.coeff(&[("x", 1)]), Coeff::new(BigRational::from_integer(1.into()), BigRational::from_integer(2.into())));
        assert_eq!(parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn unary_minus() {
        assert_eq!(parse("-x+1").unwrap(), parse("1-x").unwrap());
        assert_eq!(parse("2*(-x)").unwrap(), parse("-2*x").unwrap());
        assert!(parse("x*-y").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("1+x+(").unwrap_err();
        assert_eq!(e.pos, 5);
        assert!(matches!(e.kind, ParseErrorKind::UnexpectedEnd { .. }));
        let e = parse("x $ y").unwrap_err();
        assert_eq!(e, ParseError { pos: 2, kind: ParseErrorKind::UnknownToken('$') });
        assert_eq!(parse("x^1.5").unwrap_err().kind, ParseErrorKind::NonIntegerExponent);
        assert_eq!(parse("x^y").unwrap_err().kind, ParseErrorKind::NonIntegerExponent);
        assert_eq!(parse("(1+x)^-1").unwrap_err().kind, ParseErrorKind::NegativePowerOfNonMonomial);
        assert_eq!(parse("3/0").unwrap_err().kind, ParseErrorKind::ZeroDenominator);
        assert!(parse("2x").is_err());
        assert!(parse("x y").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn constant_powers() {
        assert_eq!(parse("2^-2*x").unwrap(), parse("1/4*x").unwrap());
        assert_eq!(parse("(1+x)^2").unwrap(), parse("1+2*x+x^2").unwrap());
    }
}
