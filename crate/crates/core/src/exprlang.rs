//! Text format for polynomials in `u1..uN`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' exponent)*
//! atom  := integer | 'u' index | '(' expr ')'
//! ```
//!
//! Exponents are nonnegative integers (optionally parenthesized). Division is
//! only by nonzero constants, so `1/2*u1` and `u1/6` are fine but `1/u1` is not.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt::Write as _;
use thiserror::Error;

use crate::algebra::{Poly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

/// Parses `text` as a polynomial in `n_vars` variables.
pub fn parse_polynomial(text: &str, n_vars: usize) -> Result<Poly, ParseError> {
    if n_vars == 0 {
        return Err(ParseError {
            position: 0,
            message: "variable count must be positive".into(),
        });
    }
    if let Some(pos) = text.bytes().position(|b| !b.is_ascii()) {
        return Err(ParseError {
            position: pos,
            message: "non-ASCII character".into(),
        });
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        n_vars,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n_vars: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, position: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            position,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc += &self.term()?;
            } else if self.eat(b'-') {
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(b'/') {
                self.pos += 1;
                self.skip_ws();
                let start = self.pos;
                let d = self.unary()?;
                if !d.is_constant() {
                    return Err(self.error_at(start, "division by a non-constant expression"));
                }
                let c = d.constant_term();
                if c.is_zero() {
                    return Err(self.error_at(start, "division by zero"));
                }
                acc = acc.scale(&c.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        if self.eat(b'-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let mut base = self.atom()?;
        while self.eat(b'^') {
            let e = self.exponent()?;
            base = base.pow(e);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let value = match self.peek() {
            Some(c) if c.is_ascii_digit() => Rational::from_integer(self.integer()?),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                if !e.is_constant() {
                    return Err(self.error_at(start, "exponent must be a nonnegative integer"));
                }
                e.constant_term()
            }
            _ => return Err(self.error("exponent must be a nonnegative integer")),
        };
        if !value.is_integer() || value.is_negative() {
            return Err(self.error_at(start, "exponent must be a nonnegative integer"));
        }
        value
            .to_integer()
            .to_u32()
            .ok_or_else(|| self.error_at(start, "exponent too large"))
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        digits
            .parse()
            .map_err(|_| self.error_at(start, "expected an integer"))
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(Poly::constant(self.n_vars, Rational::from_integer(v)))
            }
            Some(b'u') => {
                self.pos += 1;
                if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    return Err(self.error_at(start, "expected a variable index after 'u'"));
                }
                let idx = self.integer()?;
                match idx.to_usize() {
                    Some(i) if (1..=self.n_vars).contains(&i) => Ok(Poly::var(self.n_vars, i - 1)),
                    _ => Err(self.error_at(
                        start,
                        format!("unknown variable u{idx} (expected u1..u{})", self.n_vars),
                    )),
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) => Err(self.error(format!("unexpected '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Canonical text of `p`: terms in descending graded lexicographic order,
/// reduced coefficients, `*` between factors and `^` for powers above one.
pub fn format_polynomial(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let negative = c.is_negative();
        let abs = c.abs();
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let vars: Vec<String> = m
            .exponents()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    format!("u{}", i + 1)
                } else {
                    format!("u{}^{e}", i + 1)
                }
            })
            .collect();
        if vars.is_empty() {
            let _ = write!(out, "{abs}");
        } else {
            if !abs.is_integer() || abs.to_integer() != BigInt::from(1) {
                let _ = write!(out, "{abs}*");
            }
            out.push_str(&vars.join("*"));
        }
    }
    out
}
