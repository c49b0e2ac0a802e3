//! Parser for the canonical textual form of polynomials and rational
//! functions, e.g. `(z^2 + 4 + w^2)` or `(q + 1) / 2`.
//!
//! Grammar (whitespace insensitive):
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' uint)?
//! atom   := uint | ident | '(' expr ')'
//! ```

use num_bigint::BigInt;

use super::mpoly::{MPoly, VarSet};
use super::ratfunc::RatFunc;
use super::AlgebraError;

pub fn parse_ratfunc(vars: &VarSet, input: &str) -> Result<RatFunc, AlgebraError> {
    let mut p = Parser { vars, chars: input.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

pub fn parse_mpoly(vars: &VarSet, input: &str) -> Result<MPoly, AlgebraError> {
    parse_ratfunc(vars, input)?.to_poly()
}

struct Parser<'a> {
    vars: &'a VarSet,
    chars: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> AlgebraError {
        AlgebraError::Parse(format!("{} at byte {}", msg, self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expr(&mut self) -> Result<RatFunc, AlgebraError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                b'-' => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc, AlgebraError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                b'/' => {
                    self.bump();
                    acc = acc.div(&self.unary()?)?;
                }
                // Juxtaposition such as `2q` is not accepted; the canonical
                // printer always emits `*`.
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFunc, AlgebraError> {
        if self.peek() == Some(b'-') {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, AlgebraError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.uint()?;
            let e: i32 = e
                .try_into()
                .map_err(|_| self.error("exponent too large"))?;
            return base.pow(e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc, AlgebraError> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let e = self.expr()?;
                if self.bump() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                Ok(RatFunc::from_int(self.vars, n))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_ascii_alphanumeric()
                        || self.chars[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.chars[start..self.pos]).unwrap();
                RatFunc::var(self.vars, name)
            }
            _ => Err(self.error("expected a number, variable, or '('")),
        }
    }

    fn uint(&mut self) -> Result<BigInt, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let s = std::str::from_utf8(&self.chars[start..self.pos]).unwrap();
        s.parse::<BigInt>().map_err(|_| self.error("bad integer"))
    }
}
