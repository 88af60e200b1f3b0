//! Text form of polynomials.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := uint | variable | '(' expr ')'
//! ```
//!
//! Integer literals may be arbitrarily long; they are reduced mod `p` digit by digit.

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::poly::{Polynomial, RingRef};

pub fn parse_polynomial(text: &str, ring: &RingRef) -> Result<Polynomial> {
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
        ring,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.s.len() {
        return Err(p.err(format!("unexpected `{}`", p.s[p.pos] as char)));
    }
    Ok(e)
}

/// Canonical text form; `parse_polynomial(serialize(a)) == a`.
pub fn serialize(a: &Polynomial) -> String {
    a.to_string()
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    ring: &'a RingRef,
}

impl Parser<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let negate = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek() {
            Some(b'-') => return Err(self.err("negative exponent")),
            Some(c) if c.is_ascii_digit() => {}
            _ => return Err(self.err("expected exponent")),
        }
        let start = self.pos;
        let mut e: u64 = 0;
        while let Some(c) = self.s.get(self.pos).filter(|c| c.is_ascii_digit()) {
            e = e
                .checked_mul(10)
                .and_then(|e| e.checked_add((c - b'0') as u64))
                .ok_or_else(|| Error::Parse {
                    position: start,
                    message: "exponent too large".into(),
                })?;
            self.pos += 1;
        }
        base.power(e)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let p = self.ring.p() as u64;
                let mut v: u64 = 0;
                while let Some(c) = self.s.get(self.pos).filter(|c| c.is_ascii_digit()) {
                    v = (v * 10 + (c - b'0') as u64) % p;
                    self.pos += 1;
                }
                Ok(Polynomial::constant(self.ring, v as u32))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .s
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                match self.ring.var_index(name) {
                    Some(i) => Ok(Polynomial::term(
                        self.ring,
                        Monomial::var(self.ring.nvars(), i),
                        1,
                    )),
                    None => Err(Error::UnknownVariable {
                        name: name.to_string(),
                        position: start,
                    }),
                }
            }
            Some(c) => Err(self.err(format!("unexpected `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
