//! A small reader for elements written like `q^-1*x2^2 + (1 - q)*x1*x3`.
//!
//! Products are evaluated in the given presentation, so any word in the
//! generators is accepted and brought to normal form. `s` stands for `q^(1/2)`;
//! `q^(k/2)` gives half powers. Generators are `x1..xN` or the presentation labels.

use num_bigint::BigInt;
use thiserror::Error;

use crate::ore::{CGLPresentation, PBWElement};
use crate::scalars::{Coeff, LaurentScalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse element at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a, C: Coeff> {
    p: &'a CGLPresentation<C>,
    src: &'a [u8],
    pos: usize,
}

pub fn parse_element<C: Coeff>(p: &CGLPresentation<C>, text: &str) -> Result<PBWElement<C>, ParseError> {
    let mut ps = Parser { p, src: text.as_bytes(), pos: 0 };
    let e = ps.expr()?;
    ps.skip_ws();
    if ps.pos != ps.src.len() {
        return Err(ps.err("trailing input"));
    }
    Ok(e)
}

impl<C: Coeff> Parser<'_, C> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError { pos: self.pos, msg: msg.into() }
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

    fn expr(&mut self) -> Result<PBWElement<C>, ParseError> {
        let mut acc = PBWElement::zero(self.p.n());
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign > 0 { acc.add(&t) } else { acc.sub(&t) };
            match self.peek() {
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn starts_factor(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'(' || c == b'[')
    }

    fn term(&mut self) -> Result<PBWElement<C>, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else if !self.starts_factor() {
                return Ok(acc);
            }
            let f = self.factor()?;
            acc = self.p.multiply(&acc, &f);
        }
    }

    fn factor(&mut self) -> Result<PBWElement<C>, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        if let Some(twice) = self.q_base(&base) {
            let e = self.exponent2()?;
            return Ok(PBWElement::constant(self.p.n(), C::q_pow2(twice * e / 2)));
        }
        let e = self.exponent2()?;
        if e < 0 || e % 2 != 0 {
            return Err(self.err("only q may carry negative or fractional powers"));
        }
        Ok(self.p.pow(&base, (e / 2) as u32))
    }

    /// Doubled q-exponent if `e` is a bare `q` or `s`.
    fn q_base(&self, e: &PBWElement<C>) -> Option<i64> {
        let (c, f) = e.leading_term().ok()?;
        if e.num_terms() != 1 || f.iter().any(|&m| m > 0) {
            return None;
        }
        let u = c.unit_monomial()?;
        (u.sign == 1 && (u.exponent.twice() == 2 || u.exponent.twice() == 1)).then(|| u.exponent.twice())
    }

    /// Reads `k`, `-k`, `(k)`, `(k/2)`; returns twice the value.
    fn exponent2(&mut self) -> Result<i64, ParseError> {
        let paren = self.peek() == Some(b'(');
        if paren {
            self.pos += 1;
        }
        let neg = self.peek() == Some(b'-');
        if neg {
            self.pos += 1;
        }
        let v = self.integer()?;
        let mut twice = 2 * v;
        if paren {
            if self.peek() == Some(b'/') {
                self.pos += 1;
                if self.integer()? != 2 {
                    return Err(self.err("only halves are allowed"));
                }
                twice = v;
            }
            if self.peek() != Some(b')') {
                return Err(self.err("expected )"));
            }
            self.pos += 1;
        }
        let twice = if neg { -twice } else { twice };
        Ok(twice)
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().map_err(|_| self.err("expected integer"))
    }

    fn atom(&mut self) -> Result<PBWElement<C>, ParseError> {
        let n = self.p.n();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected )"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let v: BigInt = std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().unwrap();
                let s = LaurentScalar::monomial(v, 0).with_characteristic(self.p.characteristic());
                Ok(PBWElement::constant(n, C::from_laurent(&s)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                self.name(word, start)
            }
            _ => Err(self.err("expected a number, q, s, a generator or (")),
        }
    }

    fn name(&mut self, word: &str, start: usize) -> Result<PBWElement<C>, ParseError> {
        let n = self.p.n();
        match word {
            "q" => return Ok(PBWElement::constant(n, C::q_pow2(2))),
            "s" => return Ok(PBWElement::constant(n, C::q_pow2(1))),
            _ => {}
        }
        if let Some(i) = self.p.labels().iter().position(|l| l == word) {
            return Ok(self.p.gen(i));
        }
        if let Some(idx) = word.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
            if (1..=n).contains(&idx) {
                return Ok(self.p.gen(idx - 1));
            }
        }
        // allow juxtaposed generators such as `x1x3`
        if let Some(rest) = word.strip_prefix('x') {
            if let Some(split) = rest.find('x') {
                self.pos = start + 1 + split;
                let head = &word[..1 + split];
                return self.name(head, start);
            }
        }
        Err(ParseError { pos: start, msg: format!("unknown name `{word}`") })
    }
}
