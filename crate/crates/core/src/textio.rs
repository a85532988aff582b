//! Expression text: parsing into canonical rational functions and
//! deterministic printing.
//!
//! Grammar (no implicit multiplication):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' exponent)?
//! atom   := integer | identifier | '(' expr ')'
//! exponent := ('-' | '+')* (integer | '(' exponent ')') ('^' exponent)?
//! ```
//!
//! `^` binds tightest and is right-associative; exponents are integers and
//! a negative exponent inverts its base.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::poly::{Polynomial, Ring};
use crate::ratfunc::RationalFunction;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = s[start..i].parse().expect("digits");
            out.push((start, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(s[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    ring: &'a Ring,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(&Tok::Op('/')) {
                let at = self.offset();
                self.pos += 1;
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(Error::Parse { pos: at, msg: "division by zero".into() });
                }
                acc = &acc / &d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            let at = self.offset();
            self.pos += 1;
            let e = self.exponent()?;
            if e < 0 && base.is_zero() {
                return Err(Error::Parse { pos: at, msg: "zero raised to a negative power".into() });
            }
            return base.pow(e).map_err(|e| Error::Parse { pos: at, msg: e.to_string() });
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64> {
        let mut sign = 1i64;
        loop {
            if self.eat('-') {
                sign = -sign;
            } else if !self.eat('+') {
                break;
            }
        }
        let base = match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                i64::try_from(n).or_else(|_| self.err("exponent too large"))?
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.exponent()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                e
            }
            _ => return self.err("expected an integer exponent"),
        };
        let value = if self.eat('^') {
            let e = self.exponent()?;
            let e = u32::try_from(e).or_else(|_| self.err("negative exponent of an integer exponent"))?;
            base.checked_pow(e).map_or_else(|| self.err("exponent too large"), Ok)?
        } else {
            base
        };
        Ok(sign * value)
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(RationalFunction::constant(self.ring, Coeff::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                let at = self.offset();
                self.pos += 1;
                match self.ring.index_of(&name) {
                    Ok(i) => Ok(RationalFunction::var(self.ring, i)),
                    Err(_) => Err(Error::Parse { pos: at, msg: format!("unknown variable `{name}`") }),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {}", describe(&t))),
            None => self.err("unexpected end of input"),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("`{n}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
    }
}

/// Parses `s` over `ring` into a canonical rational function.
pub fn parse_expression(s: &str, ring: &Ring) -> Result<RationalFunction> {
    let toks = tokenize(s)?;
    let mut p = Parser { toks, pos: 0, end: s.len(), ring };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err(format!("unexpected token {}", describe(&p.toks[p.pos].1)));
    }
    Ok(e)
}

/// Parses `s` and requires a polynomial result.
pub fn parse_polynomial(s: &str, ring: &Ring) -> Result<Polynomial> {
    parse_expression(s, ring)?
        .as_polynomial()
        .ok_or_else(|| Error::Invalid(format!("`{s}` is not a polynomial")))
}

fn write_monomial(f: &mut fmt::Formatter<'_>, ring: &Ring, exps: &[u32]) -> fmt::Result {
    let mut first = true;
    for (v, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(&ring.vars()[v])?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

fn write_abs_coeff(f: &mut fmt::Formatter<'_>, c: &Coeff) -> fmt::Result {
    let c = c.abs();
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

/// Terms in descending lex order with explicit `*` and `^`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let field = self.field();
        for (i, (m, c)) in self.terms().rev().enumerate() {
            let c = field.display_value(c);
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let unit = c.abs().is_one();
            if m.is_one() {
                write_abs_coeff(f, &c)?;
            } else {
                if !unit {
                    write_abs_coeff(f, &c)?;
                    f.write_str("*")?;
                }
                write_monomial(f, self.ring(), m.exponents())?;
            }
        }
        Ok(())
    }
}

fn needs_parens_as_divisor(p: &Polynomial) -> bool {
    if p.num_terms() != 1 {
        return true;
    }
    let (m, c) = p.leading_term().unwrap();
    !(c.is_one() && m.exponents().iter().filter(|&&e| e > 0).count() == 1)
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.numerator();
        let den = self.denominator();
        if den.is_one() {
            return write!(f, "{num}");
        }
        if num.num_terms() > 1 {
            write!(f, "({num})")?;
        } else {
            write!(f, "{num}")?;
        }
        if needs_parens_as_divisor(den) {
            write!(f, "/({den})")
        } else {
            write!(f, "/{den}")
        }
    }
}

/// Rendering of a polynomial capped at `max_terms` terms.
pub fn truncated(p: &Polynomial, max_terms: usize) -> String {
    if p.num_terms() <= max_terms {
        return p.to_string();
    }
    let head = Polynomial::from_reduced_terms(
        p.ring(),
        p.terms().rev().take(max_terms).map(|(m, c)| (m.clone(), c.clone())),
    );
    format!("{head} + ... ({} more terms)", p.num_terms() - max_terms)
}
