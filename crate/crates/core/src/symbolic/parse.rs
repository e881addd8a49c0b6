//! Polynomial string grammar.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ['^' uint]
//! atom   := number ['/' number] ['i'] | 'i' | 'x' uint | 't' | '(' expr ')' ['i']
//! ```
//!
//! `a+bi` parses as the sum of the two terms `a` and `bi`, which is the
//! same polynomial, so `(1/2)*x1^2*t - 3*x2 + i*x1` and
//! `((1/2)+(3/4)i)*x1` are both accepted.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::coeff::{cq_i, cq_real, Cq};
use super::monomial::Var;
use super::poly::Poly;
use super::{ParseError, SymbolicError};

const MAX_EXPONENT: u32 = 64;
const MAX_DEPTH: usize = 32;
const MAX_TERMS: usize = 20_000;
const MAX_DIGITS: usize = 200;

pub fn parse_poly(src: &str) -> Result<Poly, SymbolicError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> SymbolicError {
        SymbolicError::Parse(ParseError {
            position: self.pos,
            message: msg.to_string(),
        })
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

    /// Next byte with no whitespace skipping (for suffixes like `2i`).
    fn peek_raw(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn guard(&self, p: &Poly) -> Result<(), SymbolicError> {
        if p.term_count() > MAX_TERMS {
            return Err(self.err("polynomial too large"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Poly, SymbolicError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        let mut acc = Poly::zero();
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
            acc = if sign < 0 { acc.sub(&t) } else { acc.add(&t) };
            self.guard(&acc)?;
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, SymbolicError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.mul(&f);
            self.guard(&acc)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, SymbolicError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.uint()?;
            if e > MAX_EXPONENT as u64 {
                return Err(self.err("exponent too large"));
            }
            let mut acc = Poly::one();
            for _ in 0..e {
                acc = acc.mul(&base);
                self.guard(&acc)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<u64, SymbolicError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected unsigned integer"));
        }
        if self.pos - start > 18 {
            return Err(self.err("integer too large"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err("invalid integer"))
    }

    fn number(&mut self) -> Result<BigInt, SymbolicError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected number"));
        }
        if self.pos - start > MAX_DIGITS {
            return Err(self.err("number too long"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err("invalid number"))
    }

    fn imag_suffix(&mut self, p: Poly) -> Poly {
        if self.peek_raw() == Some(b'i') {
            self.pos += 1;
            p.scale(&cq_i())
        } else {
            p
        }
    }

    fn atom(&mut self) -> Result<Poly, SymbolicError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                let mut value = BigRational::from_integer(n);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let d = self.number()?;
                    if d.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    value /= BigRational::from_integer(d);
                }
                let c: Cq = cq_real(value);
                Ok(self.imag_suffix(Poly::constant(c)))
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(Poly::constant(cq_i()))
            }
            Some(b'x') => {
                self.pos += 1;
                let k = self.uint()?;
                if k == 0 || k > u16::MAX as u64 {
                    return Err(self.err("coordinate index out of range"));
                }
                Ok(Poly::var(Var::X(k as u16)))
            }
            Some(b't') => {
                self.pos += 1;
                Ok(Poly::var(Var::T))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(self.imag_suffix(inner))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Convenience for tests and constructors: parse or panic.
#[doc(hidden)]
pub fn p(src: &str) -> Poly {
    parse_poly(src).unwrap_or_else(|e| panic!("bad polynomial {src:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::coeff::{cq_int, cq_real, rat};

    #[test]
    fn spec_example_parses() {
        let poly = parse_poly("(1/2)*x1^2*t - 3*x2 + i*x1").unwrap();
        let x1 = Poly::var(Var::X(1));
        let expected = x1
            .mul(&x1)
            .mul(&Poly::var(Var::T))
            .scale(&cq_real(rat(1, 2)))
            .sub(&Poly::var(Var::X(2)).scale(&cq_int(3)))
            .add(&x1.scale(&cq_i()));
        assert_eq!(poly, expected);
    }

    #[test]
    fn complex_coefficient_forms() {
        let a = parse_poly("(1/2)+(3/4)i").unwrap();
        let b = parse_poly("1/2 + 3/4i").unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_poly("2+3i").unwrap(), parse_poly("3i + 2").unwrap());
    }

    #[test]
    fn double_caret_reports_position() {
        match parse_poly("x1^^2") {
            Err(SymbolicError::Parse(e)) => assert_eq!(e.position, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly("").is_err());
        assert!(parse_poly("x0").is_err());
        assert!(parse_poly("(x1").is_err());
        assert!(parse_poly("1/0").is_err());
        assert!(parse_poly("y").is_err());
        assert!(parse_poly("x1 x2").is_err());
    }
}
