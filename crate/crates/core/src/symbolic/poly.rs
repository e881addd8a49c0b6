//! Sparse multivariate polynomials over exact complex rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::coeff::{cq_abs_max, cq_one, cq_pow, cq_recip, fmt_rational, Cq};
use super::monomial::{Monomial, Var};

/// Canonical polynomial: no stored zero coefficients, terms in graded lex order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Cq>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(cq_one())
    }

    pub fn constant(c: Cq) -> Self {
        Poly::term(Monomial::one(), c)
    }

    pub fn var(v: Var) -> Self {
        Poly::term(Monomial::var(v), cq_one())
    }

    pub fn term(m: Monomial, c: Cq) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Cq)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Cq) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Cq)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Constant term (zero when absent).
    pub fn constant_term(&self) -> Cq {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(Cq::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Cq)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Lowest total degree among the terms (0 for the zero polynomial).
    pub fn low_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).min().unwrap_or(0)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.vars()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Cq) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn diff(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some((e, lowered)) = m.diff(v) {
                out.add_term(lowered, c * Cq::from(super::coeff::rat_int(e as i64)));
            }
        }
        out
    }

    pub fn conj(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }

    /// Coefficient-wise real part.
    pub fn re(&self) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (m.clone(), Cq::new(c.re.clone(), Zero::zero()))),
        )
    }

    /// Coefficient-wise imaginary part.
    pub fn im(&self) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (m.clone(), Cq::new(c.im.clone(), Zero::zero()))),
        )
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im.is_zero())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(cq_abs_max).fold(0.0, f64::max)
    }

    /// Replaces `x_k` by `t * x_k` for every chart coordinate.
    pub fn scale_coords_by_t(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let d = m.coord_degree();
                    (m.mul(&Monomial::from_pairs(vec![(Var::T, d)])), c.clone())
                })
                .collect(),
        }
    }

    /// Substitutes a constant for `v`.
    pub fn substitute(&self, v: Var, value: &Cq) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.without(v);
            out.add_term(rest, c * cq_pow(value, e));
        }
        out
    }

    /// Substitutes a polynomial for `v`.
    pub fn compose(&self, v: Var, value: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.without(v);
            let piece = value.pow(e).mul_monomial(&rest).scale(c);
            out = out.add(&piece);
        }
        out
    }

    pub fn eval(&self, point: &dyn Fn(Var) -> Cq) -> Cq {
        let mut acc = Cq::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                t *= cq_pow(&point(v), e);
            }
            acc += t;
        }
        acc
    }

    /// Exact quotient when `divisor` divides `self`; `None` otherwise.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        let lc_inv = cq_recip(lc)?;
        if divisor.terms.len() == 1 {
            let mut out = Poly::zero();
            for (m, c) in &self.terms {
                out.add_term(m.div(lm)?, c * &lc_inv);
            }
            return Some(out);
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            let qm = m.div(lm)?;
            let qc = c * &lc_inv;
            let step = divisor.mul_monomial(&qm).scale(&qc);
            rem = rem.sub(&step);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Splits `self = c * monic` with the leading coefficient pulled out.
    pub fn monic_split(&self) -> Option<(Cq, Poly)> {
        let (_, lc) = self.leading()?;
        let lc = lc.clone();
        let inv = cq_recip(&lc)?;
        Some((lc, self.scale(&inv)))
    }
}

fn fmt_coeff_times(c: &Cq, m: &Monomial, f: &mut fmt::Formatter<'_>, first: bool) -> fmt::Result {
    // Pull a leading sign out when the coefficient is real or purely imaginary.
    let (neg, body) = if c.im.is_zero() {
        (c.re.is_negative(), Cq::new(c.re.abs(), Zero::zero()))
    } else if c.re.is_zero() {
        (c.im.is_negative(), Cq::new(Zero::zero(), c.im.abs()))
    } else {
        (false, c.clone())
    };
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    let unit = m.is_one();
    if body.im.is_zero() {
        let r = &body.re;
        if unit {
            return write!(f, "{}", fmt_rational(r));
        }
        if r.is_one() {
            write!(f, "{m}")
        } else if r.is_integer() {
            write!(f, "{}*{m}", fmt_rational(r))
        } else {
            write!(f, "({})*{m}", fmt_rational(r))
        }
    } else if body.re.is_zero() {
        let r = &body.im;
        let lit = if r.is_one() {
            "i".to_string()
        } else if r.is_integer() {
            format!("{}i", fmt_rational(r))
        } else {
            format!("({})i", fmt_rational(r))
        };
        if unit {
            write!(f, "{lit}")
        } else {
            write!(f, "{lit}*{m}")
        }
    } else {
        let im_sign = if body.im.is_negative() { "-" } else { "+" };
        let lit = format!(
            "({}{}{}i)",
            fmt_rational(&body.re),
            im_sign,
            fmt_rational(&body.im.abs())
        );
        if unit {
            write!(f, "{lit}")
        } else {
            write!(f, "{lit}*{m}")
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            fmt_coeff_times(c, m, f, k == 0)?;
        }
        Ok(())
    }
}
