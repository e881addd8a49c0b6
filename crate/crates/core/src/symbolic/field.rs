//! Scalar fields on a chart: polynomials, optionally localized at a few
//! non-vanishing denominator polynomials.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use super::coeff::{cq_int, cq_one, cq_pow, cq_real, cq_recip, Cq, Rational};
use super::monomial::{Monomial, Var};
use super::poly::Poly;
use super::SymbolicError;

/// A smooth function on a chart, modelled as `num / prod(den_k ^ e_k)`.
///
/// Denominator factors are monic, non-constant and pairwise distinct; the
/// numerator is never divisible by a factor that carries a positive
/// exponent. Purely polynomial fields have an empty denominator list.
#[derive(Clone, Debug, Default)]
pub struct ScalarField {
    vars: Vec<Var>,
    num: Poly,
    den: Vec<(Poly, u32)>,
}

fn merge_vars(a: &[Var], b: &[Var]) -> Vec<Var> {
    if a == b {
        return a.to_vec();
    }
    let mut v: Vec<Var> = a.iter().chain(b.iter()).copied().collect();
    v.sort();
    v.dedup();
    v
}

impl ScalarField {
    pub fn zero() -> Self {
        ScalarField::default()
    }

    pub fn one() -> Self {
        ScalarField::constant(cq_one())
    }

    pub fn constant(c: Cq) -> Self {
        ScalarField {
            vars: Vec::new(),
            num: Poly::constant(c),
            den: Vec::new(),
        }
    }

    pub fn int(n: i64) -> Self {
        ScalarField::constant(cq_int(n))
    }

    pub fn rational(r: Rational) -> Self {
        ScalarField::constant(cq_real(r))
    }

    pub fn var(v: Var) -> Self {
        ScalarField {
            vars: vec![v],
            num: Poly::var(v),
            den: Vec::new(),
        }
    }

    /// The chart coordinate with 0-based index `mu`.
    pub fn coord(mu: usize) -> Self {
        ScalarField::var(Var::coord(mu))
    }

    pub fn t() -> Self {
        ScalarField::var(Var::T)
    }

    pub fn from_poly(p: Poly) -> Self {
        ScalarField {
            vars: p.vars(),
            num: p,
            den: Vec::new(),
        }
    }

    /// Declares additional variables without changing the value.
    pub fn with_vars(mut self, vars: &[Var]) -> Self {
        self.vars = merge_vars(&self.vars, vars);
        self
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominators(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_empty() && self.num.is_constant()
    }

    pub fn as_constant(&self) -> Option<Cq> {
        self.is_constant().then(|| self.num.constant_term())
    }

    /// Number of numerator terms; the residual size reported by exact checks.
    pub fn term_count(&self) -> usize {
        self.num.term_count()
    }

    pub fn degree(&self) -> u32 {
        self.num.degree()
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.num.depends_on(v) || self.den.iter().any(|(p, _)| p.depends_on(v))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.num.max_abs_coeff()
    }

    fn reduce(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        for (f, e) in self.den.iter_mut() {
            while *e > 0 {
                match self.num.exact_div(f) {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
        self
    }

    /// Rebuilds the denominator so that every factor is monic and unique.
    fn normalize_den(mut self) -> Result<Self, SymbolicError> {
        let old = std::mem::take(&mut self.den);
        let mut scale = cq_one();
        for (f, e) in old {
            if f.is_constant() {
                let c = f.constant_term();
                let inv = cq_recip(&c).ok_or(SymbolicError::DivisionByZero)?;
                scale *= cq_pow(&inv, e);
                continue;
            }
            let (lc, monic) = f.monic_split().ok_or(SymbolicError::DivisionByZero)?;
            scale *= cq_pow(&cq_recip(&lc).ok_or(SymbolicError::DivisionByZero)?, e);
            match self.den.iter_mut().find(|(g, _)| *g == monic) {
                Some((_, k)) => *k += e,
                None => self.den.push((monic, e)),
            }
        }
        self.num = self.num.scale(&scale);
        Ok(self.reduce())
    }

    /// Common-denominator representation of `self` and `other`.
    fn common(&self, other: &Self) -> (Poly, Poly, Vec<(Poly, u32)>) {
        if self.den.is_empty() && other.den.is_empty() {
            return (self.num.clone(), other.num.clone(), Vec::new());
        }
        let mut den: Vec<(Poly, u32)> = self.den.clone();
        for (g, e) in &other.den {
            match den.iter_mut().find(|(f, _)| f == g) {
                Some((_, k)) => *k = (*k).max(*e),
                None => den.push((g.clone(), *e)),
            }
        }
        let lift = |x: &ScalarField| {
            let mut n = x.num.clone();
            for (f, e) in &den {
                let have = x.den.iter().find(|(g, _)| g == f).map(|&(_, k)| k).unwrap_or(0);
                if *e > have {
                    n = n.mul(&f.pow(e - have));
                }
            }
            n
        };
        (lift(self), lift(other), den)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, den) = self.common(other);
        ScalarField {
            vars: merge_vars(&self.vars, &other.vars),
            num: a.add(&b),
            den,
        }
        .reduce()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b, den) = self.common(other);
        ScalarField {
            vars: merge_vars(&self.vars, &other.vars),
            num: a.sub(&b),
            den,
        }
        .reduce()
    }

    pub fn neg(&self) -> Self {
        ScalarField {
            vars: self.vars.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let vars = merge_vars(&self.vars, &other.vars);
        if self.is_zero() || other.is_zero() {
            return ScalarField::zero().with_vars(&vars);
        }
        let mut den = self.den.clone();
        for (g, e) in &other.den {
            match den.iter_mut().find(|(f, _)| f == g) {
                Some((_, k)) => *k += e,
                None => den.push((g.clone(), *e)),
            }
        }
        let out = ScalarField {
            vars,
            num: self.num.mul(&other.num),
            den,
        };
        if self.den.is_empty() && other.den.is_empty() {
            out
        } else {
            out.reduce()
        }
    }

    pub fn scale(&self, c: &Cq) -> Self {
        if c.is_zero() {
            return ScalarField::zero().with_vars(&self.vars);
        }
        ScalarField {
            vars: self.vars.clone(),
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = ScalarField::one().with_vars(&self.vars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse; fails for the zero field.
    pub fn recip(&self) -> Result<Self, SymbolicError> {
        if self.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        let mut num = Poly::one();
        for (f, e) in &self.den {
            num = num.mul(&f.pow(*e));
        }
        ScalarField {
            vars: self.vars.clone(),
            num,
            den: vec![(self.num.clone(), 1)],
        }
        .normalize_den()
    }

    pub fn div(&self, other: &Self) -> Result<Self, SymbolicError> {
        Ok(self.mul(&other.recip()?))
    }

    /// Exact quotient by a polynomial field that divides this numerator.
    pub fn exact_div_poly(&self, divisor: &Poly) -> Option<Self> {
        Some(ScalarField {
            vars: self.vars.clone(),
            num: self.num.exact_div(divisor)?,
            den: self.den.clone(),
        })
    }

    /// Formal partial derivative; zero when `v` does not occur.
    pub fn diff(&self, v: Var) -> Self {
        if self.den.is_empty() {
            return ScalarField {
                vars: self.vars.clone(),
                num: self.num.diff(v),
                den: Vec::new(),
            };
        }
        let active: Vec<usize> = (0..self.den.len())
            .filter(|&k| self.den[k].0.depends_on(v))
            .collect();
        if active.is_empty() {
            return ScalarField {
                vars: self.vars.clone(),
                num: self.num.diff(v),
                den: self.den.clone(),
            }
            .reduce();
        }
        let prod_except = |skip: Option<usize>| {
            let mut p = Poly::one();
            for &k in &active {
                if Some(k) != skip {
                    p = p.mul(&self.den[k].0);
                }
            }
            p
        };
        let mut num = self.num.diff(v).mul(&prod_except(None));
        for &k in &active {
            let (f, e) = &self.den[k];
            let term = self
                .num
                .mul(&f.diff(v))
                .mul(&prod_except(Some(k)))
                .scale(&cq_int(*e as i64));
            num = num.sub(&term);
        }
        let mut den = self.den.clone();
        for &k in &active {
            den[k].1 += 1;
        }
        ScalarField {
            vars: self.vars.clone(),
            num,
            den,
        }
        .reduce()
    }

    /// Partial derivative with respect to a declared variable.
    pub fn partial(&self, v: Var) -> Result<Self, SymbolicError> {
        if !self.vars.contains(&v) {
            return Err(SymbolicError::UnknownVariable(v.to_string()));
        }
        Ok(self.diff(v))
    }

    /// Complex conjugate; coordinates and `t` are real.
    pub fn conj(&self) -> Self {
        ScalarField {
            vars: self.vars.clone(),
            num: self.num.conj(),
            den: self.den.iter().map(|(f, e)| (f.conj(), *e)).collect(),
        }
    }

    /// Equivalent representation with real denominator factors.
    fn real_den(&self) -> Self {
        if self.den.iter().all(|(f, _)| f.is_real()) {
            return self.clone();
        }
        let mut num = self.num.clone();
        let mut den = Vec::new();
        for (f, e) in &self.den {
            if f.is_real() {
                den.push((f.clone(), *e));
            } else {
                let fc = f.conj();
                num = num.mul(&fc.pow(*e));
                den.push((f.mul(&fc), *e));
            }
        }
        ScalarField {
            vars: self.vars.clone(),
            num,
            den,
        }
        .normalize_den()
        .expect("product of nonzero factors is nonzero")
    }

    pub fn re(&self) -> Self {
        let r = self.real_den();
        ScalarField {
            vars: r.vars.clone(),
            num: r.num.re(),
            den: r.den.clone(),
        }
        .reduce()
    }

    pub fn im(&self) -> Self {
        let r = self.real_den();
        ScalarField {
            vars: r.vars.clone(),
            num: r.num.im(),
            den: r.den.clone(),
        }
        .reduce()
    }

    pub fn is_real(&self) -> bool {
        self.im().is_zero()
    }

    /// `f(x) -> f(t x)`; fails when `f` already depends on `t`.
    pub fn substitute_scale(&self) -> Result<Self, SymbolicError> {
        if self.depends_on(Var::T) {
            return Err(SymbolicError::AlreadyTimeDependent);
        }
        ScalarField {
            vars: merge_vars(&self.vars, &[Var::T]),
            num: self.num.scale_coords_by_t(),
            den: self
                .den
                .iter()
                .map(|(f, e)| (f.scale_coords_by_t(), *e))
                .collect(),
        }
        .normalize_den()
    }

    /// Substitutes a constant value for `v` and drops it from the variables.
    pub fn substitute(&self, v: Var, value: &Cq) -> Result<Self, SymbolicError> {
        let out = ScalarField {
            vars: self.vars.iter().copied().filter(|&w| w != v).collect(),
            num: self.num.substitute(v, value),
            den: self
                .den
                .iter()
                .map(|(f, e)| (f.substitute(v, value), *e))
                .collect(),
        };
        out.normalize_den()
    }

    /// Evaluates at a point given for the declared variables, in order.
    pub fn evaluate(&self, point: &[Cq]) -> Result<Cq, SymbolicError> {
        if point.len() != self.vars.len() {
            return Err(SymbolicError::PointLength {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        self.evaluate_with(&|v| {
            self.vars
                .iter()
                .position(|&w| w == v)
                .map(|k| point[k].clone())
                .unwrap_or_else(Cq::zero)
        })
    }

    pub fn evaluate_with(&self, point: &dyn Fn(Var) -> Cq) -> Result<Cq, SymbolicError> {
        let mut value = self.num.eval(point);
        for (f, e) in &self.den {
            let d = f.eval(point);
            let inv = cq_recip(&d).ok_or(SymbolicError::DivisionByZero)?;
            value *= cq_pow(&inv, *e);
        }
        Ok(value)
    }

    /// Floating-point evaluation at a point given for the declared variables.
    pub fn evaluate_f64(&self, point: &[Complex64]) -> Result<Complex64, SymbolicError> {
        if point.len() != self.vars.len() {
            return Err(SymbolicError::PointLength {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        let compiled = super::numeric::NumField::compile(self, &self.vars);
        Ok(compiled.eval(point))
    }

    /// Leading-order part check: all numerator terms have total coordinate
    /// degree at least `k` (denominators must not vanish at the origin).
    pub fn vanishes_to_order(&self, k: u32) -> bool {
        self.num.terms().all(|(m, _)| m.coord_degree() >= k)
    }

    /// Divides by `t^k` exactly, or returns the obstructing numerator monomials.
    pub fn div_t_power(&self, k: u32) -> Result<Self, Vec<Monomial>> {
        let bad: Vec<Monomial> = self
            .num
            .terms()
            .filter(|(m, _)| m.exponent(Var::T) < k)
            .map(|(m, _)| m.clone())
            .collect();
        if !bad.is_empty() {
            return Err(bad);
        }
        let tk = Monomial::from_pairs(vec![(Var::T, k)]);
        let num = Poly::from_terms(
            self.num
                .terms()
                .map(|(m, c)| (m.div(&tk).expect("checked above"), c.clone())),
        );
        Ok(ScalarField {
            vars: self.vars.clone(),
            num,
            den: self.den.clone(),
        }
        .reduce())
    }
}

impl ScalarField {
    /// `int_0^1 f dt` for a polynomial `f`; `None` when denominators occur.
    pub fn integrate_t_unit(&self) -> Option<Self> {
        if !self.is_polynomial() {
            return None;
        }
        let num = Poly::from_terms(self.num.terms().map(|(m, c)| {
            let (e, rest) = m.without(Var::T);
            (rest, c * cq_real(Rational::new(1.into(), (i64::from(e) + 1).into())))
        }));
        let vars = self.vars.iter().copied().filter(|&v| v != Var::T).collect();
        Some(ScalarField { vars, num, den: Vec::new() })
    }
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        if self.den.is_empty() && other.den.is_empty() {
            return self.num == other.num;
        }
        ScalarField::sub(self, other).is_zero()
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / (", self.num)?;
        for (k, (p, e)) in self.den.iter().enumerate() {
            if k > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "({p})")?;
            } else {
                write!(f, "({p})^{e}")?;
            }
        }
        write!(f, ")")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                ScalarField::$method(self, rhs)
            }
        }
        impl $trait<ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                ScalarField::$method(&self, &rhs)
            }
        }
        impl $trait<&ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                ScalarField::$method(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        ScalarField::neg(self)
    }
}

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        ScalarField::neg(&self)
    }
}

impl From<Poly> for ScalarField {
    fn from(p: Poly) -> Self {
        ScalarField::from_poly(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::coeff::{cq, cq_i, rat};
    use crate::symbolic::parse_field;

    fn f(s: &str) -> ScalarField {
        parse_field(s).unwrap()
    }

    #[test]
    fn addition_examples() {
        assert!((f("x1") + f("-x1")).is_zero());
        assert_eq!(f("(1+i)*x1") + f("(1-i)*x1"), f("2*x1"));
        let s = f("x1^2") + f("x1*x2");
        assert_eq!(s.term_count(), 2);
        assert_eq!(s.to_string(), "x1^2 + x1*x2");
    }

    #[test]
    fn multiplication_examples() {
        assert!((f("x1") * f("0")).is_zero());
        assert_eq!(f("x1 + x2") * f("x1 - x2"), f("x1^2 - x2^2"));
        assert_eq!(f("i*x1") * f("i*x1"), f("-x1^2"));
    }

    #[test]
    fn partial_examples() {
        assert_eq!(f("x1^2*x2").partial(Var::X(1)).unwrap(), f("2*x1*x2"));
        assert!(f("x1").with_vars(&[Var::X(2)]).partial(Var::X(2)).unwrap().is_zero());
        assert_eq!(f("t^3*x1").partial(Var::T).unwrap(), f("3*t^2*x1"));
        assert!(matches!(f("x1").partial(Var::X(3)), Err(SymbolicError::UnknownVariable(_))));
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(f("x1^2").evaluate(&[cq_int(3)]).unwrap(), cq_int(9));
        assert_eq!(f("x1*x2").evaluate(&[cq_int(2), cq_int(-1)]).unwrap(), cq_int(-2));
        assert_eq!(f("x1 + i*x2").evaluate(&[cq_int(1), cq_int(1)]).unwrap(), cq(rat(1, 1), rat(1, 1)));
        assert!(matches!(
            f("x1*x2").evaluate(&[cq_int(1)]),
            Err(SymbolicError::PointLength { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(f("i*x1").conj(), f("-i*x1"));
        assert_eq!(f("x1^2").conj(), f("x1^2"));
        let g = f("(2+3i)*x1*x2 - i");
        assert_eq!(g.conj().conj(), g);
    }

    #[test]
    fn scaling_substitution_examples() {
        assert_eq!(f("x1^2").substitute_scale().unwrap(), f("t^2*x1^2"));
        assert_eq!(f("5/7").substitute_scale().unwrap(), f("5/7"));
        assert_eq!(f("x1 + x1*x2").substitute_scale().unwrap(), f("t*x1 + t^2*x1*x2"));
        assert_eq!(f("t*x1").substitute_scale().unwrap_err(), SymbolicError::AlreadyTimeDependent);
    }

    #[test]
    fn localized_arithmetic() {
        let g = f("1 + x1^2");
        let inv = g.recip().unwrap();
        assert!(!inv.is_polynomial());
        assert_eq!(&inv * &g, ScalarField::one());
        // quotient rule
        assert_eq!(inv.diff(Var::X(1)), f("-2*x1") * inv.pow(2));
        // cancellation back to a polynomial
        let h = (f("x1^4 - 1") * inv.clone()).with_vars(&[]);
        assert!(h.is_polynomial());
        assert_eq!(h, f("x1^2 - 1"));
        assert_eq!(f("0").recip().unwrap_err(), SymbolicError::DivisionByZero);
        assert_eq!(
            inv.evaluate(&[cq_int(1)]).unwrap(),
            cq(rat(1, 2), rat(0, 1))
        );
        let z = f("x1 + i").recip().unwrap();
        assert_eq!(z.re(), f("x1") * (f("x1^2 + 1")).recip().unwrap());
        assert_eq!(z.im() * f("x1^2 + 1"), f("-1"));
        assert_eq!(cq_i() * cq_i(), cq_int(-1));
    }

    #[test]
    fn t_power_division() {
        let g = f("t^3*x1 + t^2*x2^2");
        assert_eq!(g.div_t_power(2).unwrap(), f("t*x1 + x2^2"));
        assert_eq!(g.div_t_power(3).unwrap_err().len(), 1);
        assert!(f("x1^2*x2 + x2^3").vanishes_to_order(3));
        assert!(!f("x1^2 + x2").vanishes_to_order(2));
    }
}
