//! Exact complex-rational coefficients.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Complex number with arbitrary-precision rational real and imaginary parts.
pub type Cq = Complex<BigRational>;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn cq(re: Rational, im: Rational) -> Cq {
    Complex::new(re, im)
}

pub fn cq_int(n: i64) -> Cq {
    Complex::new(rat_int(n), Rational::zero())
}

pub fn cq_real(r: Rational) -> Cq {
    Complex::new(r, Rational::zero())
}

pub fn cq_i() -> Cq {
    Complex::new(Rational::zero(), Rational::one())
}

pub fn cq_zero() -> Cq {
    Cq::zero()
}

pub fn cq_one() -> Cq {
    Cq::one()
}

pub fn is_real(c: &Cq) -> bool {
    c.im.is_zero()
}

/// Exact reciprocal; `None` for zero.
pub fn cq_recip(c: &Cq) -> Option<Cq> {
    if c.is_zero() {
        None
    } else {
        Some(c.inv())
    }
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn cq_to_c64(c: &Cq) -> Complex64 {
    Complex64::new(rat_to_f64(&c.re), rat_to_f64(&c.im))
}

/// Exact rational value of a finite float.
pub fn rat_from_f64(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}

/// Magnitude bound `max(|re|, |im|)` as a float.
pub fn cq_abs_max(c: &Cq) -> f64 {
    rat_to_f64(&c.re.abs()).max(rat_to_f64(&c.im.abs()))
}

pub fn cq_pow(c: &Cq, e: u32) -> Cq {
    let mut acc = cq_one();
    for _ in 0..e {
        acc = &acc * c;
    }
    acc
}

/// Parse `a` or `a/b` with optional sign into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else if s.contains(['.', 'e', 'E']) {
        let x: f64 = s.parse().ok()?;
        // decimal literals are read as the shortest exact decimal fraction
        decimal_to_rational(s).or_else(|| rat_from_f64(x))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

fn decimal_to_rational(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().ok()?;
    let scale = i64::from(exp) - frac_part.len() as i64;
    if scale.unsigned_abs() > 400 {
        return None;
    }
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(n);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Formats a rational as `a` or `a/b`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recip_of_i_is_minus_i() {
        let r = cq_recip(&cq_i()).unwrap();
        assert_eq!(r, -cq_i());
        assert!(cq_recip(&cq_zero()).is_none());
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-2"), Some(rat_int(-2)));
        assert_eq!(parse_rational("0.1"), Some(rat(1, 10)));
        assert_eq!(parse_rational("1e-5"), Some(rat(1, 100_000)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
