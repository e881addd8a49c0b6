//! Floating-point compilation of scalar fields for repeated evaluation.

use num_complex::Complex64;

use super::coeff::cq_to_c64;
use super::field::ScalarField;
use super::monomial::Var;
use super::poly::Poly;

#[derive(Clone, Debug)]
struct NumPoly {
    // (slot, exponent) pairs per term
    terms: Vec<(Vec<(usize, u32)>, Complex64)>,
}

impl NumPoly {
    fn compile(p: &Poly, order: &[Var]) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let slots = m
                    .pairs()
                    .iter()
                    .filter_map(|&(v, e)| order.iter().position(|&w| w == v).map(|k| (k, e)))
                    .collect();
                (slots, cq_to_c64(c))
            })
            .collect();
        NumPoly { terms }
    }

    fn eval(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (slots, c) in &self.terms {
            let mut t = *c;
            for &(k, e) in slots {
                t *= x[k].powu(e);
            }
            acc += t;
        }
        acc
    }

    fn eval_real(&self, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (slots, c) in &self.terms {
            let mut t = 1.0;
            for &(k, e) in slots {
                t *= x[k].powi(e as i32);
            }
            acc += c * t;
        }
        acc
    }
}

/// A scalar field compiled against a fixed variable order. Variables absent
/// from the order are treated as zero.
#[derive(Clone, Debug)]
pub struct NumField {
    num: NumPoly,
    den: Vec<(NumPoly, i32)>,
}

impl NumField {
    pub fn compile(f: &ScalarField, order: &[Var]) -> Self {
        NumField {
            num: NumPoly::compile(f.numerator(), order),
            den: f
                .denominators()
                .iter()
                .map(|(p, e)| (NumPoly::compile(p, order), *e as i32))
                .collect(),
        }
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        let mut v = self.num.eval(x);
        for (d, e) in &self.den {
            v /= d.eval(x).powi(*e);
        }
        v
    }

    pub fn eval_real(&self, x: &[f64]) -> Complex64 {
        let mut v = self.num.eval_real(x);
        for (d, e) in &self.den {
            v /= d.eval_real(x).powi(*e);
        }
        v
    }
}
