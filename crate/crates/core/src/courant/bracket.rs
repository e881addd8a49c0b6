use std::sync::Arc;

use num_traits::Zero;

use super::{CourantChart, CourantError, Section};
use crate::symbolic::coeff::cq_real;
use crate::symbolic::{Rational, ScalarField, Var};

/// `<a, b> = sum a_i g_ij b_j`.
pub fn pairing(a: &Section, b: &Section) -> Result<ScalarField, CourantError> {
    a.check_same_chart(b)?;
    Ok(pairing_unchecked(a.coeffs(), b.coeffs(), a.chart().pairing_matrix()))
}

fn pairing_unchecked(a: &[ScalarField], b: &[ScalarField], g: &[Vec<Rational>]) -> ScalarField {
    let mut acc = ScalarField::zero();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if g[i][j].is_zero() || bj.is_zero() {
                continue;
            }
            acc = acc + (ai * bj).scale(&cq_real(g[i][j].clone()));
        }
    }
    acc
}

/// Components `rho(a)^mu` of the anchored vector field.
pub fn anchor_vector(a: &Section) -> Vec<ScalarField> {
    a.chart().anchor().apply(a.coeffs())
}

/// `v(f) = sum v^mu d_mu f` for a vector field given by components.
pub fn vector_field_apply(v: &[ScalarField], f: &ScalarField) -> ScalarField {
    let mut acc = ScalarField::zero();
    for (mu, vm) in v.iter().enumerate() {
        if vm.is_zero() {
            continue;
        }
        let df = f.diff(Var::coord(mu));
        if !df.is_zero() {
            acc = acc + vm * &df;
        }
    }
    acc
}

/// `rho(a) f`.
pub fn anchor_apply(a: &Section, f: &ScalarField) -> ScalarField {
    vector_field_apply(&anchor_vector(a), f)
}

/// The section `D f` with `<D f, a> = 1/2 rho(a) f`.
pub fn d_operator(chart: &Arc<CourantChart>, f: &ScalarField) -> Section {
    let grad: Vec<ScalarField> = (0..chart.dim()).map(|mu| f.diff(Var::coord(mu))).collect();
    let coeffs = chart.d_matrix().apply(&grad);
    Section::new(chart, coeffs).expect("rank-sized")
}

/// Courant bracket via the frame expansion
/// `[fA, gB] = fg[A,B] + f(rho(A)g)B - g(rho(B)f)A + <A,B>(g Df - f Dg)`.
pub fn courant_bracket(a: &Section, b: &Section) -> Result<Section, CourantError> {
    a.check_same_chart(b)?;
    let chart = a.chart();
    let n = chart.rank();
    let ra = anchor_vector(a);
    let rb = anchor_vector(b);
    let mut out: Vec<ScalarField> = (0..n)
        .map(|k| {
            let t1 = vector_field_apply(&ra, b.coeff(k));
            let t2 = vector_field_apply(&rb, a.coeff(k));
            t1 - t2
        })
        .collect();
    if !chart.is_flat() {
        for i in 0..n {
            if a.coeff(i).is_zero() {
                continue;
            }
            for j in 0..n {
                if b.coeff(j).is_zero() {
                    continue;
                }
                let c = chart.structure(i, j);
                if c.iter().all(ScalarField::is_zero) {
                    continue;
                }
                let ab = a.coeff(i) * b.coeff(j);
                for (k, ck) in c.iter().enumerate() {
                    if !ck.is_zero() {
                        out[k] = &out[k] + &(&ab * ck);
                    }
                }
            }
        }
    }
    // sum_i (g b)_i D a_i - sum_j (g a)_j D b_j, folded into one gradient
    let g = chart.pairing_matrix();
    let gb = weighted(g, b.coeffs());
    let ga = weighted(g, a.coeffs());
    let mut grad = vec![ScalarField::zero(); chart.dim()];
    for (mu, gmu) in grad.iter_mut().enumerate() {
        let v = Var::coord(mu);
        for i in 0..n {
            if !gb[i].is_zero() {
                let d = a.coeff(i).diff(v);
                if !d.is_zero() {
                    *gmu = &*gmu + &(&gb[i] * &d);
                }
            }
            if !ga[i].is_zero() {
                let d = b.coeff(i).diff(v);
                if !d.is_zero() {
                    *gmu = &*gmu - &(&ga[i] * &d);
                }
            }
        }
    }
    let corr = chart.d_matrix().apply(&grad);
    for (o, c) in out.iter_mut().zip(corr) {
        if !c.is_zero() {
            *o = &*o + &c;
        }
    }
    Section::new(chart, out)
}

fn weighted(g: &[Vec<Rational>], v: &[ScalarField]) -> Vec<ScalarField> {
    (0..v.len())
        .map(|i| {
            let mut acc = ScalarField::zero();
            for (j, vj) in v.iter().enumerate() {
                if !g[i][j].is_zero() && !vj.is_zero() {
                    acc = acc + vj.scale(&cq_real(g[i][j].clone()));
                }
            }
            acc
        })
        .collect()
}

/// `a o b = [a, b] + D<a, b>`.
pub fn dorfman_bracket(a: &Section, b: &Section) -> Result<Section, CourantError> {
    let br = courant_bracket(a, b)?;
    let p = pairing(a, b)?;
    Ok(br + d_operator(a.chart(), &p))
}
