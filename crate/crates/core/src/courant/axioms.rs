//! Exact verification of the Courant algebroid axioms on trial data.

use std::sync::Arc;

use rayon::prelude::*;

use super::bracket::{anchor_apply, anchor_vector, courant_bracket, d_operator, dorfman_bracket, pairing, vector_field_apply};
use super::{CourantChart, CourantError, Section};
use crate::report::{Check, Report};
use crate::symbolic::coeff::rat;
use crate::symbolic::coeff::cq_real;
use crate::symbolic::ScalarField;

/// How trial tuples are drawn from the trial lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleMode {
    /// Consecutive cyclic windows `(s_k, s_k+1, s_k+2)`: one tuple per section.
    Window,
    /// Every ordered triple of sections.
    All,
}

pub(crate) struct Tuple<'a> {
    pub a: &'a Section,
    pub b: &'a Section,
    pub c: &'a Section,
    pub f: &'a ScalarField,
    pub g: &'a ScalarField,
    pub label: String,
}

pub(crate) fn tuples<'a>(sections: &'a [Section], functions: &'a [ScalarField], mode: TupleMode) -> Vec<Tuple<'a>> {
    let n = sections.len();
    let nf = functions.len();
    let mut out = Vec::new();
    let mut push = |i: usize, j: usize, k: usize, q: usize| {
        out.push(Tuple {
            a: &sections[i],
            b: &sections[j],
            c: &sections[k],
            f: &functions[q % nf],
            g: &functions[(q + 1) % nf],
            label: format!("sections ({}, {}, {}), function {}", i + 1, j + 1, k + 1, q % nf + 1),
        });
    };
    match mode {
        TupleMode::Window => {
            for k in 0..n {
                push(k, (k + 1) % n, (k + 2) % n, k);
            }
        }
        TupleMode::All => {
            let mut q = 0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        push(i, j, k, q);
                        q += 1;
                    }
                }
            }
        }
    }
    out
}

/// A residual from one tuple: numerator term count plus a printable form.
pub(crate) type Residual = (usize, String);

pub(crate) fn section_residual(s: &Section) -> Residual {
    (s.term_count(), if s.is_zero() { String::new() } else { s.to_string() })
}

pub(crate) fn field_residual(f: &ScalarField) -> Residual {
    (f.term_count(), if f.is_zero() { String::new() } else { f.to_string() })
}

pub(crate) fn vector_residual(v: &[ScalarField]) -> Residual {
    let terms = v.iter().map(ScalarField::term_count).sum();
    let text = if terms == 0 {
        String::new()
    } else {
        let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
        format!("({})", parts.join(", "))
    };
    (terms, text)
}

/// Runs one identity over all tuples (in parallel, deterministic order) and
/// folds the results into a single exact check.
pub(crate) fn run_identity<F>(name: &str, tuples: &[Tuple<'_>], f: F) -> Result<Check, CourantError>
where
    F: Fn(&Tuple<'_>) -> Result<Residual, CourantError> + Sync,
{
    let results: Vec<Result<Residual, CourantError>> = tuples.par_iter().map(&f).collect();
    let mut total = 0;
    let mut first: Option<(String, String)> = None;
    for (t, r) in tuples.iter().zip(results) {
        let (terms, text) = r?;
        if terms > 0 {
            total += terms;
            if first.is_none() {
                first = Some((t.label.clone(), text));
            }
        }
    }
    let mut check = Check::exact(name, total);
    if let Some((loc, text)) = first {
        check = check.at(loc).with_detail(text);
    }
    Ok(check)
}

fn vector_bracket(x: &[ScalarField], y: &[ScalarField]) -> Vec<ScalarField> {
    (0..x.len())
        .map(|mu| vector_field_apply(x, &y[mu]) - vector_field_apply(y, &x[mu]))
        .collect()
}

/// Checks the five Courant axioms over cyclic windows of the trial sections.
pub fn check_axioms(chart: &Arc<CourantChart>, sections: &[Section], functions: &[ScalarField]) -> Result<Report, CourantError> {
    check_axioms_with(chart, sections, functions, TupleMode::Window)
}

pub fn check_axioms_with(
    chart: &Arc<CourantChart>,
    sections: &[Section],
    functions: &[ScalarField],
    mode: TupleMode,
) -> Result<Report, CourantError> {
    if sections.len() < 3 || functions.len() < 2 {
        return Err(CourantError::TooFewTrials { sections: 3, functions: 2 });
    }
    for s in sections {
        if !chart.same(s.chart()) {
            return Err(CourantError::ChartMismatch);
        }
    }
    let ts = tuples(sections, functions, mode);
    let mut report = Report::new("axioms");

    report.push(run_identity("anchor is a bracket morphism", &ts, |t| {
        let lhs = anchor_vector(&courant_bracket(t.a, t.b)?);
        let rhs = vector_bracket(&anchor_vector(t.a), &anchor_vector(t.b));
        let diff: Vec<ScalarField> = lhs.iter().zip(&rhs).map(|(x, y)| x - y).collect();
        Ok(vector_residual(&diff))
    })?);

    report.push(run_identity("jacobiator equals D of the cyclic pairing", &ts, |t| {
        let ab = courant_bracket(t.a, t.b)?;
        let bc = courant_bracket(t.b, t.c)?;
        let ca = courant_bracket(t.c, t.a)?;
        let jac = courant_bracket(&ab, t.c)? + courant_bracket(&bc, t.a)? + courant_bracket(&ca, t.b)?;
        let cyc = pairing(&ab, t.c)? + pairing(&bc, t.a)? + pairing(&ca, t.b)?;
        let rhs = d_operator(chart, &cyc.scale(&cq_real(rat(1, 3))));
        Ok(section_residual(&(jac - rhs)))
    })?);

    report.push(run_identity("Leibniz rule", &ts, |t| {
        let fb = t.b.scale_field(t.f);
        let lhs = courant_bracket(t.a, &fb)?;
        let rhs = courant_bracket(t.a, t.b)?.scale_field(t.f) + t.b.scale_field(&anchor_apply(t.a, t.f))
            - d_operator(chart, t.f).scale_field(&pairing(t.a, t.b)?);
        Ok(section_residual(&(lhs - rhs)))
    })?);

    report.push(run_identity("anchor kills D", &ts, |t| {
        let df = d_operator(chart, t.f);
        let dg = d_operator(chart, t.g);
        let mut v = anchor_vector(&df);
        v.push(pairing(&df, &dg)?);
        Ok(vector_residual(&v))
    })?);

    report.push(run_identity("pairing invariance", &ts, |t| {
        let lhs = anchor_apply(t.a, &pairing(t.b, t.c)?);
        let ab = courant_bracket(t.a, t.b)? + d_operator(chart, &pairing(t.a, t.b)?);
        let ac = courant_bracket(t.a, t.c)? + d_operator(chart, &pairing(t.a, t.c)?);
        let rhs = pairing(&ab, t.c)? + pairing(t.b, &ac)?;
        Ok(field_residual(&(lhs - rhs)))
    })?);

    report.note(format!("{} trial tuples, {:?} selection", ts.len(), mode));
    Ok(report)
}

/// The Dorfman-bracket identities plus the symmetric/antisymmetric split.
pub fn check_dorfman_identities(
    chart: &Arc<CourantChart>,
    sections: &[Section],
    functions: &[ScalarField],
    mode: TupleMode,
) -> Result<Report, CourantError> {
    if sections.len() < 3 || functions.is_empty() {
        return Err(CourantError::TooFewTrials { sections: 3, functions: 1 });
    }
    let ts = tuples(sections, functions, mode);
    let mut report = Report::new("dorfman");

    report.push(run_identity("Df o a = 0", &ts, |t| {
        Ok(section_residual(&dorfman_bracket(&d_operator(chart, t.f), t.a)?))
    })?);

    report.push(run_identity("a o [b,c] = [a o b, c] + [b, a o c]", &ts, |t| {
        let lhs = dorfman_bracket(t.a, &courant_bracket(t.b, t.c)?)?;
        let rhs = courant_bracket(&dorfman_bracket(t.a, t.b)?, t.c)? + courant_bracket(t.b, &dorfman_bracket(t.a, t.c)?)?;
        Ok(section_residual(&(lhs - rhs)))
    })?);

    report.push(run_identity("a o (fb) = f(a o b) + (rho(a)f) b", &ts, |t| {
        let lhs = dorfman_bracket(t.a, &t.b.scale_field(t.f))?;
        let rhs = dorfman_bracket(t.a, t.b)?.scale_field(t.f) + t.b.scale_field(&anchor_apply(t.a, t.f));
        Ok(section_residual(&(lhs - rhs)))
    })?);

    report.push(run_identity("rho(a)<b,c> = <a o b, c> + <b, a o c>", &ts, |t| {
        let lhs = anchor_apply(t.a, &pairing(t.b, t.c)?);
        let rhs = pairing(&dorfman_bracket(t.a, t.b)?, t.c)? + pairing(t.b, &dorfman_bracket(t.a, t.c)?)?;
        Ok(field_residual(&(lhs - rhs)))
    })?);

    report.push(run_identity("[a,b] + [b,a] = 0", &ts, |t| {
        Ok(section_residual(&(courant_bracket(t.a, t.b)? + courant_bracket(t.b, t.a)?)))
    })?);

    report.push(run_identity("a o b + b o a = 2 D<a,b>", &ts, |t| {
        let lhs = dorfman_bracket(t.a, t.b)? + dorfman_bracket(t.b, t.a)?;
        let d = d_operator(chart, &pairing(t.a, t.b)?);
        Ok(section_residual(&(lhs - d.clone() - d)))
    })?);

    report.note(format!("{} trial tuples, {:?} selection", ts.len(), mode));
    Ok(report)
}
