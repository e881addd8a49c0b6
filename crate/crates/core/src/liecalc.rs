//! Lie derivatives along sections of a Courant algebroid, computed
//! algebraically through the Dorfman bracket.

use std::sync::Arc;

use crate::courant::axioms::{field_residual, run_identity, section_residual, tuples};
use crate::courant::{
    anchor_apply, courant_bracket, d_operator, dorfman_bracket, pairing, ChartKind, CourantChart, CourantError, Section, TupleMode, TwoForm,
};
pub use crate::courant::EndomorphismField;
use crate::linalg::FieldMatrix;
use crate::report::{Check, Report};
use crate::symbolic::coeff::cq_int;
use crate::symbolic::{ScalarField, Var};

/// `L_z f = rho(z) f`.
pub fn lie_derivative_function(z: &Section, f: &ScalarField) -> ScalarField {
    anchor_apply(z, f)
}

/// `L_z x = z o x`.
pub fn lie_derivative_section(z: &Section, x: &Section) -> Result<Section, CourantError> {
    dorfman_bracket(z, x)
}

/// `(L_z J)(y) = z o (J y) - J (z o y)` for one section `y`.
pub fn lie_derivative_endo_action(z: &Section, j: &EndomorphismField, y: &Section) -> Result<Section, CourantError> {
    Ok(dorfman_bracket(z, &j.apply(y))? - j.apply(&dorfman_bracket(z, y)?))
}

/// Matrix of `L_z J`, column by column on the frame.
pub fn lie_derivative_endo(z: &Section, j: &EndomorphismField) -> Result<EndomorphismField, CourantError> {
    z.check_same_chart(&j.column(0))?;
    let chart = z.chart();
    let cols = (0..chart.rank())
        .map(|k| lie_derivative_endo_action(z, j, &Section::basis(chart, k)).map(Section::into_coeffs))
        .collect::<Result<Vec<_>, _>>()?;
    EndomorphismField::new(chart, FieldMatrix::from_columns(&cols).expect("rank-sized columns"))
}

/// `(L_z w)(e_i, e_j) = rho(z) w_ij - w(z o e_i, e_j) - w(e_i, z o e_j)`.
pub fn lie_derivative_twoform(z: &Section, w: &TwoForm) -> Result<TwoForm, CourantError> {
    let chart = z.chart();
    if !chart.same(w.chart()) {
        return Err(CourantError::ChartMismatch);
    }
    let n = chart.rank();
    let ze: Vec<Section> = (0..n)
        .map(|i| dorfman_bracket(z, &Section::basis(chart, i)))
        .collect::<Result<_, _>>()?;
    let m = w.matrix();
    let mut out = FieldMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let ei = Section::basis(chart, i);
            let ek = Section::basis(chart, k);
            let v = anchor_apply(z, m.get(i, k)) - w.eval(&ze[i], &ek) - w.eval(&ei, &ze[k]);
            out.set(i, k, v);
        }
    }
    TwoForm::new(chart, out)
}

/// Classical formula on `TM + T*M`:
/// `L_{X+xi}(Y+eta) = [X,Y] + L_X eta - i_Y d xi`. Used as an oracle.
pub fn classical_lie_derivative(z: &Section, x: &Section) -> Result<Section, CourantError> {
    z.check_same_chart(x)?;
    let chart = z.chart();
    if chart.kind() != ChartKind::Standard {
        return Err(CourantError::ChartMismatch);
    }
    let d = chart.dim();
    let (xv, xi) = (z.vector_part(), z.covector_part());
    let (yv, eta) = (x.vector_part(), x.covector_part());
    let dd = |f: &ScalarField, mu: usize| f.diff(Var::coord(mu));
    let mut out = Vec::with_capacity(2 * d);
    for nu in 0..d {
        let mut acc = ScalarField::zero();
        for mu in 0..d {
            acc = acc + &xv[mu] * &dd(&yv[nu], mu) - &yv[mu] * &dd(&xv[nu], mu);
        }
        out.push(acc);
    }
    for nu in 0..d {
        let mut acc = ScalarField::zero();
        for mu in 0..d {
            acc = acc + &xv[mu] * &dd(&eta[nu], mu) + &eta[mu] * &dd(&xv[mu], nu);
            acc = acc - &yv[mu] * &(dd(&xi[nu], mu) - dd(&xi[mu], nu));
        }
        out.push(acc);
    }
    Section::new(chart, out)
}

/// Checks that `delta_z = (rho(z), z o .)` is an infinitesimal automorphism
/// on the trial data.
pub fn infinitesimal_automorphism_check(z: &Section, sections: &[Section], functions: &[ScalarField]) -> Result<Report, CourantError> {
    if sections.is_empty() || functions.is_empty() {
        return Err(CourantError::TooFewTrials { sections: 1, functions: 1 });
    }
    let mut report = Report::new("infinitesimal automorphism");
    // pair each section with the next one cyclically
    let n = sections.len();
    let pairs: Vec<(usize, usize)> = (0..n).map(|k| (k, (k + 1) % n)).collect();
    let run = |name: &str, f: &(dyn Fn(&Section, &Section, &ScalarField) -> Result<usize, CourantError> + Sync)| -> Result<Check, CourantError> {
        let mut total = 0;
        let mut loc = None;
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let t = f(&sections[i], &sections[j], &functions[k % functions.len()])?;
            if t > 0 && loc.is_none() {
                loc = Some(format!("sections ({}, {})", i + 1, j + 1));
            }
            total += t;
        }
        let c = Check::exact(name, total);
        Ok(match loc {
            Some(l) => c.at(l),
            None => c,
        })
    };
    report.push(run("preserves the pairing", &|x, y, _| {
        let lhs = anchor_apply(z, &pairing(x, y)?);
        let rhs = pairing(&dorfman_bracket(z, x)?, y)? + pairing(x, &dorfman_bracket(z, y)?)?;
        Ok((lhs - rhs).term_count())
    })?);
    report.push(run("derivation of the bracket", &|x, y, _| {
        let lhs = dorfman_bracket(z, &courant_bracket(x, y)?)?;
        let rhs = courant_bracket(&dorfman_bracket(z, x)?, y)? + courant_bracket(x, &dorfman_bracket(z, y)?)?;
        Ok((lhs - rhs).term_count())
    })?);
    report.push(run("covariant differential operator", &|x, _, f| {
        let lhs = dorfman_bracket(z, &x.scale_field(f))?;
        let rhs = dorfman_bracket(z, x)?.scale_field(f) + x.scale_field(&anchor_apply(z, f));
        Ok((lhs - rhs).term_count())
    })?);
    Ok(report)
}

/// The list of Lie derivative identities plus tensoriality and the tensor
/// product rule for `L_z J`, exact on trial data.
pub fn check_lie_identities(
    chart: &Arc<CourantChart>,
    sections: &[Section],
    functions: &[ScalarField],
    endos: &[EndomorphismField],
    mode: TupleMode,
) -> Result<Report, CourantError> {
    if sections.len() < 3 || functions.is_empty() || endos.is_empty() {
        return Err(CourantError::TooFewTrials { sections: 3, functions: 1 });
    }
    let ts = tuples(sections, functions, mode);
    let endo_of = |label: &str| {
        // deterministic endomorphism choice per tuple
        let h = label.bytes().fold(0usize, |a, b| a.wrapping_mul(31).wrapping_add(b as usize));
        &endos[h % endos.len()]
    };
    let mut report = Report::new("lie derivative identities");

    report.push(run_identity("L_z f = rho(z) f = 2<Df, z>", &ts, |t| {
        let lhs = lie_derivative_function(t.a, t.f);
        let rhs = pairing(&d_operator(chart, t.f), t.a)?.scale(&cq_int(2));
        Ok(field_residual(&(lhs - rhs)))
    })?);

    if chart.kind() == ChartKind::Standard {
        report.push(run_identity("L_z x = z o x (classical formula)", &ts, |t| {
            Ok(section_residual(&(lie_derivative_section(t.a, t.b)? - classical_lie_derivative(t.a, t.b)?)))
        })?);
    } else {
        report.note("classical Lie derivative oracle needs a standard chart; skipped");
    }

    report.push(run_identity("L_Df x = 0", &ts, |t| {
        Ok(section_residual(&lie_derivative_section(&d_operator(chart, t.f), t.b)?))
    })?);

    report.push(run_identity("L_z <x,y> = <L_z x, y> + <x, L_z y>", &ts, |t| {
        let lhs = lie_derivative_function(t.a, &pairing(t.b, t.c)?);
        let rhs = pairing(&lie_derivative_section(t.a, t.b)?, t.c)? + pairing(t.b, &lie_derivative_section(t.a, t.c)?)?;
        Ok(field_residual(&(lhs - rhs)))
    })?);

    report.push(run_identity("L_z [x,y] = [L_z x, y] + [x, L_z y]", &ts, |t| {
        let lhs = lie_derivative_section(t.a, &courant_bracket(t.b, t.c)?)?;
        let rhs = courant_bracket(&lie_derivative_section(t.a, t.b)?, t.c)? + courant_bracket(t.b, &lie_derivative_section(t.a, t.c)?)?;
        Ok(section_residual(&(lhs - rhs)))
    })?);

    report.push(run_identity("L_fx y = f L_x y - (L_y f) x + 2<x,y> Df", &ts, |t| {
        let lhs = lie_derivative_section(&t.a.scale_field(t.f), t.b)?;
        let rhs = lie_derivative_section(t.a, t.b)?.scale_field(t.f) - t.a.scale_field(&lie_derivative_function(t.b, t.f))
            + d_operator(chart, t.f).scale_field(&pairing(t.a, t.b)?.scale(&cq_int(2)));
        Ok(section_residual(&(lhs - rhs)))
    })?);

    report.push(run_identity("L_[x,y] w = [L_x, L_y] w", &ts, |t| {
        let lhs = lie_derivative_section(&courant_bracket(t.a, t.b)?, t.c)?;
        let rhs = lie_derivative_section(t.a, &lie_derivative_section(t.b, t.c)?)? - lie_derivative_section(t.b, &lie_derivative_section(t.a, t.c)?)?;
        Ok(section_residual(&(lhs - rhs)))
    })?);

    report.push(run_identity("(L_z J)(f y) = f (L_z J)(y)", &ts, |t| {
        let j = endo_of(&t.label);
        let lzj = lie_derivative_endo(t.a, j)?;
        let lhs = lie_derivative_endo_action(t.a, j, &t.b.scale_field(t.f))?;
        let via_matrix = lzj.apply(t.b).scale_field(t.f);
        let direct = lie_derivative_endo_action(t.a, j, t.b)?.scale_field(t.f);
        Ok(section_residual(&((lhs.clone() - via_matrix) + (lhs - direct))))
    })?);

    report.push(run_identity("L_z <x, J y> product rule", &ts, |t| {
        let j = endo_of(&t.label);
        let lhs = lie_derivative_function(t.a, &pairing(t.b, &j.apply(t.c))?);
        let rhs = pairing(&lie_derivative_section(t.a, t.b)?, &j.apply(t.c))?
            + pairing(t.b, &lie_derivative_endo(t.a, j)?.apply(t.c))?
            + pairing(t.b, &j.apply(&lie_derivative_section(t.a, t.c)?))?;
        Ok(field_residual(&(lhs - rhs)))
    })?);

    report.note(format!("{} trial tuples, {:?} selection", ts.len(), mode));
    Ok(report)
}
