//! Scaling families `J_t(x) = J(tx)`, the scaling lemma and the local
//! triviality criterion around the origin.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::courant::{pairing, ChartKind, CourantChart, Section};
use crate::gcs::{coboundary_of_pairing, half, split_rank, GcsCandidate, Provenance};
use crate::linalg::FieldMatrix;
use crate::moser::{
    integrate_flow, moser_pipeline, numeric_grid, CompiledGenerator, FamilySource, GcsFamily, MoserError, NumericConfig, Representation, SectionFamily,
    TimeDependent, ZSpec,
};
use crate::report::{Check, CheckKind, Report};
use crate::symbolic::coeff::{cq_i, cq_int, rat_to_f64, Rational};
use crate::symbolic::{ScalarField, Var};

pub const DBETA_NOTE: &str = "d beta|0 = 0 is read as: every frame component of beta has vanishing value and first partials at the origin";

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DarbouxError {
    #[error("scaling families need a standard chart")]
    NonStandardChart,
    #[error("the homotopy primitive needs a symplectic structure")]
    NotSymplectic,
    #[error("the homotopy primitive needs polynomial coefficients: {0}")]
    NotPolynomial(String),
    #[error(transparent)]
    Moser(#[from] MoserError),
}

impl From<crate::symbolic::SymbolicError> for DarbouxError {
    fn from(e: crate::symbolic::SymbolicError) -> Self {
        DarbouxError::Moser(e.into())
    }
}

impl From<crate::courant::CourantError> for DarbouxError {
    fn from(e: crate::courant::CourantError) -> Self {
        DarbouxError::Moser(e.into())
    }
}

impl From<crate::gcs::GcsError> for DarbouxError {
    fn from(e: crate::gcs::GcsError) -> Self {
        DarbouxError::Moser(e.into())
    }
}

fn standard(chart: &CourantChart) -> Result<usize, DarbouxError> {
    if chart.kind() != ChartKind::Standard {
        return Err(DarbouxError::NonStandardChart);
    }
    Ok(split_rank(chart)?)
}

fn scale_matrix(m: &FieldMatrix) -> Result<FieldMatrix, DarbouxError> {
    Ok(m.try_map(ScalarField::substitute_scale)?)
}

/// `Omega` with `Omega_flat = Omega^T` read off the lower-left block of `J`.
fn symplectic_form(j: &GcsCandidate, m: usize) -> FieldMatrix {
    j.matrix().block(m, 0, m, m).transpose()
}

/// `J_t e_j|_x = a^i_j(t x) e_i|_x`, in the polynomial representation.
/// Symplectic inputs keep their provenance through `Omega_t(x) = Omega(t x)`.
pub fn scaling_family(j: &GcsCandidate, times: &[Rational]) -> Result<GcsFamily, DarbouxError> {
    let chart = j.chart();
    let m = standard(chart)?;
    let source = if j.provenance() == Provenance::Symplectic {
        FamilySource::Symplectic(TimeDependent::from_matrix(scale_matrix(&symplectic_form(j, m))?))
    } else {
        FamilySource::Raw(TimeDependent::from_matrix(scale_matrix(j.matrix())?))
    };
    let fam = GcsFamily::new(chart, source, Representation::PolyInT, times)?;
    let sym = fam.symbolic().expect("polynomial representation");
    if sym.j.matrix() != &scale_matrix(j.matrix())? {
        return Err(MoserError::Incompatible("scaled symplectic form does not reproduce J(tx)".into()).into());
    }
    Ok(fam)
}

fn t_power(k: u32) -> ScalarField {
    ScalarField::var(Var::T).pow(k)
}

/// `t^3 omega_dot_t(e_i, e_j)|_x = t^2 omega_dot_1(e_i, e_j)|_{tx}`, exactly in `(t, x)`,
/// and the intertwining `J o phi_t = phi_t o J_t` for `phi_t(e_i|_x) = t e_i|_{tx}`.
pub fn verify_scaling_lemma(fam: &GcsFamily) -> Result<Report, DarbouxError> {
    let chart = fam.chart();
    let sym = fam
        .symbolic()
        .ok_or_else(|| MoserError::NotSymbolic("scaling families are polynomial in t".into()))?;
    let g = chart.pairing_fields();
    let wdot = g.mul(&sym.jdot);
    let lhs = wdot.scale_field(&t_power(3));
    let w1 = wdot.substitute(Var::T, &cq_int(1))?;
    let rhs = scale_matrix(&w1)?.scale_field(&t_power(2));
    let mut r = Report::new("scaling-lemma");
    r.push(Check::exact_matrix("t^3 omega_dot_t = phi_t* omega_dot_1", &lhs.sub(&rhs)));
    let j1 = sym.j.matrix().substitute(Var::T, &cq_int(1))?;
    let t = t_power(1);
    // J at tx applied to t e_j, against t times J_t(x) e_j
    let inter = scale_matrix(&j1)?.scale_field(&t).sub(&sym.j.matrix().scale_field(&t));
    r.push(Check::exact_matrix("J o phi_t = phi_t o J_t", &inter));
    let j0 = sym.j.matrix().substitute(Var::T, &cq_int(0))?;
    r.push(Check::flag("J_0 is constant", CheckKind::Exact, j0.entries().all(ScalarField::is_constant)));
    Ok(r)
}

/// Hypotheses of the triviality criterion for `beta = <conj z, .>`, and on
/// success the family `z_t` with `beta_t = t^-3 phi_t* beta`.
pub fn dw_criterion_check(fam: &GcsFamily, z: &Section) -> Result<(Report, Option<SectionFamily>), DarbouxError> {
    let chart = fam.chart();
    let n = chart.rank();
    let sym = fam
        .symbolic()
        .ok_or_else(|| MoserError::NotSymbolic("scaling families are polynomial in t".into()))?;
    let one = cq_int(1);
    let j1 = sym.j.at_time(&one)?;
    let jdot1 = sym.jdot.substitute(Var::T, &one)?;
    let g = chart.pairing_fields();
    let w1 = g.mul(&jdot1);
    let mut r = Report::new("dw-criterion");
    r.note(DBETA_NOTE);

    let in_l = j1.endomorphism().apply(z) - z.scale(&cq_i());
    r.push(Check::exact("z is a section of L", in_l.term_count()));

    let p = FieldMatrix::identity(n).sub(&j1.matrix().scale(&cq_i())).scale(&half());
    let secs: Vec<Section> = (0..n).map(|k| Section::new(chart, p.column(k))).collect::<Result<_, _>>()?;
    let zbar = z.conj();
    let mut total = 0;
    let mut first = None;
    for i in 0..n {
        for k in i + 1..n {
            let lhs = coboundary_of_pairing(&zbar, &secs[i], &secs[k])?;
            let rhs = secs[i]
                .coeffs()
                .iter()
                .zip(w1.apply(secs[k].coeffs()))
                .fold(ScalarField::zero(), |acc, (a, b)| acc + a * &b);
            let res = lhs - rhs;
            if !res.is_zero() {
                total += res.term_count();
                first.get_or_insert(format!("pair (Pe{}, Pe{})", i + 1, k + 1));
            }
        }
    }
    let mut a = Check::exact("(a) d_L beta = omega_dot_1 on L", total);
    if let Some(loc) = first {
        a = a.at(loc);
    }
    r.push(a);

    let beta: Vec<ScalarField> = (0..n).map(|i| pairing(&zbar, &Section::basis(chart, i))).collect::<Result<_, _>>()?;
    let at_zero = |f: &ScalarField| -> bool {
        f.evaluate_with(&|v| if v.is_coord() { cq_int(0) } else { cq_int(1) })
            .map(|c| c == cq_int(0))
            .unwrap_or(false)
    };
    let bad_b: Vec<usize> = (0..n).filter(|&i| !at_zero(&beta[i])).collect();
    let mut b = Check::flag("(b) beta vanishes at 0", CheckKind::Exact, bad_b.is_empty());
    if let Some(&i) = bad_b.first() {
        b = b.at(format!("component {}", i + 1)).with_detail(beta[i].to_string());
    }
    r.push(b);
    let d = chart.dim();
    let mut bad_c = None;
    for (i, f) in beta.iter().enumerate() {
        for mu in 0..d {
            if bad_c.is_none() && !at_zero(&f.diff(Var::coord(mu))) {
                bad_c = Some((i, mu));
            }
        }
    }
    let mut c = Check::flag("(c) first partials of beta vanish at 0", CheckKind::Exact, bad_c.is_none());
    if let Some((i, mu)) = bad_c {
        c = c.at(format!("d/dx{} of component {}", mu + 1, i + 1));
    }
    r.push(c);
    if !r.passed() {
        return Ok((r, None));
    }

    // z_t(x) = t^-2 z(tx): phi_t* contributes one factor of t, the normalization t^-3
    let mut coeffs = Vec::with_capacity(n);
    for (i, f) in z.coeffs().iter().enumerate() {
        match f.substitute_scale()?.div_t_power(2) {
            Ok(v) => coeffs.push(v),
            Err(bad) => {
                let mons: Vec<String> = bad.iter().map(ToString::to_string).collect();
                r.push(
                    Check::flag("t^-3 phi_t* beta is polynomial", CheckKind::Exact, false)
                        .at(format!("component {}", i + 1))
                        .with_detail(format!("obstructing monomials: {}", mons.join(", "))),
                );
                return Ok((r, None));
            }
        }
    }
    r.push(Check::flag("t^-3 phi_t* beta is polynomial", CheckKind::Exact, true));
    let zt = SectionFamily::new(chart, ZSpec::Z(TimeDependent::column(coeffs)))?;
    Ok((r, Some(zt)))
}

/// Cone-operator primitive `xi = -int_0^1 s i_x W(sx) ds` of the closed form
/// `W = d/dt Omega(tx) at t = 1`, so `d xi = -W`; returned as
/// `z = i pi# xi + xi`.
pub fn symplectic_homotopy_primitive(j: &GcsCandidate) -> Result<Section, DarbouxError> {
    if j.provenance() != Provenance::Symplectic {
        return Err(DarbouxError::NotSymplectic);
    }
    let chart = j.chart();
    let m = standard(chart)?;
    let omega = symplectic_form(j, m);
    if let Some(f) = omega.entries().find(|f| !f.is_polynomial()) {
        return Err(DarbouxError::NotPolynomial(f.to_string()));
    }
    let w = scale_matrix(&omega)?.diff(Var::T).substitute(Var::T, &cq_int(1))?;
    // W(sx) with s carried by t
    let ws = scale_matrix(&w)?;
    let s = ScalarField::var(Var::T);
    let xi: Vec<ScalarField> = (0..m)
        .map(|b| {
            let mut acc = ScalarField::zero();
            for a in 0..m {
                acc = acc + ScalarField::coord(a) * ws.get(a, b);
            }
            (&acc * &s).integrate_t_unit().expect("polynomial").neg()
        })
        .collect();
    let sharp = j.matrix().block(0, m, m, m).neg();
    let v: Vec<ScalarField> = sharp.apply(&xi).iter().map(|f| f.scale(&cq_i())).collect();
    Ok(Section::new(chart, v.into_iter().chain(xi).collect())?)
}

/// Scaling family, scaling lemma, criterion, then the Moser pipeline against
/// `J_0 = a(0)`; symplectic inputs also get a pullback cross-check.
pub fn dw_pipeline(j: &GcsCandidate, z: &Section, cfg: &NumericConfig) -> Report {
    let mut r = Report::new("dw");
    if let Err(e) = dw_stages(j, z, cfg, &mut r) {
        r.push(Check::error("dw", e));
    }
    r
}

fn dw_stages(j: &GcsCandidate, z: &Section, cfg: &NumericConfig, r: &mut Report) -> Result<(), DarbouxError> {
    let fam = scaling_family(j, &cfg.t_samples)?;
    r.absorb("scaling", verify_scaling_lemma(&fam)?);
    let (crit, zt) = dw_criterion_check(&fam, z)?;
    r.absorb("criterion", crit);
    let Some(zt) = zt else {
        r.note("flow stage skipped: the criterion failed");
        return Ok(());
    };
    r.absorb("moser", moser_pipeline(&fam, &zt, cfg));
    if j.provenance() == Provenance::Symplectic {
        r.push(pullback_check(j, &fam, &zt, cfg)?);
    }
    Ok(())
}

/// `D phi^T Omega(phi(p)) D phi = Omega(0)` for the time-one flow.
fn pullback_check(j: &GcsCandidate, fam: &GcsFamily, zt: &SectionFamily, cfg: &NumericConfig) -> Result<Check, DarbouxError> {
    let chart: &Arc<CourantChart> = j.chart();
    let m = standard(chart)?;
    let samples = fam.samples();
    let a = rat_to_f64(samples[0].t.as_ref().expect("sample time"));
    let b = rat_to_f64(samples[samples.len() - 1].t.as_ref().expect("sample time"));
    let gen = CompiledGenerator::new(chart, &zt.generator(fam)?)?;
    let grid = numeric_grid(chart.dim(), cfg.grid_per_axis, cfg.random_points, cfg.seed);
    let flow = integrate_flow(&gen, a, b, &grid, cfg.steps, cfg.domain_bound)?;
    let omega = symplectic_form(j, m);
    let order = chart.coords();
    let num = omega.compile(&order);
    let omega0 = num.eval_re(&vec![0.0; m]);
    let mut worst = (0.0f64, String::new());
    for fp in &flow.points {
        let pulled: DMatrix<f64> = fp.jacobian.transpose() * num.eval_re(&fp.end) * &fp.jacobian;
        let v = (pulled - &omega0).iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if v > worst.0 || worst.1.is_empty() {
            let parts: Vec<String> = fp.start.iter().map(|x| format!("{x:.4}")).collect();
            worst = (v, format!("({})", parts.join(", ")));
        }
    }
    Ok(Check::numeric("phi* Omega = Omega(0)", worst.0, cfg.tol).at(worst.1))
}

#[cfg(test)]
mod tests;
