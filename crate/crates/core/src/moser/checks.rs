use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::flow::{group_law_check, integrate_flow, pairing_check, CompiledGenerator};
use super::{numeric_grid, FamilySlice, FamilySource, GcsFamily, MoserError, NumericConfig, SectionFamily, TimeDependent};
use crate::courant::{pairing, ChartKind, CourantChart, CourantError, Section};
use crate::gcs::{check_gcs, coboundary_of_pairing, coboundary_two, d_a_one_form, eval_matrix, half, l_basis, split_rank, HoloPoissonData};
use crate::liecalc::lie_derivative_endo;
use crate::linalg::FieldMatrix;
use crate::random::unit_grid;
use crate::report::{Check, CheckKind, Report, Residual, Status};
use crate::symbolic::coeff::{cq_abs_max, cq_i, cq_int, cq_real, cq_zero, fmt_rational, rat_to_f64, Cq};
use crate::symbolic::{Rational, ScalarField, Var};

/// Folds per-slice checks into one: exact residuals add up, numeric ones
/// take the maximum; location and detail come from the first failure.
fn merged(name: &str, parts: Vec<Check>) -> Check {
    let mut status = Status::Pass;
    let mut terms = 0usize;
    let mut value: Option<f64> = None;
    let mut tolerance = None;
    let mut kind = CheckKind::Exact;
    let mut first: Option<(Option<String>, Option<String>)> = None;
    for c in parts {
        match c.residual {
            Residual::Terms(n) => terms += n,
            Residual::Value(v) => {
                kind = CheckKind::Numeric;
                value = Some(value.map_or(v, |w: f64| w.max(v)));
                tolerance = c.tolerance.or(tolerance);
            }
            Residual::None => {}
        }
        if !c.passed() {
            status = match (status, c.status) {
                (Status::Error, _) | (_, Status::Error) => Status::Error,
                _ => Status::Fail,
            };
            if first.is_none() {
                first = Some((c.location, c.detail));
            }
        }
    }
    let (location, detail) = first.unwrap_or((None, None));
    Check {
        name: name.to_string(),
        kind,
        status,
        residual: match value {
            Some(v) => Residual::Value(v),
            None => Residual::Terms(terms),
        },
        tolerance,
        location,
        detail,
    }
}

/// Tolerance for checks whose `Jdot` came from finite differences.
const FD_TOL: f64 = 1e-8;

fn probe_points(chart: &CourantChart) -> Vec<Vec<Cq>> {
    unit_grid(chart.dim(), 3)
}

/// Exact check of labelled residual fields, or a numeric one at probe points
/// when the slice carries a finite-difference derivative.
fn field_check(name: &str, slice: &FamilySlice, chart: &CourantChart, residuals: Vec<(String, ScalarField)>) -> Result<Check, MoserError> {
    let label = slice.label();
    if slice.exact_jdot {
        let mut total = 0;
        let mut first = None;
        for (loc, f) in residuals {
            if !f.is_zero() {
                total += f.term_count();
                if first.is_none() {
                    first = Some((loc, f.to_string()));
                }
            }
        }
        let mut c = Check::exact(name, total).at(label.clone());
        if let Some((loc, text)) = first {
            c = c.at(format!("{label}, {loc}")).with_detail(text);
        }
        return Ok(c);
    }
    let t = cq_real(slice.t.clone().unwrap_or_default());
    let mut worst = (0.0f64, String::new());
    for p in probe_points(chart) {
        for (loc, f) in &residuals {
            let v = cq_abs_max(&crate::gcs::eval_point(chart, f, &p, &t)?);
            if v > worst.0 || worst.1.is_empty() {
                worst = (v, format!("{label}, {loc}"));
            }
        }
    }
    Ok(Check::numeric(name, worst.0, FD_TOL).at(worst.1))
}

fn matrix_residuals(m: &FieldMatrix) -> Vec<(String, ScalarField)> {
    let mut out = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.push((format!("entry ({}, {})", i + 1, j + 1), m.get(i, j).clone()));
        }
    }
    out
}

/// `omega_dot_t = g Jdot_t`, i.e. `omega_dot(v, w) = <v, Jdot w>`, on each check slice.
pub fn omega_dot(fam: &GcsFamily) -> Vec<(String, FieldMatrix)> {
    let g = fam.chart().pairing_fields();
    fam.check_slices().into_iter().map(|s| (s.label(), g.mul(&s.jdot))).collect()
}

fn projector(slice: &FamilySlice) -> FieldMatrix {
    let n = slice.jdot.rows();
    FieldMatrix::identity(n).sub(&slice.j.matrix().scale(&cq_i())).scale(&half())
}

fn projector_sections(chart: &Arc<CourantChart>, p: &FieldMatrix) -> Result<Vec<Section>, CourantError> {
    (0..p.cols()).map(|k| Section::new(chart, p.column(k))).collect()
}

fn bilinear(w: &FieldMatrix, v: &Section, u: &Section) -> ScalarField {
    let wu = w.apply(u.coeffs());
    let mut acc = ScalarField::zero();
    for (a, b) in v.coeffs().iter().zip(&wu) {
        if !a.is_zero() && !b.is_zero() {
            acc = acc + a * b;
        }
    }
    acc
}

/// `d_L omega_dot = 0` on all triples `(P e_i, P e_j, P e_k)`.
pub fn check_cocycle(fam: &GcsFamily) -> Result<Report, MoserError> {
    let chart = fam.chart();
    let g = chart.pairing_fields();
    let mut r = Report::new("cocycle");
    let mut cocycle = Vec::new();
    let mut swap = Vec::new();
    for slice in fam.check_slices() {
        let w = g.mul(&slice.jdot);
        let secs = projector_sections(chart, &projector(slice))?;
        let n = secs.len();
        let triples: Vec<(usize, usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))))
            .collect();
        let residuals = triples
            .par_iter()
            .map(|&(i, j, k)| {
                let v = coboundary_two(|a, b| Ok(bilinear(&w, a, b)), &secs[i], &secs[j], &secs[k])?;
                Ok((format!("triple (Pe{}, Pe{}, Pe{})", i + 1, j + 1, k + 1), v))
            })
            .collect::<Result<Vec<_>, CourantError>>()?;
        cocycle.push(field_check("d_L omega_dot = 0", slice, chart, residuals)?);
        let p = projector(slice);
        let pjp = p.mul(&slice.jdot).mul(&p);
        swap.push(field_check("P Jdot P = 0", slice, chart, matrix_residuals(&pjp))?);
    }
    r.push(merged("d_L omega_dot = 0", cocycle));
    r.push(merged("P Jdot P = 0", swap));
    Ok(r)
}

/// `z_t`, the real generator `x_t = Im z_t` and `beta_t = <conj z_t, .>` on one slice.
#[derive(Clone, Debug)]
pub struct PrimitiveSlice {
    pub label: String,
    pub t: Option<Rational>,
    pub z: Section,
    pub x: Section,
    /// Frame components `beta(e_i)`.
    pub beta: Vec<ScalarField>,
}

/// Validates `J_t z_t = i z_t` and returns `x_t = (z_t - conj z_t) / 2i` per slice.
pub fn primitive_to_vector(fam: &GcsFamily, z: &SectionFamily) -> Result<Vec<PrimitiveSlice>, MoserError> {
    let chart = fam.chart();
    fam.check_slices()
        .into_iter()
        .map(|slice| {
            let zt = z.z_on(fam, slice)?;
            let res = slice.j.endomorphism().apply(&zt) - zt.scale(&cq_i());
            if let Some(worst) = res.coeffs().iter().enumerate().max_by_key(|(_, f)| f.term_count()).filter(|(_, f)| !f.is_zero()) {
                return Err(MoserError::NotInL {
                    at: slice.label(),
                    residual: format!("{} = {}", worst.0 + 1, worst.1),
                });
            }
            let zbar = zt.conj();
            let beta = (0..chart.rank())
                .map(|i| pairing(&zbar, &Section::basis(chart, i)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PrimitiveSlice {
                label: slice.label(),
                t: slice.t.clone(),
                x: zt.im(),
                z: zt,
                beta,
            })
        })
        .collect()
}

/// The flow generator agrees with `Im z_t` on every slice.
fn generator_check(gen: &TimeDependent, prims: &[PrimitiveSlice]) -> Result<Check, MoserError> {
    let mut parts = Vec::new();
    for p in prims {
        let g = match &p.t {
            Some(t) => gen.at(t)?,
            None => gen
                .symbolic()
                .ok_or_else(|| MoserError::NotSymbolic("exponential profile in the generator".into()))?,
        };
        let diff: Vec<ScalarField> = g.column(0).iter().zip(p.x.coeffs()).map(|(a, b)| a - b).collect();
        let m = FieldMatrix::from_fn(diff.len(), 1, |i, _| diff[i].clone());
        parts.push(Check::exact_matrix("generator", &m).at(p.label.clone()));
    }
    Ok(merged("flow generator equals Im z_t", parts))
}

fn slice_pairs<'a>(fam: &'a GcsFamily, prims: &'a [PrimitiveSlice]) -> Vec<(&'a FamilySlice, &'a PrimitiveSlice)> {
    fam.check_slices().into_iter().zip(prims).collect()
}

/// `d_L beta_t = omega_dot_t` on pairs `(P e_i, P e_j)`; the opposite sign is
/// tested too and reported in a note.
pub fn cohomological_check(fam: &GcsFamily, prims: &[PrimitiveSlice]) -> Result<Report, MoserError> {
    let chart = fam.chart();
    let g = chart.pairing_fields();
    let mut r = Report::new("cohomological-equation");
    let mut plus = Vec::new();
    let mut minus_ok = true;
    for (slice, prim) in slice_pairs(fam, prims) {
        let w = g.mul(&slice.jdot);
        let secs = projector_sections(chart, &projector(slice))?;
        let zbar = prim.z.conj();
        let n = secs.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let vals = pairs
            .par_iter()
            .map(|&(i, j)| {
                let lhs = coboundary_of_pairing(&zbar, &secs[i], &secs[j])?;
                let rhs = bilinear(&w, &secs[i], &secs[j]);
                Ok((format!("pair (Pe{}, Pe{})", i + 1, j + 1), &lhs - &rhs, lhs + rhs))
            })
            .collect::<Result<Vec<_>, CourantError>>()?;
        minus_ok &= vals.iter().all(|(_, _, m)| m.is_zero());
        plus.push(field_check("d_L beta = omega_dot", slice, chart, vals.into_iter().map(|(l, p, _)| (l, p)).collect())?);
    }
    let c = merged("d_L beta = omega_dot on L", plus);
    if !c.passed() && minus_ok {
        r.note("d_L beta = -omega_dot holds on every slice: the primitive has the opposite sign convention");
    }
    r.push(c);
    Ok(r)
}

/// `Jdot_t + L_{x_t} J_t = 0` on every slice.
pub fn check_infinitesimal(fam: &GcsFamily, prims: &[PrimitiveSlice]) -> Result<Report, MoserError> {
    let chart = fam.chart();
    let mut r = Report::new("infinitesimal");
    let mut parts = Vec::new();
    let mut flipped = Vec::new();
    for (slice, prim) in slice_pairs(fam, prims) {
        let lie = lie_derivative_endo(&prim.x, slice.j.endomorphism())?;
        let res = slice.jdot.add(lie.matrix());
        let c = field_check("Jdot + L_x J = 0", slice, chart, matrix_residuals(&res))?;
        if !c.passed() && slice.jdot.sub(lie.matrix()).is_zero() {
            flipped.push(slice.label());
        }
        parts.push(c);
    }
    if !flipped.is_empty() {
        r.note(format!("the opposite generator -x_t satisfies Jdot + L_x J = 0 at {}", flipped.join(", ")));
    }
    r.push(merged("Jdot + L_x J = 0", parts));
    Ok(r)
}

/// Real-coordinate components of `sum f d/dz_a` (0-based complex indices),
/// with `d/dz_a = (d/dx_{2a} - i d/dx_{2a+1}) / 2`.
pub fn holomorphic_vector(d: usize, terms: &[(usize, ScalarField)]) -> Vec<ScalarField> {
    let mut out = vec![ScalarField::zero(); d];
    for (a, f) in terms {
        out[2 * *a] = &out[2 * *a] + &f.scale(&half());
        out[2 * *a + 1] = &out[2 * *a + 1] - &f.scale(&(half() * cq_i()));
    }
    out
}

fn source_derivative(td: &TimeDependent, slice: &FamilySlice) -> Result<FieldMatrix, MoserError> {
    match &slice.t {
        Some(t) => td.derivative().at(t),
        None => td
            .derivative()
            .symbolic()
            .ok_or_else(|| MoserError::NotSymbolic("exponential profile".into())),
    }
}

fn source_value(td: &TimeDependent, slice: &FamilySlice) -> Result<FieldMatrix, MoserError> {
    match &slice.t {
        Some(t) => td.at(t),
        None => td.symbolic().ok_or_else(|| MoserError::NotSymbolic("exponential profile".into())),
    }
}

/// `(L_X pi)^{ab} = X^c d_c pi^{ab} - pi^{cb} d_c X^a - pi^{ac} d_c X^b`.
fn lie_bivector(x: &[ScalarField], pi: &FieldMatrix) -> FieldMatrix {
    let d = x.len();
    FieldMatrix::from_fn(d, d, |a, b| {
        let mut acc = ScalarField::zero();
        for c in 0..d {
            let v = Var::coord(c);
            acc = acc + &x[c] * &pi.get(a, b).diff(v) - pi.get(c, b) * &x[a].diff(v) - pi.get(a, c) * &x[b].diff(v);
        }
        acc
    })
}

/// The translation of `omega_dot` into the data the family was built from.
pub fn translation_checks(fam: &GcsFamily, z: &SectionFamily) -> Result<Report, MoserError> {
    let chart = fam.chart();
    let m = split_rank(chart)?;
    let g = chart.pairing_fields();
    let mut r = Report::new("translation");
    match fam.source() {
        FamilySource::Symplectic(td) => {
            let mut parts = Vec::new();
            let mut signs = Vec::new();
            for slice in fam.check_slices() {
                let w = g.mul(&slice.jdot);
                let om_dot = source_derivative(td, slice)?;
                let flat = source_value(td, slice)?.transpose();
                // lambda(X) = X - i w_flat X
                let lambda = FieldMatrix::from_fn(2 * m, m, |a, b| {
                    if a < m {
                        if a == b {
                            ScalarField::one()
                        } else {
                            ScalarField::zero()
                        }
                    } else {
                        flat.get(a - m, b).scale(&-cq_i())
                    }
                });
                let res = lambda.transpose().mul(&w).mul(&lambda).add(&om_dot);
                parts.push(field_check("lambda* omega_dot = -Omega_dot", slice, chart, matrix_residuals(&res))?);
                if let Some(xi) = z.one_form_on(slice)? {
                    let dxi = d_a_one_form(chart, &xi)?;
                    if om_dot.add(&dxi).is_zero() {
                        signs.push(format!("{}: Omega_dot = -d xi", slice.label()));
                    } else if om_dot.sub(&dxi).is_zero() {
                        signs.push(format!("{}: Omega_dot = +d xi", slice.label()));
                    } else {
                        signs.push(format!("{}: Omega_dot = +-d xi fails", slice.label()));
                    }
                }
            }
            r.push(merged("lambda* omega_dot = -Omega_dot", parts));
            let first = signs.first().map(|s| s.split(": ").nth(1).unwrap_or_default().to_string());
            if let Some(rel) = first {
                if signs.iter().all(|s| s.ends_with(&rel)) {
                    r.note(format!("one-form primitive: {rel} on every slice"));
                } else {
                    r.note(format!("one-form primitive: {}", signs.join("; ")));
                }
            }
        }
        FamilySource::Complex(td) => {
            let mut parts = Vec::new();
            for slice in fam.check_slices() {
                let w = g.mul(&slice.jdot);
                let jd = source_derivative(td, slice)?;
                // alpha(jdot)(X + xi, Y + eta) = (xi(jdot Y) - eta(jdot X)) / 2
                let z0 = FieldMatrix::zeros(m, m);
                let alpha = FieldMatrix::from_blocks(&z0, &jd.transpose().neg(), &jd, &z0).scale(&half());
                let p = projector(slice);
                let res = p.transpose().mul(&w.add(&alpha)).mul(&p);
                parts.push(field_check("omega_dot = -alpha(jdot) on L", slice, chart, matrix_residuals(&res))?);
            }
            r.push(merged("omega_dot = -alpha(jdot) on L", parts));
        }
        FamilySource::HoloPoisson { j, pi } => {
            let mut theta = Vec::new();
            let mut family = Vec::new();
            let mut holo = Vec::new();
            let big = HoloPoissonData::new(j.clone(), FieldMatrix::zeros(m, m))?.complex_big();
            let lb = l_basis(&eval_matrix(chart, &big, &vec![cq_zero(); chart.dim()], &cq_zero())?);
            let v = FieldMatrix::constant(lb.rows(), lb.cols(), |a, b| lb.get(a, b).clone());
            for slice in fam.check_slices() {
                let data = HoloPoissonData::new(j.clone(), source_value(pi, slice)?)?;
                let pdot = source_derivative(pi, slice)?;
                let hdot = HoloPoissonData::new(j.clone(), pdot.clone())?.h_prime();
                let tv = FieldMatrix::identity(2 * m).add(&data.h_prime()).mul(&v);
                let lhs = tv.transpose().mul(&g).mul(&slice.jdot).mul(&tv);
                let rhs = hdot.mul(&v).transpose().mul(&g).mul(&v).scale(&(cq_i() * cq_int(2)));
                theta.push(field_check("Theta* omega_dot = -i Hdot", slice, chart, matrix_residuals(&lhs.add(&rhs)))?);
                if let Some(x10) = z.holomorphic_on(slice)? {
                    let eq = pdot.add(&lie_bivector(&x10, data.pi()));
                    family.push(field_check("pi_dot = [pi, X]", slice, chart, matrix_residuals(&eq))?);
                    let mut dbar = Vec::new();
                    let jx = j.apply(&x10);
                    for (k, (a, b)) in jx.iter().zip(&x10).enumerate() {
                        dbar.push((format!("type (1,0), component {}", k + 1), a - &b.scale(&cq_i())));
                    }
                    for (k, f) in x10.iter().enumerate() {
                        for c in 0..m / 2 {
                            let dz = (f.diff(Var::coord(2 * c)) + f.diff(Var::coord(2 * c + 1)).scale(&cq_i())).scale(&half());
                            dbar.push((format!("d/dzbar_{} of component {}", c + 1, k + 1), dz));
                        }
                    }
                    holo.push(field_check("X is holomorphic", slice, chart, dbar)?);
                }
            }
            r.push(merged("Theta* omega_dot = -i Hdot", theta));
            if !family.is_empty() {
                r.push(merged("pi_dot = [pi, X^{1,0}]", family));
                r.push(merged("X^{1,0} is holomorphic of type (1,0)", holo));
                r.note("[pi, X] = -L_X pi");
            }
        }
        FamilySource::Raw(_) | FamilySource::Samples(_) => r.note("raw family: no translation layer"),
    }
    Ok(r)
}

fn fmt_point_f64(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

/// `Phi^-1 J_t(phi(p)) Phi = J_0(p)` at the given sample indices and grid points.
pub fn verify_identification(
    fam: &GcsFamily,
    gen: &CompiledGenerator,
    checkpoints: &[usize],
    grid: &[Vec<f64>],
    steps: usize,
    bound: f64,
    tol: f64,
) -> Result<Report, MoserError> {
    let chart = fam.chart();
    let samples = fam.samples();
    let mut order = chart.coords();
    order.push(Var::T);
    let a = rat_to_f64(samples[0].t.as_ref().expect("samples carry times"));
    let j0 = samples[0].j.matrix().compile(&order);
    let mut r = Report::new("identification");
    let mut worst = (0.0f64, String::new());
    for &k in checkpoints {
        let s = &samples[k];
        let tk = s.t.as_ref().expect("samples carry times");
        let b = rat_to_f64(tk);
        if b <= a {
            continue;
        }
        let jt = s.j.matrix().compile(&order);
        let flow = integrate_flow(gen, a, b, grid, steps, bound)?;
        for fp in &flow.points {
            let mut at_end = fp.end.clone();
            at_end.push(b);
            let mut at_start = fp.start.clone();
            at_start.push(a);
            let phi = fp.fiber.map(|x| Complex64::new(x, 0.0));
            let inv = phi
                .clone()
                .try_inverse()
                .ok_or_else(|| MoserError::Singular(format!("fiber map at {}", fmt_point_f64(&fp.start))))?;
            let res: DMatrix<Complex64> = inv * jt.eval(&at_end) * phi - j0.eval(&at_start);
            let v = res.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
            if v > worst.0 || worst.1.is_empty() {
                worst = (v, format!("t = {}, p = {}", fmt_rational(tk), fmt_point_f64(&fp.start)));
            }
        }
    }
    r.push(Check::numeric("Phi^-1 J_t Phi = J_0", worst.0, tol).at(worst.1));
    Ok(r)
}

/// Cocycle, primitive, infinitesimal equation, translation layer, flow and
/// identification, in that order, as one report.
pub fn moser_pipeline(fam: &GcsFamily, z: &SectionFamily, cfg: &NumericConfig) -> Report {
    let mut r = Report::new("moser");
    if let Err(e) = pipeline_stages(fam, z, cfg, &mut r) {
        r.push(Check::error(e.0, e.1));
    }
    r
}

fn pipeline_stages(fam: &GcsFamily, z: &SectionFamily, cfg: &NumericConfig, r: &mut Report) -> Result<(), (&'static str, MoserError)> {
    let chart = fam.chart();
    let mut members = Vec::new();
    for slice in fam.check_slices() {
        let rep = check_gcs(&slice.j, &[], &[]).map_err(|e| ("family members", e.into()))?;
        for c in rep.checks {
            members.push(c.at(slice.label()));
        }
    }
    let names: Vec<String> = members.iter().map(|c| c.name.clone()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    for name in names {
        let parts: Vec<Check> = members.iter().filter(|c| c.name == name).cloned().collect();
        r.push(merged(&format!("family/{name}"), parts));
    }
    r.absorb("", check_cocycle(fam).map_err(|e| ("check_cocycle", e))?);
    let prims = match primitive_to_vector(fam, z) {
        Ok(p) => p,
        Err(e) => {
            r.note("later stages skipped: z_t is not a section of L_t");
            return Err(("primitive_to_vector", e));
        }
    };
    let gen = z.generator(fam).map_err(|e| ("primitive_to_vector", e))?;
    r.push(generator_check(&gen, &prims).map_err(|e| ("primitive_to_vector", e))?);
    r.absorb("", cohomological_check(fam, &prims).map_err(|e| ("cohomological equation", e))?);
    r.absorb("", check_infinitesimal(fam, &prims).map_err(|e| ("check_infinitesimal", e))?);
    r.absorb("", translation_checks(fam, z).map_err(|e| ("translation", e))?);
    if chart.kind() != ChartKind::Standard {
        r.note("flow stage skipped: the fiber transport formula is specific to TM + T*M");
        return Ok(());
    }
    let samples = fam.samples();
    if samples.len() < 2 {
        r.note("flow stage skipped: a single sample time");
        return Ok(());
    }
    let grid = numeric_grid(chart.dim(), cfg.grid_per_axis, cfg.random_points, cfg.seed);
    let compiled = CompiledGenerator::new(chart, &gen).map_err(|e| ("integrate_flow", e))?;
    let a = rat_to_f64(samples[0].t.as_ref().expect("sample time"));
    let b = rat_to_f64(samples[samples.len() - 1].t.as_ref().expect("sample time"));
    let flow = integrate_flow(&compiled, a, b, &grid, cfg.steps, cfg.domain_bound).map_err(|e| ("integrate_flow", e))?;
    r.push(pairing_check(&flow, cfg.pairing_tol));
    r.push(group_law_check(&compiled, a, b, &grid, cfg.steps, cfg.domain_bound, cfg.group_law_tol).map_err(|e| ("integrate_flow", e))?);
    let checkpoints = [samples.len() / 2, samples.len() - 1];
    let ident = verify_identification(fam, &compiled, &checkpoints, &grid, cfg.steps, cfg.domain_bound, cfg.tol).map_err(|e| ("verify_identification", e))?;
    r.absorb("", ident);
    r.note(format!(
        "flow: RK4 with {} steps, composite Simpson correction, {} grid points, domain radius {}",
        cfg.steps,
        grid.len(),
        cfg.domain_bound
    ));
    Ok(())
}
