//! Generalized complex structures: constructors from symplectic, complex and
//! holomorphic Poisson data, exact verification, eigenbundles.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::courant::{anchor_apply, courant_bracket, pairing, ChartKind, CourantChart, CourantError, EndomorphismField, Section, TwoForm};
use crate::linalg::{CqMatrix, FieldMatrix};
use crate::random::{random_point, rng, unit_grid};
use crate::report::{Check, CheckKind, Report};
use crate::symbolic::coeff::{cq_i, cq_int, cq_real, cq_zero, fmt_rational, rat, Cq};
use crate::symbolic::{ScalarField, SymbolicError, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Symplectic,
    Complex,
    Hamiltonian,
    Raw,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GcsError {
    #[error("chart has no A + A* splitting")]
    NoSplitting,
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize, expected: usize },
    #[error("two-form is not closed: {0}")]
    NotClosed(String),
    #[error("two-form is degenerate: {0}")]
    Degenerate(String),
    #[error("j^2 + 1 does not vanish: {0}")]
    NotComplex(String),
    #[error("Nijenhuis tensor of j does not vanish: {0}")]
    NotIntegrable(String),
    #[error("J^2 + 1 does not vanish")]
    NotAlmostComplex,
    #[error("J is not orthogonal for the pairing")]
    NotOrthogonal,
    #[error("bivector is not antisymmetric at ({0}, {1})")]
    PiNotAntisymmetric(usize, usize),
    #[error("Maurer-Cartan equation fails: {0}")]
    MaurerCartan(String),
    #[error("H'bar H' - 1 is singular: {0}")]
    NotInvertible(String),
    #[error("closed form disagrees with the graph decomposition: {0}")]
    OracleMismatch(String),
    #[error(transparent)]
    Courant(#[from] CourantError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// A candidate structure `J` on a chart, with where it came from.
#[derive(Clone, Debug)]
pub struct GcsCandidate {
    j: EndomorphismField,
    provenance: Provenance,
}

impl GcsCandidate {
    pub fn raw(chart: &Arc<CourantChart>, m: FieldMatrix) -> Result<Self, GcsError> {
        Ok(GcsCandidate {
            j: EndomorphismField::new(chart, m)?,
            provenance: Provenance::Raw,
        })
    }

    fn tagged(chart: &Arc<CourantChart>, m: FieldMatrix, provenance: Provenance) -> Result<Self, GcsError> {
        Ok(GcsCandidate {
            j: EndomorphismField::new(chart, m)?,
            provenance,
        })
    }

    pub fn chart(&self) -> &Arc<CourantChart> {
        self.j.chart()
    }

    pub fn endomorphism(&self) -> &EndomorphismField {
        &self.j
    }

    pub fn matrix(&self) -> &FieldMatrix {
        self.j.matrix()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Family member at a fixed time (substitutes `t`).
    pub fn at_time(&self, t: &Cq) -> Result<Self, GcsError> {
        let m = self.matrix().substitute(Var::T, t)?;
        Ok(GcsCandidate {
            j: self.j.with_matrix(m),
            provenance: self.provenance,
        })
    }
}

/// Rank of the `A` half for charts of the form `A + A*`.
pub fn split_rank(chart: &CourantChart) -> Result<usize, GcsError> {
    match chart.kind() {
        ChartKind::Standard | ChartKind::Double => Ok(chart.rank() / 2),
        ChartKind::Custom => Err(GcsError::NoSplitting),
    }
}

fn check_square(m: &FieldMatrix, n: usize) -> Result<(), GcsError> {
    if m.rows() != n || m.cols() != n {
        return Err(GcsError::Shape {
            rows: m.rows(),
            cols: m.cols(),
            expected: n,
        });
    }
    Ok(())
}

pub(crate) fn half() -> Cq {
    cq_real(rat(1, 2))
}

/// Section of the `A` half with the given components.
pub fn a_section(chart: &Arc<CourantChart>, v: &[ScalarField]) -> Result<Section, GcsError> {
    let m = split_rank(chart)?;
    let mut coeffs = v.to_vec();
    coeffs.resize(2 * m, ScalarField::zero());
    Ok(Section::new(chart, coeffs)?)
}

/// Section of the `A*` half with the given components.
pub fn dual_section(chart: &Arc<CourantChart>, xi: &[ScalarField]) -> Result<Section, GcsError> {
    let m = split_rank(chart)?;
    let mut coeffs = vec![ScalarField::zero(); m];
    coeffs.extend_from_slice(xi);
    Ok(Section::new(chart, coeffs)?)
}

/// `e_k` coefficients of `[e_a, e_b]` restricted to the `A` half.
fn a_bracket(chart: &CourantChart, a: usize, b: usize, m: usize) -> &[ScalarField] {
    &chart.structure(a, b)[..m]
}

fn rho(chart: &Arc<CourantChart>, a: usize, f: &ScalarField) -> ScalarField {
    anchor_apply(&Section::basis(chart, a), f)
}

/// `d_A xi` for a 1-form on `A`: `(d xi)_ab = rho_a xi_b - rho_b xi_a - xi([e_a, e_b])`.
pub fn d_a_one_form(chart: &Arc<CourantChart>, xi: &[ScalarField]) -> Result<FieldMatrix, GcsError> {
    let m = split_rank(chart)?;
    if xi.len() != m {
        return Err(CourantError::Length { expected: m, got: xi.len() }.into());
    }
    Ok(FieldMatrix::from_fn(m, m, |a, b| {
        let mut v = rho(chart, a, &xi[b]) - rho(chart, b, &xi[a]);
        for (k, c) in a_bracket(chart, a, b, m).iter().enumerate() {
            if !c.is_zero() {
                v = v - c * &xi[k];
            }
        }
        v
    }))
}

/// Nonzero components `(a, b, c, value)`, `a < b < c`, of `d_A w` for a
/// 2-form on `A` given by its matrix.
pub fn d_a_two_form(chart: &Arc<CourantChart>, w: &FieldMatrix) -> Result<Vec<(usize, usize, usize, ScalarField)>, GcsError> {
    let m = split_rank(chart)?;
    check_square(w, m)?;
    // w([e_a, e_b], e_c)
    let wb = |a: usize, b: usize, c: usize| {
        let mut acc = ScalarField::zero();
        for (k, s) in a_bracket(chart, a, b, m).iter().enumerate() {
            if !s.is_zero() {
                acc = acc + s * w.get(k, c);
            }
        }
        acc
    };
    let mut out = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                let v = rho(chart, a, w.get(b, c)) - rho(chart, b, w.get(a, c)) + rho(chart, c, w.get(a, b)) - wb(a, b, c)
                    + wb(a, c, b)
                    - wb(b, c, a);
                if !v.is_zero() {
                    out.push((a, b, c, v));
                }
            }
        }
    }
    Ok(out)
}

pub(crate) fn eval_point(chart: &CourantChart, f: &ScalarField, point: &[Cq], t: &Cq) -> Result<Cq, SymbolicError> {
    let d = chart.dim();
    f.evaluate_with(&|v| match v {
        Var::X(k) if (k as usize) <= d => point[k as usize - 1].clone(),
        Var::T => t.clone(),
        _ => cq_zero(),
    })
}

pub(crate) fn eval_matrix(chart: &CourantChart, m: &FieldMatrix, point: &[Cq], t: &Cq) -> Result<CqMatrix, SymbolicError> {
    let mut order = chart.coords();
    order.push(Var::T);
    let mut full = point.to_vec();
    full.push(t.clone());
    m.evaluate(&order, &full)
}

pub(crate) fn fmt_point(p: &[Cq]) -> String {
    let parts: Vec<String> = p.iter().map(|c| fmt_rational(&c.re)).collect();
    format!("({})", parts.join(", "))
}

fn neg_one() -> Cq {
    cq_int(-1)
}

/// `J = [[0, -pi#], [w_flat, 0]]` with `w_flat = w^T` (so `w_flat(X) = i_X w`)
/// and `pi# = w_flat^-1`.
pub fn gcs_from_symplectic(chart: &Arc<CourantChart>, omega: &FieldMatrix) -> Result<GcsCandidate, GcsError> {
    let m = split_rank(chart)?;
    check_square(omega, m)?;
    for i in 0..m {
        for j in 0..=i {
            if !(omega.get(i, j) + omega.get(j, i)).is_zero() {
                return Err(CourantError::NotAntisymmetric(i + 1, j + 1).into());
            }
        }
    }
    if let Some((a, b, c, v)) = d_a_two_form(chart, omega)?.into_iter().next() {
        return Err(GcsError::NotClosed(format!("(dw)({}, {}, {}) = {}", a + 1, b + 1, c + 1, v)));
    }
    let flat = omega.transpose();
    let det = flat.det()?;
    if det.is_zero() {
        return Err(GcsError::Degenerate("determinant vanishes identically".into()));
    }
    let times: Vec<Cq> = if det.depends_on(Var::T) {
        vec![cq_int(0), cq_real(rat(1, 2)), cq_int(1)]
    } else {
        vec![cq_int(0)]
    };
    for p in unit_grid(chart.dim(), 5) {
        for t in &times {
            let ok = matches!(eval_point(chart, &det, &p, t), Ok(v) if v != cq_zero());
            if !ok {
                return Err(GcsError::Degenerate(format!("determinant vanishes at {}", fmt_point(&p))));
            }
        }
    }
    let sharp = flat
        .inverse()?
        .ok_or_else(|| GcsError::Degenerate("matrix is singular".into()))?;
    let z = FieldMatrix::zeros(m, m);
    let j = FieldMatrix::from_blocks(&z, &sharp.neg(), &flat, &z);
    GcsCandidate::tagged(chart, j, Provenance::Symplectic)
}

/// Exact residuals `j^2 + 1` and the Nijenhuis tensor of `j` on frame pairs.
fn complex_structure_residuals(chart: &Arc<CourantChart>, j: &FieldMatrix) -> Result<(FieldMatrix, Vec<(usize, usize, Vec<ScalarField>)>), GcsError> {
    let m = split_rank(chart)?;
    check_square(j, m)?;
    let sq = j.mul(j).add(&FieldMatrix::identity(m));
    let mut bad = Vec::new();
    let vec_of = |s: Section| s.vector_part().to_vec();
    for a in 0..m {
        for b in a + 1..m {
            let ea = a_section(chart, &Section::basis(chart, a).coeffs()[..m])?;
            let eb = a_section(chart, &Section::basis(chart, b).coeffs()[..m])?;
            let ja = a_section(chart, &j.column(a))?;
            let jb = a_section(chart, &j.column(b))?;
            // N(X, Y) = [jX, jY] - j[jX, Y] - j[X, jY] - [X, Y]
            let t1 = vec_of(courant_bracket(&ja, &jb)?);
            let t2 = j.apply(&vec_of(courant_bracket(&ja, &eb)?));
            let t3 = j.apply(&vec_of(courant_bracket(&ea, &jb)?));
            let t4 = vec_of(courant_bracket(&ea, &eb)?);
            let n: Vec<ScalarField> = (0..m).map(|k| &t1[k] - &t2[k] - &t3[k] - &t4[k]).collect();
            if n.iter().any(|f| !f.is_zero()) {
                bad.push((a, b, n));
            }
        }
    }
    Ok((sq, bad))
}

/// `J = [[-j, 0], [0, j^T]]` for an integrable complex structure `j` on `A`.
pub fn gcs_from_complex(chart: &Arc<CourantChart>, j: &FieldMatrix) -> Result<GcsCandidate, GcsError> {
    let m = split_rank(chart)?;
    let (sq, bad) = complex_structure_residuals(chart, j)?;
    if let Some((r, c, f)) = sq.first_nonzero() {
        return Err(GcsError::NotComplex(format!("entry ({}, {}) = {}", r + 1, c + 1, f)));
    }
    if let Some((a, b, n)) = bad.first() {
        let parts: Vec<String> = n.iter().map(ToString::to_string).collect();
        return Err(GcsError::NotIntegrable(format!("N(e{}, e{}) = ({})", a + 1, b + 1, parts.join(", "))));
    }
    let z = FieldMatrix::zeros(m, m);
    let big = FieldMatrix::from_blocks(&j.neg(), &z, &z, &j.transpose());
    GcsCandidate::tagged(chart, big, Provenance::Complex)
}

/// `N(x, y) = [Jx, Jy] - [x, y] - J([Jx, y] + [x, Jy])`.
pub fn nijenhuis(j: &EndomorphismField, x: &Section, y: &Section) -> Result<Section, CourantError> {
    let jx = j.apply(x);
    let jy = j.apply(y);
    let inner = courant_bracket(&jx, y)? + courant_bracket(x, &jy)?;
    Ok(courant_bracket(&jx, &jy)? - courant_bracket(x, y)? - j.apply(&inner))
}

fn fold_sections(name: &str, labelled: Vec<(String, Result<Section, CourantError>)>) -> Result<Check, GcsError> {
    let mut total = 0;
    let mut first: Option<(String, String)> = None;
    for (label, r) in labelled {
        let s = r?;
        if !s.is_zero() {
            total += s.term_count();
            if first.is_none() {
                first = Some((label, s.to_string()));
            }
        }
    }
    let mut c = Check::exact(name, total);
    if let Some((loc, text)) = first {
        c = c.at(loc).with_detail(text);
    }
    Ok(c)
}

pub const NORMALIZATION_NOTE: &str = "H'(X + eta) = pi#(eta) with (pi# eta)^b = eta_a pi^ab; H(v, w) = 2<H'v, w>";

/// The three defining properties of a generalized complex structure, exactly.
/// `sections`/`functions` feed the function-linearity trial of `N`.
pub fn check_gcs(j: &GcsCandidate, sections: &[Section], functions: &[ScalarField]) -> Result<Report, GcsError> {
    let chart = j.chart();
    let n = chart.rank();
    let jm = j.matrix();
    let mut r = Report::new("check-gcs");
    r.push(Check::exact_matrix("J^2 = -1", &jm.mul(jm).add(&FieldMatrix::identity(n))));
    let g = chart.pairing_fields();
    r.push(Check::exact_matrix("J^T g J = g", &jm.transpose().mul(&g).mul(jm).sub(&g)));

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let frame: Vec<(String, Result<Section, CourantError>)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let res = nijenhuis(j.endomorphism(), &Section::basis(chart, a), &Section::basis(chart, b));
            (format!("frame pair (e{}, e{})", a + 1, b + 1), res)
        })
        .collect();
    r.push(fold_sections("integrability on frame pairs", frame)?);

    if sections.len() >= 2 && !functions.is_empty() {
        let ns = sections.len();
        let lin: Vec<(String, Result<Section, CourantError>)> = (0..ns)
            .into_par_iter()
            .map(|k| {
                let (x, y) = (&sections[k], &sections[(k + 1) % ns]);
                let f = &functions[k % functions.len()];
                let res = nijenhuis(j.endomorphism(), &x.scale_field(f), y)
                    .and_then(|a| Ok(a - nijenhuis(j.endomorphism(), x, y)?.scale_field(f)));
                (format!("sections ({}, {}), function {}", k + 1, (k + 1) % ns + 1, k % functions.len() + 1), res)
            })
            .collect();
        r.push(fold_sections("Nijenhuis tensor is function-linear", lin)?);
    } else {
        r.note("function-linearity trial skipped: no trial data");
    }
    if j.provenance() == Provenance::Hamiltonian {
        r.note(NORMALIZATION_NOTE);
    }
    Ok(r)
}

/// `w(x, y) = <x, J y>`, i.e. `w = g J`.
pub fn omega_form(j: &GcsCandidate) -> Result<TwoForm, GcsError> {
    let chart = j.chart();
    let w = chart.pairing_fields().mul(j.matrix());
    TwoForm::new(chart, w).map_err(|e| match e {
        CourantError::NotAntisymmetric(..) => GcsError::NotOrthogonal,
        e => e.into(),
    })
}

/// `P = (1 - iJ)/2`, the projector onto the `+i` eigenbundle `L`.
pub fn eigenprojector(j: &GcsCandidate) -> Result<EndomorphismField, GcsError> {
    let n = j.chart().rank();
    let jm = j.matrix();
    if !jm.mul(jm).add(&FieldMatrix::identity(n)).is_zero() {
        return Err(GcsError::NotAlmostComplex);
    }
    let p = FieldMatrix::identity(n).sub(&jm.scale(&cq_i())).scale(&half());
    Ok(j.endomorphism().with_matrix(p))
}

/// Projector identities and isotropy of `L`.
pub fn check_eigenbundles(j: &GcsCandidate) -> Result<Report, GcsError> {
    let p = eigenprojector(j)?;
    let pm = p.matrix();
    let n = pm.rows();
    let g = j.chart().pairing_fields();
    let mut r = Report::new("eigenbundles");
    r.push(Check::exact_matrix("P^2 = P", &pm.mul(pm).sub(pm)));
    r.push(Check::exact_matrix("P + conj(P) = 1", &pm.add(&pm.conj()).sub(&FieldMatrix::identity(n))));
    r.push(Check::exact_matrix("P conj(P) = 0", &pm.mul(&pm.conj())));
    r.push(Check::exact_matrix("J P = i P", &j.matrix().mul(pm).sub(&pm.scale(&cq_i()))));
    r.push(Check::exact_matrix("L is isotropic", &pm.transpose().mul(&g).mul(pm)));
    Ok(r)
}

/// `(d_L beta)(v, w) = rho(v) beta(w) - rho(w) beta(v) - beta([v, w])`.
pub fn coboundary_one<F>(beta: F, v: &Section, w: &Section) -> Result<ScalarField, CourantError>
where
    F: Fn(&Section) -> Result<ScalarField, CourantError>,
{
    Ok(anchor_apply(v, &beta(w)?) - anchor_apply(w, &beta(v)?) - beta(&courant_bracket(v, w)?)?)
}

/// The coboundary of a 2-cochain on three sections.
pub fn coboundary_two<F>(alpha: F, v: &Section, w: &Section, z: &Section) -> Result<ScalarField, CourantError>
where
    F: Fn(&Section, &Section) -> Result<ScalarField, CourantError>,
{
    let first = anchor_apply(v, &alpha(w, z)?) - anchor_apply(w, &alpha(v, z)?) + anchor_apply(z, &alpha(v, w)?);
    let second = alpha(&courant_bracket(v, w)?, z)? - alpha(&courant_bracket(v, z)?, w)? + alpha(&courant_bracket(w, z)?, v)?;
    Ok(first - second)
}

/// `d_L` of `beta = <zbar, .>` evaluated on `(v, w)`.
pub fn coboundary_of_pairing(zbar: &Section, v: &Section, w: &Section) -> Result<ScalarField, CourantError> {
    coboundary_one(|x| pairing(zbar, x), v, w)
}

/// Holomorphic Poisson data: a complex structure `j` on `A` and a bivector `pi`
/// (`pi[a][b] = pi^ab`, complex coefficients) meant to lie in `wedge^2 T^{1,0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HoloPoissonData {
    j: FieldMatrix,
    pi: FieldMatrix,
}

impl HoloPoissonData {
    pub fn new(j: FieldMatrix, pi: FieldMatrix) -> Result<Self, GcsError> {
        let d = j.rows();
        check_square(&j, d)?;
        check_square(&pi, d)?;
        let sq = j.mul(&j).add(&FieldMatrix::identity(d));
        if let Some((r, c, f)) = sq.first_nonzero() {
            return Err(GcsError::NotComplex(format!("entry ({}, {}) = {}", r + 1, c + 1, f)));
        }
        for a in 0..d {
            for b in 0..=a {
                if !(pi.get(a, b) + pi.get(b, a)).is_zero() {
                    return Err(GcsError::PiNotAntisymmetric(a + 1, b + 1));
                }
            }
        }
        Ok(HoloPoissonData { j, pi })
    }

    pub fn j(&self) -> &FieldMatrix {
        &self.j
    }

    pub fn pi(&self) -> &FieldMatrix {
        &self.pi
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }

    /// Same complex structure, new bivector (e.g. a time derivative).
    pub fn with_pi(&self, pi: FieldMatrix) -> Result<Self, GcsError> {
        HoloPoissonData::new(self.j.clone(), pi)
    }

    /// The block `Q` of `J = [[-j, Q], [0, j^T]]`:
    /// `Q eta = 2i (pi# eta^{1,0} - conj(pi)# eta^{0,1})`, `eta^{1,0} = (1 - i j^T) eta / 2`.
    pub fn q_block(&self) -> FieldMatrix {
        let d = self.dim();
        let id = FieldMatrix::identity(d);
        let jt = self.j.transpose().scale(&cq_i());
        let p10 = id.sub(&jt).scale(&half());
        let p01 = id.add(&jt).scale(&half());
        let a = self.pi.transpose().mul(&p10);
        let b = self.pi.conj().transpose().mul(&p01);
        a.sub(&b).scale(&(cq_i() * cq_int(2)))
    }

    /// Ambient matrix of `H'`: `X + eta -> pi#(eta)`.
    pub(crate) fn h_prime(&self) -> FieldMatrix {
        let d = self.dim();
        let z = FieldMatrix::zeros(d, d);
        FieldMatrix::from_blocks(&z, &self.pi.transpose(), &z, &z)
    }

    pub(crate) fn complex_big(&self) -> FieldMatrix {
        let d = self.dim();
        let z = FieldMatrix::zeros(d, d);
        FieldMatrix::from_blocks(&self.j.neg(), &z, &z, &self.j.transpose())
    }
}

/// Complex coordinates `z_k = x_{2k-1} + i x_{2k}` on `R^{2n}` and the matching
/// complex structure `j d/dx_{2k-1} = d/dx_{2k}`.
pub fn standard_complex_structure(d: usize) -> FieldMatrix {
    FieldMatrix::from_fn(d, d, |r, c| {
        if c % 2 == 0 && r == c + 1 {
            ScalarField::one()
        } else if c % 2 == 1 && r + 1 == c {
            ScalarField::int(-1)
        } else {
            ScalarField::zero()
        }
    })
}

/// Real-coordinate matrix of `sum f (d/dz_a ^ d/dz_b)` on `R^{2n}` with the
/// coordinates of `standard_complex_structure`; `terms` are `(a, b, f)` with
/// 0-based complex indices.
pub fn holomorphic_bivector(d: usize, terms: &[(usize, usize, ScalarField)]) -> FieldMatrix {
    // d/dz_a = (d/dx_{2a} - i d/dx_{2a+1}) / 2 in 0-based real indices
    let dz = |a: usize| -> Vec<Cq> {
        let mut v = vec![cq_zero(); d];
        v[2 * a] = half();
        v[2 * a + 1] = cq_i() * half() * neg_one();
        v
    };
    let mut out = FieldMatrix::zeros(d, d);
    for (a, b, f) in terms {
        let (u, w) = (dz(*a), dz(*b));
        for mu in 0..d {
            for nu in 0..d {
                let c = &u[mu] * &w[nu] - &w[mu] * &u[nu];
                if c != cq_zero() {
                    let v = out.get(mu, nu) + &f.scale(&c);
                    out.set(mu, nu, v);
                }
            }
        }
    }
    out
}

/// `dbar pi = 0` and `[pi, pi] = 0`, exactly. Needs constant `j`.
pub fn maurer_cartan_check(data: &HoloPoissonData) -> Report {
    let mut r = Report::new("maurer-cartan");
    let d = data.dim();
    if data.j.entries().any(|f| !f.is_constant()) {
        r.push(Check::error("dbar pi = 0", "only constant complex structures are supported"));
        r.push(Check::error("[pi, pi] = 0", "only constant complex structures are supported"));
        return r;
    }
    let pi = &data.pi;
    let p01 = FieldMatrix::identity(d)
        .add(&data.j.transpose().scale(&cq_i()))
        .scale(&half());
    // (dbar f)_a = (P01 grad f)_a for every component f = pi^{mu nu}
    let mut total = 0;
    let mut first: Option<String> = None;
    for mu in 0..d {
        for nu in mu + 1..d {
            let f = pi.get(mu, nu);
            let grad: Vec<ScalarField> = (0..d).map(|k| f.diff(Var::coord(k))).collect();
            for (a, v) in p01.apply(&grad).into_iter().enumerate() {
                if !v.is_zero() {
                    total += v.term_count();
                    first.get_or_insert_with(|| format!("component ({}, {}), slot {}: {}", mu + 1, nu + 1, a + 1, v));
                }
            }
        }
    }
    let mut c = Check::exact("dbar pi = 0", total);
    if let Some(loc) = first {
        c = c.with_detail(loc);
    }
    r.push(c);

    let sch = schouten_square(pi);
    let mut c = Check::exact("[pi, pi] = 0", sch.iter().map(|(_, f)| f.term_count()).sum());
    if let Some(((a, b, e), f)) = sch.first() {
        c = c.at(format!("component ({}, {}, {})", a + 1, b + 1, e + 1)).with_detail(f.to_string());
    }
    r.push(c);
    r
}

/// Nonzero components of `[pi, pi]^{abc} = sum_cyc pi^{da} d_d pi^{bc}`, `a < b < c`.
pub fn schouten_square(pi: &FieldMatrix) -> Vec<((usize, usize, usize), ScalarField)> {
    let d = pi.rows();
    let term = |a: usize, b: usize, c: usize| {
        let mut acc = ScalarField::zero();
        for k in 0..d {
            let p = pi.get(k, a);
            if !p.is_zero() {
                acc = acc + p * &pi.get(b, c).diff(Var::coord(k));
            }
        }
        acc
    };
    let mut out = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            for c in b + 1..d {
                let v = term(a, b, c) + term(b, c, a) + term(c, a, b);
                if !v.is_zero() {
                    out.push(((a, b, c), v));
                }
            }
        }
    }
    out
}

/// Basis of `L` at a point: independent columns of `P = (1 - iJ)/2`.
pub(crate) fn l_basis(jc: &CqMatrix) -> CqMatrix {
    let n = jc.rows();
    let p = CqMatrix::identity(n).sub(&jc.scale(&cq_i())).scale(&half());
    let cols = p.pivot_columns();
    p.select_columns(&cols)
}

/// Coordinates of the columns of `w` in the column basis `v` (full column rank).
fn coordinates(v: &CqMatrix, w: &CqMatrix) -> Option<CqMatrix> {
    let rows = v.transpose().pivot_columns();
    let sq = v.select_rows(&rows);
    Some(sq.inverse()?.mul(&w.select_rows(&rows)))
}

/// Matrix of `H'bar H' - 1` on a basis of `L`, given ambient matrices:
/// `l_basis` spans `L`, `h_prime` maps `L` into `Lbar`.
pub fn hamiltonian_operator_matrix(l_basis: &CqMatrix, h_prime: &CqMatrix) -> Option<CqMatrix> {
    let hv = h_prime.mul(l_basis);
    let hhv = h_prime.conj().mul(&hv);
    let c = coordinates(l_basis, &hhv.sub(l_basis))?;
    Some(c)
}

/// `H'bar H' - 1` on `L` for holomorphic Poisson data at one point.
pub fn hamiltonian_matrix_at(data: &HoloPoissonData, chart: &CourantChart, point: &[Cq]) -> Result<CqMatrix, GcsError> {
    let t = cq_zero();
    let jc = eval_matrix(chart, &data.complex_big(), point, &t)?;
    let lb = l_basis(&jc);
    let n = jc.rows();
    // H' followed by the projection onto Lbar
    let pbar = CqMatrix::identity(n).add(&jc.scale(&cq_i())).scale(&half());
    let hp = pbar.mul(&eval_matrix(chart, &data.h_prime(), point, &t)?);
    hamiltonian_operator_matrix(&lb, &hp).ok_or_else(|| GcsError::NotInvertible("degenerate basis of L".into()))
}

/// Determinant of `H'bar H' - 1` at each sample point; passes iff none vanish.
pub fn hamiltonian_invertibility(data: &HoloPoissonData, chart: &CourantChart, points: &[Vec<Cq>]) -> Result<Report, GcsError> {
    let mut r = Report::new("hamiltonian-invertibility");
    let mut dets = Vec::new();
    let mut bad: Option<String> = None;
    for p in points {
        let det = hamiltonian_matrix_at(data, chart, p)?.det();
        if det == cq_zero() && bad.is_none() {
            bad = Some(fmt_point(p));
        }
        dets.push(det);
    }
    let mut c = Check::flag("H'bar H' - 1 invertible at sample points", CheckKind::Exact, bad.is_none());
    if let Some(p) = bad {
        c = c.at(p).with_detail("determinant is 0");
    }
    r.push(c);
    let mut distinct: Vec<String> = dets.iter().map(|z| format!("{} + {}i", fmt_rational(&z.re), fmt_rational(&z.im))).collect();
    distinct.sort();
    distinct.dedup();
    r.note(format!("determinants over {} points: {}", points.len(), distinct.join(", ")));
    Ok(r)
}

/// Sample points used by the construction-time oracles.
pub fn oracle_points(dim: usize) -> Vec<Vec<Cq>> {
    let mut g = rng(0x6c5);
    let mut pts = vec![vec![cq_zero(); dim]];
    pts.extend((0..5).map(|_| random_point(&mut g, dim)));
    pts
}

/// Pointwise `J` from the eigenbundle decomposition: `+i` on
/// `{v + H'v : v in L}`, `-i` on the conjugate.
pub fn graph_oracle(data: &HoloPoissonData, chart: &CourantChart, point: &[Cq]) -> Result<CqMatrix, GcsError> {
    let t = cq_zero();
    let jc = eval_matrix(chart, &data.complex_big(), point, &t)?;
    let lb = l_basis(&jc);
    let h = eval_matrix(chart, &data.h_prime(), point, &t)?;
    let graph = lb.add(&h.mul(&lb));
    let s = graph.hstack(&graph.conj());
    let n = s.rows();
    let half_n = graph.cols();
    let diag = CqMatrix::from_fn(n, n, |a, b| {
        if a != b {
            cq_zero()
        } else if a < half_n {
            cq_i()
        } else {
            -cq_i()
        }
    });
    let inv = s
        .inverse()
        .ok_or_else(|| GcsError::NotInvertible(format!("graph and its conjugate intersect at {}", fmt_point(point))))?;
    Ok(s.mul(&diag).mul(&inv))
}

/// `J = [[-j, Q], [0, j^T]]`, validated against the graph oracle.
pub fn gcs_from_holomorphic_poisson(chart: &Arc<CourantChart>, data: &HoloPoissonData) -> Result<GcsCandidate, GcsError> {
    let m = split_rank(chart)?;
    check_square(&data.j, m)?;
    gcs_from_complex(chart, &data.j)?;
    let mc = maurer_cartan_check(data);
    if let Some(c) = mc.failures().next() {
        return Err(GcsError::MaurerCartan(format!("{}: {}", c.name, c.detail.clone().unwrap_or_default())));
    }
    let points = oracle_points(chart.dim());
    let inv = hamiltonian_invertibility(data, chart, &points)?;
    if let Some(c) = inv.failures().next() {
        return Err(GcsError::NotInvertible(c.location.clone().unwrap_or_default()));
    }
    let z = FieldMatrix::zeros(m, m);
    let j = FieldMatrix::from_blocks(&data.j.neg(), &data.q_block(), &z, &data.j.transpose());
    for p in &points {
        let want = graph_oracle(data, chart, p)?;
        let got = eval_matrix(chart, &j, p, &cq_zero())?;
        if !got.sub(&want).is_zero() {
            return Err(GcsError::OracleMismatch(format!("at {}", fmt_point(p))));
        }
    }
    GcsCandidate::tagged(chart, j, Provenance::Hamiltonian)
}
