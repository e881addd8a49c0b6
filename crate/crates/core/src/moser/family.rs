use std::sync::Arc;

use nalgebra::DMatrix;

use super::MoserError;
use crate::courant::{CourantChart, Section};
use crate::gcs::{gcs_from_complex, gcs_from_holomorphic_poisson, gcs_from_symplectic, split_rank, GcsCandidate, HoloPoissonData};
use crate::linalg::{FieldMatrix, NumMatrix};
use crate::symbolic::coeff::{cq_i, cq_real, rat_from_f64, rat_to_f64};
use crate::symbolic::{Rational, ScalarField, Var};

/// Scalar factor multiplying one term of a time-dependent matrix.
/// Polynomial and rational dependence on `t` lives in the fields themselves.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeProfile {
    One,
    /// `e^{r t}`
    Exp(Rational),
}

impl TimeProfile {
    /// Exact for `One`; the exponential is rounded to the nearest double and
    /// then treated as an exact rational.
    pub fn value(&self, t: &Rational) -> Rational {
        match self {
            TimeProfile::One => Rational::from_integer(1.into()),
            TimeProfile::Exp(r) => {
                let v = (rat_to_f64(&(r * t))).exp();
                rat_from_f64(v).expect("finite exponential")
            }
        }
    }

    pub fn value_f64(&self, t: f64) -> f64 {
        match self {
            TimeProfile::One => 1.0,
            TimeProfile::Exp(r) => (rat_to_f64(r) * t).exp(),
        }
    }
}

/// `sum_k profile_k(t) A_k(t, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeDependent {
    rows: usize,
    cols: usize,
    terms: Vec<(TimeProfile, FieldMatrix)>,
}

impl TimeDependent {
    pub fn new(terms: Vec<(TimeProfile, FieldMatrix)>) -> Result<Self, MoserError> {
        let (rows, cols) = match terms.first() {
            Some((_, m)) => (m.rows(), m.cols()),
            None => return Err(MoserError::Shape("time-dependent matrix with no terms".into())),
        };
        if terms.iter().any(|(_, m)| m.rows() != rows || m.cols() != cols) {
            return Err(MoserError::Shape("terms of different shapes".into()));
        }
        Ok(TimeDependent { rows, cols, terms })
    }

    pub fn from_matrix(m: FieldMatrix) -> Self {
        TimeDependent {
            rows: m.rows(),
            cols: m.cols(),
            terms: vec![(TimeProfile::One, m)],
        }
    }

    pub fn column(v: Vec<ScalarField>) -> Self {
        let n = v.len();
        Self::from_matrix(FieldMatrix::from_fn(n, 1, |i, _| v[i].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn terms(&self) -> &[(TimeProfile, FieldMatrix)] {
        &self.terms
    }

    pub fn at(&self, t: &Rational) -> Result<FieldMatrix, MoserError> {
        let tc = cq_real(t.clone());
        let mut acc = FieldMatrix::zeros(self.rows, self.cols);
        for (p, m) in &self.terms {
            acc = acc.add(&m.substitute(Var::T, &tc)?.scale(&cq_real(p.value(t))));
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(p, m)| {
                let dm = m.diff(Var::T);
                let m = match p {
                    TimeProfile::One => dm,
                    TimeProfile::Exp(r) => m.scale(&cq_real(r.clone())).add(&dm),
                };
                (p.clone(), m)
            })
            .collect();
        TimeDependent {
            rows: self.rows,
            cols: self.cols,
            terms,
        }
    }

    /// The matrix as a single field in `(t, x)`, when no exponential profiles occur.
    pub fn symbolic(&self) -> Option<FieldMatrix> {
        if self.terms.iter().any(|(p, _)| *p != TimeProfile::One) {
            return None;
        }
        Some(self.terms.iter().fold(FieldMatrix::zeros(self.rows, self.cols), |acc, (_, m)| acc.add(m)))
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, m)| m.is_real())
    }

    /// Applies a map that commutes with multiplication by functions of `t` alone.
    pub fn map(&self, f: impl Fn(&FieldMatrix) -> FieldMatrix) -> Self {
        let terms: Vec<_> = self.terms.iter().map(|(p, m)| (p.clone(), f(m))).collect();
        let (rows, cols) = (terms[0].1.rows(), terms[0].1.cols());
        TimeDependent { rows, cols, terms }
    }

    pub fn compile(&self, coords: &[Var]) -> NumTimeDependent {
        let mut order = coords.to_vec();
        order.push(Var::T);
        NumTimeDependent {
            terms: self.terms.iter().map(|(p, m)| (p.clone(), m.compile(&order))).collect(),
        }
    }
}

/// Floating-point evaluation of a [`TimeDependent`] at `(t, p)`.
#[derive(Clone, Debug)]
pub struct NumTimeDependent {
    terms: Vec<(TimeProfile, NumMatrix)>,
}

impl NumTimeDependent {
    pub fn eval(&self, t: f64, p: &[f64]) -> DMatrix<f64> {
        let mut x = p.to_vec();
        x.push(t);
        let mut acc: Option<DMatrix<f64>> = None;
        for (prof, m) in &self.terms {
            let v = m.eval_re(&x) * prof.value_f64(t);
            acc = Some(match acc {
                Some(a) => a + v,
                None => v,
            });
        }
        acc.expect("at least one term")
    }
}

/// Where the family members come from.
#[derive(Clone, Debug)]
pub enum FamilySource {
    /// `J_t` itself.
    Raw(TimeDependent),
    /// `Omega_t` on the `A` half.
    Symplectic(TimeDependent),
    /// `j_t` on the `A` half.
    Complex(TimeDependent),
    /// Constant `j`, bivector `pi_t`.
    HoloPoisson { j: FieldMatrix, pi: TimeDependent },
    /// Pointwise samples `(t_k, J_k, optional Jdot_k)`; missing derivatives are
    /// replaced by three-point differences in `t`.
    Samples(Vec<(Rational, FieldMatrix, Option<FieldMatrix>)>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    PolyInT,
    Sampled,
}

/// `J_t` and `Jdot_t` on one slice of the family: either a sample time or the
/// whole `(t, x)` domain (`t == None`).
#[derive(Clone, Debug)]
pub struct FamilySlice {
    pub t: Option<Rational>,
    pub j: GcsCandidate,
    pub jdot: FieldMatrix,
    /// False when `jdot` came from finite differences.
    pub exact_jdot: bool,
}

impl FamilySlice {
    pub fn label(&self) -> String {
        match &self.t {
            Some(t) => format!("t = {}", crate::symbolic::coeff::fmt_rational(t)),
            None => "(t, x)".to_string(),
        }
    }
}

/// A one-parameter family of generalized complex structures on `t in [0, 1]`.
#[derive(Clone, Debug)]
pub struct GcsFamily {
    chart: Arc<CourantChart>,
    source: FamilySource,
    rep: Representation,
    symbolic: Option<FamilySlice>,
    samples: Vec<FamilySlice>,
}

fn check_times(times: &[Rational]) -> Result<(), MoserError> {
    if times.is_empty() {
        return Err(MoserError::TooFewSamples(0));
    }
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    if times.windows(2).any(|w| w[0] >= w[1]) || times[0] < zero || times[times.len() - 1] > one {
        return Err(MoserError::Shape("sample times must increase within [0, 1]".into()));
    }
    Ok(())
}

fn symplectic_jdot(j: &GcsCandidate, omega_dot: &FieldMatrix, m: usize) -> FieldMatrix {
    // pi# = -(top right block); d/dt pi# = -pi# wdot_flat pi#
    let sharp = j.matrix().block(0, m, m, m).neg();
    let flat_dot = omega_dot.transpose();
    let z = FieldMatrix::zeros(m, m);
    FieldMatrix::from_blocks(&z, &sharp.mul(&flat_dot).mul(&sharp), &flat_dot, &z)
}

fn complex_jdot(jdot: &FieldMatrix, m: usize) -> FieldMatrix {
    let z = FieldMatrix::zeros(m, m);
    FieldMatrix::from_blocks(&jdot.neg(), &z, &z, &jdot.transpose())
}

fn holo_jdot(data: &HoloPoissonData, pi_dot: &FieldMatrix) -> Result<FieldMatrix, MoserError> {
    let m = data.dim();
    let z = FieldMatrix::zeros(m, m);
    Ok(FieldMatrix::from_blocks(&z, &data.with_pi(pi_dot.clone())?.q_block(), &z, &z))
}

impl GcsFamily {
    pub fn new(chart: &Arc<CourantChart>, source: FamilySource, rep: Representation, times: &[Rational]) -> Result<Self, MoserError> {
        let m = split_rank(chart)?;
        let mut fam = GcsFamily {
            chart: Arc::clone(chart),
            source,
            rep,
            symbolic: None,
            samples: Vec::new(),
        };
        if let FamilySource::Samples(s) = &fam.source {
            if rep == Representation::PolyInT {
                return Err(MoserError::NotSymbolic("pointwise samples only support the sampled representation".into()));
            }
            let times: Vec<Rational> = s.iter().map(|(t, _, _)| t.clone()).collect();
            check_times(&times)?;
            fam.samples = fam.pointwise_samples()?;
            return Ok(fam);
        }
        check_times(times)?;
        match rep {
            Representation::PolyInT => {
                let slice = fam.symbolic_slice()?;
                let n = chart.rank();
                let sq = slice.j.matrix().mul(slice.j.matrix()).add(&FieldMatrix::identity(n));
                if !sq.is_zero() {
                    return Err(MoserError::Gcs(crate::gcs::GcsError::NotAlmostComplex));
                }
                fam.samples = times
                    .iter()
                    .map(|t| {
                        let tc = cq_real(t.clone());
                        Ok(FamilySlice {
                            t: Some(t.clone()),
                            j: slice.j.at_time(&tc)?,
                            jdot: slice.jdot.substitute(Var::T, &tc)?,
                            exact_jdot: true,
                        })
                    })
                    .collect::<Result<_, MoserError>>()?;
                fam.symbolic = Some(slice);
            }
            Representation::Sampled => {
                fam.samples = times.iter().map(|t| fam.member(t, m)).collect::<Result<_, _>>()?;
            }
        }
        Ok(fam)
    }

    fn symbolic_slice(&self) -> Result<FamilySlice, MoserError> {
        let need = |td: &TimeDependent| td.symbolic().ok_or_else(|| MoserError::NotSymbolic("exponential time profile".into()));
        let chart = &self.chart;
        let j = match &self.source {
            FamilySource::Raw(td) => GcsCandidate::raw(chart, need(td)?)?,
            FamilySource::Symplectic(td) => gcs_from_symplectic(chart, &need(td)?)?,
            FamilySource::Complex(td) => gcs_from_complex(chart, &need(td)?)?,
            FamilySource::HoloPoisson { j, pi } => gcs_from_holomorphic_poisson(chart, &HoloPoissonData::new(j.clone(), need(pi)?)?)?,
            FamilySource::Samples(_) => unreachable!("handled by the caller"),
        };
        let jdot = j.matrix().diff(Var::T);
        Ok(FamilySlice {
            t: None,
            j,
            jdot,
            exact_jdot: true,
        })
    }

    /// Family member at one time, with the analytic derivative.
    fn member(&self, t: &Rational, m: usize) -> Result<FamilySlice, MoserError> {
        let chart = &self.chart;
        let (j, jdot) = match &self.source {
            FamilySource::Raw(td) => (GcsCandidate::raw(chart, td.at(t)?)?, td.derivative().at(t)?),
            FamilySource::Symplectic(td) => {
                let j = gcs_from_symplectic(chart, &td.at(t)?)?;
                let jd = symplectic_jdot(&j, &td.derivative().at(t)?, m);
                (j, jd)
            }
            FamilySource::Complex(td) => (gcs_from_complex(chart, &td.at(t)?)?, complex_jdot(&td.derivative().at(t)?, m)),
            FamilySource::HoloPoisson { j, pi } => {
                let data = HoloPoissonData::new(j.clone(), pi.at(t)?)?;
                let jd = holo_jdot(&data, &pi.derivative().at(t)?)?;
                (gcs_from_holomorphic_poisson(chart, &data)?, jd)
            }
            FamilySource::Samples(_) => unreachable!("handled by the caller"),
        };
        Ok(FamilySlice {
            t: Some(t.clone()),
            j,
            jdot,
            exact_jdot: true,
        })
    }

    fn pointwise_samples(&self) -> Result<Vec<FamilySlice>, MoserError> {
        let FamilySource::Samples(s) = &self.source else {
            unreachable!("pointwise samples only")
        };
        let missing = s.iter().any(|(_, _, d)| d.is_none());
        if missing && s.len() < 3 {
            return Err(MoserError::TooFewSamples(s.len()));
        }
        let n = s.len();
        (0..n)
            .map(|k| {
                let (t, jm, jd) = &s[k];
                let j = GcsCandidate::raw(&self.chart, jm.clone())?;
                let (jdot, exact) = match jd {
                    Some(d) => (d.clone(), true),
                    None => {
                        let c = (k.max(1) - 1).min(n - 3);
                        (three_point_derivative([&s[c], &s[c + 1], &s[c + 2]], t), false)
                    }
                };
                Ok(FamilySlice {
                    t: Some(t.clone()),
                    j,
                    jdot,
                    exact_jdot: exact,
                })
            })
            .collect()
    }

    pub fn chart(&self) -> &Arc<CourantChart> {
        &self.chart
    }

    pub fn source(&self) -> &FamilySource {
        &self.source
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn samples(&self) -> &[FamilySlice] {
        &self.samples
    }

    /// The `(t, x)` slice in the polynomial representation.
    pub fn symbolic(&self) -> Option<&FamilySlice> {
        self.symbolic.as_ref()
    }

    /// Slices the exact checks run on: the symbolic slice when available,
    /// otherwise every sample.
    pub fn check_slices(&self) -> Vec<&FamilySlice> {
        match &self.symbolic {
            Some(s) => vec![s],
            None => self.samples.iter().collect(),
        }
    }

    /// `pi#_t` as a field in `(t, x)` for symplectic families given by fields.
    pub(crate) fn symbolic_sharp(&self) -> Option<FieldMatrix> {
        let FamilySource::Symplectic(td) = &self.source else {
            return None;
        };
        let omega = td.symbolic()?;
        omega.transpose().inverse().ok().flatten()
    }
}

/// Derivative at `t` of the quadratic through three samples.
fn three_point_derivative(s: [&(Rational, FieldMatrix, Option<FieldMatrix>); 3], t: &Rational) -> FieldMatrix {
    let ts: Vec<&Rational> = s.iter().map(|x| &x.0).collect();
    let mut acc = FieldMatrix::zeros(s[0].1.rows(), s[0].1.cols());
    for i in 0..3 {
        let (a, b) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        // d/dt of (t - ta)(t - tb) / ((ti - ta)(ti - tb))
        let num = (t - ts[a]) + (t - ts[b]);
        let den = (ts[i] - ts[a]) * (ts[i] - ts[b]);
        acc = acc.add(&s[i].1.scale(&cq_real(num / den)));
    }
    acc
}

/// How the sections `z_t in L_t` are specified.
#[derive(Clone, Debug)]
pub enum ZSpec {
    /// `z_t` directly (rank x 1).
    Z(TimeDependent),
    /// Real generator `x_t` (rank x 1); `z_t = J_t x_t + i x_t`.
    X(TimeDependent),
    /// Symplectic dictionary: one-form `xi_t` on `A` (m x 1); `z_t = i pi#_t xi_t + xi_t`.
    Xi(TimeDependent),
    /// Holomorphic vector field `X^{1,0}_t` (m x 1); `x_t = 2 Re X^{1,0}_t`.
    X10(TimeDependent),
}

/// A time-dependent section paired with a [`GcsFamily`].
#[derive(Clone, Debug)]
pub struct SectionFamily {
    chart: Arc<CourantChart>,
    spec: ZSpec,
}

impl SectionFamily {
    pub fn new(chart: &Arc<CourantChart>, spec: ZSpec) -> Result<Self, MoserError> {
        let n = chart.rank();
        let m = split_rank(chart)?;
        let (td, want, real) = match &spec {
            ZSpec::Z(td) => (td, n, false),
            ZSpec::X(td) => (td, n, true),
            ZSpec::Xi(td) => (td, m, true),
            ZSpec::X10(td) => (td, m, false),
        };
        if td.rows() != want || td.cols() != 1 {
            return Err(MoserError::Shape(format!("section family needs {want} x 1 entries, got {} x {}", td.rows(), td.cols())));
        }
        if real && !td.is_real() {
            return Err(MoserError::NotReal("generator components must be real".into()));
        }
        Ok(SectionFamily {
            chart: Arc::clone(chart),
            spec,
        })
    }

    pub fn zero(chart: &Arc<CourantChart>) -> Self {
        SectionFamily {
            chart: Arc::clone(chart),
            spec: ZSpec::X(TimeDependent::from_matrix(FieldMatrix::zeros(chart.rank(), 1))),
        }
    }

    pub fn spec(&self) -> &ZSpec {
        &self.spec
    }

    fn data_on(&self, slice: &FamilySlice) -> Result<FieldMatrix, MoserError> {
        let td = match &self.spec {
            ZSpec::Z(td) | ZSpec::X(td) | ZSpec::Xi(td) | ZSpec::X10(td) => td,
        };
        match &slice.t {
            Some(t) => td.at(t),
            None => td.symbolic().ok_or_else(|| MoserError::NotSymbolic("exponential time profile in a polynomial family".into())),
        }
    }

    fn padded(&self, v: Vec<ScalarField>) -> Vec<ScalarField> {
        let n = self.chart.rank();
        let mut out = v;
        out.resize(n, ScalarField::zero());
        out
    }

    /// `z_t` on a family slice.
    pub fn z_on(&self, fam: &GcsFamily, slice: &FamilySlice) -> Result<Section, MoserError> {
        let data = self.data_on(slice)?.column(0);
        let j = slice.j.endomorphism();
        let from_x = |x: Vec<ScalarField>| -> Result<Section, MoserError> {
            let xs = Section::new(&self.chart, x)?;
            Ok(j.apply(&xs) + xs.scale(&cq_i()))
        };
        match &self.spec {
            ZSpec::Z(_) => Ok(Section::new(&self.chart, data)?),
            ZSpec::X(_) => from_x(data),
            ZSpec::X10(_) => from_x(self.padded(data.iter().map(|f| f.re().scale(&cq_real(Rational::from_integer(2.into())))).collect())),
            ZSpec::Xi(_) => {
                let m = data.len();
                if !matches!(fam.source(), FamilySource::Symplectic(_)) {
                    return Err(MoserError::Incompatible("the one-form dictionary needs a symplectic family".into()));
                }
                let sharp = slice.j.matrix().block(0, m, m, m).neg();
                let v: Vec<ScalarField> = sharp.apply(&data).iter().map(|f| f.scale(&cq_i())).collect();
                Ok(Section::new(&self.chart, v.into_iter().chain(data).collect())?)
            }
        }
    }

    /// The real generator `x_t` as a time-dependent column, for the flow.
    pub fn generator(&self, fam: &GcsFamily) -> Result<TimeDependent, MoserError> {
        let n = self.chart.rank();
        match &self.spec {
            ZSpec::Z(td) => Ok(td.map(|m| m.map(ScalarField::im))),
            ZSpec::X(td) => Ok(td.clone()),
            ZSpec::X10(td) => Ok(td.map(|m| {
                let two = cq_real(Rational::from_integer(2.into()));
                FieldMatrix::from_fn(n, 1, |i, _| if i < m.rows() { m.get(i, 0).re().scale(&two) } else { ScalarField::zero() })
            })),
            ZSpec::Xi(td) => {
                let sharp = fam
                    .symbolic_sharp()
                    .ok_or_else(|| MoserError::NotSymbolic("the one-form dictionary needs Omega_t given by fields".into()))?;
                let xi = td
                    .symbolic()
                    .ok_or_else(|| MoserError::NotSymbolic("exponential time profile in xi_t".into()))?;
                let v = sharp.mul(&xi);
                Ok(TimeDependent::from_matrix(FieldMatrix::from_fn(n, 1, |i, _| {
                    if i < v.rows() {
                        v.get(i, 0).clone()
                    } else {
                        ScalarField::zero()
                    }
                })))
            }
        }
    }

    /// `X^{1,0}_t` on a slice, when given.
    pub(crate) fn holomorphic_on(&self, slice: &FamilySlice) -> Result<Option<Vec<ScalarField>>, MoserError> {
        match &self.spec {
            ZSpec::X10(_) => Ok(Some(self.data_on(slice)?.column(0))),
            _ => Ok(None),
        }
    }

    /// `xi_t` on a slice, when given through the symplectic dictionary.
    pub(crate) fn one_form_on(&self, slice: &FamilySlice) -> Result<Option<Vec<ScalarField>>, MoserError> {
        match &self.spec {
            ZSpec::Xi(_) => Ok(Some(self.data_on(slice)?.column(0))),
            _ => Ok(None),
        }
    }
}
