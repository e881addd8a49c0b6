use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use super::{CourantChart, CourantError};
use crate::linalg::FieldMatrix;
use crate::symbolic::{Cq, ScalarField, Var};

/// A (complexified) section: coefficients over the chart frame.
#[derive(Clone)]
pub struct Section {
    chart: Arc<CourantChart>,
    coeffs: Vec<ScalarField>,
}

impl Section {
    pub fn new(chart: &Arc<CourantChart>, coeffs: Vec<ScalarField>) -> Result<Self, CourantError> {
        if coeffs.len() != chart.rank() {
            return Err(CourantError::Length {
                expected: chart.rank(),
                got: coeffs.len(),
            });
        }
        Ok(Section {
            chart: Arc::clone(chart),
            coeffs,
        })
    }

    pub fn zero(chart: &Arc<CourantChart>) -> Self {
        Section {
            chart: Arc::clone(chart),
            coeffs: vec![ScalarField::zero(); chart.rank()],
        }
    }

    /// Frame element `e_i` (0-based).
    pub fn basis(chart: &Arc<CourantChart>, i: usize) -> Self {
        let mut s = Section::zero(chart);
        s.coeffs[i] = ScalarField::one();
        s
    }

    /// Standard chart helper: `X + xi` from vector and covector parts.
    pub fn from_parts(chart: &Arc<CourantChart>, vector: &[ScalarField], covector: &[ScalarField]) -> Result<Self, CourantError> {
        Section::new(chart, vector.iter().chain(covector).cloned().collect())
    }

    pub fn chart(&self) -> &Arc<CourantChart> {
        &self.chart
    }

    pub fn coeffs(&self) -> &[ScalarField] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &ScalarField {
        &self.coeffs[i]
    }

    pub fn into_coeffs(self) -> Vec<ScalarField> {
        self.coeffs
    }

    /// First half of the frame coefficients (the vector part on standard charts).
    pub fn vector_part(&self) -> &[ScalarField] {
        &self.coeffs[..self.coeffs.len() / 2]
    }

    pub fn covector_part(&self) -> &[ScalarField] {
        &self.coeffs[self.coeffs.len() / 2..]
    }

    pub(crate) fn with_coeffs(&self, coeffs: Vec<ScalarField>) -> Self {
        debug_assert_eq!(coeffs.len(), self.coeffs.len());
        Section {
            chart: Arc::clone(&self.chart),
            coeffs,
        }
    }

    pub fn check_same_chart(&self, other: &Section) -> Result<(), CourantError> {
        if self.chart.same(&other.chart) {
            Ok(())
        } else {
            Err(CourantError::ChartMismatch)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(ScalarField::is_zero)
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.iter().map(ScalarField::term_count).sum()
    }

    pub fn scale(&self, c: &Cq) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|f| f.scale(c)).collect())
    }

    pub fn scale_field(&self, f: &ScalarField) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|g| g * f).collect())
    }

    pub fn conj(&self) -> Self {
        self.with_coeffs(self.coeffs.iter().map(ScalarField::conj).collect())
    }

    pub fn re(&self) -> Self {
        self.with_coeffs(self.coeffs.iter().map(ScalarField::re).collect())
    }

    pub fn im(&self) -> Self {
        self.with_coeffs(self.coeffs.iter().map(ScalarField::im).collect())
    }

    pub fn diff(&self, v: Var) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|f| f.diff(v)).collect())
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        self.with_coeffs(self.coeffs.iter().map(f).collect())
    }

    pub fn try_map<E>(&self, f: impl Fn(&ScalarField) -> Result<ScalarField, E>) -> Result<Self, E> {
        Ok(self.with_coeffs(self.coeffs.iter().map(f).collect::<Result<_, _>>()?))
    }

    fn zip(&self, other: &Section, f: impl Fn(&ScalarField, &ScalarField) -> ScalarField) -> Section {
        assert!(self.chart.same(&other.chart), "sections on different charts");
        self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect())
    }
}

impl PartialEq for Section {
    fn eq(&self, other: &Self) -> bool {
        self.chart.same(&other.chart) && self.coeffs == other.coeffs
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

// Debug output omits the chart, which is large and rarely informative.
impl fmt::Debug for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Section{self}")
    }
}

impl fmt::Debug for TwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwoForm{}", self.m)
    }
}

impl fmt::Debug for EndomorphismField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EndomorphismField{}", self.m)
    }
}

macro_rules! section_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Section> for &Section {
            type Output = Section;
            fn $method(self, rhs: &Section) -> Section {
                self.zip(rhs, |a, b| a $op b)
            }
        }
        impl $trait<Section> for Section {
            type Output = Section;
            fn $method(self, rhs: Section) -> Section {
                self.zip(&rhs, |a, b| a $op b)
            }
        }
        impl $trait<&Section> for Section {
            type Output = Section;
            fn $method(self, rhs: &Section) -> Section {
                self.zip(rhs, |a, b| a $op b)
            }
        }
    };
}

section_binop!(Add, add, +);
section_binop!(Sub, sub, -);

impl Neg for &Section {
    type Output = Section;
    fn neg(self) -> Section {
        self.map(ScalarField::neg)
    }
}

impl Neg for Section {
    type Output = Section;
    fn neg(self) -> Section {
        self.map(ScalarField::neg)
    }
}

/// Antisymmetric bilinear form on sections, `m[i][j] = w(e_i, e_j)`.
#[derive(Clone)]
pub struct TwoForm {
    chart: Arc<CourantChart>,
    m: FieldMatrix,
}

impl TwoForm {
    pub fn new(chart: &Arc<CourantChart>, m: FieldMatrix) -> Result<Self, CourantError> {
        let n = chart.rank();
        if m.rows() != n || m.cols() != n {
            return Err(CourantError::Shape {
                rows: m.rows(),
                cols: m.cols(),
                erows: n,
                ecols: n,
            });
        }
        for i in 0..n {
            for j in 0..=i {
                if !(m.get(i, j) + m.get(j, i)).is_zero() {
                    return Err(CourantError::NotAntisymmetric(i + 1, j + 1));
                }
            }
        }
        Ok(TwoForm {
            chart: Arc::clone(chart),
            m,
        })
    }

    pub fn chart(&self) -> &Arc<CourantChart> {
        &self.chart
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.m
    }

    pub fn eval(&self, a: &Section, b: &Section) -> ScalarField {
        let mb = self.m.apply(b.coeffs());
        let mut acc = ScalarField::zero();
        for (x, y) in a.coeffs().iter().zip(&mb) {
            if !x.is_zero() && !y.is_zero() {
                acc = acc + x * y;
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }
}

/// Bundle endomorphism; column `j` is the image of `e_j`.
#[derive(Clone)]
pub struct EndomorphismField {
    chart: Arc<CourantChart>,
    m: FieldMatrix,
}

impl EndomorphismField {
    pub fn new(chart: &Arc<CourantChart>, m: FieldMatrix) -> Result<Self, CourantError> {
        let n = chart.rank();
        if m.rows() != n || m.cols() != n {
            return Err(CourantError::Shape {
                rows: m.rows(),
                cols: m.cols(),
                erows: n,
                ecols: n,
            });
        }
        Ok(EndomorphismField {
            chart: Arc::clone(chart),
            m,
        })
    }

    pub fn identity(chart: &Arc<CourantChart>) -> Self {
        EndomorphismField {
            chart: Arc::clone(chart),
            m: FieldMatrix::identity(chart.rank()),
        }
    }

    pub fn chart(&self) -> &Arc<CourantChart> {
        &self.chart
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> FieldMatrix {
        self.m
    }

    pub(crate) fn with_matrix(&self, m: FieldMatrix) -> Self {
        EndomorphismField {
            chart: Arc::clone(&self.chart),
            m,
        }
    }

    pub fn apply(&self, s: &Section) -> Section {
        assert!(self.chart.same(s.chart()), "endomorphism and section on different charts");
        s.with_coeffs(self.m.apply(s.coeffs()))
    }

    /// Image of the frame element `e_j`.
    pub fn column(&self, j: usize) -> Section {
        Section {
            chart: Arc::clone(&self.chart),
            coeffs: self.m.column(j),
        }
    }

    pub fn compose(&self, other: &EndomorphismField) -> Self {
        self.with_matrix(self.m.mul(&other.m))
    }

    pub fn add(&self, other: &EndomorphismField) -> Self {
        self.with_matrix(self.m.add(&other.m))
    }

    pub fn sub(&self, other: &EndomorphismField) -> Self {
        self.with_matrix(self.m.sub(&other.m))
    }

    pub fn scale(&self, c: &Cq) -> Self {
        self.with_matrix(self.m.scale(c))
    }

    pub fn conj(&self) -> Self {
        self.with_matrix(self.m.conj())
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }
}

impl PartialEq for EndomorphismField {
    fn eq(&self, other: &Self) -> bool {
        self.chart.same(&other.chart) && self.m == other.m
    }
}
