//! Matrices of scalar fields, exact complex-rational matrices, and the
//! floating-point conversions used by the flow integrator.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::symbolic::coeff::{cq_one, cq_recip, cq_to_c64, Cq};
use crate::symbolic::{NumField, ScalarField, SymbolicError, Var};

/// Dense row-major matrix of scalar fields.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ScalarField>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: vec![ScalarField::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        FieldMatrix::from_fn(n, n, |i, j| {
            if i == j {
                ScalarField::one()
            } else {
                ScalarField::zero()
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ScalarField) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        FieldMatrix { rows, cols, data }
    }

    /// Builds from rows; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<ScalarField>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(FieldMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<ScalarField>]) -> Option<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return None;
        }
        Some(FieldMatrix::from_fn(r, c, |i, j| cols[j][i].clone()))
    }

    pub fn constant(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Cq) -> Self {
        FieldMatrix::from_fn(rows, cols, |i, j| ScalarField::constant(f(i, j)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarField {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ScalarField) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &ScalarField> {
        self.data.iter()
    }

    pub fn column(&self, j: usize) -> Vec<ScalarField> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<ScalarField> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        FieldMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<E>(&self, f: impl Fn(&ScalarField) -> Result<ScalarField, E>) -> Result<Self, E> {
        Ok(FieldMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        FieldMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conj(&self) -> Self {
        self.map(ScalarField::conj)
    }

    pub fn neg(&self) -> Self {
        self.map(ScalarField::neg)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        FieldMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        FieldMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        FieldMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = ScalarField::zero();
            for k in 0..self.cols {
                let (a, b) = (self.get(i, k), other.get(k, j));
                if !a.is_zero() && !b.is_zero() {
                    acc = acc + a * b;
                }
            }
            acc
        })
    }

    pub fn scale(&self, c: &Cq) -> Self {
        self.map(|f| f.scale(c))
    }

    pub fn scale_field(&self, s: &ScalarField) -> Self {
        self.map(|f| f * s)
    }

    pub fn apply(&self, v: &[ScalarField]) -> Vec<ScalarField> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = ScalarField::zero();
                for (k, vk) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_zero() && !vk.is_zero() {
                        acc = acc + a * vk;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn diff(&self, v: Var) -> Self {
        self.map(|f| f.diff(v))
    }

    pub fn substitute(&self, v: Var, value: &Cq) -> Result<Self, SymbolicError> {
        self.try_map(|f| f.substitute(v, value))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(ScalarField::is_zero)
    }

    /// Total numerator term count; zero exactly when the matrix is zero.
    pub fn term_count(&self) -> usize {
        self.data.iter().map(ScalarField::term_count).sum()
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.data.iter().any(|f| f.depends_on(v))
    }

    pub fn max_degree(&self) -> u32 {
        self.data.iter().map(ScalarField::degree).max().unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(ScalarField::is_real)
    }

    /// First nonzero entry with its position, for residual reporting.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &ScalarField)> {
        self.data
            .iter()
            .position(|f| !f.is_zero())
            .map(|k| (k / self.cols, k % self.cols, &self.data[k]))
    }

    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> Self {
        FieldMatrix::from_fn(h, w, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// `[[a, b], [c, d]]` from four blocks.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let (r, s) = (a.rows, a.cols);
        FieldMatrix::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| {
            match (i < r, j < s) {
                (true, true) => a.get(i, j),
                (true, false) => b.get(i, j - s),
                (false, true) => c.get(i - r, j),
                (false, false) => d.get(i - r, j - s),
            }
            .clone()
        })
    }

    /// Determinant by fraction-free elimination (exact division at every step).
    pub fn det(&self) -> Result<ScalarField, SymbolicError> {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Ok(ScalarField::one());
        }
        let mut a: Vec<Vec<ScalarField>> = (0..n).map(|i| self.row(i)).collect();
        let mut prev = ScalarField::one();
        let mut sign = false;
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return Ok(ScalarField::zero());
            };
            if p != k {
                a.swap(p, k);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                    a[i][j] = v.div(&prev)?;
                }
                a[i][k] = ScalarField::zero();
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        Ok(if sign { d.neg() } else { d })
    }

    /// Inverse by Gauss-Jordan over the scalar fields; `None` when singular.
    pub fn inverse(&self) -> Result<Option<Self>, SymbolicError> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a: Vec<Vec<ScalarField>> = (0..n).map(|i| self.row(i)).collect();
        let mut inv: Vec<Vec<ScalarField>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { ScalarField::one() } else { ScalarField::zero() }).collect())
            .collect();
        for k in 0..n {
            // prefer constant pivots to keep denominators small
            let p = (k..n)
                .filter(|&r| !a[r][k].is_zero())
                .min_by_key(|&r| (!a[r][k].is_constant(), a[r][k].term_count()));
            let Some(p) = p else {
                return Ok(None);
            };
            a.swap(p, k);
            inv.swap(p, k);
            let piv = a[k][k].recip()?;
            for j in 0..n {
                a[k][j] = &a[k][j] * &piv;
                inv[k][j] = &inv[k][j] * &piv;
            }
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].clone();
                for j in 0..n {
                    a[i][j] = &a[i][j] - &(&f * &a[k][j]);
                    inv[i][j] = &inv[i][j] - &(&f * &inv[k][j]);
                }
            }
        }
        Ok(FieldMatrix::from_rows(inv))
    }

    /// Exact evaluation at a point given for `order`.
    pub fn evaluate(&self, order: &[Var], point: &[Cq]) -> Result<CqMatrix, SymbolicError> {
        let lookup = |v: Var| {
            order
                .iter()
                .position(|&w| w == v)
                .map(|k| point[k].clone())
                .unwrap_or_else(Cq::zero)
        };
        let data = self
            .data
            .iter()
            .map(|f| f.evaluate_with(&lookup))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CqMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn compile(&self, order: &[Var]) -> NumMatrix {
        NumMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|f| NumField::compile(f, order)).collect(),
        }
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A field matrix compiled for fast floating-point evaluation.
#[derive(Clone, Debug)]
pub struct NumMatrix {
    rows: usize,
    cols: usize,
    data: Vec<NumField>,
}

impl NumMatrix {
    pub fn eval(&self, x: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.data[i * self.cols + j].eval_real(x))
    }

    /// Real part; callers use this for matrices known to be real.
    pub fn eval_re(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.data[i * self.cols + j].eval_real(x).re)
    }
}

/// Dense matrix of exact complex rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct CqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Cq>,
}

impl CqMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cq) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CqMatrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        CqMatrix::from_fn(n, n, |i, j| if i == j { cq_one() } else { Cq::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Cq {
        &self.data[i * self.cols + j]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        CqMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Cq::zero();
            for k in 0..self.cols {
                acc += self.get(i, k) * other.get(k, j);
            }
            acc
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        CqMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn add(&self, other: &Self) -> Self {
        CqMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn scale(&self, c: &Cq) -> Self {
        CqMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    pub fn conj(&self) -> Self {
        CqMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).conj())
    }

    pub fn transpose(&self) -> Self {
        CqMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        CqMatrix::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        CqMatrix::from_fn(rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    /// Side-by-side concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "shape mismatch");
        CqMatrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// Greedy choice of linearly independent columns, left to right.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::new();
        for c in 0..self.cols {
            let mut trial = chosen.clone();
            trial.push(c);
            if self.select_columns(&trial).rank() == trial.len() {
                chosen = trial;
            }
        }
        chosen
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn to_c64(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| cq_to_c64(self.get(i, j)))
    }

    fn rows_vec(&self) -> Vec<Vec<Cq>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn det(&self) -> Cq {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.rows_vec();
        let mut det = cq_one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return Cq::zero();
            };
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= &a[k][k];
            let inv = cq_recip(&a[k][k]).expect("nonzero pivot");
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] * &inv;
                for j in k..n {
                    let v = &f * &a[k][j];
                    a[i][j] -= v;
                }
            }
        }
        det
    }

    pub fn rank(&self) -> usize {
        let mut a = self.rows_vec();
        let (n, m) = (self.rows, self.cols);
        let mut r = 0;
        for c in 0..m {
            let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(p, r);
            let inv = cq_recip(&a[r][c]).expect("nonzero pivot");
            for i in r + 1..n {
                if a[i][c].is_zero() {
                    continue;
                }
                let f = &a[i][c] * &inv;
                for j in c..m {
                    let v = &f * &a[r][j];
                    a[i][j] -= v;
                }
            }
            r += 1;
            if r == n {
                break;
            }
        }
        r
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.rows_vec();
        let mut inv = CqMatrix::identity(n).rows_vec();
        for k in 0..n {
            let p = (k..n).find(|&r| !a[r][k].is_zero())?;
            a.swap(p, k);
            inv.swap(p, k);
            let piv = cq_recip(&a[k][k])?;
            for j in 0..n {
                a[k][j] = &a[k][j] * &piv;
                inv[k][j] = &inv[k][j] * &piv;
            }
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].clone();
                for j in 0..n {
                    let v = &f * &a[k][j];
                    a[i][j] -= v;
                    let w = &f * &inv[k][j];
                    inv[i][j] -= w;
                }
            }
        }
        Some(CqMatrix {
            rows: n,
            cols: n,
            data: inv.into_iter().flatten().collect(),
        })
    }
}

/// Infinity norm of a complex matrix (largest entry modulus).
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
