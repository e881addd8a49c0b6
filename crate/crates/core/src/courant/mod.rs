//! Trivialized Courant algebroids on a coordinate chart.

pub(crate) mod axioms;
mod bracket;
mod tensor;

use std::sync::Arc;

use num_traits::{One, Zero};

pub use crate::linalg::FieldMatrix;
use crate::symbolic::coeff::{cq_real, rat, Rational};
use crate::symbolic::{ScalarField, SymbolicError, Var};

pub use axioms::{check_axioms, check_axioms_with, check_dorfman_identities, TupleMode};
pub use bracket::{anchor_apply, anchor_vector, courant_bracket, d_operator, dorfman_bracket, pairing, vector_field_apply};
pub use tensor::{EndomorphismField, Section, TwoForm};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CourantError {
    #[error("chart dimension must be at least 1")]
    DimensionZero,
    #[error("objects live on different charts")]
    ChartMismatch,
    #[error("expected {expected} components, got {got}")]
    Length { expected: usize, got: usize },
    #[error("pairing matrix is not symmetric")]
    PairingNotSymmetric,
    #[error("pairing matrix is singular")]
    PairingSingular,
    #[error("structure table is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("matrix has shape {rows}x{cols}, expected {erows}x{ecols}")]
    Shape {
        rows: usize,
        cols: usize,
        erows: usize,
        ecols: usize,
    },
    #[error("need at least {sections} sections and {functions} functions")]
    TooFewTrials { sections: usize, functions: usize },
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    /// `TM + T*M` with frame `(d/dx^1.., dx^1..)`.
    Standard,
    /// `A + A*` for a Lie algebroid `A` with trivial dual bracket.
    Double,
    Custom,
}

/// Frame data of a Courant algebroid over a chart of dimension `dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct CourantChart {
    dim: usize,
    rank: usize,
    kind: ChartKind,
    pairing: Vec<Vec<Rational>>,
    pairing_inv: Vec<Vec<Rational>>,
    anchor: FieldMatrix,
    // structure[i][j] = coefficients of [e_i, e_j]
    structure: Vec<Vec<Vec<ScalarField>>>,
    flat: bool,
    // 1/2 g^-1 rho^T, so that D f = d_matrix * grad f
    d_matrix: FieldMatrix,
}

fn invert_rational(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(p, k);
        inv.swap(p, k);
        let piv = a[k][k].recip();
        for j in 0..n {
            a[k][j] = &a[k][j] * &piv;
            inv[k][j] = &inv[k][j] * &piv;
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in 0..n {
                    let v = &f * &a[k][j];
                    a[i][j] -= v;
                    let w = &f * &inv[k][j];
                    inv[i][j] -= w;
                }
            }
        }
    }
    Some(inv)
}

impl CourantChart {
    /// Validates and assembles chart data. `structure[i][j][k]` is the
    /// `e_k` coefficient of `[e_i, e_j]`.
    pub fn new(
        dim: usize,
        pairing: Vec<Vec<Rational>>,
        anchor: FieldMatrix,
        structure: Vec<Vec<Vec<ScalarField>>>,
        kind: ChartKind,
    ) -> Result<Arc<Self>, CourantError> {
        if dim == 0 {
            return Err(CourantError::DimensionZero);
        }
        let rank = pairing.len();
        if pairing.iter().any(|r| r.len() != rank) {
            return Err(CourantError::Length {
                expected: rank,
                got: pairing.iter().map(Vec::len).find(|&l| l != rank).unwrap_or(0),
            });
        }
        for i in 0..rank {
            for j in 0..i {
                if pairing[i][j] != pairing[j][i] {
                    return Err(CourantError::PairingNotSymmetric);
                }
            }
        }
        let pairing_inv = invert_rational(&pairing).ok_or(CourantError::PairingSingular)?;
        if anchor.rows() != dim || anchor.cols() != rank {
            return Err(CourantError::Shape {
                rows: anchor.rows(),
                cols: anchor.cols(),
                erows: dim,
                ecols: rank,
            });
        }
        if structure.len() != rank || structure.iter().any(|r| r.len() != rank) {
            return Err(CourantError::Length {
                expected: rank,
                got: structure.len(),
            });
        }
        for i in 0..rank {
            for j in 0..rank {
                let (a, b) = (&structure[i][j], &structure[j][i]);
                if a.len() != rank || b.len() != rank {
                    return Err(CourantError::Length {
                        expected: rank,
                        got: a.len(),
                    });
                }
                if a.iter().zip(b).any(|(x, y)| !(x + y).is_zero()) {
                    return Err(CourantError::NotAntisymmetric(i + 1, j + 1));
                }
            }
        }
        let flat = structure.iter().flatten().flatten().all(ScalarField::is_zero);
        let half_ginv = FieldMatrix::constant(rank, rank, |i, j| cq_real(&pairing_inv[i][j] * rat(1, 2)));
        let d_matrix = half_ginv.mul(&anchor.transpose());
        Ok(Arc::new(CourantChart {
            dim,
            rank,
            kind,
            pairing,
            pairing_inv,
            anchor,
            structure,
            flat,
            d_matrix,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn pairing_matrix(&self) -> &[Vec<Rational>] {
        &self.pairing
    }

    pub fn pairing_inverse(&self) -> &[Vec<Rational>] {
        &self.pairing_inv
    }

    /// The pairing as a constant field matrix.
    pub fn pairing_fields(&self) -> FieldMatrix {
        FieldMatrix::constant(self.rank, self.rank, |i, j| cq_real(self.pairing[i][j].clone()))
    }

    pub fn anchor(&self) -> &FieldMatrix {
        &self.anchor
    }

    /// Coefficients of `[e_i, e_j]`.
    pub fn structure(&self, i: usize, j: usize) -> &[ScalarField] {
        &self.structure[i][j]
    }

    /// True when every frame bracket vanishes.
    pub fn is_flat(&self) -> bool {
        self.flat
    }

    pub(crate) fn d_matrix(&self) -> &FieldMatrix {
        &self.d_matrix
    }

    /// Chart coordinates `x1..xd`.
    pub fn coords(&self) -> Vec<Var> {
        (0..self.dim).map(Var::coord).collect()
    }

    pub fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}

/// `TM + T*M` over a chart of dimension `d`: pairing with off-diagonal
/// blocks `1/2`, anchor the tangent projection, all frame brackets zero.
pub fn standard_chart(d: usize) -> Result<Arc<CourantChart>, CourantError> {
    if d == 0 {
        return Err(CourantError::DimensionZero);
    }
    let n = 2 * d;
    let pairing = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if (i + d == j) || (j + d == i) { rat(1, 2) } else { Rational::zero() })
                .collect()
        })
        .collect();
    let anchor = FieldMatrix::from_fn(d, n, |mu, i| {
        if mu == i {
            ScalarField::one()
        } else {
            ScalarField::zero()
        }
    });
    let structure = vec![vec![vec![ScalarField::zero(); n]; n]; n];
    CourantChart::new(d, pairing, anchor, structure, ChartKind::Standard)
}

/// The double `A + A*` of a Lie algebroid of rank `m` over a chart of
/// dimension `d`, where `anchor_a` is `d x m` and `structure_a[i][j][k]` is
/// `c^k_ij`. Frame `(e_1..e_m, eps^1..eps^m)`.
pub fn double_of_lie_algebroid(
    anchor_a: &FieldMatrix,
    structure_a: &[Vec<Vec<ScalarField>>],
) -> Result<Arc<CourantChart>, CourantError> {
    let d = anchor_a.rows();
    let m = anchor_a.cols();
    if structure_a.len() != m || structure_a.iter().any(|r| r.len() != m || r.iter().any(|c| c.len() != m)) {
        return Err(CourantError::Length {
            expected: m,
            got: structure_a.len(),
        });
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if !(&structure_a[i][j][k] + &structure_a[j][i][k]).is_zero() {
                    return Err(CourantError::NotAntisymmetric(i + 1, j + 1));
                }
            }
        }
    }
    let n = 2 * m;
    let pairing = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if (i + m == j) || (j + m == i) { rat(1, 2) } else { Rational::zero() })
                .collect()
        })
        .collect();
    let anchor = FieldMatrix::from_fn(d, n, |mu, i| {
        if i < m {
            anchor_a.get(mu, i).clone()
        } else {
            ScalarField::zero()
        }
    });
    let mut structure = vec![vec![vec![ScalarField::zero(); n]; n]; n];
    for i in 0..m {
        for j in 0..m {
            // [e_i, e_j] = c^k_ij e_k
            for k in 0..m {
                structure[i][j][k] = structure_a[i][j][k].clone();
            }
            // [e_i, eps^j] = -c^j_ik eps^k, and its negative for [eps^j, e_i]
            for k in 0..m {
                let c = structure_a[i][k][j].neg();
                structure[j + m][i][k + m] = c.neg();
                structure[i][j + m][k + m] = c;
            }
        }
    }
    let kind = if d == m && *anchor_a == FieldMatrix::identity(d) && structure.iter().flatten().flatten().all(ScalarField::is_zero) {
        ChartKind::Standard
    } else {
        ChartKind::Double
    };
    CourantChart::new(d, pairing, anchor, structure, kind)
}

#[cfg(test)]
mod tests;
