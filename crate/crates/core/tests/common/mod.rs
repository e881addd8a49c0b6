#![allow(dead_code)]

use std::sync::Arc;

use gengeo::courant::CourantChart;
use gengeo::linalg::FieldMatrix;
use gengeo::random::{random_field, rng};
use gengeo::symbolic::{parse_field, ScalarField, Var};

pub fn f(s: &str) -> ScalarField {
    parse_field(s).unwrap()
}

pub fn mat(rows: &[&[&str]]) -> FieldMatrix {
    FieldMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| f(s)).collect()).collect()).unwrap()
}

/// Jacobian of the triangular automorphism
/// `x_k -> x_k + p_k(x_1, ..., x_{k-1})` with random real `p_k` of degree <= 2.
pub fn unipotent_jacobian(dim: usize, seed: u64) -> FieldMatrix {
    let mut r = rng(seed);
    let shifts: Vec<ScalarField> = (0..dim)
        .map(|k| if k == 0 { ScalarField::zero() } else { random_field(&mut r, k, 2, 0.4, false) })
        .collect();
    FieldMatrix::from_fn(dim, dim, |row, col| {
        let d = shifts[row].diff(Var::coord(col));
        if row == col {
            ScalarField::one() + d
        } else {
            d
        }
    })
}

/// `[[0, 1], [-1, 0]]` blocks: `dx1^dx(m+1) + ...`, in `(x_1..x_m, x_{m+1}..x_2m)` order.
pub fn standard_symplectic(dim: usize) -> FieldMatrix {
    let h = dim / 2;
    FieldMatrix::from_fn(dim, dim, |r, c| {
        if c == r + h {
            ScalarField::one()
        } else if r == c + h {
            ScalarField::int(-1)
        } else {
            ScalarField::zero()
        }
    })
}

pub fn same_chart(a: &Arc<CourantChart>, b: &Arc<CourantChart>) -> bool {
    a.same(b)
}
