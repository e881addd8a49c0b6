use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{MoserError, NumTimeDependent, TimeDependent};
use crate::courant::{ChartKind, CourantChart};
use crate::linalg::FieldMatrix;
use crate::report::Check;
use crate::symbolic::Var;

/// Fiber transport and base image at one start point.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowPoint {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    /// `D phi_{a,b}(p)`.
    pub jacobian: DMatrix<f64>,
    /// `[[D phi, 0], [C, D phi^{-T}]]` in the frame `(d/dx, dx)`.
    pub fiber: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowResult {
    pub a: f64,
    pub b: f64,
    pub steps: usize,
    pub integrator_order: u32,
    pub quadrature: &'static str,
    pub points: Vec<FlowPoint>,
}

/// Generator `x_t = X_t + xi_t` compiled for the integrator: `X`, its
/// Jacobian `dX[mu][nu] = d_nu X^mu`, and `M[nu][mu] = d_mu xi_nu - d_nu xi_mu`.
#[derive(Clone, Debug)]
pub struct CompiledGenerator {
    d: usize,
    vector: NumTimeDependent,
    jacobian: NumTimeDependent,
    curl: NumTimeDependent,
}

impl CompiledGenerator {
    pub fn new(chart: &Arc<CourantChart>, x: &TimeDependent) -> Result<Self, MoserError> {
        if chart.kind() != ChartKind::Standard {
            return Err(MoserError::NonStandardChart);
        }
        let d = chart.dim();
        if x.rows() != 2 * d || x.cols() != 1 {
            return Err(MoserError::Shape(format!("generator must be {} x 1", 2 * d)));
        }
        if !x.is_real() {
            return Err(MoserError::NotReal("flow generator".into()));
        }
        let coords = chart.coords();
        let vector = x.map(|m| m.block(0, 0, d, 1));
        let jacobian = x.map(|m| FieldMatrix::from_fn(d, d, |mu, nu| m.get(mu, 0).diff(Var::coord(nu))));
        let curl = x.map(|m| {
            FieldMatrix::from_fn(d, d, |nu, mu| {
                m.get(d + nu, 0).diff(Var::coord(mu)) - m.get(d + mu, 0).diff(Var::coord(nu))
            })
        });
        Ok(CompiledGenerator {
            d,
            vector: vector.compile(&coords),
            jacobian: jacobian.compile(&coords),
            curl: curl.compile(&coords),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn velocity(&self, t: f64, p: &[f64]) -> DVector<f64> {
        self.vector.eval(t, p).column(0).into_owned()
    }
}

fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn fmt_vec(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

/// Composite Simpson weights on `n` equal intervals of width `h`; an odd
/// count closes with the three-eighths rule.
fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    match n {
        0 => {}
        1 => {
            w[0] = h / 2.0;
            w[1] = h / 2.0;
        }
        _ => {
            let even_part = if n % 2 == 0 { n } else { n - 3 };
            for k in (0..even_part).step_by(2) {
                w[k] += h / 3.0;
                w[k + 1] += 4.0 * h / 3.0;
                w[k + 2] += h / 3.0;
            }
            if n % 2 == 1 {
                let s = even_part;
                for (i, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
                    w[s + i] += 3.0 * h / 8.0 * c;
                }
            }
        }
    }
    w
}

fn flow_point(g: &CompiledGenerator, a: f64, b: f64, steps: usize, bound: f64, start: &[f64]) -> Result<FlowPoint, MoserError> {
    let d = g.d;
    let h = (b - a) / steps as f64;
    let weights = simpson_weights(steps, h);
    let mut p = DVector::from_column_slice(start);
    let mut f = DMatrix::<f64>::identity(d, d);
    let mut k_acc = DMatrix::<f64>::zeros(d, d);
    let rhs = |t: f64, p: &DVector<f64>, f: &DMatrix<f64>| -> (DVector<f64>, DMatrix<f64>) {
        let v = g.velocity(t, p.as_slice());
        let jac = g.jacobian.eval(t, p.as_slice());
        (v, jac * f)
    };
    for k in 0..=steps {
        let t = a + h * k as f64;
        if norm(p.as_slice()) > bound {
            return Err(MoserError::Escaped {
                start: fmt_vec(start),
                time: t,
                point: fmt_vec(p.as_slice()),
            });
        }
        if weights[k] != 0.0 {
            let m = g.curl.eval(t, p.as_slice());
            k_acc += f.transpose() * m * &f * weights[k];
        }
        if k == steps {
            break;
        }
        let (k1p, k1f) = rhs(t, &p, &f);
        let (k2p, k2f) = rhs(t + h / 2.0, &(&p + &k1p * (h / 2.0)), &(&f + &k1f * (h / 2.0)));
        let (k3p, k3f) = rhs(t + h / 2.0, &(&p + &k2p * (h / 2.0)), &(&f + &k2f * (h / 2.0)));
        let (k4p, k4f) = rhs(t + h, &(&p + &k3p * h), &(&f + &k3f * h));
        p += (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0);
        f += (k1f + k2f * 2.0 + k3f * 2.0 + k4f) * (h / 6.0);
    }
    let f_inv_t = f
        .clone()
        .try_inverse()
        .ok_or_else(|| MoserError::Singular(format!("flow Jacobian from {}", fmt_vec(start))))?
        .transpose();
    let c = &f_inv_t * k_acc;
    let mut fiber = DMatrix::<f64>::zeros(2 * d, 2 * d);
    fiber.view_mut((0, 0), (d, d)).copy_from(&f);
    fiber.view_mut((d, 0), (d, d)).copy_from(&c);
    fiber.view_mut((d, d), (d, d)).copy_from(&f_inv_t);
    Ok(FlowPoint {
        start: start.to_vec(),
        end: p.as_slice().to_vec(),
        jacobian: f,
        fiber,
    })
}

/// Flow of `x_t` from time `a` to `b` at each grid point: RK4 for the base
/// flow and its Jacobian, composite Simpson on the same mesh for the
/// correction block.
pub fn integrate_flow(g: &CompiledGenerator, a: f64, b: f64, grid: &[Vec<f64>], steps: usize, bound: f64) -> Result<FlowResult, MoserError> {
    if steps == 0 {
        return Err(MoserError::Shape("at least one step is needed".into()));
    }
    if let Some(p) = grid.iter().find(|p| p.len() != g.d) {
        return Err(MoserError::Shape(format!("grid point {} has the wrong dimension", fmt_vec(p))));
    }
    let points = grid
        .par_iter()
        .map(|p| flow_point(g, a, b, steps, bound, p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FlowResult {
        a,
        b,
        steps,
        integrator_order: 4,
        quadrature: "composite Simpson",
        points,
    })
}

/// The standard pairing `g = 1/2 [[0, 1], [1, 0]]`.
pub fn standard_pairing(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * d, 2 * d, |i, j| if i + d == j || j + d == i { 0.5 } else { 0.0 })
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// `Phi^T g Phi = g` at every grid point.
pub fn pairing_check(flow: &FlowResult, tol: f64) -> Check {
    let mut worst = (0.0f64, String::new());
    for fp in &flow.points {
        let d = fp.start.len();
        let g = standard_pairing(d);
        let r = max_abs(&(fp.fiber.transpose() * &g * &fp.fiber - &g));
        if r > worst.0 || worst.1.is_empty() {
            worst = (r, fmt_vec(&fp.start));
        }
    }
    Check::numeric("flow preserves the pairing", worst.0, tol).at(worst.1)
}

/// Direct flow `a -> b` against the composition through the midpoint.
pub fn group_law_check(g: &CompiledGenerator, a: f64, b: f64, grid: &[Vec<f64>], steps: usize, bound: f64, tol: f64) -> Result<Check, MoserError> {
    let c = (a + b) / 2.0;
    let direct = integrate_flow(g, a, b, grid, steps, bound)?;
    let first = integrate_flow(g, a, c, grid, steps, bound)?;
    let mids: Vec<Vec<f64>> = first.points.iter().map(|fp| fp.end.clone()).collect();
    let second = integrate_flow(g, c, b, &mids, steps, bound)?;
    let mut worst = (0.0f64, String::new());
    for ((dp, f1), f2) in direct.points.iter().zip(&first.points).zip(&second.points) {
        let base = dp.end.iter().zip(&f2.end).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()));
        let fiber = max_abs(&(&f2.fiber * &f1.fiber - &dp.fiber));
        let r = base.max(fiber);
        if r > worst.0 || worst.1.is_empty() {
            worst = (r, fmt_vec(&dp.start));
        }
    }
    Ok(Check::numeric("flow group law through the midpoint", worst.0, tol).at(worst.1))
}
