//! One-parameter families of generalized complex structures, the cocycle
//! `omega_dot`, primitives, automorphism flows and the identification check.

mod checks;
mod family;
mod flow;

pub use checks::{
    check_cocycle, check_infinitesimal, cohomological_check, holomorphic_vector, moser_pipeline, omega_dot, primitive_to_vector, translation_checks,
    verify_identification, PrimitiveSlice,
};
pub use family::{FamilySlice, FamilySource, GcsFamily, NumTimeDependent, Representation, SectionFamily, TimeDependent, TimeProfile, ZSpec};
pub use flow::{group_law_check, integrate_flow, pairing_check, standard_pairing, CompiledGenerator, FlowPoint, FlowResult};

use rand::Rng;

use crate::courant::CourantError;
use crate::gcs::GcsError;
use crate::random::{rng, unit_grid};
use crate::symbolic::coeff::{rat, rat_to_f64};
use crate::symbolic::{Rational, SymbolicError};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MoserError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("needs a symbolic representation: {0}")]
    NotSymbolic(String),
    #[error("finite differences in t need at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("z_t is not a section of L_t at {at}: J z - i z has component {residual}")]
    NotInL { at: String, residual: String },
    #[error("expected real data: {0}")]
    NotReal(String),
    #[error("flows are only implemented on standard charts")]
    NonStandardChart,
    #[error("trajectory from {start} leaves the domain at t = {time}: {point}")]
    Escaped { start: String, time: f64, point: String },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("incompatible data: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Gcs(#[from] GcsError),
    #[error(transparent)]
    Courant(#[from] CourantError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// Settings for the numeric stage.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericConfig {
    pub steps: usize,
    pub tol: f64,
    pub grid_per_axis: usize,
    pub random_points: usize,
    pub t_samples: Vec<Rational>,
    pub domain_bound: f64,
    pub seed: u64,
    pub pairing_tol: f64,
    pub group_law_tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            steps: 100,
            tol: 1e-5,
            grid_per_axis: 5,
            random_points: 5,
            t_samples: default_times(),
            domain_bound: 10.0,
            seed: 0,
            pairing_tol: 1e-8,
            group_law_tol: 1e-6,
        }
    }
}

/// `0, 0.1, ..., 1`.
pub fn default_times() -> Vec<Rational> {
    (0..=10).map(|k| rat(k, 10)).collect()
}

/// Unit-cube lattice plus random rational points in `[-1, 1]^dim`.
pub fn numeric_grid(dim: usize, per_axis: usize, random: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = unit_grid(dim, per_axis)
        .into_iter()
        .map(|p| p.iter().map(|c| rat_to_f64(&c.re)).collect())
        .collect();
    let mut g = rng(seed);
    for _ in 0..random {
        out.push(
            (0..dim)
                .map(|_| {
                    let q: i64 = g.gen_range(1..=4);
                    let p: i64 = g.gen_range(-q..=q);
                    p as f64 / q as f64
                })
                .collect(),
        );
    }
    out
}

#[cfg(test)]
mod tests;
