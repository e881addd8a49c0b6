//! Exact scalar fields on a coordinate chart.

pub mod coeff;
pub mod field;
pub mod monomial;
pub mod numeric;
pub mod parse;
pub mod poly;

use std::fmt;

pub use coeff::{Cq, Rational};
pub use field::ScalarField;
pub use monomial::{Monomial, Var};
pub use numeric::NumField;
pub use parse::parse_poly;
pub use poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source string.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at position {}", self.message, self.position)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SymbolicError {
    #[error("parse error: {0}")]
    Parse(ParseError),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field already depends on t")]
    AlreadyTimeDependent,
    #[error("point has {got} coordinates, expected {expected}")]
    PointLength { expected: usize, got: usize },
}

/// Parses a polynomial string straight into a scalar field.
pub fn parse_field(src: &str) -> Result<ScalarField, SymbolicError> {
    parse_poly(src).map(ScalarField::from_poly)
}
