//! Exact arithmetic: arbitrary-precision rationals, sparse multivariate
//! integer polynomials, and normalized rational functions.
//!
//! No floating point is used anywhere; equality of rational functions is
//! structural equality of their canonical forms.

mod mpoly;
mod parse;
mod ratfunc;

pub use mpoly::{MPoly, VarSet};
pub use parse::{parse_mpoly, parse_ratfunc};
pub use ratfunc::RatFunc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    Pole,
    #[error("not a polynomial: {0}")]
    NotAPolynomial(String),
    #[error("inexact polynomial division")]
    InexactDivision,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("parse error: {0}")]
    Parse(String),
}
