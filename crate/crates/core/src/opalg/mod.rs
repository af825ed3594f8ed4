//! Exact algebra of polynomials in the noncommuting operators `x_i`, `p_i`,
//! `σ_i` and `β`.
//!
//! Every [`OperatorExpr`] is kept in one canonical normal form: scalars, then
//! `β`, then all position powers, then all momentum powers, then at most one
//! Pauli matrix. The rewrite rules are `[x_i, p_j] = iħ δ_ij`,
//! `σ_i σ_j = δ_ij + i ε_ijk σ_k`, `β² = 1`, with `β` and `σ` commuting with
//! `x` and `p`. Because coefficients are exact, two expressions are equal iff
//! their canonical forms are structurally equal.

mod expr;
mod parse;
mod scalar;
pub mod vector;

pub use expr::{normalize, GenPart, Generator, Monomial, OperatorExpr, Pauli, Tree};
pub use parse::{parse, parse_tree};
pub use scalar::{Binding, Bindings, ComplexRational, ScalarCoeff, Symbol, SymbolPowers};

pub(crate) use scalar::cq_real;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("operator `{0}` cannot be raised to a negative power")]
    NegativeOperatorPower(String),
    #[error("scalar `{0}` is not invertible")]
    NotInvertible(String),
    #[error("cannot bind generator `{0}`; only scalar symbols may be substituted")]
    BindingGenerator(String),
    #[error("pattern `{0}` is not a single unit-coefficient monomial")]
    NonCanonicalPattern(String),
    #[error("unbound symbols: {}", .0.join(", "))]
    Unbound(Vec<String>),
}
