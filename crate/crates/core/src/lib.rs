//! Exact comparison of finite channels.
//!
//! A channel is a column-stochastic matrix. This crate decides whether one
//! channel is a garbling (`M·C`), a Shannon garbling (`M·C·N`) or a
//! convexified Shannon garbling (`Σ q_j·M_j·C·N_j`) of another, computes
//! maximal expected utilities over the matching policy spaces, and returns
//! certificates that can be re-checked with exact rational arithmetic.

pub mod constructions;
pub mod error;
pub mod fixtures;
pub mod lp;
pub mod matrix;
pub mod model;
pub mod orders;
pub mod random;
pub mod rational;
pub mod repro;
pub mod utility_classes;
pub mod value;

pub use error::{Error, Result};
pub use matrix::RMatrix;
pub use model::{
    is_column_stochastic, Channel, InputDistribution, Limits, StochasticKind, UtilityMatrix,
};
pub use orders::{Certificate, MixtureTerm, Verdict, Witness};
pub use rational::{format_rational, parse_rational, rat, Rational};
pub use value::{blackwell_value, cs_value, indifferent_value, shannon_value};
