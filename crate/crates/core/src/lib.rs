//! Exact computations with mod-p modular forms of level one.
//!
//! The crate builds q-expansion bases of `M_k(SL_2(Z); F_p)`, Hecke operators
//! acting on them, the generalized eigenspace cut out by the Eisenstein
//! maximal ideal, companion forms for the theta operator, and socle-based
//! Gorenstein diagnostics for the resulting local Hecke algebras. A Bernoulli
//! scanner searches for primes with two irregular indices summing to `p + 1`.
//!
//! Everything is exact: residues modulo `p` or `p^M`, big integers and big
//! rationals. No floating point is used anywhere.

pub mod arith;
pub mod bernoulli;
pub mod cli;
pub mod companion;
pub mod eis_lambda;
mod error;
pub mod forms;
pub mod hecke;
pub mod linalg;
pub mod padic;
pub mod qseries;
pub mod scan;
pub mod structure;

pub use error::{Error, Result};
