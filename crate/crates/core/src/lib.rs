//! Finite two-variable Euler products viewed as candidate characteristic functions.
//!
//! The crate builds products of factors `(1 - alpha p^{-<a, s>})^{-1}`, expands the
//! logarithm of each normalized product into an exact signed atomic measure, computes
//! Dirichlet-series coefficients, and classifies the product as infinitely divisible
//! (ID), quasi-infinitely divisible (QID) or not a characteristic function (ND).

pub mod certificate;
pub mod classify;
pub mod dsl;
pub mod error;
pub mod euler;
pub mod expansion;
pub mod kronecker;
pub mod reproduce;
pub mod sampler;
pub mod series;

pub use classify::{classify, find_nd_witness, Classification, ClassifyOptions, Evidence, Verdict, Witness};
pub use dsl::{format, parse};
pub use error::{EulerError, Result};
pub use euler::{EvalPoint, Factor, Family, Product};
pub use expansion::{merged_coefficients, tail_bound, AtomKey, SignedAtomicMeasure};
pub use kronecker::{kronecker_t, KroneckerQuery};
pub use reproduce::{reproduce, TableFamily, TableReport};
pub use sampler::{sample, SampleBatch};
pub use series::{coeff_lattice, shintani_distribution, CoeffLattice, ShintaniDistribution};

/// Float with 17 significant digits, the precision used in CSV and JSON exports.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
