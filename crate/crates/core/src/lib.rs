//! Numerical toolkit for Littlewood-Paley analysis on periodic grids:
//! dyadic frequency decompositions with exact discrete partitions of
//! unity, Besov and Triebel-Lizorkin quasi-norms with pluggable analysis
//! kernels, Peetre-type maximal functions, Calderón reproducing formulas,
//! kernel admissibility checkers and empirical inequality audits.

// `!(x > 0.0)`-style guards are used throughout as NaN-rejecting domain
// checks; the suggested `partial_cmp` rewrite obscures that intent.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod grid;
pub mod kernels;
pub mod lp;
pub mod maximal;
pub mod norms;
pub mod verify;

pub use num_complex;

pub use error::{Error, Result};
pub use grid::{GridSpec, Representation, SampledField};
pub use kernels::{CheckConfig, ConditionReport, KernelSpec};
pub use lp::{BlockKernel, CalderonPair, LPFamily};
