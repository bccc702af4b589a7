//! Numerical homogenization of oscillating media coupled to a semilinear
//! stochastic wave equation.
//!
//! The crate has three layers:
//!
//! * **Coefficient fields** ([`field`], [`mean`]): structured oscillating
//!   coefficients (periodic, quasi-periodic, asymptotically almost periodic)
//!   given as finite trigonometric sums plus optional decaying envelopes,
//!   with volume averages and Besicovitch seminorms estimated over growing
//!   boxes.
//! * **Cell problems and effective coefficients** ([`grid`], [`cell`],
//!   [`effective`]): corrector solves on truncated boxes `[-R,R]^N` with
//!   homogeneous Dirichlet data and on the periodic unit cell, assembled
//!   into effective tensors with convergence studies in `R`.
//! * **Stochastic wave equation** ([`noise`], [`wave`], [`experiment`]):
//!   a semi-implicit time stepper for the semilinear stochastic wave
//!   equation with truncated cylindrical Wiener noise, and coupled
//!   Monte-Carlo experiments comparing oscillatory solutions against the
//!   homogenized limit.
//!
//! Batch work (solves across radii, Monte-Carlo paths) fans out through
//! [`exec::parallel_map`], which uses rayon when the default `parallel`
//! feature is enabled and a sequential loop otherwise.

// stencil code indexes neighbors explicitly; `!(x > 0.0)` also rejects NaN
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod cell;
pub mod config;
pub mod effective;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod field;
pub mod grid;
pub mod linsolve;
pub mod mean;
pub mod noise;
pub mod report;
pub mod wave;

pub use error::{Error, Result};
