//! Mean-curvature-type flows of graphs over flat tori.
//!
//! The crate evolves a height function `u: Tⁿ → ℝ` (`n ∈ {1, 2}`) under
//! `u_t = g^{ij}u_{ij} + h(x,u) + g(x,u)ω`, watches the barrier, gradient and
//! energy estimates that make such flows converge, and solves prescribed
//! mean curvature and weighted flows in warped products `Tⁿ ×_φ ℝ` by
//! reduction to a product flow in the chart `𝜑 = Φ(u)`.
//!
//! * [`torus`]: periodic grids, finite differences and graph geometry.
//! * [`symbolic`]: expressions in `x1, x2, u`, the warped profile, energy
//!   weights and the hypothesis checkers.
//! * [`flow`]: right-hand sides, the RK2 integrator and the slice ODE.
//! * [`warped`]: chart transforms and the warped problems.
//! * [`verify`]: monitors over a finished trace and the comparison test.
//! * [`config`] and [`runner`]: TOML run files and the command-line driver.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod flow;
pub mod runner;
pub mod symbolic;
pub mod torus;
pub mod verify;
pub mod warped;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Eval(#[from] symbolic::EvalError),
    #[error(transparent)]
    Profile(#[from] symbolic::ProfileError),
    #[error(transparent)]
    Weight(#[from] symbolic::WeightError),
    #[error(transparent)]
    Flow(#[from] flow::FlowError),
    #[error(transparent)]
    Warped(#[from] warped::WarpedError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}
