//! Method-of-lines time integration of graph flows over a flat torus.

mod energy;
mod forcing;
mod integrator;
mod rhs;
mod slice;

use thiserror::Error;

pub use energy::{dissipation, energy};
pub use forcing::{ExprForcing, Forcing, ForcingError, Orientation, WarpedForcing};
pub use integrator::{
    run_to_stationary, stable_time_step, FlowProblem, FlowRunner, FlowTrace, IntegratorSettings, Sample,
    Termination,
};
pub use rhs::{evaluate_rhs, rhs_product, rhs_weighted, Equation};
pub use slice::{slice_ode_solve, SliceTrajectory};

use crate::symbolic::{ProfileError, WeightError};
use crate::torus::GridError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("forcing failed at node {node} (x = {x:?}, u = {u}): {source}")]
    Forcing {
        node: usize,
        x: Vec<f64>,
        u: f64,
        source: ForcingError,
    },
    #[error("non-finite value at node {node}")]
    NonFinite { node: usize },
    #[error("initial value {value} at node {node} is not inside the slab ({lo}, {hi})")]
    OutsideSlab { node: usize, value: f64, lo: f64, hi: f64 },
    #[error("invalid integrator settings: {0}")]
    Settings(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Grid(#[from] GridError),
}
