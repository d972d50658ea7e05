use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::energy::{dissipation_cached, energy};
use super::forcing::Forcing;
use super::rhs::{evaluate_into, Equation};
use super::FlowError;
use crate::symbolic::EnergyWeights;
use crate::torus::{PeriodicGrid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSettings {
    /// Fraction of the parabolic step limit `h²/(2nΛ)`.
    pub cfl: f64,
    /// Stationarity threshold on `sup |u_t|`.
    pub tol: f64,
    pub t_max: f64,
    pub max_steps: Option<u64>,
    /// Steps between trace samples.
    pub stride: u64,
    /// Consecutive sub-tolerance samples required to stop.
    pub consecutive: usize,
    /// `sup ω` above this counts as divergence.
    pub omega_limit: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            tol: 1e-8,
            t_max: 100.0,
            max_steps: None,
            stride: 50,
            consecutive: 3,
            omega_limit: 1e6,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<(), FlowError> {
        let bad = |what: &str| Err(FlowError::Settings(what.to_string()));
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("cfl must lie in (0, 1]");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return bad("t_max must be finite and nonnegative");
        }
        if self.stride == 0 {
            return bad("stride must be at least 1");
        }
        if self.consecutive == 0 {
            return bad("consecutive must be at least 1");
        }
        if !(self.omega_limit > 1.0) {
            return bad("omega_limit must exceed 1");
        }
        Ok(())
    }
}

/// `cfl · h_min² / (2 n Λ)` with `Λ` the largest eigenvalue of `σ⁻¹`.
///
/// `g^{ij} ⪯ σ^{ij}` and the weighted mobility is at most one, so this bounds
/// the diffusion of both equations.
pub fn stable_time_step(grid: &PeriodicGrid, cfl: f64) -> f64 {
    let h = grid.min_spacing();
    cfl * h * h / (2.0 * grid.dim() as f64 * grid.metric().max_inverse_eigenvalue())
}

#[derive(Clone)]
pub struct FlowProblem {
    pub equation: Equation,
    pub forcing: Arc<dyn Forcing>,
    /// Energy weights; `None` disables the energy ledger.
    pub weights: Option<Arc<dyn EnergyWeights + Send + Sync>>,
    /// Barrier slab `[lo, hi]` in the flow variable.
    pub slab: Option<(f64, f64)>,
    pub initial: ScalarField,
}

impl FlowProblem {
    pub fn validate(&self) -> Result<(), FlowError> {
        if let Some((lo, hi)) = self.slab {
            if !(lo < hi) {
                return Err(FlowError::Settings(format!("empty slab [{lo}, {hi}]")));
            }
            for (node, &v) in self.initial.values().iter().enumerate() {
                if !(v > lo && v < hi) {
                    return Err(FlowError::OutsideSlab {
                        node,
                        value: v,
                        lo,
                        hi,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Stationary,
    MaxTime,
    MaxSteps,
    Diverged,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Stationary => "stationary",
            Termination::MaxTime => "max_time",
            Termination::MaxSteps => "max_steps",
            Termination::Diverged => "diverged",
        }
    }
}

/// One row of the trace. Extremes carry the node where they occur.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub step: u64,
    pub sup_ut: f64,
    pub sup_ut_node: usize,
    pub sup_omega: f64,
    pub sup_omega_node: usize,
    pub min_u: f64,
    pub min_node: usize,
    pub max_u: f64,
    pub max_node: usize,
    pub energy: Option<f64>,
    pub dissipation: Option<f64>,
    pub cumulative_dissipation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub equation: Equation,
    pub dt: f64,
    pub samples: Vec<Sample>,
    pub termination: Termination,
    /// Why the run was declared divergent.
    pub divergence: Option<String>,
    pub initial: ScalarField,
    pub final_field: ScalarField,
}

impl FlowTrace {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("a trace holds at least one sample")
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.initial.grid()
    }
}

/// Explicit midpoint (RK2) integrator with a fixed step.
///
/// The right-hand side and `ω` of the current state are always cached, so a
/// runner can be sampled without extra evaluations. With energy weights the
/// dissipation is integrated every step (trapezoid), so the cumulative value
/// does not depend on the sampling stride.
pub struct FlowRunner {
    problem: FlowProblem,
    dt: f64,
    step: u64,
    /// `(D, ∫₀ᵗ D)` at the current state.
    ledger: Option<(f64, f64)>,
    state: Vec<f64>,
    rate: Vec<f64>,
    omega: Vec<f64>,
    scratch: Vec<f64>,
    scratch_rate: Vec<f64>,
    scratch_omega: Vec<f64>,
}

impl FlowRunner {
    pub fn new(problem: FlowProblem, dt: f64) -> Result<Self, FlowError> {
        problem.validate()?;
        let n = problem.initial.len();
        let state = problem.initial.values().to_vec();
        let mut runner = Self {
            problem,
            dt,
            step: 0,
            ledger: None,
            state,
            rate: vec![0.0; n],
            omega: vec![0.0; n],
            scratch: vec![0.0; n],
            scratch_rate: vec![0.0; n],
            scratch_omega: vec![0.0; n],
        };
        evaluate_into(
            runner.problem.equation,
            runner.problem.forcing.as_ref(),
            runner.problem.initial.grid(),
            &runner.state,
            &mut runner.rate,
            &mut runner.omega,
        )?;
        if let Some(d) = runner.current_dissipation(&runner.state, &runner.rate, &runner.omega)? {
            runner.ledger = Some((d, 0.0));
        }
        Ok(runner)
    }

    fn current_dissipation(&self, values: &[f64], rate: &[f64], omega: &[f64]) -> Result<Option<f64>, FlowError> {
        let Some(w) = &self.problem.weights else {
            return Ok(None);
        };
        let q = self.problem.initial.grid().quadrature_weight();
        Ok(Some(dissipation_cached(self.problem.equation, values, rate, omega, q, w.as_ref())?))
    }

    pub fn problem(&self) -> &FlowProblem {
        &self.problem
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.state
    }

    pub fn rate(&self) -> &[f64] {
        &self.rate
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn field(&self) -> ScalarField {
        ScalarField::new(*self.problem.initial.grid(), self.state.clone())
            .expect("runner state stays finite")
    }

    /// Advances one step. On error the state is left unchanged.
    pub fn advance(&mut self) -> Result<(), FlowError> {
        let grid = *self.problem.initial.grid();
        let (equation, forcing) = (self.problem.equation, self.problem.forcing.as_ref());
        let dt = self.dt;
        for ((m, &u), &k) in self.scratch.iter_mut().zip(&self.state).zip(&self.rate) {
            *m = u + 0.5 * dt * k;
        }
        evaluate_into(
            equation,
            forcing,
            &grid,
            &self.scratch,
            &mut self.scratch_rate,
            &mut self.scratch_omega,
        )?;
        for ((m, &u), &k) in self.scratch.iter_mut().zip(&self.state).zip(&self.scratch_rate) {
            *m = u + dt * k;
        }
        if let Some(node) = self.scratch.iter().position(|v| !v.is_finite()) {
            return Err(FlowError::NonFinite { node });
        }
        evaluate_into(
            equation,
            forcing,
            &grid,
            &self.scratch,
            &mut self.scratch_rate,
            &mut self.scratch_omega,
        )?;
        if let Some((d0, total)) = self.ledger {
            let d1 = self
                .current_dissipation(&self.scratch, &self.scratch_rate, &self.scratch_omega)?
                .expect("ledger implies weights");
            self.ledger = Some((d1, total + 0.5 * (d0 + d1) * dt));
        }
        std::mem::swap(&mut self.state, &mut self.scratch);
        std::mem::swap(&mut self.rate, &mut self.scratch_rate);
        std::mem::swap(&mut self.omega, &mut self.scratch_omega);
        self.step += 1;
        Ok(())
    }

    /// Extremes of the cached state; the ledger entries are left empty.
    fn bare_sample(&self) -> Sample {
        let (sup_ut_node, sup_ut) = arg_extreme(&self.rate, |v| v.abs(), true);
        let (sup_omega_node, sup_omega) = arg_extreme(&self.omega, |v| v, true);
        let (min_node, min_u) = arg_extreme(&self.state, |v| v, false);
        let (max_node, max_u) = arg_extreme(&self.state, |v| v, true);
        Sample {
            t: self.time(),
            step: self.step,
            sup_ut,
            sup_ut_node,
            sup_omega,
            sup_omega_node,
            min_u,
            min_node,
            max_u,
            max_node,
            energy: None,
            dissipation: None,
            cumulative_dissipation: None,
        }
    }

    pub fn sample(&self) -> Result<Sample, FlowError> {
        let mut s = self.bare_sample();
        if let (Some(w), Some((d, total))) = (&self.problem.weights, self.ledger) {
            s.energy = Some(energy(&self.field(), w.as_ref())?);
            s.dissipation = Some(d);
            s.cumulative_dissipation = Some(total);
        }
        Ok(s)
    }
}

/// First index attaining the extreme of `key` (max when `largest`).
fn arg_extreme(values: &[f64], key: impl Fn(f64) -> f64, largest: bool) -> (usize, f64) {
    let mut best = (0, key(values[0]));
    for (i, &v) in values.iter().enumerate().skip(1) {
        let k = key(v);
        if (largest && k > best.1) || (!largest && k < best.1) {
            best = (i, k);
        }
    }
    best
}

struct Recorder {
    samples: Vec<Sample>,
}

impl Recorder {
    fn push(&mut self, s: Sample) {
        self.samples.push(s);
    }

    fn covers(&self, step: u64) -> bool {
        self.samples.last().is_some_and(|s| s.step == step)
    }
}

/// Integrates until `sup |u_t| < tol` on `consecutive` samples in a row, or
/// until `t_max`, `max_steps` or divergence. A state already below `tol` at
/// `t = 0` stops immediately.
pub fn run_to_stationary(problem: FlowProblem, settings: &IntegratorSettings) -> Result<FlowTrace, FlowError> {
    settings.validate()?;
    let dt = stable_time_step(problem.initial.grid(), settings.cfl);
    let initial = problem.initial.clone();
    let equation = problem.equation;
    let mut runner = FlowRunner::new(problem, dt)?;
    let mut rec = Recorder { samples: Vec::new() };
    let mut below = 0usize;
    let mut divergence = None;

    let termination = loop {
        let sampled = runner.steps() % settings.stride == 0;
        if sampled {
            rec.push(runner.sample()?);
        }
        let current = runner.bare_sample();
        if current.sup_omega > settings.omega_limit {
            divergence = Some(format!(
                "sup ω = {:e} exceeds {:e} at node {}",
                current.sup_omega, settings.omega_limit, current.sup_omega_node
            ));
            break Termination::Diverged;
        }
        if sampled {
            if current.sup_ut < settings.tol {
                below += 1;
                if below >= settings.consecutive || runner.steps() == 0 {
                    break Termination::Stationary;
                }
            } else {
                below = 0;
            }
        }
        if runner.time() >= settings.t_max {
            break Termination::MaxTime;
        }
        if settings.max_steps.is_some_and(|m| runner.steps() >= m) {
            break Termination::MaxSteps;
        }
        if let Err(e) = runner.advance() {
            divergence = Some(e.to_string());
            break Termination::Diverged;
        }
    };
    if !rec.covers(runner.steps()) {
        rec.push(runner.sample()?);
    }
    Ok(FlowTrace {
        equation,
        dt,
        samples: rec.samples,
        termination,
        divergence,
        initial,
        final_field: runner.field(),
    })
}
