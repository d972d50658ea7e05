//! Graphs in a warped product `N ×_φ ℝ` and their reduction to product
//! flows through the height chart `𝜑 = Φ(u)`.

use std::sync::Arc;

use thiserror::Error;

use crate::flow::{
    run_to_stationary, Equation, FlowError, FlowProblem, FlowTrace, IntegratorSettings, Orientation,
    WarpedForcing,
};
use crate::symbolic::conditions::locate_critical_point;
use crate::symbolic::{EvalError, Expr, ProfileError, WarpedProfile};
use crate::torus::{
    area_element_at, contract, induced_inverse_metric_at, mean_curvature, GridError, Jet, Metric,
    PeriodicGrid, ScalarField,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WarpedError {
    #[error("node {node}: {source}")]
    Chart { node: usize, source: ProfileError },
    #[error("node {node}: {source}")]
    Eval { node: usize, source: EvalError },
    #[error("φ′ has no sign change on [{a}, {b}]; no totally geodesic slice to converge to")]
    NoCriticalPoint { a: f64, b: f64 },
    #[error("initial height {value} at node {node} is not inside ({lo}, {hi})")]
    OutsideInterval { node: usize, value: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Height field `u` whose range lies in the profile's domain.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedGraph {
    height: ScalarField,
    profile: Arc<WarpedProfile>,
}

impl WarpedGraph {
    pub fn new(height: ScalarField, profile: Arc<WarpedProfile>) -> Result<Self, WarpedError> {
        let (lo, hi) = profile.domain();
        for (node, &u) in height.values().iter().enumerate() {
            if !profile.contains(u) {
                return Err(WarpedError::Chart {
                    node,
                    source: ProfileError::OutsideDomain { u, lo, hi },
                });
            }
        }
        Ok(Self { height, profile })
    }

    pub fn height(&self) -> &ScalarField {
        &self.height
    }

    pub fn profile(&self) -> &WarpedProfile {
        &self.profile
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.height.grid()
    }
}

/// `𝜑 = Φ(u)` node by node.
pub fn to_product(wg: &WarpedGraph) -> Result<ScalarField, WarpedError> {
    let values = wg
        .height
        .values()
        .iter()
        .enumerate()
        .map(|(node, &u)| wg.profile.transform(u).map_err(|source| WarpedError::Chart { node, source }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScalarField::new(*wg.grid(), values)?)
}

/// `u = Φ⁻¹(𝜑)` node by node.
pub fn to_warped(chart: &ScalarField, profile: Arc<WarpedProfile>) -> Result<WarpedGraph, WarpedError> {
    let values = chart
        .values()
        .iter()
        .enumerate()
        .map(|(node, &v)| profile.inverse(v).map_err(|source| WarpedError::Chart { node, source }))
        .collect::<Result<Vec<_>, _>>()?;
    WarpedGraph::new(ScalarField::new(*chart.grid(), values)?, profile)
}

/// `H = ((σ^{ij} − 𝜑^i 𝜑^j/ω²) 𝜑_ij − n φ′) / (ω φ)` from the chart jet.
fn warped_curvature_from_chart_jet(metric: &Metric, chart: &Jet, phi: f64, dphi: f64) -> f64 {
    let n = metric.dim();
    let omega = area_element_at(metric, chart.grad);
    let ginv = induced_inverse_metric_at(metric, chart.grad);
    (contract(n, &ginv, &chart.hess) - n as f64 * dphi) / (omega * phi)
}

/// Warped mean curvature (downward normal) evaluated on the discrete chart
/// field `Φ(u)`.
pub fn warped_mean_curvature(wg: &WarpedGraph) -> Result<ScalarField, WarpedError> {
    let chart = to_product(wg)?;
    let grid = wg.grid();
    let metric = *grid.metric();
    let mut out = Vec::with_capacity(chart.len());
    for node in 0..chart.len() {
        let u = wg.height.values()[node];
        let (phi, dphi) = phi_pair(&wg.profile, node, u)?;
        out.push(warped_curvature_from_chart_jet(&metric, &chart.jet(node), phi, dphi));
    }
    Ok(ScalarField::new(*grid, out)?)
}

/// Same formula with the chart jet formed by the chain rule from the
/// discrete jet of `u`: `𝜑_i = u_i/φ`, `𝜑_ij = u_ij/φ − φ′ u_i u_j/φ²`.
///
/// Independent of any discrete chart field, so it can audit runs performed
/// in the chart.
pub fn warped_mean_curvature_direct(wg: &WarpedGraph) -> Result<ScalarField, WarpedError> {
    let grid = wg.grid();
    let metric = *grid.metric();
    let n = grid.dim();
    let mut out = Vec::with_capacity(wg.height.len());
    for node in 0..wg.height.len() {
        let jet = wg.height.jet(node);
        let (phi, dphi) = phi_pair(&wg.profile, node, jet.value)?;
        let mut chart = Jet {
            value: 0.0,
            grad: [0.0; 2],
            hess: [[0.0; 2]; 2],
        };
        for i in 0..n {
            chart.grad[i] = jet.grad[i] / phi;
            for j in 0..n {
                chart.hess[i][j] = jet.hess[i][j] / phi - dphi * jet.grad[i] * jet.grad[j] / (phi * phi);
            }
        }
        out.push(warped_curvature_from_chart_jet(&metric, &chart, phi, dphi));
    }
    Ok(ScalarField::new(*grid, out)?)
}

fn phi_pair(profile: &WarpedProfile, node: usize, u: f64) -> Result<(f64, f64), WarpedError> {
    let wrap = |source| WarpedError::Chart { node, source };
    Ok((profile.phi(u).map_err(wrap)?, profile.dphi(u).map_err(wrap)?))
}

/// `sup |H(𝜑) − f φ − n φ′/ω|` with `H(𝜑)` the product mean curvature of
/// the chart field and `ω` its area element.
pub fn correspondence_residual(wg: &WarpedGraph, f: &ScalarField) -> Result<f64, WarpedError> {
    let chart = to_product(wg)?;
    let h = mean_curvature(&chart);
    let metric = *wg.grid().metric();
    let n = wg.grid().dim() as f64;
    let mut worst = 0.0f64;
    for node in 0..chart.len() {
        let u = wg.height.values()[node];
        let (phi, dphi) = phi_pair(&wg.profile, node, u)?;
        let omega = area_element_at(&metric, chart.jet(node).grad);
        let r = h.values()[node] - f.values()[node] * phi - n * dphi / omega;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// `f(x, u(x))` sampled on the graph.
pub fn sample_on_graph(f: &Expr, wg: &WarpedGraph) -> Result<ScalarField, WarpedError> {
    let grid = wg.grid();
    let values = (0..wg.height.len())
        .map(|node| {
            let c = grid.coords(node);
            f.eval(&c[..grid.dim()], wg.height.values()[node])
                .map_err(|source| WarpedError::Eval { node, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScalarField::new(*grid, values)?)
}

/// Prescribed warped mean curvature `f(x, u)` on `N ×_φ ℝ`.
#[derive(Debug, Clone)]
pub struct PrescribedProblem {
    pub f: Expr,
    pub profile: Arc<WarpedProfile>,
    pub slab: (f64, f64),
    pub orientation: Orientation,
    pub initial: ScalarField,
}

#[derive(Debug, Clone)]
pub struct PrescribedSolution {
    /// Trace of the chart flow.
    pub trace: FlowTrace,
    pub graph: WarpedGraph,
    /// `sup |H_w − f|` from [`warped_mean_curvature_direct`].
    pub residual: f64,
    /// Same residual from [`warped_mean_curvature`].
    pub chart_residual: f64,
}

impl PrescribedProblem {
    /// Product flow in the chart with `h = −nφ′` and `g = ∓fφ`. Energy
    /// weights are anchored at the lower slab height.
    pub fn flow_problem(&self) -> Result<FlowProblem, WarpedError> {
        let grid = self.initial.grid();
        let (u0, u1) = self.slab;
        let initial = WarpedGraph::new(self.initial.clone(), self.profile.clone())?;
        let forcing = Arc::new(WarpedForcing::new(
            self.profile.clone(),
            Some(self.f.clone()),
            self.orientation,
            grid.dim(),
            u0,
        )?);
        Ok(FlowProblem {
            equation: Equation::Product,
            forcing: forcing.clone(),
            weights: Some(forcing),
            slab: Some((self.profile.transform(u0)?, self.profile.transform(u1)?)),
            initial: to_product(&initial)?,
        })
    }

    /// Warped curvature the stationary graph carries in the downward convention.
    fn target(&self, wg: &WarpedGraph) -> Result<ScalarField, WarpedError> {
        let f = sample_on_graph(&self.f, wg)?;
        let sign = -self.orientation.sign();
        let values = f.values().iter().map(|v| sign * v).collect();
        Ok(ScalarField::new(*wg.grid(), values)?)
    }

    pub fn residuals(&self, wg: &WarpedGraph) -> Result<(f64, f64), WarpedError> {
        let target = self.target(wg)?;
        let direct = warped_mean_curvature_direct(wg)?.sup_distance(&target);
        let chart = warped_mean_curvature(wg)?.sup_distance(&target);
        Ok((direct, chart))
    }
}

/// Runs the chart flow to stationarity and audits the limit.
pub fn solve_prescribed_mc(
    problem: &PrescribedProblem,
    settings: &IntegratorSettings,
) -> Result<PrescribedSolution, WarpedError> {
    let trace = run_to_stationary(problem.flow_problem()?, settings)?;
    let graph = to_warped(&trace.final_field, problem.profile.clone())?;
    let (residual, chart_residual) = problem.residuals(&graph)?;
    Ok(PrescribedSolution {
        trace,
        graph,
        residual,
        chart_residual,
    })
}

/// Weighted flow of a graph between `a` and `b`, run in the chart.
#[derive(Debug, Clone)]
pub struct WeightedProblem {
    pub profile: Arc<WarpedProfile>,
    pub interval: (f64, f64),
    pub initial: ScalarField,
}

#[derive(Debug, Clone)]
pub struct WeightedRun {
    pub trace: FlowTrace,
    pub graph: WarpedGraph,
    /// Zero of `φ′` in `(a, b)`.
    pub critical_height: f64,
    /// `sup |u − x₀|` at the end of the run.
    pub distance: f64,
}

impl WeightedProblem {
    pub fn critical_height(&self) -> Result<f64, WarpedError> {
        let (a, b) = self.interval;
        if !(self.profile.dphi(a)? <= 0.0 && self.profile.dphi(b)? > 0.0) {
            return Err(WarpedError::NoCriticalPoint { a, b });
        }
        Ok(locate_critical_point(&self.profile, a, b)?)
    }

    pub fn flow_problem(&self) -> Result<FlowProblem, WarpedError> {
        let (a, b) = self.interval;
        for (node, &value) in self.initial.values().iter().enumerate() {
            if !(value > a && value < b) {
                return Err(WarpedError::OutsideInterval {
                    node,
                    value,
                    lo: a,
                    hi: b,
                });
            }
        }
        let initial = WarpedGraph::new(self.initial.clone(), self.profile.clone())?;
        let forcing = Arc::new(WarpedForcing::new(
            self.profile.clone(),
            None,
            Orientation::Downward,
            self.initial.grid().dim(),
            a,
        )?);
        Ok(FlowProblem {
            equation: Equation::Weighted,
            forcing: forcing.clone(),
            weights: Some(forcing),
            slab: Some((self.profile.transform(a)?, self.profile.transform(b)?)),
            initial: to_product(&initial)?,
        })
    }
}

pub fn weighted_mcf_run(problem: &WeightedProblem, settings: &IntegratorSettings) -> Result<WeightedRun, WarpedError> {
    let critical_height = problem.critical_height()?;
    let trace = run_to_stationary(problem.flow_problem()?, settings)?;
    let graph = to_warped(&trace.final_field, problem.profile.clone())?;
    let distance = graph
        .height()
        .values()
        .iter()
        .map(|u| (u - critical_height).abs())
        .fold(0.0, f64::max);
    Ok(WeightedRun {
        trace,
        graph,
        critical_height,
        distance,
    })
}
