//! Executable monitors over flow traces.
//!
//! Each monitor reduces a trace to one [`MonitorEntry`] whose `margin` is
//! nonnegative exactly when the monitor passes (strictly positive for the
//! barrier and comparison monitors, which are strict inequalities).

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::flow::{stable_time_step, FlowError, FlowProblem, FlowRunner, FlowTrace, IntegratorSettings};

/// Relative tolerance of the discrete dissipation identity.
pub const IDENTITY_TOL: f64 = 0.05;
/// Samples skipped before the identity is averaged.
pub const IDENTITY_BURN_IN: usize = 10;
/// Allowed late growth of `sup ω` over its first-half maximum.
pub const GRADIENT_FACTOR: f64 = 1.05;
/// Per-step energy slack in units of `dt · Δx²`.
pub const ENERGY_SLACK: f64 = 10.0;
/// Largest cumulative-dissipation growth over the final tenth of the run.
pub const PLATEAU_TOL: f64 = 0.01;
/// Local slack for the decay of `sup |u_t|` after its peak.
pub const DECAY_SLACK: f64 = 1.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorEntry {
    pub name: String,
    pub pass: bool,
    pub margin: f64,
    /// Sample time of the worst (or first failing) margin.
    pub time: Option<f64>,
    pub node: Option<usize>,
}

impl MonitorEntry {
    fn new(name: &str, pass: bool, margin: f64, time: Option<f64>, node: Option<usize>) -> Self {
        Self {
            name: name.to_string(),
            pass,
            margin,
            time,
            node,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MonitorReport {
    pub entries: Vec<MonitorEntry>,
}

impl MonitorReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn entry(&self, name: &str) -> Option<&MonitorEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for MonitorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            write!(
                f,
                "{:<22} {} margin={:+.6e}",
                e.name,
                if e.pass { "PASS" } else { "FAIL" },
                e.margin
            )?;
            if let Some(t) = e.time {
                write!(f, " t={t:.6}")?;
            }
            if let Some(n) = e.node {
                write!(f, " node={n}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("comparison needs at least two runs")]
    TooFewRuns,
    #[error("initial data of runs {lower} and {upper} are not strictly ordered (gap {gap} at node {node})")]
    NotDisjoint {
        lower: usize,
        upper: usize,
        gap: f64,
        node: usize,
    },
    #[error("runs live on different grids")]
    GridMismatch,
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// `lo < min u` and `max u < hi` at every sample.
pub fn monitor_barrier(trace: &FlowTrace, lo: f64, hi: f64) -> MonitorEntry {
    let mut worst = (f64::INFINITY, None, None);
    let mut first_violation = None;
    for s in &trace.samples {
        let (m, node) = if s.min_u - lo <= hi - s.max_u {
            (s.min_u - lo, s.min_node)
        } else {
            (hi - s.max_u, s.max_node)
        };
        if m <= 0.0 && first_violation.is_none() {
            first_violation = Some((s.t, node));
        }
        if m < worst.0 {
            worst = (m, Some(s.t), Some(node));
        }
    }
    match first_violation {
        Some((t, node)) => MonitorEntry::new("barrier", false, worst.0, Some(t), Some(node)),
        None => MonitorEntry::new("barrier", true, worst.0, worst.1, worst.2),
    }
}

/// `max_t sup ω ≤ 1.05 · max over the first half of the samples`.
pub fn monitor_gradient(trace: &FlowTrace) -> MonitorEntry {
    let samples = &trace.samples;
    let half = (samples.len() + 1) / 2;
    let early = samples[..half].iter().map(|s| s.sup_omega).fold(f64::NEG_INFINITY, f64::max);
    let peak = samples
        .iter()
        .max_by(|a, b| a.sup_omega.total_cmp(&b.sup_omega))
        .expect("trace is nonempty");
    let margin = GRADIENT_FACTOR * early - peak.sup_omega;
    MonitorEntry::new(
        "gradient_bound",
        margin >= 0.0,
        margin,
        Some(peak.t),
        Some(peak.sup_omega_node),
    )
}

/// `E` nonincreasing up to `10 · dt · Δx²` per step; `None` without a ledger.
pub fn monitor_energy(trace: &FlowTrace) -> Option<MonitorEntry> {
    let h = trace.grid().min_spacing();
    let per_step = ENERGY_SLACK * trace.dt * h * h;
    let mut worst = (f64::INFINITY, None);
    for w in trace.samples.windows(2) {
        let (e0, e1) = (w[0].energy?, w[1].energy?);
        let slack = per_step * (w[1].step - w[0].step) as f64;
        // an overflowed energy is a failure, not an incomparable NaN
        let m = if e0.is_finite() && e1.is_finite() { slack - (e1 - e0) } else { f64::NEG_INFINITY };
        if m < worst.0 {
            worst = (m, Some(w[1].t));
        }
    }
    trace.samples[0].energy?;
    if worst.1.is_none() {
        worst.0 = 0.0;
    }
    Some(MonitorEntry::new("energy_monotone", worst.0 >= 0.0, worst.0, worst.1, None))
}

/// Relative defect `Σ|ΔE + D̄ Δt| / Σ max(D̄, 1e-12) Δt` over the intervals
/// after the burn-in, against [`IDENTITY_TOL`]. `D̄ Δt` is the increment of
/// the cumulative dissipation, which the integrator accumulates every step.
/// `None` without a ledger or when no interval follows the burn-in.
pub fn dissipation_defect(trace: &FlowTrace) -> Option<f64> {
    if trace.samples.iter().any(|s| s.energy.is_some_and(|e| !e.is_finite())) {
        return Some(f64::INFINITY);
    }
    if trace.samples.len() <= IDENTITY_BURN_IN + 1 {
        return None;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for w in trace.samples.windows(2).skip(IDENTITY_BURN_IN) {
        let (e0, e1) = (w[0].energy?, w[1].energy?);
        let dt = w[1].t - w[0].t;
        let spent = w[1].cumulative_dissipation? - w[0].cumulative_dissipation?;
        num += (e1 - e0 + spent).abs();
        den += spent.max(1e-12 * dt);
    }
    trace.samples[0].energy?;
    Some(if den > 0.0 { num / den } else { 0.0 })
}

pub fn monitor_dissipation_identity(trace: &FlowTrace) -> Option<MonitorEntry> {
    let defect = dissipation_defect(trace)?;
    let margin = IDENTITY_TOL - defect;
    Some(MonitorEntry::new("dissipation_identity", margin >= 0.0, margin, None, None))
}

/// Growth of the cumulative dissipation over the last tenth of the elapsed
/// time, relative to its total.
pub fn plateau_growth(trace: &FlowTrace) -> Option<f64> {
    let last = trace.last();
    let total = last.cumulative_dissipation?;
    let cutoff = 0.9 * last.t;
    let before = trace.samples.iter().find(|s| s.t >= cutoff)?.cumulative_dissipation?;
    Some(if total > 0.0 { (total - before) / total } else { 0.0 })
}

pub fn monitor_dissipation_plateau(trace: &FlowTrace) -> Option<MonitorEntry> {
    let growth = plateau_growth(trace)?;
    let margin = PLATEAU_TOL - growth;
    Some(MonitorEntry::new(
        "dissipation_plateau",
        margin >= 0.0,
        margin,
        Some(trace.last().t),
        None,
    ))
}

/// Final `sup |u_t| < tol`, and after its peak each sample is at most 10%
/// above the previous one. The margin is `tol − final` unless the decay
/// check fails, in which case it is the worst `1.1 · prev − next`.
pub fn monitor_ut_decay(trace: &FlowTrace, tol: f64) -> MonitorEntry {
    let s = &trace.samples;
    let peak = s
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.sup_ut.total_cmp(&b.1.sup_ut))
        .map(|(i, _)| i)
        .expect("trace is nonempty");
    let mut worst_decay = (f64::INFINITY, None, None);
    for w in s[peak..].windows(2) {
        let m = DECAY_SLACK * w[0].sup_ut - w[1].sup_ut;
        if m < worst_decay.0 {
            worst_decay = (m, Some(w[1].t), Some(w[1].sup_ut_node));
        }
    }
    let last = trace.last();
    let final_margin = tol - last.sup_ut;
    if worst_decay.0 < 0.0 {
        return MonitorEntry::new("ut_decay", false, worst_decay.0, worst_decay.1, worst_decay.2);
    }
    MonitorEntry::new(
        "ut_decay",
        final_margin > 0.0,
        final_margin,
        Some(last.t),
        Some(last.sup_ut_node),
    )
}

/// All monitors that apply to `trace`.
pub fn standard_monitors(trace: &FlowTrace, slab: Option<(f64, f64)>, tol: f64) -> MonitorReport {
    let mut entries = Vec::new();
    if let Some((lo, hi)) = slab {
        entries.push(monitor_barrier(trace, lo, hi));
    }
    entries.push(monitor_gradient(trace));
    entries.extend(monitor_energy(trace));
    entries.extend(monitor_dissipation_identity(trace));
    entries.extend(monitor_dissipation_plateau(trace));
    entries.push(monitor_ut_decay(trace, tol));
    MonitorReport { entries }
}

/// Outcome of advancing ordered runs in lockstep.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonOutcome {
    pub entry: MonitorEntry,
    /// Sample times at which the order was checked.
    pub times: Vec<f64>,
    /// Final fields of the runs, in input order.
    pub finals: Vec<Vec<f64>>,
}

/// Runs ordered problems `u_0 < u_1 < …` with one shared step and checks
/// that every adjacent pair stays strictly ordered at each sample. Stops
/// when all runs are below `tol` at a sample, or at `t_max`.
pub fn comparison_test(problems: &[FlowProblem], settings: &IntegratorSettings) -> Result<ComparisonOutcome, VerifyError> {
    if problems.len() < 2 {
        return Err(VerifyError::TooFewRuns);
    }
    settings.validate()?;
    let grid = *problems[0].initial.grid();
    if problems.iter().any(|p| *p.initial.grid() != grid) {
        return Err(VerifyError::GridMismatch);
    }
    for k in 1..problems.len() {
        let (gap, node) = min_gap(problems[k - 1].initial.values(), problems[k].initial.values());
        if !(gap > 0.0) {
            return Err(VerifyError::NotDisjoint {
                lower: k - 1,
                upper: k,
                gap,
                node,
            });
        }
    }
    let dt = stable_time_step(&grid, settings.cfl);
    let mut runners = problems
        .iter()
        .map(|p| FlowRunner::new(p.clone(), dt))
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst = (f64::INFINITY, 0.0, 0usize);
    let mut first_violation = None;
    let mut times = Vec::new();
    loop {
        let step = runners[0].steps();
        let t = runners[0].time();
        let done = t >= settings.t_max || settings.max_steps.is_some_and(|m| step >= m);
        let settled = runners
            .iter()
            .all(|r| r.rate().iter().all(|v| v.abs() < settings.tol));
        if step % settings.stride == 0 || done || settled {
            times.push(t);
            for k in 1..runners.len() {
                let (gap, node) = min_gap(runners[k - 1].values(), runners[k].values());
                if gap < worst.0 {
                    worst = (gap, t, node);
                }
                if !(gap > 0.0) && first_violation.is_none() {
                    first_violation = Some((t, node));
                }
            }
        }
        if done || settled {
            break;
        }
        for r in runners.iter_mut() {
            r.advance()?;
        }
    }
    let entry = match first_violation {
        Some((t, node)) => MonitorEntry::new("comparison", false, worst.0, Some(t), Some(node)),
        None => MonitorEntry::new("comparison", true, worst.0, Some(worst.1), Some(worst.2)),
    };
    Ok(ComparisonOutcome {
        entry,
        times,
        finals: runners.iter().map(|r| r.values().to_vec()).collect(),
    })
}

fn min_gap(lower: &[f64], upper: &[f64]) -> (f64, usize) {
    lower
        .iter()
        .zip(upper)
        .map(|(a, b)| b - a)
        .enumerate()
        .fold((f64::INFINITY, 0), |acc, (i, g)| if g < acc.0 { (g, i) } else { acc })
}
