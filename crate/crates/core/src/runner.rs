//! Drives a validated config through checks, the flow and the monitors, and
//! writes the run directory.
//!
//! A run directory holds `trace.csv`, `initial.csv`, `final.csv`,
//! `report.txt` and `summary.json`. Trace extremes and the energy are in the
//! flow variable: the height itself for `product_flow`, the chart value
//! `Φ(u)` for the warped kinds. Field dumps always hold heights.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::config::{LoadedConfig, Problem, ProblemKind};
use crate::flow::{run_to_stationary, slice_ode_solve, ExprForcing, FlowProblem, FlowTrace, SliceTrajectory, Termination};
use crate::symbolic::{
    check_corollary1_conditions, check_corollary2_conditions, check_theorem_conditions, ConditionReport, EnergyWeights,
    WeightPair,
};
use crate::torus::ScalarField;
use crate::verify::{standard_monitors, MonitorReport};
use crate::warped::{to_warped, PrescribedProblem, WeightedProblem};
use crate::Error;

/// Process exit codes of `mcflow run`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Converged = 0,
    ConfigError = 1,
    MaxTime = 2,
    Diverged = 3,
    MonitorFailure = 4,
    ConditionFailure = 5,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Hypothesis report for the config's problem kind.
pub fn check(loaded: &LoadedConfig) -> Result<ConditionReport, Error> {
    Ok(match loaded.problem()? {
        Problem::Product {
            h,
            g,
            slab,
            initial,
            u_samples,
        } => check_theorem_conditions(&h, &g, slab.0, slab.1, initial.grid(), u_samples)?,
        Problem::Prescribed {
            f,
            profile,
            slab,
            initial,
            u_samples,
            ..
        } => check_corollary1_conditions(&f, &profile, slab.0, slab.1, initial.grid(), u_samples)?,
        Problem::Weighted { profile, interval, .. } | Problem::Slice { profile, interval, .. } => {
            check_corollary2_conditions(&profile, interval.0, interval.1)?
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub kind: &'static str,
    pub exit_code: i32,
    pub status: ExitStatus,
    pub conditions: Option<ConditionReport>,
    pub termination: Option<Termination>,
    pub divergence: Option<String>,
    pub steps: Option<u64>,
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub final_sup_ut: Option<f64>,
    pub monitors: Option<MonitorReport>,
    /// Problem-specific diagnostics such as the curvature residual.
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub trace: Option<FlowTrace>,
}

impl RunOutcome {
    pub fn status(&self) -> ExitStatus {
        self.summary.status
    }
}

struct Prepared {
    flow: FlowProblem,
    initial_heights: ScalarField,
    notes: Vec<String>,
}

fn prepare(problem: &Problem) -> Result<Prepared, Error> {
    let mut notes = Vec::new();
    let flow = match problem {
        Problem::Product {
            h, g, slab, initial, ..
        } => {
            let weights: Option<Arc<dyn EnergyWeights + Send + Sync>> =
                match WeightPair::build(h.clone(), g.clone(), *slab, slab.0) {
                    Ok(w) => Some(Arc::new(w)),
                    Err(e) => {
                        notes.push(format!("energy monitors disabled: {e}"));
                        None
                    }
                };
            FlowProblem {
                equation: crate::flow::Equation::Product,
                forcing: Arc::new(ExprForcing::new(h.clone(), g.clone())),
                weights,
                slab: Some(*slab),
                initial: initial.clone(),
            }
        }
        Problem::Prescribed {
            f,
            profile,
            slab,
            orientation,
            initial,
            ..
        } => PrescribedProblem {
            f: f.clone(),
            profile: profile.clone(),
            slab: *slab,
            orientation: *orientation,
            initial: initial.clone(),
        }
        .flow_problem()?,
        Problem::Weighted {
            profile,
            interval,
            initial,
        } => WeightedProblem {
            profile: profile.clone(),
            interval: *interval,
            initial: initial.clone(),
        }
        .flow_problem()?,
        Problem::Slice { .. } => unreachable!("slice problems do not run a flow"),
    };
    let initial_heights = match problem {
        Problem::Product { initial, .. } | Problem::Prescribed { initial, .. } | Problem::Weighted { initial, .. } => {
            initial.clone()
        }
        Problem::Slice { .. } => unreachable!(),
    };
    Ok(Prepared {
        flow,
        initial_heights,
        notes,
    })
}

/// Post-run diagnostics; failures become notes since the trace itself is
/// still worth reporting.
fn diagnostics(problem: &Problem, trace: &FlowTrace, metrics: &mut BTreeMap<String, f64>, notes: &mut Vec<String>) -> ScalarField {
    let heights = |profile| to_warped(&trace.final_field, profile).map(|g| g.height().clone());
    match problem {
        Problem::Product { .. } => trace.final_field.clone(),
        Problem::Prescribed {
            f,
            profile,
            slab,
            orientation,
            initial,
            ..
        } => {
            let p = PrescribedProblem {
                f: f.clone(),
                profile: profile.clone(),
                slab: *slab,
                orientation: *orientation,
                initial: initial.clone(),
            };
            match to_warped(&trace.final_field, profile.clone()) {
                Ok(graph) => {
                    match p.residuals(&graph) {
                        Ok((direct, chart)) => {
                            metrics.insert("curvature_residual".into(), direct);
                            metrics.insert("chart_curvature_residual".into(), chart);
                        }
                        Err(e) => notes.push(format!("curvature residual unavailable: {e}")),
                    }
                    graph.height().clone()
                }
                Err(e) => {
                    notes.push(format!("final chart values leave the profile: {e}"));
                    trace.final_field.clone()
                }
            }
        }
        Problem::Weighted {
            profile,
            interval,
            initial,
        } => {
            let p = WeightedProblem {
                profile: profile.clone(),
                interval: *interval,
                initial: initial.clone(),
            };
            let x0 = p.critical_height();
            match (heights(profile.clone()), x0) {
                (Ok(u), Ok(x0)) => {
                    let d = u.values().iter().map(|v| (v - x0).abs()).fold(0.0, f64::max);
                    metrics.insert("critical_height".into(), x0);
                    metrics.insert("distance_to_critical_height".into(), d);
                    u
                }
                (Ok(u), Err(e)) => {
                    notes.push(e.to_string());
                    u
                }
                (Err(e), _) => {
                    notes.push(format!("final chart values leave the profile: {e}"));
                    trace.final_field.clone()
                }
            }
        }
        Problem::Slice { .. } => unreachable!(),
    }
}

/// Checks hypotheses (unless `skip_check`), runs the flow, evaluates the
/// monitors and writes the run directory.
pub fn run(loaded: &LoadedConfig, out_dir: &Path, skip_check: bool) -> Result<RunOutcome, Error> {
    let config = &loaded.config;
    if config.kind == ProblemKind::SliceOde {
        return Err(crate::config::ConfigError::Invalid {
            key: "kind".into(),
            message: "slice_ode configs are run with the slice-ode command".into(),
        }
        .into());
    }
    let settings = config.settings();
    settings.validate()?;
    let problem = loaded.problem()?;
    let conditions = check(loaded)?;
    let mut summary = RunSummary {
        kind: config.kind.as_str(),
        exit_code: 0,
        status: ExitStatus::Converged,
        conditions: Some(conditions.clone()),
        termination: None,
        divergence: None,
        steps: None,
        t_final: None,
        dt: None,
        final_sup_ut: None,
        monitors: None,
        metrics: BTreeMap::new(),
        notes: Vec::new(),
    };
    create_dir(out_dir)?;
    if !conditions.passed() {
        if skip_check {
            summary.notes.push("hypotheses fail; running anyway".into());
        } else {
            summary.status = ExitStatus::ConditionFailure;
            summary.exit_code = summary.status.code();
            write_report(out_dir, &summary)?;
            return Ok(RunOutcome { summary, trace: None });
        }
    }
    let prepared = prepare(&problem)?;
    summary.notes.extend(prepared.notes);
    let trace = run_to_stationary(prepared.flow.clone(), &settings)?;
    let monitors = standard_monitors(&trace, prepared.flow.slab, settings.tol);
    let final_heights = diagnostics(&problem, &trace, &mut summary.metrics, &mut summary.notes);

    summary.status = status_of(&trace, &monitors);
    summary.exit_code = summary.status.code();
    summary.termination = Some(trace.termination);
    summary.divergence = trace.divergence.clone();
    summary.steps = Some(trace.last().step);
    summary.t_final = Some(trace.last().t);
    summary.dt = Some(trace.dt);
    summary.final_sup_ut = Some(trace.last().sup_ut);
    summary.monitors = Some(monitors);

    write_file(&out_dir.join("trace.csv"), &trace_csv(&trace))?;
    write_file(&out_dir.join("initial.csv"), &field_csv(&prepared.initial_heights))?;
    write_file(&out_dir.join("final.csv"), &field_csv(&final_heights))?;
    write_report(out_dir, &summary)?;
    Ok(RunOutcome {
        summary,
        trace: Some(trace),
    })
}

fn status_of(trace: &FlowTrace, monitors: &MonitorReport) -> ExitStatus {
    match trace.termination {
        Termination::Diverged => ExitStatus::Diverged,
        Termination::MaxTime | Termination::MaxSteps => ExitStatus::MaxTime,
        Termination::Stationary if monitors.passed() => ExitStatus::Converged,
        Termination::Stationary => ExitStatus::MonitorFailure,
    }
}

/// Integrates the slice ODE and writes `trajectory.csv` and `summary.json`.
pub fn slice(loaded: &LoadedConfig, out_dir: &Path) -> Result<SliceTrajectory, Error> {
    let Problem::Slice {
        profile,
        dim,
        r0,
        t_end,
        dt,
        ..
    } = loaded.problem()?
    else {
        return Err(crate::config::ConfigError::Invalid {
            key: "kind".into(),
            message: "the slice-ode command needs kind = \"slice_ode\"".into(),
        }
        .into());
    };
    let traj = slice_ode_solve(&profile, dim, r0, t_end, dt)?;
    create_dir(out_dir)?;
    let mut csv = String::from("t,r\n");
    for (t, r) in traj.times.iter().zip(&traj.heights) {
        let _ = writeln!(csv, "{t},{r}");
    }
    write_file(&out_dir.join("trajectory.csv"), &csv)?;
    let summary = serde_json::json!({
        "kind": "slice_ode",
        "r0": r0,
        "t_end": t_end,
        "dt": dt,
        "final_height": traj.final_height(),
        "steps": traj.times.len() - 1,
    });
    write_file(
        &out_dir.join("summary.json"),
        &(serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"),
    )?;
    Ok(traj)
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// `t,sup_ut,sup_omega,min_u,max_u,energy,cumulative_dissipation`, with
/// shortest round-trip float formatting. Missing energy columns stay empty.
pub fn trace_csv(trace: &FlowTrace) -> String {
    let mut out = String::from("t,sup_ut,sup_omega,min_u,max_u,energy,cumulative_dissipation\n");
    for s in &trace.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.t,
            s.sup_ut,
            s.sup_omega,
            s.min_u,
            s.max_u,
            opt(s.energy),
            opt(s.cumulative_dissipation)
        );
    }
    out
}

/// Node coordinates and value, one node per row.
pub fn field_csv(field: &ScalarField) -> String {
    let grid = field.grid();
    let mut out = String::new();
    out.push_str(if grid.dim() == 1 { "x1,u\n" } else { "x1,x2,u\n" });
    for (node, v) in field.values().iter().enumerate() {
        let c = grid.coords(node);
        if grid.dim() == 1 {
            let _ = writeln!(out, "{},{v}", c[0]);
        } else {
            let _ = writeln!(out, "{},{},{v}", c[0], c[1]);
        }
    }
    out
}

pub fn render_report(summary: &RunSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "kind: {}", summary.kind);
    if let Some(c) = &summary.conditions {
        let _ = write!(out, "\nconditions:\n{c}");
    }
    if let Some(t) = summary.termination {
        let _ = writeln!(out, "\ntermination: {}", t.as_str());
    }
    if let Some(d) = &summary.divergence {
        let _ = writeln!(out, "divergence: {d}");
    }
    if let (Some(steps), Some(t), Some(dt)) = (summary.steps, summary.t_final, summary.dt) {
        let _ = writeln!(out, "steps: {steps}  t: {t}  dt: {dt}");
    }
    if let Some(m) = &summary.monitors {
        let _ = write!(out, "\nmonitors:\n{m}");
    }
    if !summary.metrics.is_empty() {
        out.push('\n');
        for (k, v) in &summary.metrics {
            let _ = writeln!(out, "{k}: {v:e}");
        }
    }
    for n in &summary.notes {
        let _ = writeln!(out, "note: {n}");
    }
    let _ = writeln!(out, "\nexit: {} ({:?})", summary.exit_code, summary.status);
    out
}

fn write_report(dir: &Path, summary: &RunSummary) -> Result<(), Error> {
    write_file(&dir.join("report.txt"), &render_report(summary))?;
    let json = serde_json::to_string_pretty(summary).expect("summary serializes");
    write_file(&dir.join("summary.json"), &(json + "\n"))
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    fn loaded(text: &str) -> LoadedConfig {
        RunConfig::from_toml(text, &[]).unwrap()
    }

    const SMALL: &str = r#"
kind = "product_flow"
[grid]
dim = 1
resolution = [32]
[data]
h = "-u"
g = "0"
slab = [-1.0, 1.0]
u_init = "0.3 + 0.1*sin(x1)"
"#;

    #[test]
    fn small_product_run_converges_and_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&loaded(SMALL), dir.path(), false).unwrap();
        assert_eq!(out.status(), ExitStatus::Converged, "{}", render_report(&out.summary));
        for f in ["trace.csv", "initial.csv", "final.csv", "report.txt", "summary.json"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
        assert!(trace.starts_with("t,sup_ut,sup_omega,min_u,max_u,energy,cumulative_dissipation\n"));
        assert_eq!(fs::read_to_string(dir.path().join("final.csv")).unwrap().lines().count(), 33);
    }

    #[test]
    fn failing_hypotheses_stop_before_the_flow() {
        let text = SMALL.replace("\"-u\"", "\"u\"");
        let dir = tempfile::tempdir().unwrap();
        let out = run(&loaded(&text), dir.path(), false).unwrap();
        assert_eq!(out.status(), ExitStatus::ConditionFailure);
        assert!(out.trace.is_none());
        assert!(!dir.path().join("trace.csv").exists());
    }

    #[test]
    fn short_horizon_reports_max_time() {
        let text = format!("{SMALL}[integrator]\nt_max = 0.01\n");
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run(&loaded(&text), dir.path(), false).unwrap().status(), ExitStatus::MaxTime);
    }

    #[test]
    fn spatial_h_disables_energy_monitors() {
        let text = SMALL.replace("\"-u\"", "\"-u + 0.01*sin(x1)\"");
        let dir = tempfile::tempdir().unwrap();
        let out = run(&loaded(&text), dir.path(), false).unwrap();
        assert!(out.summary.notes.iter().any(|n| n.contains("energy monitors disabled")));
        assert!(out.summary.monitors.unwrap().entry("energy_monotone").is_none());
    }
}
