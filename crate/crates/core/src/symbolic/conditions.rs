//! Hypothesis checkers for the prescribed data.
//!
//! Every condition is reduced to a signed margin that must be nonnegative
//! (strictly positive where the hypothesis is strict). Spatial conditions are
//! checked at every grid node; conditions quantified over heights use a
//! uniform sample of the closed interval including both endpoints.

use std::fmt;

use serde::Serialize;

use super::expr::{EvalError, Expr, Var};
use super::profile::{ProfileError, WarpedProfile};
use crate::torus::PeriodicGrid;

pub const DEFAULT_U_SAMPLES: usize = 64;
pub const CURVATURE_SAMPLES: usize = 1000;

/// Where the worst margin of a condition was attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Location {
    /// Base point, empty for conditions on `u` alone.
    pub x: Vec<f64>,
    pub u: f64,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x.is_empty() {
            return write!(f, "u={}", self.u);
        }
        let xs: Vec<String> = self.x.iter().map(|v| format!("{v}")).collect();
        write!(f, "x=({}) u={}", xs.join(", "), self.u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionEntry {
    pub name: String,
    pub pass: bool,
    /// Smallest slack over the checked set; negative on failure.
    pub margin: f64,
    pub worst: Location,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub entries: Vec<ConditionEntry>,
    /// Zero of `φ′` located in `[a, b]` (warped convexity check only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_point: Option<f64>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn entry(&self, name: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{:<28} {} margin={:+.6e} at {}",
                e.name,
                if e.pass { "PASS" } else { "FAIL" },
                e.margin,
                e.worst
            )?;
        }
        if let Some(x0) = self.critical_point {
            writeln!(f, "{:<28} u={x0}", "critical_point")?;
        }
        Ok(())
    }
}

/// Running minimum of a margin together with its location.
struct Worst {
    margin: f64,
    at: Location,
}

impl Worst {
    fn new() -> Self {
        Self {
            margin: f64::INFINITY,
            at: Location { x: Vec::new(), u: f64::NAN },
        }
    }

    fn offer(&mut self, margin: f64, x: &[f64], u: f64) {
        // report +0 rather than -0 when a negated zero is the worst margin
        let margin = margin + 0.0;
        if margin < self.margin || self.margin.is_nan() {
            self.margin = margin;
            self.at = Location { x: x.to_vec(), u };
        }
    }

    fn entry(self, name: &str, strict: bool) -> ConditionEntry {
        let pass = if strict { self.margin > 0.0 } else { self.margin >= 0.0 };
        ConditionEntry {
            name: name.to_string(),
            pass,
            margin: self.margin,
            worst: self.at,
        }
    }
}

fn heights(u0: f64, u1: f64, samples: usize) -> impl Iterator<Item = f64> {
    let samples = samples.max(2);
    (0..samples).map(move |k| {
        if k + 1 == samples {
            u1
        } else {
            u0 + (u1 - u0) * k as f64 / (samples - 1) as f64
        }
    })
}

/// Runs `margin(x, u)` over every node at a fixed height.
fn over_nodes(
    grid: &PeriodicGrid,
    u: f64,
    mut margin: impl FnMut(&[f64], f64) -> Result<f64, EvalError>,
) -> Result<Worst, EvalError> {
    let mut worst = Worst::new();
    for node in 0..grid.len() {
        let c = grid.coords(node);
        let x = &c[..grid.dim()];
        worst.offer(margin(x, u)?, x, u);
    }
    Ok(worst)
}

fn over_nodes_and_heights(
    grid: &PeriodicGrid,
    u0: f64,
    u1: f64,
    samples: usize,
    mut margin: impl FnMut(&[f64], f64) -> Result<f64, EvalError>,
) -> Result<Worst, EvalError> {
    let mut worst = Worst::new();
    for u in heights(u0, u1, samples) {
        for node in 0..grid.len() {
            let c = grid.coords(node);
            let x = &c[..grid.dim()];
            worst.offer(margin(x, u)?, x, u);
        }
    }
    Ok(worst)
}

/// Barrier signs `g + h ≥ 0` at `u0`, `g + h ≤ 0` at `u1`, and `∂_u g ≤ 0`.
pub fn check_theorem_conditions(
    h: &Expr,
    g: &Expr,
    u0: f64,
    u1: f64,
    grid: &PeriodicGrid,
    u_samples: usize,
) -> Result<ConditionReport, EvalError> {
    debug_assert!(u0 < u1);
    let lower = over_nodes(grid, u0, |x, u| Ok(g.eval(x, u)? + h.eval(x, u)?))?;
    let upper = over_nodes(grid, u1, |x, u| Ok(-(g.eval(x, u)? + h.eval(x, u)?)))?;
    let dg = g.diff(Var::U);
    let mono = over_nodes_and_heights(grid, u0, u1, u_samples, |x, u| Ok(-dg.eval(x, u)?))?;
    Ok(ConditionReport {
        entries: vec![
            lower.entry("lower_barrier", false),
            upper.entry("upper_barrier", false),
            mono.entry("g_nonincreasing", false),
        ],
        critical_point: None,
    })
}

/// Barrier inequalities `f(x,u0) ≥ nφ′/φ(u0)`, `f(x,u1) ≤ nφ′/φ(u1)` and
/// `∂_u(fφ) ≤ 0` for prescribed warped mean curvature.
pub fn check_corollary1_conditions(
    f: &Expr,
    profile: &WarpedProfile,
    u0: f64,
    u1: f64,
    grid: &PeriodicGrid,
    u_samples: usize,
) -> Result<ConditionReport, ProfileError> {
    debug_assert!(u0 < u1);
    for u in [u0, u1] {
        if !profile.contains(u) {
            let (lo, hi) = profile.domain();
            return Err(ProfileError::OutsideDomain { u, lo, hi });
        }
    }
    let n = grid.dim() as f64;
    let slice = |u: f64| -> Result<f64, ProfileError> {
        Ok(n * profile.dphi(u)? / profile.phi(u)?)
    };
    let (s0, s1) = (slice(u0)?, slice(u1)?);
    let lower = over_nodes(grid, u0, |x, u| Ok(f.eval(x, u)? - s0))?;
    let upper = over_nodes(grid, u1, |x, u| Ok(s1 - f.eval(x, u)?))?;
    let d_fphi = Expr::mul(f.clone(), profile.expr().clone()).diff(Var::U);
    let mono = over_nodes_and_heights(grid, u0, u1, u_samples, |x, u| Ok(-d_fphi.eval(x, u)?))?;
    Ok(ConditionReport {
        entries: vec![
            lower.entry("lower_barrier", false),
            upper.entry("upper_barrier", false),
            mono.entry("f_phi_nonincreasing", false),
        ],
        critical_point: None,
    })
}

/// Convexity hypotheses `φ′(a) ≤ 0 < φ′(b)`, `φ″ ≥ 0` on `[a, b]`, plus the
/// zero of `φ′` located by bisection when the endpoint signs allow it.
pub fn check_corollary2_conditions(
    profile: &WarpedProfile,
    a: f64,
    b: f64,
) -> Result<ConditionReport, ProfileError> {
    debug_assert!(a < b);
    for u in [a, b] {
        if !profile.contains(u) {
            let (lo, hi) = profile.domain();
            return Err(ProfileError::OutsideDomain { u, lo, hi });
        }
    }
    let (da, db) = (profile.dphi(a)?, profile.dphi(b)?);
    let mut left = Worst::new();
    left.offer(-da, &[], a);
    let mut right = Worst::new();
    right.offer(db, &[], b);
    let mut convex = Worst::new();
    for u in heights(a, b, CURVATURE_SAMPLES + 1) {
        convex.offer(profile.d2phi(u)?, &[], u);
    }
    let entries = vec![
        left.entry("dphi_left_nonpositive", false),
        right.entry("dphi_right_positive", true),
        convex.entry("phi_convex", false),
    ];
    let critical_point = if da <= 0.0 && db > 0.0 {
        Some(locate_critical_point(profile, a, b)?)
    } else {
        None
    };
    Ok(ConditionReport {
        entries,
        critical_point,
    })
}

/// Bisection for `φ′ = 0` on a bracket with `φ′(a) ≤ 0 < φ′(b)`, to 1e-12.
pub fn locate_critical_point(profile: &WarpedProfile, a: f64, b: f64) -> Result<f64, ProfileError> {
    let (mut lo, mut hi) = (a, b);
    if profile.dphi(lo)? == 0.0 {
        return Ok(lo);
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let d = profile.dphi(mid)?;
        if d == 0.0 {
            return Ok(mid);
        }
        if d < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
