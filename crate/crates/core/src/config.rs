//! Run configuration files.
//!
//! A config is a TOML document with one top-level key and four sections:
//!
//! ```toml
//! kind = "product_flow"   # product_flow | prescribed_mean_curvature
//!                         # | weighted_warped_flow | slice_ode
//! [grid]
//! dim = 1                 # 1 or 2
//! resolution = [256]      # one entry per axis
//! period = [6.283185307179586]   # optional, default 2π per axis
//! metric = [1.0]          # optional, row-major σ, default identity
//!
//! [data]
//! h = "-u"                # expressions are quoted strings
//! g = "0"
//! slab = [-1.0, 1.0]
//! u_init = "0.3 + 0.1*sin(x1)"
//!
//! [integrator]            # every key optional
//! cfl = 0.4
//! tol = 1e-8
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Keys of `[data]` by kind:
//!
//! | kind | required | optional |
//! |------|----------|----------|
//! | `product_flow` | `h`, `g`, `slab`, `u_init` | `u_samples` |
//! | `prescribed_mean_curvature` | `f`, `phi`, `slab`, `u_init` | `domain`, `orientation`, `u_samples` |
//! | `weighted_warped_flow` | `phi`, `interval`, `u_init` | `domain` |
//! | `slice_ode` | `phi`, `r0` | `domain`, `interval` |
//!
//! `domain` defaults to the slab or interval. `slice_ode` integrates to
//! `integrator.t_max` with step `integrator.dt`. Any scalar key can be
//! overridden from the command line as `section.key=value`.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{IntegratorSettings, Orientation};
use crate::symbolic::{parse, Expr, ParseError, ProfileError, WarpedProfile};
use crate::torus::{GridError, Metric, PeriodicGrid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    ProductFlow,
    PrescribedMeanCurvature,
    WeightedWarpedFlow,
    SliceOde,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::ProductFlow => "product_flow",
            ProblemKind::PrescribedMeanCurvature => "prescribed_mean_curvature",
            ProblemKind::WeightedWarpedFlow => "weighted_warped_flow",
            ProblemKind::SliceOde => "slice_ode",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    /// Not needed by `slice_ode`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub resolution: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slab: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_init: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consecutive: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_limit: Option<f64>,
    /// Fixed step of the slice ODE.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: ProblemKind,
    pub grid: GridConfig,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(String),
    #[error("invalid override `{0}`: expected section.key=value")]
    Override(String),
    #[error("{location}: cannot parse `{key}`: {message}")]
    Expression {
        key: String,
        /// `line:column` in the source file, or the key path when the
        /// expression did not come from a file.
        location: String,
        message: String,
    },
    #[error("missing `{0}` for this problem kind")]
    Missing(String),
    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("{0}")]
    Io(String),
}

impl ConfigError {
    fn invalid(key: &str, message: impl ToString) -> Self {
        ConfigError::Invalid {
            key: key.to_string(),
            message: message.to_string(),
        }
    }
}

/// Parsed config together with the text it came from, for error locations.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: RunConfig,
    source: Option<String>,
}

impl RunConfig {
    /// Parses `text` and applies `section.key=value` overrides.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<LoadedConfig, ConfigError> {
        let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let config = RunConfig::deserialize(doc).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        Ok(LoadedConfig {
            config,
            source: overrides.is_empty().then(|| text.to_string()),
        })
    }

    pub fn load(path: &std::path::Path, overrides: &[String]) -> Result<LoadedConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml(&text, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn settings(&self) -> IntegratorSettings {
        let d = IntegratorSettings::default();
        let i = &self.integrator;
        IntegratorSettings {
            cfl: i.cfl.unwrap_or(d.cfl),
            tol: i.tol.unwrap_or(d.tol),
            t_max: i.t_max.unwrap_or(d.t_max),
            max_steps: i.max_steps.or(d.max_steps),
            stride: i.stride.unwrap_or(d.stride),
            consecutive: i.consecutive.unwrap_or(d.consecutive),
            omega_limit: i.omega_limit.unwrap_or(d.omega_limit),
        }
    }
}

const EXPRESSION_KEYS: [&str; 5] = ["h", "g", "f", "phi", "u_init"];

fn apply_override(doc: &mut toml::Table, spec: &str) -> Result<(), ConfigError> {
    let bad = || ConfigError::Override(spec.to_string());
    let (path, raw) = spec.split_once('=').ok_or_else(bad)?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) || keys.len() > 2 {
        return Err(bad());
    }
    let raw = raw.trim();
    // Bare words that are not TOML literals are taken as strings, so
    // `data.h=-u` and `data.h="-u"` mean the same; expression keys are
    // always text, so `data.g=0` is the expression "0".
    let literal = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"));
    let value = match literal {
        Some(v @ toml::Value::String(_)) => v,
        Some(v) if !(keys[0] == "data" && EXPRESSION_KEYS.contains(&keys[keys.len() - 1])) => v,
        _ => toml::Value::String(raw.to_string()),
    };
    let table = match keys.as_slice() {
        [_] => doc,
        [section, _] => doc
            .entry(section.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(bad)?,
        _ => unreachable!(),
    };
    table.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

/// Line and column (1-based) of the first character inside the quoted value
/// of `section.key`.
fn value_position(source: &str, section: &str, key: &str) -> Option<(usize, usize)> {
    let mut current = String::new();
    for (i, line) in source.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_string();
            continue;
        }
        if current != section {
            continue;
        }
        let Some((lhs, _)) = line.split_once('=') else {
            continue;
        };
        if lhs.trim() != key {
            continue;
        }
        let eq = lhs.chars().count();
        let after: Vec<char> = line.chars().skip(eq + 1).collect();
        let quote = after.iter().position(|c| *c == '"' || *c == '\'')?;
        return Some((i + 1, eq + 1 + quote + 2));
    }
    None
}

/// Fully validated problem ready to run.
#[derive(Debug, Clone)]
pub enum Problem {
    Product {
        h: Expr,
        g: Expr,
        slab: (f64, f64),
        initial: ScalarField,
        u_samples: usize,
    },
    Prescribed {
        f: Expr,
        profile: Arc<WarpedProfile>,
        slab: (f64, f64),
        orientation: Orientation,
        initial: ScalarField,
        u_samples: usize,
    },
    Weighted {
        profile: Arc<WarpedProfile>,
        interval: (f64, f64),
        initial: ScalarField,
    },
    Slice {
        profile: Arc<WarpedProfile>,
        interval: (f64, f64),
        dim: usize,
        r0: f64,
        t_end: f64,
        dt: f64,
    },
}

impl LoadedConfig {
    fn expression(&self, key: &str, text: &Option<String>, dim: usize) -> Result<Expr, ConfigError> {
        let text = text.as_ref().ok_or_else(|| ConfigError::Missing(format!("data.{key}")))?;
        let located = |e: ParseError| {
            let location = match self.source.as_deref().and_then(|s| value_position(s, "data", key)) {
                Some((line, col)) => format!("line {line}, column {}", col + e.column - 1),
                None => format!("data.{key}, column {}", e.column),
            };
            ConfigError::Expression {
                key: format!("data.{key}"),
                location,
                message: e.message,
            }
        };
        let e = parse(text).map_err(located)?;
        if let Some(axis) = e.max_x_axis() {
            if axis >= dim {
                return Err(ConfigError::invalid(
                    &format!("data.{key}"),
                    format!("mentions x{} on a {dim}-dimensional torus", axis + 1),
                ));
            }
        }
        Ok(e)
    }

    pub fn grid(&self) -> Result<PeriodicGrid, ConfigError> {
        let g = &self.config.grid;
        let grid_err = |e: GridError| ConfigError::invalid("grid", e);
        if g.resolution.len() != g.dim {
            return Err(ConfigError::invalid("grid.resolution", format!("expected {} entries", g.dim)));
        }
        let period = g.period.clone().unwrap_or_else(|| vec![std::f64::consts::TAU; g.dim]);
        let metric = match &g.metric {
            Some(m) => Metric::new(g.dim, m).map_err(grid_err)?,
            None => Metric::identity(g.dim).map_err(grid_err)?,
        };
        PeriodicGrid::new(&g.resolution, &period, metric).map_err(grid_err)
    }

    fn pair(key: &str, v: Option<[f64; 2]>) -> Result<(f64, f64), ConfigError> {
        let [a, b] = v.ok_or_else(|| ConfigError::Missing(format!("data.{key}")))?;
        if !(a < b) {
            return Err(ConfigError::invalid(&format!("data.{key}"), format!("need {a} < {b}")));
        }
        Ok((a, b))
    }

    fn initial(&self, grid: PeriodicGrid) -> Result<ScalarField, ConfigError> {
        let e = self.expression("u_init", &self.config.data.u_init, grid.dim())?;
        if e.depends_on_u() {
            return Err(ConfigError::invalid("data.u_init", "initial data may not mention u"));
        }
        let mut err = None;
        let f = ScalarField::from_fn(grid, |x| match e.eval(x, 0.0) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        });
        if let Some(e) = err {
            return Err(ConfigError::invalid("data.u_init", e));
        }
        f.map_err(|e| ConfigError::invalid("data.u_init", e))
    }

    fn profile(&self, dim: usize, fallback: (f64, f64)) -> Result<Arc<WarpedProfile>, ConfigError> {
        let phi = self.expression("phi", &self.config.data.phi, dim)?;
        let domain = match self.config.data.domain {
            Some(d) => Self::pair("domain", Some(d))?,
            None => fallback,
        };
        WarpedProfile::centered(phi, domain)
            .map(Arc::new)
            .map_err(|e: ProfileError| ConfigError::invalid("data.phi", e))
    }

    pub fn problem(&self) -> Result<Problem, ConfigError> {
        let dim = self.config.grid.dim;
        if !(1..=2).contains(&dim) {
            return Err(ConfigError::invalid("grid.dim", "must be 1 or 2"));
        }
        let d = &self.config.data;
        let u_samples = d.u_samples.unwrap_or(crate::symbolic::DEFAULT_U_SAMPLES);
        match self.config.kind {
            ProblemKind::ProductFlow => Ok(Problem::Product {
                h: self.expression("h", &d.h, dim)?,
                g: self.expression("g", &d.g, dim)?,
                slab: Self::pair("slab", d.slab)?,
                initial: self.initial(self.grid()?)?,
                u_samples,
            }),
            ProblemKind::PrescribedMeanCurvature => {
                let slab = Self::pair("slab", d.slab)?;
                Ok(Problem::Prescribed {
                    f: self.expression("f", &d.f, dim)?,
                    profile: self.profile(dim, slab)?,
                    slab,
                    orientation: d.orientation.unwrap_or_default(),
                    initial: self.initial(self.grid()?)?,
                    u_samples,
                })
            }
            ProblemKind::WeightedWarpedFlow => {
                let interval = Self::pair("interval", d.interval)?;
                Ok(Problem::Weighted {
                    profile: self.profile(dim, interval)?,
                    interval,
                    initial: self.initial(self.grid()?)?,
                })
            }
            ProblemKind::SliceOde => {
                let r0 = d.r0.ok_or_else(|| ConfigError::Missing("data.r0".into()))?;
                let domain = match (d.domain, d.interval) {
                    (Some(x), _) | (None, Some(x)) => Self::pair("domain", Some(x))?,
                    (None, None) => return Err(ConfigError::Missing("data.domain".into())),
                };
                let interval = match d.interval {
                    Some(i) => Self::pair("interval", Some(i))?,
                    None => domain,
                };
                let dt = self.config.integrator.dt.unwrap_or(1e-3);
                if !(dt > 0.0) {
                    return Err(ConfigError::invalid("integrator.dt", "must be positive"));
                }
                Ok(Problem::Slice {
                    profile: self.profile(dim, domain)?,
                    interval,
                    dim,
                    r0,
                    t_end: self.config.integrator.t_max.unwrap_or(1.0),
                    dt,
                })
            }
        }
    }
}
