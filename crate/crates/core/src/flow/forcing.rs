use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbolic::quadrature::integrate;
use crate::symbolic::{EnergyWeights, EvalError, Expr, ProfileError, WarpedProfile, WeightError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForcingError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Lower-order data `(h, g)` of `u_t = g^{ij} u_ij + h + g ω`.
pub trait Forcing: Send + Sync {
    fn terms(&self, x: &[f64], u: f64) -> Result<(f64, f64), ForcingError>;
}

/// `h(x, u)` and `g(x, u)` given as expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprForcing {
    pub h: Expr,
    pub g: Expr,
}

impl ExprForcing {
    pub fn new(h: Expr, g: Expr) -> Self {
        Self { h, g }
    }
}

impl Forcing for ExprForcing {
    fn terms(&self, x: &[f64], u: f64) -> Result<(f64, f64), ForcingError> {
        Ok((self.h.eval(x, u)?, self.g.eval(x, u)?))
    }
}

/// Which unit normal the prescribed warped curvature refers to.
///
/// `Downward` matches the graph convention used by every curvature evaluator
/// in this crate. `Upward` flips the sign of the prescribed data; it is the
/// orientation under which the warped barrier inequalities trap the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    #[default]
    Downward,
    Upward,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Downward => -1.0,
            Orientation::Upward => 1.0,
        }
    }
}

/// Forcing of a warped graph written in the height chart `𝜑 = Φ(u)`:
/// `h(𝜑) = −n φ′(r)` and `g(x, 𝜑) = ∓ f(x, r) φ(r)` with `r = Φ⁻¹(𝜑)`.
///
/// Stationary points of the product flow with these terms have warped mean
/// curvature `f` for the chosen orientation; with `f` absent the terms
/// reduce to the slice drift of the weighted flow.
#[derive(Debug, Clone)]
pub struct WarpedForcing {
    profile: Arc<WarpedProfile>,
    f: Option<Expr>,
    orientation: Orientation,
    dim: usize,
    anchor: f64,
    phi_anchor: f64,
}

impl WarpedForcing {
    /// `anchor` is a height `r` (not a chart value) at which `s = 1`, `G = 0`.
    pub fn new(
        profile: Arc<WarpedProfile>,
        f: Option<Expr>,
        orientation: Orientation,
        dim: usize,
        anchor: f64,
    ) -> Result<Self, ProfileError> {
        let phi_anchor = profile.phi(anchor)?;
        Ok(Self {
            profile,
            f,
            orientation,
            dim,
            anchor,
            phi_anchor,
        })
    }

    pub fn profile(&self) -> &WarpedProfile {
        &self.profile
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    fn weight_at_height(&self, r: f64) -> Result<f64, ProfileError> {
        Ok((self.profile.phi(r)? / self.phi_anchor).powi(self.dim as i32))
    }
}

impl Forcing for WarpedForcing {
    fn terms(&self, x: &[f64], chart: f64) -> Result<(f64, f64), ForcingError> {
        let r = self.profile.inverse(chart)?;
        let h = -(self.dim as f64) * self.profile.dphi(r)?;
        let g = match &self.f {
            Some(f) => self.orientation.sign() * f.eval(x, r)? * self.profile.phi(r)?,
            None => 0.0,
        };
        Ok((h, g))
    }
}

/// In the chart, `s = e^{−∫h d𝜑} = (φ(r)/φ(r_a))^n` since `d𝜑 = dr/φ`, and
/// `G = ∫ s g d𝜑 = ∓∫_{r_a}^{r} (φ/φ_a)^n f dρ`.
impl EnergyWeights for WarpedForcing {
    fn s(&self, chart: f64) -> Result<f64, WeightError> {
        let r = self.profile.inverse(chart)?;
        Ok(self.weight_at_height(r)?)
    }

    fn primitive_g(&self, x: &[f64], chart: f64) -> Result<f64, WeightError> {
        let Some(f) = &self.f else {
            return Ok(0.0);
        };
        let r = self.profile.inverse(chart)?;
        let sign = self.orientation.sign();
        integrate(
            |rho| Ok::<_, WeightError>(sign * self.weight_at_height(rho)? * f.eval(x, rho)?),
            self.anchor,
            r,
            1e-12,
        )
    }

    fn g_vanishes(&self) -> bool {
        self.f.as_ref().is_none_or(Expr::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse;

    fn cosh() -> Arc<WarpedProfile> {
        Arc::new(WarpedProfile::centered(parse("cosh(u)").unwrap(), (-2.0, 2.0)).unwrap())
    }

    #[test]
    fn expression_terms() {
        let f = ExprForcing::new(parse("-u").unwrap(), parse("sin(x1)").unwrap());
        let (h, g) = f.terms(&[std::f64::consts::FRAC_PI_2], 0.25).unwrap();
        assert_eq!(h, -0.25);
        assert_eq!(g, 1.0);
    }

    #[test]
    fn warped_terms_in_chart() {
        let p = cosh();
        let w = WarpedForcing::new(p.clone(), Some(parse("u").unwrap()), Orientation::Downward, 2, 0.0).unwrap();
        let chart = p.transform(0.5).unwrap();
        let (h, g) = w.terms(&[0.0, 0.0], chart).unwrap();
        assert!((h + 2.0 * 0.5f64.sinh()).abs() < 1e-9);
        assert!((g + 0.5 * 0.5f64.cosh()).abs() < 1e-9);
        assert!((w.s(chart).unwrap() - 0.5f64.cosh().powi(2)).abs() < 1e-9);
    }

    #[test]
    fn warped_weights_satisfy_their_odes() {
        let p = cosh();
        let w = WarpedForcing::new(p.clone(), Some(parse("0.2*sin(x1) - u").unwrap()), Orientation::Upward, 1, -1.0)
            .unwrap();
        let x = [0.7];
        let eps = 1e-5;
        for chart in [-0.5, 0.1, 0.6] {
            let ds = (w.s(chart + eps).unwrap() - w.s(chart - eps).unwrap()) / (2.0 * eps);
            let (h, g) = w.terms(&x, chart).unwrap();
            assert!((ds + h * w.s(chart).unwrap()).abs() < 1e-8);
            let dg = (w.primitive_g(&x, chart + eps).unwrap() - w.primitive_g(&x, chart - eps).unwrap()) / (2.0 * eps);
            assert!((dg - w.s(chart).unwrap() * g).abs() < 1e-8);
        }
    }
}
