use thiserror::Error;

use super::expr::{EvalError, Expr, Var};
use super::profile::ProfileError;
use super::quadrature::{integrate, PrimitiveTable};

/// Absolute tolerance of the per-node quadrature behind `G`.
const PRIMITIVE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error(
        "energy weight requires h to depend on u alone (the convergence argument needs h = h(u)), found `{0}`"
    )]
    SpatialH(String),
    #[error("invalid weight interval [{lo}, {hi}] with anchor {anchor}")]
    Interval { lo: f64, hi: f64, anchor: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Weights of the energy `E = ∫ (s(u) ω − G(x, u))`.
///
/// `s` solves `s′ = −h s`, `s(anchor) = 1`, and `∂_u G = s g`,
/// `G(x, anchor) = 0`.
pub trait EnergyWeights {
    fn s(&self, u: f64) -> Result<f64, WeightError>;
    fn primitive_g(&self, x: &[f64], u: f64) -> Result<f64, WeightError>;

    /// True when `G ≡ 0`; lets callers skip the per-node quadrature.
    fn g_vanishes(&self) -> bool {
        false
    }
}

/// Weights built from expression data `h(u)` and `g(x, u)`.
///
/// `∫h` is tabulated on the declared interval; heights outside it fall back
/// to direct quadrature from the anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPair {
    h: Expr,
    g: Expr,
    anchor: f64,
    h_primitive: PrimitiveTable,
}

impl WeightPair {
    pub fn build(h: Expr, g: Expr, interval: (f64, f64), anchor: f64) -> Result<Self, WeightError> {
        let (lo, hi) = interval;
        if h.depends_on_x() {
            return Err(WeightError::SpatialH(h.to_string()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi && (lo..=hi).contains(&anchor)) {
            return Err(WeightError::Interval { lo, hi, anchor });
        }
        let dh = h.diff(Var::U);
        let h_primitive = PrimitiveTable::build(
            lo,
            hi,
            anchor,
            |u| h.eval(&[], u),
            |u| dh.eval(&[], u),
        )?;
        Ok(Self {
            h,
            g,
            anchor,
            h_primitive,
        })
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    fn h_integral(&self, u: f64) -> Result<f64, WeightError> {
        match self.h_primitive.value(u) {
            Some(v) => Ok(v),
            None => Ok(integrate(|t| self.h.eval(&[], t), self.anchor, u, PRIMITIVE_TOL)?),
        }
    }
}

impl EnergyWeights for WeightPair {
    fn s(&self, u: f64) -> Result<f64, WeightError> {
        Ok((-self.h_integral(u)?).exp())
    }

    fn primitive_g(&self, x: &[f64], u: f64) -> Result<f64, WeightError> {
        if self.g.is_zero() {
            return Ok(0.0);
        }
        integrate(
            |t| Ok::<_, WeightError>(self.s(t)? * self.g.eval(x, t)?),
            self.anchor,
            u,
            PRIMITIVE_TOL,
        )
    }

    fn g_vanishes(&self) -> bool {
        self.g.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse;

    #[test]
    fn zero_data_gives_unit_weights() {
        let w = WeightPair::build(Expr::Const(0.0), Expr::Const(0.0), (-1.0, 1.0), -1.0).unwrap();
        assert_eq!(w.s(0.3).unwrap(), 1.0);
        assert_eq!(w.primitive_g(&[0.1], 0.3).unwrap(), 0.0);
        assert!(w.g_vanishes());
    }

    #[test]
    fn constant_h_is_exponential() {
        let w = WeightPair::build(Expr::Const(1.0), Expr::Const(0.0), (-1.0, 2.0), 0.0).unwrap();
        assert!((w.s(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-13);
        // outside the table: direct quadrature
        assert!((w.s(3.0).unwrap() - (-3.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn primitive_of_sg() {
        // h = -u: s = e^{u²/2}; g = 1: G(u) = ∫_0^u e^{τ²/2} dτ.
        let w = WeightPair::build(parse("-u").unwrap(), Expr::Const(1.0), (-1.0, 1.0), 0.0).unwrap();
        let reference: f64 = (0..200_000)
            .map(|k| {
                let t = 0.5 * (k as f64 + 0.5) / 200_000.0;
                (0.5 * t * t).exp()
            })
            .sum::<f64>()
            * 0.5
            / 200_000.0;
        assert!((w.primitive_g(&[0.0], 0.5).unwrap() - reference).abs() < 1e-10);
    }

    #[test]
    fn spatial_h_is_rejected() {
        let err = WeightPair::build(parse("sin(x1) - u").unwrap(), Expr::Const(0.0), (-1.0, 1.0), 0.0)
            .unwrap_err();
        assert!(matches!(err, WeightError::SpatialH(_)));
        assert!(err.to_string().contains("h = h(u)"));
    }
}
