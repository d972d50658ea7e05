use thiserror::Error;

use super::expr::{EvalError, Expr, Var};
use super::quadrature::PrimitiveTable;

/// Minimum number of positivity samples taken over the declared domain.
pub const POSITIVITY_SAMPLES: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("warp profile must depend on `u` only, found `{0}`")]
    NotUnivariate(String),
    #[error("invalid domain [{lo}, {hi}] with anchor {anchor}")]
    Domain { lo: f64, hi: f64, anchor: f64 },
    #[error("warp profile is not positive: φ({u}) = {value}")]
    NonPositive { u: f64, value: f64 },
    #[error("height {u} lies outside the profile domain [{lo}, {hi}]")]
    OutsideDomain { u: f64, lo: f64, hi: f64 },
    #[error("transformed height {value} lies outside the chart [{lo}, {hi}]")]
    OutsideChart { value: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Warp function `φ(u) > 0` on a declared interval together with its
/// derivatives and the height transform `Φ` (`Φ′ = 1/φ`, `Φ(anchor) = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedProfile {
    phi: Expr,
    dphi: Expr,
    d2phi: Expr,
    lo: f64,
    hi: f64,
    anchor: f64,
    transform: PrimitiveTable,
}

impl WarpedProfile {
    /// Validates `φ` on `[lo, hi]` and tabulates `Φ`.
    pub fn build(phi: Expr, domain: (f64, f64), anchor: f64) -> Result<Self, ProfileError> {
        let (lo, hi) = domain;
        if phi.depends_on_x() {
            return Err(ProfileError::NotUnivariate(phi.to_string()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi && anchor >= lo && anchor <= hi) {
            return Err(ProfileError::Domain { lo, hi, anchor });
        }
        for k in 0..=POSITIVITY_SAMPLES {
            let u = lo + (hi - lo) * k as f64 / POSITIVITY_SAMPLES as f64;
            let value = phi.eval(&[], u)?;
            if value <= 0.0 {
                return Err(ProfileError::NonPositive { u, value });
            }
        }
        let dphi = phi.diff(Var::U);
        let d2phi = dphi.diff(Var::U);
        let transform = PrimitiveTable::build(
            lo,
            hi,
            anchor,
            |u| {
                let p = phi.eval(&[], u)?;
                if p <= 0.0 {
                    return Err(ProfileError::NonPositive { u, value: p });
                }
                Ok(1.0 / p)
            },
            |u| {
                let p = phi.eval(&[], u)?;
                Ok(-dphi.eval(&[], u)? / (p * p))
            },
        )?;
        Ok(Self {
            phi,
            dphi,
            d2phi,
            lo,
            hi,
            anchor,
            transform,
        })
    }

    /// Anchors `Φ` at the midpoint of the domain.
    pub fn centered(phi: Expr, domain: (f64, f64)) -> Result<Self, ProfileError> {
        Self::build(phi, domain, 0.5 * (domain.0 + domain.1))
    }

    pub fn expr(&self) -> &Expr {
        &self.phi
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn contains(&self, u: f64) -> bool {
        u >= self.lo && u <= self.hi
    }

    pub fn phi(&self, u: f64) -> Result<f64, ProfileError> {
        Ok(self.phi.eval(&[], u)?)
    }

    pub fn dphi(&self, u: f64) -> Result<f64, ProfileError> {
        Ok(self.dphi.eval(&[], u)?)
    }

    pub fn d2phi(&self, u: f64) -> Result<f64, ProfileError> {
        Ok(self.d2phi.eval(&[], u)?)
    }

    /// `Φ(u)`.
    pub fn transform(&self, u: f64) -> Result<f64, ProfileError> {
        self.transform.value(u).ok_or(ProfileError::OutsideDomain {
            u,
            lo: self.lo,
            hi: self.hi,
        })
    }

    /// `Φ⁻¹(value)`.
    pub fn inverse(&self, value: f64) -> Result<f64, ProfileError> {
        self.transform.inverse(value).ok_or_else(|| {
            let (lo, hi) = self.transform.range();
            ProfileError::OutsideChart { value, lo, hi }
        })
    }

    /// `[Φ(lo), Φ(hi)]`.
    pub fn chart(&self) -> (f64, f64) {
        self.transform.range()
    }

    /// True when `φ` is a constant expression (product-manifold degeneracy).
    pub fn is_constant(&self) -> bool {
        !self.phi.depends_on_u()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse;

    fn gd(u: f64) -> f64 {
        2.0 * (0.5 * u).tanh().atan()
    }

    #[test]
    fn unit_profile_is_translation() {
        let p = WarpedProfile::build(Expr::Const(1.0), (-2.0, 2.0), 0.5).unwrap();
        for u in [-2.0, -0.3, 0.5, 1.9] {
            assert!((p.transform(u).unwrap() - (u - 0.5)).abs() < 1e-13);
        }
        assert!(p.is_constant());
    }

    #[test]
    fn cosh_profile_matches_gudermannian() {
        let p = WarpedProfile::build(parse("cosh(u)").unwrap(), (-1.0, 1.0), 0.0).unwrap();
        assert!((p.transform(1.0).unwrap() - 0.8657694832396586).abs() < 1e-10);
        assert!((gd(1.0) - 0.8657694832396586).abs() < 1e-15);
        let back = p.inverse(p.transform(0.7).unwrap()).unwrap();
        assert!((back - 0.7).abs() < 1e-10);
        assert_eq!(p.chart().0, p.transform(-1.0).unwrap());
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(matches!(
            WarpedProfile::build(parse("u").unwrap(), (-1.0, 1.0), 0.0),
            Err(ProfileError::NonPositive { .. })
        ));
        assert!(matches!(
            WarpedProfile::build(parse("1 + x1^2").unwrap(), (-1.0, 1.0), 0.0),
            Err(ProfileError::NotUnivariate(_))
        ));
        assert!(matches!(
            WarpedProfile::build(parse("cosh(u)").unwrap(), (1.0, -1.0), 0.0),
            Err(ProfileError::Domain { .. })
        ));
    }

    #[test]
    fn outside_queries_fail() {
        let p = WarpedProfile::centered(parse("cosh(u)").unwrap(), (-1.0, 1.0)).unwrap();
        assert!(matches!(p.transform(1.5), Err(ProfileError::OutsideDomain { .. })));
        assert!(matches!(p.inverse(2.0), Err(ProfileError::OutsideChart { .. })));
    }
}
