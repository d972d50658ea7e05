use serde::{Deserialize, Serialize};

use super::forcing::{ExprForcing, Forcing, WarpedForcing};
use super::FlowError;
use crate::symbolic::{Expr, ProfileError, WarpedProfile};
use crate::torus::{area_element_at, contract, induced_inverse_metric_at, PeriodicGrid, ScalarField};

/// Parabolic equation advanced by the integrator.
///
/// Both share the quasilinear operator `P = g^{ij} u_ij + h + g ω`:
/// `Product` evolves `u_t = P` and `Weighted` evolves `u_t = P / ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Product,
    Weighted,
}

impl Equation {
    /// Factor multiplying `P` in `u_t`.
    pub fn mobility(self, omega: f64) -> f64 {
        match self {
            Equation::Product => 1.0,
            Equation::Weighted => 1.0 / omega,
        }
    }
}

/// Right-hand side at every node together with `ω`.
pub(crate) fn evaluate_into(
    equation: Equation,
    forcing: &dyn Forcing,
    grid: &PeriodicGrid,
    values: &[f64],
    rhs: &mut [f64],
    omega: &mut [f64],
) -> Result<(), FlowError> {
    let metric = *grid.metric();
    let dim = grid.dim();
    for node in 0..values.len() {
        let jet = grid.jet(values, node);
        let w = area_element_at(&metric, jet.grad);
        let ginv = induced_inverse_metric_at(&metric, jet.grad);
        let c = grid.coords(node);
        let (h, g) = forcing
            .terms(&c[..dim], jet.value)
            .map_err(|source| FlowError::Forcing {
                node,
                x: c[..dim].to_vec(),
                u: jet.value,
                source,
            })?;
        rhs[node] = equation.mobility(w) * (contract(dim, &ginv, &jet.hess) + h + g * w);
        omega[node] = w;
    }
    Ok(())
}

pub fn evaluate_rhs(equation: Equation, forcing: &dyn Forcing, field: &ScalarField) -> Result<ScalarField, FlowError> {
    let mut rhs = vec![0.0; field.len()];
    let mut omega = vec![0.0; field.len()];
    evaluate_into(equation, forcing, field.grid(), field.values(), &mut rhs, &mut omega)?;
    Ok(ScalarField::new(*field.grid(), rhs)?)
}

/// `g^{ij} u_ij + h(x, u) + g(x, u) ω`.
pub fn rhs_product(u: &ScalarField, h: &Expr, g: &Expr) -> Result<ScalarField, FlowError> {
    evaluate_rhs(Equation::Product, &ExprForcing::new(h.clone(), g.clone()), u)
}

/// `(1/ω) g^{ij} 𝜑_ij − n φ′(Φ⁻¹(𝜑)) / ω` for a chart field `𝜑`.
pub fn rhs_weighted(chart: &ScalarField, profile: &WarpedProfile) -> Result<ScalarField, FlowError> {
    let forcing = weighted_forcing(profile, chart.grid().dim())?;
    evaluate_rhs(Equation::Weighted, &forcing, chart)
}

pub(crate) fn weighted_forcing(profile: &WarpedProfile, dim: usize) -> Result<WarpedForcing, ProfileError> {
    WarpedForcing::new(
        std::sync::Arc::new(profile.clone()),
        None,
        super::forcing::Orientation::Downward,
        dim,
        profile.anchor(),
    )
}
