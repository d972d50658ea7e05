use super::rhs::Equation;
use crate::symbolic::{EnergyWeights, WeightError};
use crate::torus::{area_element_at, ScalarField};

/// `E = ∫ (s(u) ω − G(x, u))`.
pub fn energy(u: &ScalarField, weights: &dyn EnergyWeights) -> Result<f64, WeightError> {
    let grid = u.grid();
    let metric = grid.metric();
    let skip_g = weights.g_vanishes();
    let mut acc = 0.0;
    for node in 0..u.len() {
        let jet = u.jet(node);
        let omega = area_element_at(metric, jet.grad);
        let mut e = weights.s(jet.value)? * omega;
        if !skip_g {
            let c = grid.coords(node);
            e -= weights.primitive_g(&c[..grid.dim()], jet.value)?;
        }
        acc += e;
    }
    Ok(acc * grid.quadrature_weight())
}

/// `D = ∫ s(u) u_t P / ω` where `P = u_t / mobility` is the quasilinear
/// operator; `∫ s u_t²/ω` for the product flow and `∫ s u_t²` for the
/// weighted flow. Along either flow `dE/dt = −D`.
pub fn dissipation(
    equation: Equation,
    u: &ScalarField,
    u_t: &[f64],
    weights: &dyn EnergyWeights,
) -> Result<f64, WeightError> {
    let metric = u.grid().metric();
    let mut acc = 0.0;
    for (node, &rate) in u_t.iter().enumerate() {
        let jet = u.jet(node);
        let omega = area_element_at(metric, jet.grad);
        acc += weights.s(jet.value)? * rate * rate / (equation.mobility(omega) * omega);
    }
    Ok(acc * u.grid().quadrature_weight())
}

/// [`dissipation`] from cached nodal values, rates and area elements.
pub(crate) fn dissipation_cached(
    equation: Equation,
    values: &[f64],
    u_t: &[f64],
    omega: &[f64],
    quadrature_weight: f64,
    weights: &dyn EnergyWeights,
) -> Result<f64, WeightError> {
    let mut acc = 0.0;
    for ((&u, &rate), &w) in values.iter().zip(u_t).zip(omega) {
        acc += weights.s(u)? * rate * rate / (equation.mobility(w) * w);
    }
    Ok(acc * quadrature_weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::rhs::rhs_product;
    use crate::symbolic::{parse, Expr, WeightPair};
    use crate::torus::PeriodicGrid;
    use std::f64::consts::TAU;

    #[test]
    fn flat_graph_energy_is_area() {
        let grid = PeriodicGrid::circle(64).unwrap();
        let u = ScalarField::constant(grid, 0.2).unwrap();
        let w = WeightPair::build(Expr::Const(0.0), Expr::Const(0.0), (-1.0, 1.0), -1.0).unwrap();
        assert!((energy(&u, &w).unwrap() - TAU).abs() < 1e-12);
        assert_eq!(dissipation(Equation::Product, &u, &[0.0; 64], &w).unwrap(), 0.0);
    }

    #[test]
    fn constant_field_dissipation() {
        let grid = PeriodicGrid::circle(64).unwrap();
        let c = 0.4;
        let u = ScalarField::constant(grid, c).unwrap();
        let h = parse("-u").unwrap();
        let g = parse("0.1*sin(x1)").unwrap();
        let w = WeightPair::build(h.clone(), g.clone(), (-1.0, 1.0), -1.0).unwrap();
        let ut = rhs_product(&u, &h, &g).unwrap();
        let d = dissipation(Equation::Product, &u, ut.values(), &w).unwrap();
        let s = w.s(c).unwrap();
        let expected: f64 = (0..64)
            .map(|n| {
                let r = -c + 0.1 * grid.coords(n)[0].sin();
                s * r * r
            })
            .sum::<f64>()
            * grid.quadrature_weight();
        assert!((d - expected).abs() < 1e-12);
    }
}
