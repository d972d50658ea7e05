//! Discrete geometry of graphs over a flat torus.
//!
//! A [`PeriodicGrid`] samples `T^n` (`n` is 1 or 2) uniformly and carries a
//! constant flat metric `σ`. Because `σ` is constant, covariant derivatives
//! are coordinate partials and all Christoffel symbols vanish, so every
//! geometric quantity of a graph `{(x, u(x))}` in `T^n × ℝ` is an algebraic
//! function of the 2-jet `(u, u_i, u_ij)` at each node. The jet is formed
//! with second-order central differences and periodic indexing.

use std::f64::consts::TAU;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid dimension must be 1 or 2, got {0}")]
    Dimension(usize),
    #[error("expected {expected} {what} entries, got {got}")]
    EntryCount {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("resolution along axis {axis} is {value}; at least {min} nodes are required")]
    Resolution { axis: usize, value: usize, min: usize },
    #[error("period along axis {axis} must be positive and finite, got {value}")]
    Period { axis: usize, value: f64 },
    #[error("metric is not symmetric positive definite: {0}")]
    Metric(String),
    #[error("field has {got} values but the grid has {expected} nodes")]
    FieldLength { expected: usize, got: usize },
    #[error("non-finite field value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },
}

/// Constant flat metric `σ_ij` on `T^n` together with its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    dim: usize,
    cov: [[f64; 2]; 2],
    inv: [[f64; 2]; 2],
    sqrt_det: f64,
}

impl Metric {
    pub fn identity(dim: usize) -> Result<Self, GridError> {
        match dim {
            1 => Self::new(1, &[1.0]),
            2 => Self::new(2, &[1.0, 0.0, 0.0, 1.0]),
            d => Err(GridError::Dimension(d)),
        }
    }

    /// Builds `σ` from its `n × n` entries in row-major order.
    pub fn new(dim: usize, entries: &[f64]) -> Result<Self, GridError> {
        if dim != 1 && dim != 2 {
            return Err(GridError::Dimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(GridError::EntryCount {
                what: "metric",
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(GridError::Metric("entries must be finite".into()));
        }
        let mut cov = [[0.0; 2]; 2];
        let mut inv = [[0.0; 2]; 2];
        let det;
        if dim == 1 {
            let a = entries[0];
            if a <= 0.0 {
                return Err(GridError::Metric(format!("σ_11 = {a} is not positive")));
            }
            cov[0][0] = a;
            inv[0][0] = 1.0 / a;
            det = a;
        } else {
            let (a, b, c, d) = (entries[0], entries[1], entries[2], entries[3]);
            if b != c {
                return Err(GridError::Metric(format!("σ_12 = {b} differs from σ_21 = {c}")));
            }
            det = a * d - b * c;
            if a <= 0.0 || det <= 0.0 {
                return Err(GridError::Metric(format!(
                    "leading minors ({a}, {det}) must both be positive"
                )));
            }
            cov = [[a, b], [c, d]];
            inv = [[d / det, -b / det], [-c / det, a / det]];
        }
        Ok(Self {
            dim,
            cov,
            inv,
            sqrt_det: det.sqrt(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `σ_ij`.
    pub fn covariant(&self, i: usize, j: usize) -> f64 {
        self.cov[i][j]
    }

    /// `σ^ij`.
    pub fn inverse(&self, i: usize, j: usize) -> f64 {
        self.inv[i][j]
    }

    pub fn sqrt_det(&self) -> f64 {
        self.sqrt_det
    }

    /// Largest eigenvalue of `σ^{-1}`.
    pub fn max_inverse_eigenvalue(&self) -> f64 {
        if self.dim == 1 {
            return self.inv[0][0];
        }
        let (a, b, d) = (self.inv[0][0], self.inv[0][1], self.inv[1][1]);
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        mean + radius
    }

    /// Raises an index: `u^k = σ^{kl} u_l`.
    pub fn raise(&self, lower: [f64; 2]) -> [f64; 2] {
        let mut up = [0.0; 2];
        for (k, slot) in up.iter_mut().enumerate().take(self.dim) {
            for (l, val) in lower.iter().enumerate().take(self.dim) {
                *slot += self.inv[k][l] * val;
            }
        }
        up
    }

    /// `|Du|² = σ^{kl} u_k u_l`.
    pub fn norm_sq(&self, lower: [f64; 2]) -> f64 {
        let up = self.raise(lower);
        (0..self.dim).map(|k| up[k] * lower[k]).sum()
    }
}

/// Uniform periodic sampling of a flat torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    dim: usize,
    resolution: [usize; 2],
    period: [f64; 2],
    metric: Metric,
}

impl PeriodicGrid {
    pub const MIN_RESOLUTION: usize = 8;

    pub fn new(resolution: &[usize], period: &[f64], metric: Metric) -> Result<Self, GridError> {
        let dim = metric.dim();
        if resolution.len() != dim {
            return Err(GridError::EntryCount {
                what: "resolution",
                expected: dim,
                got: resolution.len(),
            });
        }
        if period.len() != dim {
            return Err(GridError::EntryCount {
                what: "period",
                expected: dim,
                got: period.len(),
            });
        }
        let mut res = [1usize; 2];
        let mut per = [1.0; 2];
        for axis in 0..dim {
            if resolution[axis] < Self::MIN_RESOLUTION {
                return Err(GridError::Resolution {
                    axis,
                    value: resolution[axis],
                    min: Self::MIN_RESOLUTION,
                });
            }
            if !(period[axis].is_finite() && period[axis] > 0.0) {
                return Err(GridError::Period {
                    axis,
                    value: period[axis],
                });
            }
            res[axis] = resolution[axis];
            per[axis] = period[axis];
        }
        Ok(Self {
            dim,
            resolution: res,
            period: per,
            metric,
        })
    }

    /// `T¹ = ℝ / 2πℤ` with the standard metric.
    pub fn circle(resolution: usize) -> Result<Self, GridError> {
        Self::new(&[resolution], &[TAU], Metric::identity(1)?)
    }

    /// `T² = ℝ² / (2πℤ)²` with the standard metric.
    pub fn square_torus(n0: usize, n1: usize) -> Result<Self, GridError> {
        Self::new(&[n0, n1], &[TAU, TAU], Metric::identity(2)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn resolution(&self, axis: usize) -> usize {
        self.resolution[axis]
    }

    pub fn period(&self, axis: usize) -> f64 {
        self.period[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.period[axis] / self.resolution[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim)
            .map(|a| self.spacing(a))
            .fold(f64::INFINITY, f64::min)
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.resolution[..self.dim].iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Product of spacings times `√det σ`.
    pub fn quadrature_weight(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product::<f64>() * self.metric.sqrt_det()
    }

    /// Multi-index of a node; the last axis varies fastest.
    pub fn multi_index(&self, node: usize) -> [usize; 2] {
        if self.dim == 1 {
            [node, 0]
        } else {
            [node / self.resolution[1], node % self.resolution[1]]
        }
    }

    fn flat(&self, idx: [usize; 2]) -> usize {
        if self.dim == 1 {
            idx[0]
        } else {
            idx[0] * self.resolution[1] + idx[1]
        }
    }

    /// Node coordinates; unused trailing components are zero.
    pub fn coords(&self, node: usize) -> [f64; 2] {
        let idx = self.multi_index(node);
        let mut x = [0.0; 2];
        for axis in 0..self.dim {
            x[axis] = idx[axis] as f64 * self.spacing(axis);
        }
        x
    }

    fn shift(&self, idx: [usize; 2], axis: usize, offset: isize) -> [usize; 2] {
        let n = self.resolution[axis] as isize;
        let mut out = idx;
        out[axis] = (idx[axis] as isize + offset).rem_euclid(n) as usize;
        out
    }

    /// Second-order central 2-jet of `values` at `node`.
    pub fn jet(&self, values: &[f64], node: usize) -> Jet {
        let idx = self.multi_index(node);
        let center = values[node];
        let mut grad = [0.0; 2];
        let mut hess = [[0.0; 2]; 2];
        for axis in 0..self.dim {
            let h = self.spacing(axis);
            let plus = values[self.flat(self.shift(idx, axis, 1))];
            let minus = values[self.flat(self.shift(idx, axis, -1))];
            grad[axis] = (plus - minus) / (2.0 * h);
            hess[axis][axis] = (plus - 2.0 * center + minus) / (h * h);
        }
        if self.dim == 2 {
            let (h0, h1) = (self.spacing(0), self.spacing(1));
            let at = |o0: isize, o1: isize| {
                let shifted = self.shift(self.shift(idx, 0, o0), 1, o1);
                values[self.flat(shifted)]
            };
            let mixed = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h0 * h1);
            hess[0][1] = mixed;
            hess[1][0] = mixed;
        }
        Jet {
            value: center,
            grad,
            hess,
        }
    }
}

/// Value, covariant gradient `u_i` and Hessian `u_ij` at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

/// Grid-sampled real function, one finite value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: PeriodicGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::FieldLength {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(GridError::NonFinite { node, value });
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: PeriodicGrid, value: f64) -> Result<Self, GridError> {
        Self::new(grid, vec![value; grid.len()])
    }

    /// Samples `f` at the node coordinates (`x[..dim]`).
    pub fn from_fn(grid: PeriodicGrid, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self, GridError> {
        let values = (0..grid.len())
            .map(|node| f(&grid.coords(node)[..grid.dim()]))
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn jet(&self, node: usize) -> Jet {
        self.grid.jet(&self.values, node)
    }

    /// `sup |self − other|`; both fields must live on the same grid.
    pub fn sup_distance(&self, other: &ScalarField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Covariant gradient components `u_i` per node.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    grid: PeriodicGrid,
    comps: Vec<[f64; 2]>,
}

impl GradientField {
    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn at(&self, node: usize) -> [f64; 2] {
        self.comps[node]
    }

    /// `u^k = σ^{kl} u_l`.
    pub fn contravariant(&self, node: usize) -> [f64; 2] {
        self.grid.metric().raise(self.comps[node])
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// Builds a field from explicit per-node components.
    pub fn from_components(grid: PeriodicGrid, comps: Vec<[f64; 2]>) -> Result<Self, GridError> {
        if comps.len() != grid.len() {
            return Err(GridError::FieldLength {
                expected: grid.len(),
                got: comps.len(),
            });
        }
        Ok(Self { grid, comps })
    }
}

/// Symmetric Hessian `u_ij` per node.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianField {
    grid: PeriodicGrid,
    comps: Vec<[[f64; 2]; 2]>,
}

impl HessianField {
    pub fn at(&self, node: usize) -> [[f64; 2]; 2] {
        self.comps[node]
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }
}

pub fn gradient(u: &ScalarField) -> GradientField {
    let comps = (0..u.len()).map(|node| u.jet(node).grad).collect();
    GradientField {
        grid: u.grid,
        comps,
    }
}

pub fn hessian(u: &ScalarField) -> HessianField {
    let comps = (0..u.len()).map(|node| u.jet(node).hess).collect();
    HessianField {
        grid: u.grid,
        comps,
    }
}

/// `ω = √(1 + σ^{kl} u_k u_l)`.
pub fn area_element_at(metric: &Metric, du: [f64; 2]) -> f64 {
    (1.0 + metric.norm_sq(du)).sqrt()
}

/// `g^{ij} = σ^{ij} − u^i u^j / ω²`.
pub fn induced_inverse_metric_at(metric: &Metric, du: [f64; 2]) -> [[f64; 2]; 2] {
    let up = metric.raise(du);
    let omega_sq = 1.0 + metric.norm_sq(du);
    let mut g = [[0.0; 2]; 2];
    for i in 0..metric.dim() {
        for j in 0..metric.dim() {
            g[i][j] = metric.inverse(i, j) - up[i] * up[j] / omega_sq;
        }
    }
    g
}

/// Contraction `a^{ij} b_{ij}` over the active dimensions.
pub(crate) fn contract(dim: usize, a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> f64 {
    let mut acc = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            acc += a[i][j] * b[i][j];
        }
    }
    acc
}

/// `H = (1/ω) g^{ij} u_ij` (downward normal).
pub fn mean_curvature_at(metric: &Metric, jet: &Jet) -> f64 {
    let omega = area_element_at(metric, jet.grad);
    let ginv = induced_inverse_metric_at(metric, jet.grad);
    contract(metric.dim(), &ginv, &jet.hess) / omega
}

/// `|A|² = g^{il} g^{kj} u_kl u_ij / ω²`.
pub fn second_form_norm_at(metric: &Metric, jet: &Jet) -> f64 {
    let n = metric.dim();
    let omega_sq = 1.0 + metric.norm_sq(jet.grad);
    let g = induced_inverse_metric_at(metric, jet.grad);
    // Mixed tensor A^i_j = g^{ik} u_kj; |A|² = tr(A A).
    let mut mixed = [[0.0; 2]; 2];
    for i in 0..n {
        for j in 0..n {
            mixed[i][j] = (0..n).map(|k| g[i][k] * jet.hess[k][j]).sum();
        }
    }
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += mixed[i][j] * mixed[j][i];
        }
    }
    acc / omega_sq
}

pub fn area_element(du: &GradientField) -> ScalarField {
    let metric = *du.grid.metric();
    let values = du.comps.iter().map(|&d| area_element_at(&metric, d)).collect();
    ScalarField {
        grid: du.grid,
        values,
    }
}

pub fn induced_inverse_metric(du: &GradientField) -> Vec<[[f64; 2]; 2]> {
    let metric = *du.grid.metric();
    du.comps
        .iter()
        .map(|&d| induced_inverse_metric_at(&metric, d))
        .collect()
}

pub fn mean_curvature(u: &ScalarField) -> ScalarField {
    let metric = *u.grid.metric();
    let values = (0..u.len())
        .map(|node| mean_curvature_at(&metric, &u.jet(node)))
        .collect();
    ScalarField {
        grid: u.grid,
        values,
    }
}

pub fn second_form_norm(u: &ScalarField) -> ScalarField {
    let metric = *u.grid.metric();
    let values = (0..u.len())
        .map(|node| second_form_norm_at(&metric, &u.jet(node)))
        .collect();
    ScalarField {
        grid: u.grid,
        values,
    }
}

/// Periodic trapezoid rule: `Σ f · (Π h_a) · √det σ`.
pub fn integrate(f: &ScalarField) -> f64 {
    f.values.iter().sum::<f64>() * f.grid.quadrature_weight()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn circle(n: usize) -> PeriodicGrid {
        PeriodicGrid::circle(n).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            PeriodicGrid::circle(4),
            Err(GridError::Resolution { .. })
        ));
        assert!(matches!(Metric::new(3, &[1.0; 9]), Err(GridError::Dimension(3))));
        assert!(matches!(
            Metric::new(2, &[1.0, 0.5, 0.4, 1.0]),
            Err(GridError::Metric(_))
        ));
        assert!(matches!(
            Metric::new(2, &[1.0, 2.0, 2.0, 1.0]),
            Err(GridError::Metric(_))
        ));
        assert!(matches!(Metric::new(1, &[-1.0]), Err(GridError::Metric(_))));
        let m = Metric::identity(1).unwrap();
        assert!(matches!(
            PeriodicGrid::new(&[16], &[0.0], m),
            Err(GridError::Period { .. })
        ));
    }

    #[test]
    fn field_rejects_non_finite() {
        let g = circle(8);
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(matches!(
            ScalarField::new(g, v),
            Err(GridError::NonFinite { node: 3, .. })
        ));
        assert!(ScalarField::new(g, vec![0.0; 7]).is_err());
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        let g = PeriodicGrid::square_torus(12, 10).unwrap();
        let u = ScalarField::constant(g, 3.0).unwrap();
        let du = gradient(&u);
        let d2u = hessian(&u);
        for node in 0..u.len() {
            assert_eq!(du.at(node), [0.0, 0.0]);
            assert_eq!(d2u.at(node), [[0.0; 2]; 2]);
        }
        assert!(mean_curvature(&u).values().iter().all(|&h| h == 0.0));
        assert!(second_form_norm(&u).values().iter().all(|&a| a == 0.0));
        assert!(area_element(&du).values().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn sine_gradient_error_below_bound() {
        let g = circle(256);
        let u = ScalarField::from_fn(g, |x| x[0].sin()).unwrap();
        let du = gradient(&u);
        let err = (0..u.len())
            .map(|n| (du.at(n)[0] - g.coords(n)[0].cos()).abs())
            .fold(0.0, f64::max);
        let h = g.spacing(0);
        assert!(err <= 1.001 * h * h / 6.0, "{err}");
    }

    #[test]
    fn separable_field_has_exactly_zero_cross_gradient() {
        let g = PeriodicGrid::square_torus(16, 16).unwrap();
        let u = ScalarField::from_fn(g, |x| x[0].sin()).unwrap();
        let du = gradient(&u);
        let d2u = hessian(&u);
        for node in 0..u.len() {
            assert_eq!(du.at(node)[1], 0.0);
            assert_eq!(d2u.at(node)[0][1], 0.0);
        }
    }

    #[test]
    fn hessian_is_symmetric_and_accurate() {
        let g = PeriodicGrid::square_torus(128, 128).unwrap();
        let u = ScalarField::from_fn(g, |x| x[0].sin() * x[1].sin()).unwrap();
        let d2u = hessian(&u);
        let mut err = 0.0f64;
        for node in 0..u.len() {
            let h = d2u.at(node);
            assert_eq!(h[0][1], h[1][0]);
            let x = g.coords(node);
            err = err.max((h[0][1] - x[0].cos() * x[1].cos()).abs());
        }
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn area_element_examples() {
        let id = Metric::identity(2).unwrap();
        assert_eq!(area_element_at(&id, [0.0, 0.0]), 1.0);
        assert!((area_element_at(&id, [3.0, 4.0]) - 26f64.sqrt()).abs() < 1e-15);
        let sigma = Metric::new(2, &[4.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((sigma.norm_sq([1.0, 0.0]) - 0.25).abs() < 1e-15);
        assert!((area_element_at(&sigma, [1.0, 0.0]) - 1.25f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn inverse_metric_examples() {
        let one = Metric::identity(1).unwrap();
        assert_eq!(induced_inverse_metric_at(&one, [0.0, 0.0])[0][0], 1.0);
        assert!((induced_inverse_metric_at(&one, [1.0, 0.0])[0][0] - 0.5).abs() < 1e-15);
        let sigma = Metric::new(2, &[2.0, 0.3, 0.3, 0.7]).unwrap();
        let ginv = induced_inverse_metric_at(&sigma, [0.0, 0.0]);
        for i in 0..2 {
            for j in 0..2 {
                assert!((ginv[i][j] - sigma.inverse(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn one_dimensional_curvature_at_crest() {
        let g = circle(256);
        let u = ScalarField::from_fn(g, |x| x[0].sin()).unwrap();
        let h = mean_curvature(&u);
        // Node 64 sits at π/2.
        assert!((g.coords(64)[0] - FRAC_PI_2).abs() < 1e-14);
        assert!((h.values()[64] + 1.0).abs() < 1e-4);
        let a2 = second_form_norm(&u);
        for (a, h) in a2.values().iter().zip(h.values()) {
            assert!((a - h * h).abs() < 1e-12);
        }
    }

    #[test]
    fn integrate_examples() {
        let g = circle(64);
        let one = ScalarField::constant(g, 1.0).unwrap();
        assert!((integrate(&one) - 2.0 * PI).abs() < 1e-13);
        let s2 = ScalarField::from_fn(g, |x| x[0].sin().powi(2)).unwrap();
        assert!((integrate(&s2) - PI).abs() < 1e-10);
        let sigma = Metric::new(2, &[4.0, 0.0, 0.0, 1.0]).unwrap();
        let g2 = PeriodicGrid::new(&[16, 16], &[TAU, TAU], sigma).unwrap();
        let one2 = ScalarField::constant(g2, 1.0).unwrap();
        assert!((integrate(&one2) - 2.0 * TAU * TAU).abs() < 1e-12);
    }

    #[test]
    fn max_inverse_eigenvalue_of_diagonal_metric() {
        let sigma = Metric::new(2, &[4.0, 0.0, 0.0, 0.5]).unwrap();
        assert!((sigma.max_inverse_eigenvalue() - 2.0).abs() < 1e-15);
    }
}
