//! Randomized invariants of the symbolic layer, the geometry and the config.

use proptest::prelude::*;

use mcflow::config::RunConfig;
use mcflow::symbolic::{
    check_theorem_conditions, parse, EnergyWeights, Expr, Func, Var, WarpedProfile, WeightPair, DEFAULT_U_SAMPLES,
};
use mcflow::torus::{area_element, gradient, integrate, mean_curvature, PeriodicGrid, ScalarField};

/// Smooth expressions in `x1`, `u` without singularities on `[-1, 1]²`.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-2.0..2.0f64).prop_map(Expr::constant),
        Just(Expr::u()),
        Just(Expr::x(0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), 0..4i32).prop_map(|(a, k)| Expr::pow(a, k)),
            (inner.clone(), prop::sample::select(vec![Func::Sin, Func::Cos, Func::Tanh]))
                .prop_map(|(a, f)| Expr::call(f, a)),
            // bounded arguments keep exp and log tame
            inner.clone().prop_map(|a| Expr::call(Func::Exp, Expr::call(Func::Sin, a))),
            inner.prop_map(|a| Expr::call(
                Func::Log,
                Expr::add(Expr::constant(2.0), Expr::call(Func::Cos, a))
            )),
        ]
    })
}

fn central_difference(f: impl Fn(f64) -> f64, u: f64, h: f64) -> f64 {
    (f(u + h) - f(u - h)) / (2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn derivative_matches_finite_difference(e in smooth_expr(), x in -1.0..1.0f64, u in -1.0..1.0f64) {
        let du = e.diff(Var::U).eval(&[x], u).unwrap();
        let fd = central_difference(|v| e.eval(&[x], v).unwrap(), u, 1e-5);
        prop_assert!((du - fd).abs() <= 1e-5 * (1.0 + fd.abs()), "d/du {e}: {du} vs {fd}");
        let dx = e.diff(Var::X(0)).eval(&[x], u).unwrap();
        let fd = central_difference(|y| e.eval(&[y], u).unwrap(), x, 1e-5);
        prop_assert!((dx - fd).abs() <= 1e-5 * (1.0 + fd.abs()), "d/dx1 {e}: {dx} vs {fd}");
    }

    #[test]
    fn display_then_parse_preserves_values(e in smooth_expr(), x in -1.0..1.0f64, u in -1.0..1.0f64) {
        let text = e.to_string();
        let back = parse(&text).unwrap();
        let (a, b) = (e.eval(&[x], u).unwrap(), back.eval(&[x], u).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{text}: {a} vs {b}");
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn chart_derivative_is_reciprocal_warping(
        c in 0.5..2.0f64,
        a in 0.0..1.0f64,
        k in -1.0..1.0f64,
        u in -0.9..0.9f64,
    ) {
        let phi = parse(&format!("{c} + {a}*u^2 + 0.2*sin({k}*u)")).unwrap();
        let p = WarpedProfile::centered(phi, (-1.0, 1.0)).unwrap();
        let dphi_chart = central_difference(|v| p.transform(v).unwrap(), u, 1e-5);
        prop_assert!((dphi_chart * p.phi(u).unwrap() - 1.0).abs() < 1e-7);
        let y = p.transform(u).unwrap();
        prop_assert!((p.inverse(y).unwrap() - u).abs() < 1e-10);
    }

    #[test]
    fn energy_weights_solve_their_odes(
        a in -2.0..2.0f64,
        b in -1.0..1.0f64,
        c in -1.0..1.0f64,
        d in -1.0..1.0f64,
        x in 0.0..6.28f64,
        u in -0.9..0.9f64,
    ) {
        let h = parse(&format!("{a}*u + {b}*sin(u)")).unwrap();
        let g = parse(&format!("{c}*sin(x1) + {d}*u")).unwrap();
        let w = WeightPair::build(h.clone(), g.clone(), (-1.0, 1.0), -1.0).unwrap();
        let s = w.s(u).unwrap();
        let ds = central_difference(|v| w.s(v).unwrap(), u, 1e-5);
        prop_assert!((ds + h.eval(&[x], u).unwrap() * s).abs() < 1e-6 * (1.0 + s.abs()));
        let dg = central_difference(|v| w.primitive_g(&[x], v).unwrap(), u, 1e-5);
        prop_assert!((dg - s * g.eval(&[x], u).unwrap()).abs() < 1e-6 * (1.0 + s.abs()));
        prop_assert!((w.s(-1.0).unwrap() - 1.0).abs() < 1e-14);
        prop_assert!(w.primitive_g(&[x], -1.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn raising_h_shifts_barrier_margins(k in 0.01..1.0f64, a in 0.1..2.0f64) {
        let grid = PeriodicGrid::circle(16).unwrap();
        let g = parse("0.3*sin(x1) - 0.5*u").unwrap();
        let h = parse(&format!("-{a}*u")).unwrap();
        let raised = parse(&format!("-{a}*u + {k}")).unwrap();
        let base = check_theorem_conditions(&h, &g, -1.0, 1.0, &grid, DEFAULT_U_SAMPLES).unwrap();
        let up = check_theorem_conditions(&raised, &g, -1.0, 1.0, &grid, DEFAULT_U_SAMPLES).unwrap();
        let m = |r: &mcflow::symbolic::ConditionReport, n: &str| r.entry(n).unwrap().margin;
        prop_assert!((m(&up, "lower_barrier") - m(&base, "lower_barrier") - k).abs() < 1e-12);
        prop_assert!((m(&base, "upper_barrier") - m(&up, "upper_barrier") - k).abs() < 1e-12);
        prop_assert_eq!(m(&up, "g_nonincreasing"), m(&base, "g_nonincreasing"));
    }
}

fn trig_field(grid: PeriodicGrid, coeffs: &[(f64, f64)], shift: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x| {
        shift
            + coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let m = (k + 1) as f64;
                    a * (m * x[0]).cos() + b * (m * x[0]).sin()
                })
                .sum::<f64>()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curvature_ignores_vertical_shifts(
        coeffs in prop::collection::vec((-0.3..0.3f64, -0.3..0.3f64), 1..4),
        shift in -5.0..5.0f64,
    ) {
        let grid = PeriodicGrid::circle(64).unwrap();
        let a = mean_curvature(&trig_field(grid, &coeffs, 0.0));
        let b = mean_curvature(&trig_field(grid, &coeffs, shift));
        prop_assert!(a.sup_distance(&b) < 1e-9);
    }

    #[test]
    fn area_element_is_at_least_one(coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..4)) {
        let u = trig_field(PeriodicGrid::circle(32).unwrap(), &coeffs, 0.0);
        prop_assert!(area_element(&gradient(&u)).min() >= 1.0);
    }

    #[test]
    fn closed_curve_curvature_integral_vanishes_at_second_order(
        coeffs in prop::collection::vec((-0.5..0.5f64, -0.5..0.5f64), 1..4),
    ) {
        // in one dimension Hω = (u'/ω)' integrates to zero; the discrete
        // integral is a truncation error and must shrink fourfold per refinement
        let total = |n: usize| {
            let u = trig_field(PeriodicGrid::circle(n).unwrap(), &coeffs, 0.0);
            let h = mean_curvature(&u);
            let omega = area_element(&gradient(&u));
            let prod: Vec<f64> = h.values().iter().zip(omega.values()).map(|(a, b)| a * b).collect();
            integrate(&ScalarField::new(*u.grid(), prod).unwrap())
        };
        let (coarse, fine) = (total(128), total(256));
        prop_assert!(fine.abs() <= 0.3 * coarse.abs() + 1e-12, "{coarse} -> {fine}");
    }
}

fn arb_config() -> impl Strategy<Value = RunConfig> {
    (
        1usize..=2,
        8usize..128,
        prop::option::of(0.05..1.0f64),
        prop::option::of(1e-12..1e-4f64),
        prop::option::of(1u64..500),
        -3.0..0.0f64,
        0.1..3.0f64,
        prop::sample::select(vec!["-u", "0", "sin(x1) - u^3", "0.5*tanh(u)"]),
    )
        .prop_map(|(dim, n, cfl, tol, stride, lo, width, h)| {
            let text = format!(
                "kind = \"product_flow\"\n[grid]\ndim = {dim}\nresolution = {res:?}\n\
                 [data]\nh = \"{h}\"\ng = \"0\"\nslab = [{lo:?}, {hi:?}]\nu_init = \"0\"\n",
                res = vec![n; dim],
                hi = lo + width,
            );
            let mut c = RunConfig::from_toml(&text, &[]).unwrap().config;
            c.integrator.cfl = cfl;
            c.integrator.tol = tol;
            c.integrator.stride = stride;
            c
        })
}

proptest! {
    #[test]
    fn config_survives_emit_and_reparse(c in arb_config()) {
        let back = RunConfig::from_toml(&c.to_toml(), &[]).unwrap().config;
        prop_assert_eq!(back, c);
    }
}

#[test]
fn curvature_integral_of_a_gentle_wave_is_below_tolerance() {
    // the defect grows like the cube of the amplitude: 0.3 sin + 0.2 cos 2x gives 1.3e-5
    let u = trig_field(PeriodicGrid::circle(256).unwrap(), &[(0.0, 0.1), (0.05, 0.0)], 0.0);
    let h = mean_curvature(&u);
    let omega = area_element(&gradient(&u));
    let prod: Vec<f64> = h.values().iter().zip(omega.values()).map(|(a, b)| a * b).collect();
    let total = integrate(&ScalarField::new(*u.grid(), prod).unwrap());
    assert!(total.abs() < 1e-6, "{total:e}");
}
