//! Adaptive Gauss–Kronrod quadrature and tabulated primitives.

const GK_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<E>(f: &mut impl FnMut(f64) -> Result<f64, E>, a: f64, b: f64) -> Result<(f64, f64), E> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * KRONROD_WEIGHTS[7];
    let mut gauss = fc * GAUSS_WEIGHTS[3];
    for j in 0..7 {
        let dx = half * GK_NODES[j];
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += KRONROD_WEIGHTS[j] * pair;
        if j % 2 == 1 {
            gauss += GAUSS_WEIGHTS[j / 2] * pair;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// `∫_a^b f` by recursive bisection of 15-point Gauss–Kronrod panels.
///
/// Panels are accepted once their Kronrod–Gauss difference falls below
/// the share of `abs_tol` proportional to their length. Reversed limits
/// give the negated integral.
pub fn integrate<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<f64, E> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, abs_tol).map(|v| -v);
    }
    let total = b - a;
    let mut stack = vec![(a, b, 0u32)];
    let mut sum = 0.0;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = gk15(&mut f, lo, hi)?;
        let budget = abs_tol * (hi - lo) / total;
        if err <= budget.max(1e-15 * value.abs()) || depth >= 48 {
            sum += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Ok(sum)
}

/// Primitive `F(u) = ∫_anchor^u f` tabulated on a uniform partition of
/// `[lo, hi]` and interpolated with quintic Hermite pieces built from
/// `F`, `F′ = f` and `F″ = f′` at the breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveTable {
    lo: f64,
    hi: f64,
    step: f64,
    value: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

/// Largest interpolation defect accepted at piece midpoints.
const TABLE_TOL: f64 = 1e-13;
const MIN_PIECES: usize = 64;
const MAX_PIECES: usize = 1 << 16;

impl PrimitiveTable {
    pub fn build<E>(
        lo: f64,
        hi: f64,
        anchor: f64,
        f: impl Fn(f64) -> Result<f64, E>,
        df: impl Fn(f64) -> Result<f64, E>,
    ) -> Result<Self, E> {
        debug_assert!(lo < hi && (lo..=hi).contains(&anchor));
        let mut pieces = MIN_PIECES;
        loop {
            let step = (hi - lo) / pieces as f64;
            let node = |i: usize| if i == pieces { hi } else { lo + step * i as f64 };
            let mut value = Vec::with_capacity(pieces + 1);
            let mut d1 = Vec::with_capacity(pieces + 1);
            let mut d2 = Vec::with_capacity(pieces + 1);
            let mut acc = 0.0;
            for i in 0..=pieces {
                if i > 0 {
                    acc += integrate(&f, node(i - 1), node(i), 1e-15)?;
                }
                value.push(acc);
                d1.push(f(node(i))?);
                d2.push(df(node(i))?);
            }
            let mut table = Self {
                lo,
                hi,
                step,
                value,
                d1,
                d2,
            };
            let offset = table.interpolate(anchor);
            table.value.iter_mut().for_each(|v| *v -= offset);

            let mut defect = 0.0f64;
            for i in 0..pieces {
                let mid = lo + step * (i as f64 + 0.5);
                let exact = table.value[i] + integrate(&f, node(i), mid, 1e-15)?;
                defect = defect.max((table.interpolate(mid) - exact).abs());
            }
            if defect <= TABLE_TOL || pieces >= MAX_PIECES {
                return Ok(table);
            }
            pieces *= 2;
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, u: f64) -> bool {
        u >= self.lo && u <= self.hi
    }

    fn locate(&self, u: f64) -> (usize, f64) {
        let pieces = self.value.len() - 1;
        let s = (u - self.lo) / self.step;
        let i = (s.floor().max(0.0) as usize).min(pieces - 1);
        (i, s - i as f64)
    }

    fn interpolate(&self, u: f64) -> f64 {
        let (i, t) = self.locate(u);
        self.hermite(i, t)
    }

    fn hermite(&self, i: usize, t: f64) -> f64 {
        let h = self.step;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        let h21 = 0.5 * (t3 - 2.0 * t4 + t5);
        let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        h00 * self.value[i]
            + h01 * self.value[i + 1]
            + h * (h10 * self.d1[i] + h11 * self.d1[i + 1])
            + h * h * (h20 * self.d2[i] + h21 * self.d2[i + 1])
    }

    fn hermite_slope(&self, i: usize, t: f64) -> f64 {
        let h = self.step;
        let (t2, t3, t4) = (t * t, t * t * t, t * t * t * t);
        let h00 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
        let h10 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
        let h20 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
        let h21 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
        let h11 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
        let h01 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
        (h00 * self.value[i] + h01 * self.value[i + 1]) / h
            + h10 * self.d1[i]
            + h11 * self.d1[i + 1]
            + h * (h20 * self.d2[i] + h21 * self.d2[i + 1])
    }

    /// `F(u)`, or `None` outside the tabulated domain.
    pub fn value(&self, u: f64) -> Option<f64> {
        self.contains(u).then(|| self.interpolate(u))
    }

    /// Range of `F` over the domain, assuming `F` is increasing.
    pub fn range(&self) -> (f64, f64) {
        (self.value[0], self.value[self.value.len() - 1])
    }

    /// Solves `F(u) = y` for an increasing primitive: the breakpoint bracket
    /// is found by binary search, then Newton steps on the Hermite piece are
    /// safeguarded by bisection.
    pub fn inverse(&self, y: f64) -> Option<f64> {
        let (ymin, ymax) = self.range();
        // Values within roundoff of the range ends map to the endpoints.
        let slack = 1e-12 * (ymax - ymin).abs().max(1.0);
        if !(y >= ymin - slack && y <= ymax + slack) {
            return None;
        }
        let y = y.clamp(ymin, ymax);
        let pieces = self.value.len() - 1;
        let i = self.value.partition_point(|&v| v <= y).clamp(1, pieces) - 1;
        let (mut a, mut b) = (0.0f64, 1.0f64);
        let mut t = if self.value[i + 1] > self.value[i] {
            ((y - self.value[i]) / (self.value[i + 1] - self.value[i])).clamp(0.0, 1.0)
        } else {
            0.5
        };
        for _ in 0..100 {
            let r = self.hermite(i, t) - y;
            if r == 0.0 {
                break;
            }
            if r < 0.0 {
                a = t;
            } else {
                b = t;
            }
            let slope = self.hermite_slope(i, t) * self.step;
            let mut next = if slope > 0.0 { t - r / slope } else { f64::NAN };
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if (next - t).abs() <= 1e-15 {
                t = next;
                break;
            }
            t = next;
        }
        Some(self.lo + self.step * (i as f64 + t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn gauss_kronrod_on_smooth_integrands() {
        let v = integrate(|x: f64| Ok::<_, Infallible>(x.sin()), 0.0, std::f64::consts::PI, 1e-13).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let v = integrate(|x: f64| Ok::<_, Infallible>(1.0 / x.cosh()), 0.0, 1.0, 1e-13).unwrap();
        let gd1 = 2.0 * (0.5f64).tanh().atan();
        assert!((v - gd1).abs() < 1e-13);
        let back = integrate(|x: f64| Ok::<_, Infallible>(x), 1.0, 0.0, 1e-13).unwrap();
        assert!((back + 0.5).abs() < 1e-15);
    }

    #[test]
    fn integrand_errors_propagate() {
        let r = integrate(|x: f64| if x > 0.5 { Err("boom") } else { Ok(x) }, 0.0, 1.0, 1e-10);
        assert_eq!(r, Err("boom"));
    }

    #[test]
    fn hermite_table_reproduces_sech_primitive() {
        let t = PrimitiveTable::build(
            -1.0,
            1.0,
            0.0,
            |u: f64| Ok::<_, Infallible>(1.0 / u.cosh()),
            |u: f64| Ok::<_, Infallible>(-u.sinh() / u.cosh().powi(2)),
        )
        .unwrap();
        for k in 0..=200 {
            let u = -1.0 + 0.01 * k as f64;
            let gd = 2.0 * (0.5 * u).tanh().atan();
            assert!((t.value(u).unwrap() - gd).abs() < 1e-12, "u = {u}");
            assert!((t.inverse(gd).unwrap() - u).abs() < 1e-12, "u = {u}");
        }
        assert!(t.value(1.5).is_none());
        assert!(t.inverse(10.0).is_none());
    }
}
