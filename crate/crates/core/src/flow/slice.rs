use serde::Serialize;

use crate::symbolic::{ProfileError, WarpedProfile};

/// Heights `r(t)` of a moving slice `N × {r}` sampled at fixed steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceTrajectory {
    pub times: Vec<f64>,
    pub heights: Vec<f64>,
}

impl SliceTrajectory {
    pub fn final_height(&self) -> f64 {
        *self.heights.last().expect("trajectory holds the initial point")
    }
}

/// Classical RK4 for `r_t = −n φ′(r)`; the last step is shortened to land on
/// `t_end`. Fails if a stage leaves the profile domain.
pub fn slice_ode_solve(
    profile: &WarpedProfile,
    dim: usize,
    r0: f64,
    t_end: f64,
    dt: f64,
) -> Result<SliceTrajectory, ProfileError> {
    let n = dim as f64;
    let speed = |r: f64| -> Result<f64, ProfileError> {
        if !profile.contains(r) {
            let (lo, hi) = profile.domain();
            return Err(ProfileError::OutsideDomain { u: r, lo, hi });
        }
        Ok(-n * profile.dphi(r)?)
    };
    speed(r0)?;
    let mut times = vec![0.0];
    let mut heights = vec![r0];
    let (mut t, mut r) = (0.0, r0);
    let steps = (t_end / dt).ceil().max(0.0) as u64;
    for k in 1..=steps {
        let next_t = (k as f64 * dt).min(t_end);
        let h = next_t - t;
        let k1 = speed(r)?;
        let k2 = speed(r + 0.5 * h * k1)?;
        let k3 = speed(r + 0.5 * h * k2)?;
        let k4 = speed(r + h * k3)?;
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        speed(r)?;
        t = next_t;
        times.push(t);
        heights.push(r);
    }
    Ok(SliceTrajectory { times, heights })
}
