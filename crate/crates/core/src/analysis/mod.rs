//! Measurements on trajectories and clouds: conserved quantities, recurrence,
//! periodicity, limit supports and the overall classification of an orbit.

pub mod classify;
pub mod kl;
pub mod period;
pub mod recurrence;
pub mod support;
pub mod volume;

use crate::dynamics::Trajectory;

/// Points used by [`interpolate`]; degree five.
const STENCIL: usize = 6;

/// Lagrange interpolation of the sampled states at time `t`, on the six
/// samples surrounding it. `out` has the flat profile length.
pub(crate) fn interpolate(traj: &Trajectory, t: f64, out: &mut [f64]) {
    let times = &traj.times;
    let n = times.len();
    let k = times.partition_point(|&s| s <= t).clamp(1, n - 1) - 1;
    let width = STENCIL.min(n);
    let start = (k + 1).saturating_sub(width / 2).min(n - width);
    out.iter_mut().for_each(|v| *v = 0.0);
    for a in start..start + width {
        let mut w = 1.0;
        for b in start..start + width {
            if a != b {
                w *= (t - times[b]) / (times[a] - times[b]);
            }
        }
        for (o, v) in out.iter_mut().zip(traj.states[a].as_flat()) {
            *o += w * v;
        }
    }
}

/// Time derivative of the same interpolant.
pub(crate) fn interpolate_derivative(traj: &Trajectory, t: f64, out: &mut [f64]) {
    let h = 1e-4 * (traj.times[1] - traj.times[0]);
    let mut lo = alloc::vec![0.0; out.len()];
    interpolate(traj, t + h, out);
    interpolate(traj, t - h, &mut lo);
    for (o, l) in out.iter_mut().zip(&lo) {
        *o = (*o - l) / (2.0 * h);
    }
}
