//! Period detection by first return to a Poincaré section.
//!
//! The section is the hyperplane through the first sample, normal to the
//! velocity there; only crossings in the direction of that velocity count.

use alloc::vec;
use alloc::vec::Vec;

use super::recurrence::STATIONARY_TOL;
use super::{interpolate, interpolate_derivative};
use crate::dynamics::{cumulative_stepper, IntegratorOptions, Trajectory};
use crate::error::{Error, Result};
use crate::game::{dot, Game};
use crate::profile::{max_norm_distance, StrategyProfile};
use crate::transform::{cumulative_to_strategy_flat, to_cumulative, vector_field_strategy};

/// Samples per period below which a detection is flagged as undersampled.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PeriodEstimate {
    pub period: f64,
    /// Mean of `‖x(t + T) − x(t)‖∞` over one period of samples.
    pub return_error: f64,
    /// Positive section crossings found.
    pub crossings: usize,
    /// Fewer than 50 samples per period; re-run with a smaller `record_dt`.
    pub undersampled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "outcome", rename_all = "snake_case"))]
pub enum PeriodOutcome {
    /// The orbit is a rest point.
    Stationary,
    /// Return error below the tolerance.
    Periodic(PeriodEstimate),
    /// The first return misses the start by more than the tolerance.
    Aperiodic(PeriodEstimate),
}

impl PeriodOutcome {
    pub fn period(&self) -> Option<f64> {
        match self {
            PeriodOutcome::Periodic(e) => Some(e.period),
            _ => None,
        }
    }

    pub fn estimate(&self) -> Option<&PeriodEstimate> {
        match self {
            PeriodOutcome::Periodic(e) | PeriodOutcome::Aperiodic(e) => Some(e),
            PeriodOutcome::Stationary => None,
        }
    }
}

fn bisect<F: FnMut(f64) -> f64>(mut s: F, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if s(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

pub fn detect_period(traj: &Trajectory, tol: f64) -> Result<PeriodOutcome> {
    if traj.len() < 2 {
        return Err(Error::NoCrossing);
    }
    let x0 = traj.states[0].as_flat();
    let t0 = traj.times[0];
    let still = traj
        .states
        .iter()
        .all(|s| max_norm_distance(s.as_flat(), x0) <= STATIONARY_TOL);
    let mut normal = vec![0.0; x0.len()];
    interpolate_derivative(traj, t0, &mut normal);
    if still || normal.iter().all(|v| v.abs() <= STATIONARY_TOL) {
        return Ok(PeriodOutcome::Stationary);
    }
    let mut buf = vec![0.0; x0.len()];
    let section = |x: &[f64]| -> f64 { normal.iter().zip(x.iter().zip(x0)).map(|(n, (a, b))| n * (a - b)).sum() };
    let s: Vec<f64> = traj.states.iter().map(|x| section(x.as_flat())).collect();
    let mut crossings: Vec<f64> = Vec::new();
    for k in 1..traj.len() - 1 {
        if s[k] < 0.0 && s[k + 1] >= 0.0 {
            let root = bisect(
                |t| {
                    interpolate(traj, t, &mut buf);
                    section(&buf)
                },
                traj.times[k],
                traj.times[k + 1],
            );
            crossings.push(root);
        }
    }
    let Some(&first) = crossings.first() else {
        return Err(Error::NoCrossing);
    };
    let period = first - t0;
    let t_end = traj.final_time();
    let mut total = 0.0;
    let mut count = 0usize;
    for (k, &t) in traj.times.iter().enumerate() {
        if t > t0 + period || t + period > t_end {
            break;
        }
        interpolate(traj, t + period, &mut buf);
        total += max_norm_distance(&buf, traj.states[k].as_flat());
        count += 1;
    }
    let dt = traj.times[1] - traj.times[0];
    let est = PeriodEstimate {
        period,
        return_error: total / count as f64,
        crossings: crossings.len(),
        undersampled: period < MIN_SAMPLES_PER_PERIOD * dt,
    };
    Ok(if est.return_error < tol {
        PeriodOutcome::Periodic(est)
    } else {
        PeriodOutcome::Aperiodic(est)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RefinedPeriod {
    pub period: f64,
    /// `‖φ(x0, T) − x0‖∞`.
    pub return_error: f64,
}

/// Re-integrates from the interior point `x0` and locates the first positive
/// return to its section on the integrator's dense output. The search stops
/// at `horizon`.
pub fn refine_period(
    game: &Game,
    x0: &StrategyProfile,
    horizon: f64,
    opts: &IntegratorOptions,
) -> Result<RefinedPeriod> {
    game.check_profile(x0)?;
    let layout = game.layout().clone();
    let reduced = layout.reduced();
    let normal = vector_field_strategy(game, x0);
    let x0f = x0.as_flat();
    let y0 = to_cumulative(x0)?;
    let mut stepper = cumulative_stepper(game, y0.as_flat(), 0.0, 1.0, opts.solver())?;
    let mut x = vec![0.0; layout.total()];
    let mut y = vec![0.0; reduced.total()];
    let section = |y: &[f64], x: &mut [f64]| -> f64 {
        cumulative_to_strategy_flat(&reduced, y, x);
        dot(&normal, x) - dot(&normal, x0f)
    };
    let mut prev = 0.0;
    while stepper.t() < horizon {
        stepper.step(horizon)?;
        let now = section(stepper.y(), &mut x);
        if prev < 0.0 && now >= 0.0 {
            let (a, b) = stepper.last_step();
            let period = bisect(
                |t| {
                    stepper.dense(t, &mut y);
                    section(&y, &mut x)
                },
                a,
                b,
            );
            stepper.dense(period, &mut y);
            section(&y, &mut x);
            return Ok(RefinedPeriod {
                period,
                return_error: max_norm_distance(&x, x0f),
            });
        }
        prev = now;
    }
    Err(Error::NoCrossing)
}
