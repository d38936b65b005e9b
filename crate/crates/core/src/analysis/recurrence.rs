//! Returns of an orbit to a neighborhood of its starting point.

use alloc::vec;
use alloc::vec::Vec;

use super::interpolate;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::profile::{max_norm_distance, StrategyProfile};

/// Maximum displacement below which an orbit counts as a rest point.
pub const STATIONARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RecurrenceOptions {
    pub eps: f64,
    pub warmup: f64,
    pub min_separation: f64,
}

impl Default for RecurrenceOptions {
    fn default() -> Self {
        RecurrenceOptions {
            eps: 1e-2,
            warmup: 1.0,
            min_separation: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ReturnEvent {
    pub time: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RecurrenceReport {
    pub events: Vec<ReturnEvent>,
    /// The orbit never leaves its starting point; `events` then holds the
    /// single first sample after warmup.
    pub stationary: bool,
}

/// Golden-section search of `‖x(t) − x0‖∞` on the interpolated orbit.
fn refine_minimum(traj: &Trajectory, x0: &[f64], mut a: f64, mut b: f64) -> ReturnEvent {
    let mut buf = vec![0.0; x0.len()];
    let mut d = |t: f64| {
        interpolate(traj, t, &mut buf);
        max_norm_distance(&buf, x0)
    };
    const G: f64 = 0.618_033_988_749_894_8;
    let (mut c, mut e) = (b - G * (b - a), a + G * (b - a));
    let (mut fc, mut fe) = (d(c), d(e));
    for _ in 0..60 {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - G * (b - a);
            fc = d(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + G * (b - a);
            fe = d(e);
        }
        if b - a < 1e-12 * b.abs().max(1.0) {
            break;
        }
    }
    let time = (a + b) / 2.0;
    ReturnEvent {
        time,
        distance: d(time),
    }
}

/// Local minima of `‖x(t) − x0‖∞` after `warmup` that fall below `eps`,
/// refined between samples and kept at least `min_separation` apart.
pub fn recurrence_stats(traj: &Trajectory, x0: &StrategyProfile, opts: &RecurrenceOptions) -> Result<RecurrenceReport> {
    if x0.layout() != traj.layout() {
        return Err(Error::LayoutMismatch);
    }
    if !(opts.eps > 0.0) || opts.warmup < 0.0 || opts.min_separation < 0.0 {
        return Err(Error::InvalidOption {
            name: "recurrence",
            reason: "eps must be positive, warmup and min_separation non-negative".into(),
        });
    }
    let x0 = x0.as_flat();
    let d: Vec<f64> = traj.states.iter().map(|s| max_norm_distance(s.as_flat(), x0)).collect();
    let after = traj.times.iter().position(|&t| t > opts.warmup);
    if d.iter().all(|&v| v <= STATIONARY_TOL) {
        let events = after
            .map(|k| ReturnEvent {
                time: traj.times[k],
                distance: d[k],
            })
            .into_iter()
            .collect();
        return Ok(RecurrenceReport {
            events,
            stationary: true,
        });
    }
    let mut events: Vec<ReturnEvent> = Vec::new();
    let Some(first) = after else {
        return Ok(RecurrenceReport {
            events,
            stationary: false,
        });
    };
    for k in first.max(1)..traj.len() {
        let left = d[k] <= d[k - 1];
        let right = k + 1 == traj.len() || d[k] < d[k + 1];
        if !(left && right) {
            continue;
        }
        let hi = traj.times[(k + 1).min(traj.len() - 1)];
        let ev = refine_minimum(traj, x0, traj.times[k - 1].max(opts.warmup), hi);
        if ev.distance >= opts.eps {
            continue;
        }
        match events.last_mut() {
            Some(last) if ev.time - last.time < opts.min_separation => {
                if ev.distance < last.distance {
                    *last = ev;
                }
            }
            _ => events.push(ev),
        }
    }
    Ok(RecurrenceReport {
        events,
        stationary: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegratorOptions};
    use crate::games;

    #[test]
    fn rest_point_is_stationary() {
        let x = StrategyProfile::uniform(&[3]);
        let traj = integrate(&games::rps(), &x, &IntegratorOptions::default().with_max_time(5.0)).unwrap();
        let r = recurrence_stats(&traj, &x, &RecurrenceOptions::default()).unwrap();
        assert!(r.stationary);
        assert_eq!(r.events.len(), 1);
    }

    #[test]
    fn rps_returns() {
        let x = StrategyProfile::new(&[[0.5, 0.25, 0.25]]).unwrap();
        let traj = integrate(&games::rps(), &x, &IntegratorOptions::default().with_max_time(50.0)).unwrap();
        let r = recurrence_stats(&traj, &x, &RecurrenceOptions::default()).unwrap();
        assert!(!r.stationary);
        assert!(r.events.len() >= 2);
        for w in r.events.windows(2) {
            assert!(w[1].time - w[0].time >= 0.5);
        }
        // A periodic orbit returns almost exactly.
        assert!(r.events.iter().all(|e| e.distance < 1e-6));
    }
}
