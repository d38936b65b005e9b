//! Integration of the replicator equation.
//!
//! By default orbits are integrated in cumulative-payoff coordinates and
//! mapped back through the softmax chart, so emitted profiles are normalized
//! by construction. Strategy coordinates remain available for orbits that
//! run into the boundary; there each accepted step is clipped at zero and
//! renormalized, and the clipping is recorded.

use alloc::vec;
use alloc::vec::Vec;

use crate::analysis::kl::kl_sum;
use crate::error::{Error, Result};
use crate::game::Game;
use crate::ode::{Dopri5, SolverOptions, SolverStats};
use crate::profile::{CumulativeState, Layout, StrategyProfile};
use crate::transform::{cumulative_field_flat, cumulative_to_strategy_flat, strategy_field_flat, to_cumulative};

/// Largest negative excursion that clipping silently absorbs.
pub const CLIP_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CoordinateSystem {
    #[default]
    Cumulative,
    Strategy,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Output sampling interval.
    pub record_dt: f64,
    pub coordinate_system: CoordinateSystem,
    pub max_time: f64,
    /// When set, the trajectory diagnostics carry the KL drift to this profile.
    pub reference: Option<StrategyProfile>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_step: 0.1,
            record_dt: 0.05,
            coordinate_system: CoordinateSystem::Cumulative,
            max_time: 100.0,
            reference: None,
        }
    }
}

impl IntegratorOptions {
    pub fn with_max_time(mut self, t: f64) -> Self {
        self.max_time = t;
        self
    }

    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = rel_tol * 1e-2;
        self
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.solver().validate()?;
        if !(self.record_dt > 0.0 && self.record_dt.is_finite()) {
            return Err(Error::InvalidOption {
                name: "record_dt",
                reason: alloc::format!("must be positive, got {}", self.record_dt),
            });
        }
        if !self.max_time.is_finite() || self.max_time < 0.0 {
            return Err(Error::InvalidOption {
                name: "max_time",
                reason: alloc::format!("must be finite and non-negative, got {}", self.max_time),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClippingStats {
    /// Accepted steps on which clipping or renormalization changed the state.
    pub events: usize,
    /// Largest single correction (max-norm).
    pub max_magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Diagnostics {
    pub coordinate_system: CoordinateSystem,
    pub solver: SolverStats,
    /// Accepted step sizes, in order.
    pub step_sizes: Vec<f64>,
    /// Scaled local error estimate of each accepted step.
    pub error_estimates: Vec<f64>,
    /// `max_t |KL(x*‖x(t)) − KL(x*‖x(0))|` when a reference was attached.
    pub kl_drift: Option<f64>,
    pub clipping: ClippingStats,
}

/// Sampled orbit `t ↦ φ(x0, t)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StrategyProfile>,
    /// Present when the orbit was integrated in cumulative coordinates.
    pub cumulative_states: Option<Vec<CumulativeState>>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn layout(&self) -> &Layout {
        self.states[0].layout()
    }

    pub fn initial_state(&self) -> &StrategyProfile {
        &self.states[0]
    }

    pub fn final_state(&self) -> &StrategyProfile {
        self.states.last().expect("trajectory has at least one sample")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Samples with `t ≥ t_start`, re-based so that the first kept sample is the start.
    pub fn tail_from(&self, t_start: f64) -> Trajectory {
        let k = self.times.iter().position(|&t| t >= t_start).unwrap_or(self.len() - 1);
        Trajectory {
            times: self.times[k..].to_vec(),
            states: self.states[k..].to_vec(),
            cumulative_states: self.cumulative_states.as_ref().map(|c| c[k..].to_vec()),
            diagnostics: self.diagnostics.clone(),
        }
    }

    /// Builds a trajectory from raw samples; used for projections and tests.
    pub fn from_samples(times: Vec<f64>, states: Vec<StrategyProfile>) -> Result<Trajectory> {
        if times.len() != states.len() || times.is_empty() {
            return Err(Error::InvalidOption {
                name: "samples",
                reason: "times and states must be non-empty and of equal length".into(),
            });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidOption {
                name: "times",
                reason: "must be strictly increasing".into(),
            });
        }
        Ok(Trajectory {
            times,
            states,
            cumulative_states: None,
            diagnostics: Diagnostics::default(),
        })
    }
}

/// The recording grid `0, dt, 2dt, …` closed by `max_time`.
pub fn sample_grid(max_time: f64, record_dt: f64) -> Vec<f64> {
    let mut times = Vec::new();
    let mut k = 0usize;
    loop {
        let t = k as f64 * record_dt;
        if t >= max_time - 1e-9 * record_dt {
            break;
        }
        times.push(t);
        k += 1;
    }
    times.push(max_time);
    times
}

/// States of one orbit at a list of requested times.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSamples {
    pub states: Vec<StrategyProfile>,
    pub cumulative: Option<Vec<CumulativeState>>,
    pub diagnostics: Diagnostics,
}

pub(crate) fn cumulative_stepper<'g>(
    game: &'g Game,
    y0: &[f64],
    t0: f64,
    direction: f64,
    opts: SolverOptions,
) -> Result<Dopri5<impl FnMut(f64, &[f64], &mut [f64]) + 'g>> {
    let n = game.layout().total();
    let (mut xs, mut us) = (vec![0.0; n], vec![0.0; n]);
    let field = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        cumulative_field_flat(game, y, &mut xs, &mut us, dy);
    };
    Dopri5::new(field, t0, y0, direction, opts)
}

fn strategy_stepper<'g>(
    game: &'g Game,
    x0: &[f64],
    direction: f64,
    opts: SolverOptions,
) -> Result<Dopri5<impl FnMut(f64, &[f64], &mut [f64]) + 'g>> {
    let mut us = vec![0.0; x0.len()];
    let field = move |_t: f64, x: &[f64], dx: &mut [f64]| {
        strategy_field_flat(game, x, &mut us, dx);
    };
    Dopri5::new(field, 0.0, x0, direction, opts)
}

/// Clips negatives to zero and renormalizes each block; returns the max-norm
/// correction, or `None` when a coordinate fell further than [`CLIP_LIMIT`].
fn project_to_simplex(layout: &Layout, x: &mut [f64]) -> core::result::Result<f64, (usize, usize, f64)> {
    let mut worst = 0.0f64;
    for i in 0..layout.players() {
        let r = layout.range(i);
        let block = &mut x[r];
        for (a, v) in block.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v < -CLIP_LIMIT {
                    return Err((i, a, *v));
                }
                worst = worst.max(-*v);
                *v = 0.0;
            }
        }
        let s: f64 = block.iter().sum();
        for v in block.iter_mut() {
            let nv = *v / s;
            worst = worst.max((nv - *v).abs());
            *v = nv;
        }
    }
    Ok(worst)
}

/// Integrates one orbit and samples it at `times` (non-decreasing when
/// `direction > 0`, non-increasing otherwise; all on the same side of 0).
fn sample_orbit_directed(
    game: &Game,
    x0: &StrategyProfile,
    times: &[f64],
    opts: &IntegratorOptions,
    direction: f64,
) -> Result<OrbitSamples> {
    game.check_profile(x0)?;
    opts.validate()?;
    let layout = game.layout().clone();
    let reduced = layout.reduced();
    let mut diagnostics = Diagnostics {
        coordinate_system: opts.coordinate_system,
        ..Default::default()
    };
    let mut states = Vec::with_capacity(times.len());
    let t_end = times.last().copied().unwrap_or(0.0);

    match opts.coordinate_system {
        CoordinateSystem::Cumulative => {
            let y0 = to_cumulative(x0)?;
            let mut cumulative = Vec::with_capacity(times.len());
            let mut emit = |y: &[f64], states: &mut Vec<StrategyProfile>| -> Result<()> {
                let mut x = vec![0.0; layout.total()];
                cumulative_to_strategy_flat(&reduced, y, &mut x);
                states.push(StrategyProfile::from_flat_unchecked(layout.clone(), x));
                cumulative.push(CumulativeState::from_flat(reduced.clone(), y.to_vec())?);
                Ok(())
            };
            let mut stepper = cumulative_stepper(game, y0.as_flat(), 0.0, direction, opts.solver())?;
            let mut buf = vec![0.0; reduced.total()];
            let mut next = 0;
            while next < times.len() && times[next] * direction <= 0.0 {
                emit(y0.as_flat(), &mut states)?;
                next += 1;
            }
            while next < times.len() {
                let rep = stepper.step(t_end)?;
                diagnostics.step_sizes.push((rep.t_end - rep.t_start).abs());
                diagnostics.error_estimates.push(rep.error);
                while next < times.len() && (times[next] - rep.t_end) * direction <= 0.0 {
                    if times[next] == rep.t_end {
                        buf.copy_from_slice(stepper.y());
                    } else {
                        stepper.dense(times[next], &mut buf);
                    }
                    emit(&buf, &mut states)?;
                    next += 1;
                }
            }
            diagnostics.solver = stepper.stats();
            finish_kl(&mut diagnostics, &states, opts)?;
            Ok(OrbitSamples {
                states,
                cumulative: Some(cumulative),
                diagnostics,
            })
        }
        CoordinateSystem::Strategy => {
            let mut stepper = strategy_stepper(game, x0.as_flat(), direction, opts.solver())?;
            let mut buf = vec![0.0; layout.total()];
            let mut next = 0;
            while next < times.len() && times[next] * direction <= 0.0 {
                states.push(x0.clone());
                next += 1;
            }
            while next < times.len() {
                let rep = stepper.step(t_end)?;
                diagnostics.step_sizes.push((rep.t_end - rep.t_start).abs());
                diagnostics.error_estimates.push(rep.error);
                while next < times.len() && (times[next] - rep.t_end) * direction <= 0.0 {
                    stepper.dense(times[next], &mut buf);
                    project_to_simplex(&layout, &mut buf).map_err(|(i, a, v)| boundary(i, a, v))?;
                    states.push(StrategyProfile::from_flat_unchecked(layout.clone(), buf.clone()));
                    next += 1;
                }
                let correction = project_to_simplex(&layout, stepper.y_mut()).map_err(|(i, a, v)| boundary(i, a, v))?;
                if correction > 0.0 {
                    diagnostics.clipping.events += 1;
                    diagnostics.clipping.max_magnitude = diagnostics.clipping.max_magnitude.max(correction);
                }
            }
            diagnostics.solver = stepper.stats();
            finish_kl(&mut diagnostics, &states, opts)?;
            Ok(OrbitSamples {
                states,
                cumulative: None,
                diagnostics,
            })
        }
    }
}

fn boundary(player: usize, action: usize, value: f64) -> Error {
    Error::BoundaryPoint { player, action, value }
}

fn finish_kl(diag: &mut Diagnostics, states: &[StrategyProfile], opts: &IntegratorOptions) -> Result<()> {
    if let (Some(reference), Some(first)) = (&opts.reference, states.first()) {
        let k0 = kl_sum(reference, first)?;
        let mut drift = 0.0f64;
        for s in states {
            drift = drift.max((kl_sum(reference, s)? - k0).abs());
        }
        diag.kl_drift = Some(drift);
    }
    Ok(())
}

/// Integrates one orbit forward and samples it at the given non-decreasing,
/// non-negative times.
pub fn sample_orbit(
    game: &Game,
    x0: &StrategyProfile,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<OrbitSamples> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidOption {
            name: "sample_times",
            reason: "must be non-negative and non-decreasing".into(),
        });
    }
    sample_orbit_directed(game, x0, times, opts, 1.0)
}

/// Integrates from `x0` over `[0, opts.max_time]`, recording every `record_dt`.
pub fn integrate(game: &Game, x0: &StrategyProfile, opts: &IntegratorOptions) -> Result<Trajectory> {
    opts.validate()?;
    let times = sample_grid(opts.max_time, opts.record_dt);
    let samples = sample_orbit_directed(game, x0, &times, opts, 1.0)?;
    Ok(Trajectory {
        times,
        states: samples.states,
        cumulative_states: samples.cumulative,
        diagnostics: samples.diagnostics,
    })
}

/// `φ(x0, t)`; negative `t` integrates backward in time.
pub fn flow_at(game: &Game, x0: &StrategyProfile, t: f64, opts: &IntegratorOptions) -> Result<StrategyProfile> {
    if t == 0.0 {
        game.check_profile(x0)?;
        return Ok(x0.clone());
    }
    let direction = if t < 0.0 { -1.0 } else { 1.0 };
    let samples = sample_orbit_directed(game, x0, &[t], opts, direction)?;
    Ok(samples.states.into_iter().next().unwrap())
}

/// One time-slice of an evolving cloud.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CloudSnapshot {
    pub time: f64,
    pub profiles: Vec<StrategyProfile>,
    pub cumulative: Vec<CumulativeState>,
}

/// Transposes per-point samples into per-time snapshots.
pub fn assemble_snapshots(sample_times: &[f64], per_point: Vec<OrbitSamples>) -> Vec<CloudSnapshot> {
    let mut snaps: Vec<CloudSnapshot> = sample_times
        .iter()
        .map(|&time| CloudSnapshot {
            time,
            profiles: Vec::with_capacity(per_point.len()),
            cumulative: Vec::with_capacity(per_point.len()),
        })
        .collect();
    for orbit in per_point {
        let cumulative = orbit.cumulative.unwrap_or_default();
        for (k, x) in orbit.states.into_iter().enumerate() {
            snaps[k].profiles.push(x);
        }
        for (k, y) in cumulative.into_iter().enumerate() {
            snaps[k].cumulative.push(y);
        }
    }
    snaps
}

/// Integrates every point independently (cumulative coordinates are forced,
/// the cloud living in the interior) and returns one snapshot per sample time.
pub fn evolve_cloud(
    game: &Game,
    points: &[StrategyProfile],
    sample_times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<CloudSnapshot>> {
    let opts = IntegratorOptions {
        coordinate_system: CoordinateSystem::Cumulative,
        ..opts.clone()
    };
    let per_point = points
        .iter()
        .enumerate()
        .map(|(index, x)| {
            sample_orbit(game, x, sample_times, &opts).map_err(|e| Error::CloudPoint {
                index,
                source: alloc::boxed::Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_snapshots(sample_times, per_point))
}

/// Time average `(1/T) ∫_0^T φ(x0, t) dt`, integrated alongside the orbit.
pub fn time_average(
    game: &Game,
    x0: &StrategyProfile,
    duration: f64,
    opts: &IntegratorOptions,
) -> Result<StrategyProfile> {
    game.check_profile(x0)?;
    if !(duration > 0.0) {
        return Err(Error::InvalidOption {
            name: "duration",
            reason: alloc::format!("must be positive, got {duration}"),
        });
    }
    let layout = game.layout().clone();
    let reduced = layout.reduced();
    let (m, n) = (reduced.total(), layout.total());
    let y0 = to_cumulative(x0)?;
    let mut z0 = vec![0.0; m + n];
    z0[..m].copy_from_slice(y0.as_flat());
    let (mut xs, mut us) = (vec![0.0; n], vec![0.0; n]);
    let field = |_t: f64, z: &[f64], dz: &mut [f64]| {
        cumulative_field_flat(game, &z[..m], &mut xs, &mut us, &mut dz[..m]);
        dz[m..].copy_from_slice(&xs);
    };
    let mut stepper = Dopri5::new(field, 0.0, &z0, 1.0, opts.solver())?;
    while stepper.t() < duration {
        stepper.step(duration)?;
    }
    let data: Vec<f64> = stepper.y()[m..].iter().map(|v| v / duration).collect();
    Ok(StrategyProfile::from_flat_unchecked(layout, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games;

    #[test]
    fn grid_shape() {
        let g = sample_grid(100.0, 0.05);
        assert_eq!(g.len(), 2001);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 100.0);
        assert_eq!(sample_grid(0.12, 0.05), vec![0.0, 0.05, 0.1, 0.12]);
        assert_eq!(sample_grid(0.0, 0.05), vec![0.0]);
    }

    #[test]
    fn rest_point_stays() {
        let x = StrategyProfile::uniform(&[3]);
        let traj = integrate(&games::rps(), &x, &IntegratorOptions::default().with_max_time(10.0)).unwrap();
        for s in &traj.states {
            assert!(s.max_distance(&x) < 1e-15);
        }
    }

    #[test]
    fn flow_identity_at_zero() {
        let x = StrategyProfile::new(&[[0.5, 0.25, 0.25]]).unwrap();
        assert_eq!(
            flow_at(&games::rps(), &x, 0.0, &IntegratorOptions::default()).unwrap(),
            x
        );
    }

    #[test]
    fn cumulative_mode_rejects_boundary_start() {
        let x = StrategyProfile::new(&[[0.5, 0.5, 0.0]]).unwrap();
        let err = integrate(&games::rps(), &x, &IntegratorOptions::default()).unwrap_err();
        assert!(matches!(err, Error::BoundaryPoint { .. }));
        // Strategy coordinates handle the face.
        let opts = IntegratorOptions {
            coordinate_system: CoordinateSystem::Strategy,
            max_time: 5.0,
            ..Default::default()
        };
        let traj = integrate(&games::rps(), &x, &opts).unwrap();
        assert!(traj.states.iter().all(|s| s.player(0)[2] == 0.0));
    }

    #[test]
    fn strategy_and_cumulative_agree() {
        let x = StrategyProfile::new(&[[0.5, 0.25, 0.25]]).unwrap();
        let base = IntegratorOptions::default().with_max_time(5.0).with_tolerance(1e-11);
        let a = flow_at(&games::rps(), &x, 5.0, &base).unwrap();
        let strat = IntegratorOptions {
            coordinate_system: CoordinateSystem::Strategy,
            ..base
        };
        let b = flow_at(&games::rps(), &x, 5.0, &strat).unwrap();
        assert!(a.max_distance(&b) < 1e-8);
    }

    #[test]
    fn invalid_options() {
        let x = StrategyProfile::uniform(&[3]);
        let opts = IntegratorOptions {
            record_dt: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            integrate(&games::rps(), &x, &opts),
            Err(Error::InvalidOption { name: "record_dt", .. })
        ));
    }
}
