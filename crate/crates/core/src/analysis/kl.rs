//! Kullback-Leibler divergence to a reference equilibrium and its time derivative.

use alloc::vec::Vec;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::game::{dot, Game};
use crate::profile::StrategyProfile;

/// `Σ_i Σ_α x*_{i,α} ln(x*_{i,α} / x_{i,α})`, in nats, with `0 · ln 0 = 0`.
pub fn kl_sum(x_star: &StrategyProfile, x: &StrategyProfile) -> Result<f64> {
    if x_star.layout() != x.layout() {
        return Err(Error::LayoutMismatch);
    }
    let mut acc = 0.0;
    for i in 0..x.players() {
        for (a, (&p, &q)) in x_star.player(i).iter().zip(x.player(i)).enumerate() {
            if p == 0.0 {
                continue;
            }
            if q <= 0.0 {
                return Err(Error::InfiniteDivergence { player: i, action: a });
            }
            acc += p * libm::log(p / q);
        }
    }
    Ok(acc)
}

/// `d/dt Σ KL(x* ‖ x) = Σ_i u_i(x) − Σ_i x*_i · u_{i,·}(x)` along the replicator flow.
pub fn kl_time_derivative(game: &Game, x_star: &StrategyProfile, x: &StrategyProfile) -> Result<f64> {
    game.check_profile(x)?;
    game.check_profile(x_star)?;
    let mut acc = 0.0;
    for i in 0..game.players() {
        let u = game.payoff_vector(x, i);
        acc += dot(x.player(i), &u) - dot(x_star.player(i), &u);
    }
    Ok(acc)
}

/// Shannon entropy in nats.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * libm::log(v)).sum::<f64>()
}

/// Lower bound `δ = min_{i,α} exp(−(C + H(x*_i)) / x*_{i,α})` on every
/// coordinate of a profile whose divergence to the interior point `x*` is `C`.
pub fn boundary_gap_bound(x_star: &StrategyProfile, level: f64) -> f64 {
    let mut delta = f64::INFINITY;
    for i in 0..x_star.players() {
        let xi = x_star.player(i);
        let h = entropy(xi);
        for &v in xi {
            delta = delta.min(libm::exp(-(level + h) / v));
        }
    }
    delta
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KlTrace {
    pub times: Vec<f64>,
    pub kl_values: Vec<f64>,
    pub analytic_derivative: Vec<f64>,
    /// `max_t |KL(t) − KL(0)|`.
    pub drift: f64,
}

pub fn kl_trace(game: &Game, x_star: &StrategyProfile, traj: &Trajectory) -> Result<KlTrace> {
    let mut kl_values = Vec::with_capacity(traj.len());
    let mut analytic_derivative = Vec::with_capacity(traj.len());
    for x in &traj.states {
        kl_values.push(kl_sum(x_star, x)?);
        analytic_derivative.push(kl_time_derivative(game, x_star, x)?);
    }
    let k0 = kl_values.first().copied().unwrap_or(0.0);
    let drift = kl_values.iter().map(|k| (k - k0).abs()).fold(0.0, f64::max);
    Ok(KlTrace {
        times: traj.times.clone(),
        kl_values,
        analytic_derivative,
        drift,
    })
}
