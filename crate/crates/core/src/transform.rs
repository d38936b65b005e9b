//! The log-ratio diffeomorphism between the interior of the strategy space
//! and cumulative-payoff space, and the replicator vector field in both charts.
//!
//! For player `i`, `y_{i,α} = ln(x_{i,α+1} / x_{i,1})`, `α = 1 … n_i − 1`. The
//! inverse is a softmax with the first action pinned at logit zero. In these
//! coordinates the replicator equation reads
//! `ẏ_{i,α} = u_{i,α+1}(x) − u_{i,1}(x)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::Game;
use crate::profile::{CumulativeState, Layout, StrategyProfile};

/// Smallest coordinate accepted by [`to_cumulative`].
pub const INTERIOR_FLOOR: f64 = 1e-300;

pub fn to_cumulative(x: &StrategyProfile) -> Result<CumulativeState> {
    let layout = x.layout();
    let mut data = Vec::with_capacity(layout.total() - layout.players());
    for i in 0..layout.players() {
        let xi = x.player(i);
        if let Some((a, &v)) = xi.iter().enumerate().find(|(_, v)| **v < INTERIOR_FLOOR) {
            return Err(Error::BoundaryPoint {
                player: i,
                action: a,
                value: v,
            });
        }
        data.extend(xi[1..].iter().map(|v| libm::log(v / xi[0])));
    }
    CumulativeState::from_flat(layout.reduced(), data)
}

/// Inverse map. Exponentials are shifted by `max(0, max_α y_{i,α})` so that
/// large cumulative payoffs never overflow.
pub fn from_cumulative(y: &CumulativeState) -> StrategyProfile {
    let layout = Layout::new(&y.layout().sizes().iter().map(|s| s + 1).collect::<Vec<_>>());
    let mut data = vec![0.0; layout.total()];
    cumulative_to_strategy_flat(y.layout(), y.as_flat(), &mut data);
    StrategyProfile::from_flat_unchecked(layout, data)
}

/// Flat version of [`from_cumulative`]; `reduced` is the cumulative layout.
pub(crate) fn cumulative_to_strategy_flat(reduced: &Layout, y: &[f64], x: &mut [f64]) {
    let mut offset = 0;
    for i in 0..reduced.players() {
        let yi = &y[reduced.range(i)];
        let xi = &mut x[offset..offset + yi.len() + 1];
        offset += yi.len() + 1;
        let shift = yi.iter().copied().fold(0.0f64, f64::max);
        xi[0] = libm::exp(-shift);
        for (dst, &v) in xi[1..].iter_mut().zip(yi) {
            *dst = libm::exp(v - shift);
        }
        let s: f64 = xi.iter().sum();
        xi.iter_mut().for_each(|v| *v /= s);
    }
}

/// Replicator field `ẋ_{i,α} = x_{i,α}(u_{i,α}(x) − u_i(x))` on flat buffers.
/// `u` is scratch of the same length as `x`.
pub(crate) fn strategy_field_flat(game: &Game, x: &[f64], u: &mut [f64], out: &mut [f64]) {
    game.payoffs_flat(x, u);
    let layout = game.layout();
    for i in 0..layout.players() {
        let r = layout.range(i);
        let mean: f64 = x[r.clone()].iter().zip(&u[r.clone()]).map(|(a, b)| a * b).sum();
        for k in r {
            out[k] = x[k] * (u[k] - mean);
        }
    }
}

/// Cumulative-space field `ẏ_{i,α} = u_{i,α+1} − u_{i,1}` on flat buffers.
/// `x` and `u` are scratch in the strategy layout.
pub(crate) fn cumulative_field_flat(game: &Game, y: &[f64], x: &mut [f64], u: &mut [f64], out: &mut [f64]) {
    let layout = game.layout();
    let reduced = layout.reduced();
    cumulative_to_strategy_flat(&reduced, y, x);
    game.payoffs_flat(x, u);
    for i in 0..layout.players() {
        let r = layout.range(i);
        let base = u[r.start];
        for (k, dst) in reduced.range(i).zip(r.start + 1..r.end) {
            out[k] = u[dst] - base;
        }
    }
}

pub fn vector_field_strategy(game: &Game, x: &StrategyProfile) -> Vec<f64> {
    let n = x.as_flat().len();
    let (mut u, mut out) = (vec![0.0; n], vec![0.0; n]);
    strategy_field_flat(game, x.as_flat(), &mut u, &mut out);
    out
}

pub fn vector_field_cumulative(game: &Game, y: &CumulativeState) -> Vec<f64> {
    let n = game.layout().total();
    let (mut x, mut u) = (vec![0.0; n], vec![0.0; n]);
    let mut out = vec![0.0; y.as_flat().len()];
    cumulative_field_flat(game, y.as_flat(), &mut x, &mut u, &mut out);
    out
}

/// Closed-form divergence of the cumulative-space field at the profile `x`:
/// `Σ_i Σ_α Σ_β x_{i,α} x_{i,β} (A^{i,i}_{α,α} − A^{i,i}_{α,β})`.
/// Cross edges do not depend on the player's own coordinates and contribute nothing.
pub fn divergence_at_profile(game: &Game, x: &StrategyProfile) -> f64 {
    (0..game.players())
        .filter_map(|i| game.self_loop(i).map(|a| (i, a)))
        .map(|(i, a)| {
            let xi = x.player(i);
            let mut acc = 0.0;
            for (al, &xa) in xi.iter().enumerate() {
                let diag = a.get(al, al);
                let row = a.row(al);
                let inner: f64 = xi.iter().zip(row).map(|(&xb, &ab)| xb * (diag - ab)).sum();
                acc += xa * inner;
            }
            acc
        })
        .sum()
}

pub fn divergence_cumulative(game: &Game, y: &CumulativeState) -> f64 {
    divergence_at_profile(game, &from_cumulative(y))
}
