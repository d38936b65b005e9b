use alloc::vec::Vec;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.2;

/// Actions whose share exceeds `threshold` at least once over the last
/// `tail_fraction` of the samples, per player.
pub fn support_limit(traj: &Trajectory, threshold: f64, tail_fraction: f64) -> Result<Vec<Vec<usize>>> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidOption {
            name: "tail_fraction",
            reason: alloc::format!("must lie in (0, 1], got {tail_fraction}"),
        });
    }
    let n = traj.len();
    let keep = (libm::ceil(n as f64 * tail_fraction) as usize).clamp(1, n);
    let tail = &traj.states[n - keep..];
    let layout = traj.layout();
    Ok((0..layout.players())
        .map(|i| {
            (0..layout.size(i))
                .filter(|&a| tail.iter().any(|x| x.player(i)[a] > threshold))
                .collect()
        })
        .collect())
}
