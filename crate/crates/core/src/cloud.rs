//! Initial point clouds in the planar cumulative space of a 3-action player.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::profile::{CumulativeState, Layout, StrategyProfile};
use crate::transform::from_cumulative;

/// Maps a pair of unit-interval samples to a point uniformly distributed on
/// the disk (inverse-CDF in the radius).
pub fn disk_point(center: [f64; 2], radius: f64, u_radius: f64, u_angle: f64) -> [f64; 2] {
    let r = radius * libm::sqrt(u_radius);
    let th = 2.0 * PI * u_angle;
    [center[0] + r * libm::cos(th), center[1] + r * libm::sin(th)]
}

/// `count` points of a sunflower (Vogel) spiral filling the disk with uniform
/// density: point `k` sits at radius `R √((k + ½)/count)`, angle `k·(3 − √5)π`.
pub fn sunflower_disk(center: [f64; 2], radius: f64, count: usize) -> Vec<[f64; 2]> {
    let golden = PI * (3.0 - libm::sqrt(5.0));
    (0..count)
        .map(|k| {
            let r = radius * libm::sqrt((k as f64 + 0.5) / count as f64);
            let th = k as f64 * golden;
            [center[0] + r * libm::cos(th), center[1] + r * libm::sin(th)]
        })
        .collect()
}

/// Profiles of a 3-action player at the given planar cumulative points.
pub fn profiles_from_planar(points: &[[f64; 2]]) -> Vec<StrategyProfile> {
    let reduced = Layout::new(&[2]);
    points
        .iter()
        .filter_map(|p| CumulativeState::from_flat(reduced.clone(), p.to_vec()).ok())
        .map(|y| from_cumulative(&y))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sunflower_fills_disk() {
        let pts = sunflower_disk([1.0, -2.0], 0.5, 400);
        assert_eq!(pts.len(), 400);
        for p in &pts {
            assert!(libm::hypot(p[0] - 1.0, p[1] + 2.0) <= 0.5);
        }
        let inner = pts
            .iter()
            .filter(|p| libm::hypot(p[0] - 1.0, p[1] + 2.0) <= 0.25)
            .count();
        assert_eq!(inner, 100);
    }

    #[test]
    fn disk_point_extremes() {
        assert_eq!(disk_point([2.0, 3.0], 1.0, 0.0, 0.3), [2.0, 3.0]);
        let p = disk_point([0.0, 0.0], 2.0, 1.0, 0.0);
        assert_eq!(p, [2.0, 0.0]);
    }
}
