//! Area of planar point clouds from a pruned Delaunay triangulation.

use alloc::vec;
use alloc::vec::Vec;

use robust::{incircle, orient2d, Coord};

use crate::dynamics::CloudSnapshot;
use crate::error::{Error, Result};

pub const DEFAULT_PRUNE_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct VolumeEstimate {
    pub area: f64,
    pub points: usize,
    /// Triangles kept after pruning.
    pub triangles: usize,
    pub pruned: usize,
    pub median_edge: f64,
    /// Longest admissible edge, `prune_factor × median_edge`.
    pub threshold: f64,
}

fn coord(p: [f64; 2]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    orient2d(coord(a), coord(b), coord(c))
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    libm::hypot(a[0] - b[0], a[1] - b[1])
}

/// Delaunay triangulation by Bowyer–Watson insertion on exact predicates.
/// Triangles are returned counterclockwise as indices into the deduplicated
/// point list, which is returned alongside.
pub fn delaunay(points: &[[f64; 2]]) -> Result<(Vec<[f64; 2]>, Vec<[usize; 3]>)> {
    if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::NonFinite { context: "point cloud" });
    }
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    let n = pts.len();
    if n < 3 {
        return Err(Error::DegenerateCloud { points: n });
    }
    let far = (1..n)
        .max_by(|&a, &b| dist(pts[0], pts[a]).total_cmp(&dist(pts[0], pts[b])))
        .unwrap();
    let extent = dist(pts[0], pts[far]);
    let height = pts
        .iter()
        .map(|&p| libm::fabs(orient(pts[0], pts[far], p)))
        .fold(0.0, f64::max);
    if height <= 1e-12 * extent * extent {
        return Err(Error::DegenerateCloud { points: n });
    }

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let (cx, cy) = ((lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0);
    let m = 1e4 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let mut all = pts.clone();
    all.push([cx - 2.0 * m, cy - m]);
    all.push([cx + 2.0 * m, cy - m]);
    all.push([cx, cy + 2.0 * m]);

    let mut tris: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];
    let mut edges: Vec<[usize; 2]> = Vec::new();
    for k in 0..n {
        let p = all[k];
        let (bad, good): (Vec<[usize; 3]>, Vec<[usize; 3]>) = tris
            .iter()
            .partition(|t| incircle(coord(all[t[0]]), coord(all[t[1]]), coord(all[t[2]]), coord(p)) > 0.0);
        edges.clear();
        for t in &bad {
            for e in [[t[0], t[1]], [t[1], t[2]], [t[2], t[0]]] {
                if let Some(pos) = edges.iter().position(|f| f[0] == e[1] && f[1] == e[0]) {
                    edges.swap_remove(pos);
                } else {
                    edges.push(e);
                }
            }
        }
        tris = good;
        tris.extend(edges.iter().map(|e| [e[0], e[1], k]));
    }
    tris.retain(|t| t.iter().all(|&v| v < n));
    Ok((pts, tris))
}

/// Sum of the areas of the Delaunay triangles whose longest edge does not
/// exceed `prune_factor` times the median edge length.
pub fn estimate_volume(points: &[[f64; 2]], prune_factor: f64) -> Result<VolumeEstimate> {
    if !(prune_factor > 0.0) {
        return Err(Error::InvalidOption {
            name: "prune_factor",
            reason: alloc::format!("must be positive, got {prune_factor}"),
        });
    }
    let (pts, tris) = delaunay(points)?;
    let mut edge_list: Vec<(usize, usize)> = tris
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edge_list.sort_unstable();
    edge_list.dedup();
    let mut lengths: Vec<f64> = edge_list.iter().map(|&(a, b)| dist(pts[a], pts[b])).collect();
    lengths.sort_by(f64::total_cmp);
    let mid = lengths.len() / 2;
    let median_edge = if lengths.len() % 2 == 1 {
        lengths[mid]
    } else {
        (lengths[mid - 1] + lengths[mid]) / 2.0
    };
    let threshold = prune_factor * median_edge;
    let (mut area, mut kept) = (0.0, 0);
    for t in &tris {
        let (a, b, c) = (pts[t[0]], pts[t[1]], pts[t[2]]);
        let longest = dist(a, b).max(dist(b, c)).max(dist(c, a));
        if longest <= threshold {
            area += orient(a, b, c) / 2.0;
            kept += 1;
        }
    }
    Ok(VolumeEstimate {
        area,
        points: pts.len(),
        triangles: kept,
        pruned: tris.len() - kept,
        median_edge,
        threshold,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct VolumeTrace {
    pub times: Vec<f64>,
    pub volumes: Vec<f64>,
    pub estimates: Vec<VolumeEstimate>,
}

impl VolumeTrace {
    /// `max_k |V_k − V_0| / V_0`.
    pub fn max_relative_deviation(&self) -> f64 {
        let v0 = self.volumes[0];
        self.volumes.iter().map(|v| libm::fabs(v - v0) / v0).fold(0.0, f64::max)
    }
}

/// Planar coordinates of a snapshot's cumulative states.
pub fn planar_points(snapshot: &CloudSnapshot) -> Result<Vec<[f64; 2]>> {
    snapshot
        .cumulative
        .iter()
        .map(|y| match y.as_flat() {
            &[a, b] => Ok([a, b]),
            other => Err(Error::NotPlanar { dimension: other.len() }),
        })
        .collect()
}

pub fn volume_trace(snapshots: &[CloudSnapshot], prune_factor: f64) -> Result<VolumeTrace> {
    let mut trace = VolumeTrace {
        times: Vec::new(),
        volumes: Vec::new(),
        estimates: Vec::new(),
    };
    for s in snapshots {
        let est = estimate_volume(&planar_points(s)?, prune_factor)?;
        trace.times.push(s.time);
        trace.volumes.push(est.area);
        trace.estimates.push(est);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn square_with_center() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let est = estimate_volume(&pts, DEFAULT_PRUNE_FACTOR).unwrap();
        assert!((est.area - 1.0).abs() < 1e-15);
        assert_eq!(est.triangles, 4);
        assert_eq!(est.pruned, 0);
    }

    #[test]
    fn degenerate_clouds() {
        assert_eq!(
            estimate_volume(&[[0.0, 0.0]], 3.0).unwrap_err(),
            Error::DegenerateCloud { points: 1 }
        );
        let line: Vec<[f64; 2]> = (0..10).map(|k| [k as f64, 2.0 * k as f64]).collect();
        assert!(matches!(
            estimate_volume(&line, 3.0),
            Err(Error::DegenerateCloud { .. })
        ));
        let dup = [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]];
        assert!(matches!(
            estimate_volume(&dup, 3.0),
            Err(Error::DegenerateCloud { points: 2 })
        ));
    }

    #[test]
    fn triangulation_is_delaunay() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<[f64; 2]> = (0..200).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
        let (pts, tris) = delaunay(&pts).unwrap();
        for t in &tris {
            let (a, b, c) = (coord(pts[t[0]]), coord(pts[t[1]]), coord(pts[t[2]]));
            assert!(orient2d(a, b, c) > 0.0);
            for (k, p) in pts.iter().enumerate() {
                if !t.contains(&k) {
                    assert!(incircle(a, b, c, coord(*p)) <= 0.0);
                }
            }
        }
        // Euler: a triangulation of n points with h hull vertices has 2n − 2 − h triangles.
        assert!(tris.len() <= 2 * pts.len() - 5);
    }
}
