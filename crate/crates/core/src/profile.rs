//! Points of the strategy space and of cumulative-payoff space.
//!
//! Both are stored flat, one contiguous block per player, with the block
//! boundaries carried alongside so that per-player views are cheap slices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tolerance on `Σ_α x_{i,α} = 1`.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Block boundaries of a flat per-player vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    offsets: Vec<usize>,
}

impl Layout {
    pub fn new(sizes: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        offsets.push(0);
        let mut acc = 0;
        for &s in sizes {
            acc += s;
            offsets.push(acc);
        }
        Layout { offsets }
    }

    pub fn players(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn size(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        (0..self.players()).map(|i| self.size(i)).collect()
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn range(&self, i: usize) -> core::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// The cumulative-space layout: one coordinate less per player.
    pub fn reduced(&self) -> Layout {
        let sizes: Vec<usize> = self.sizes().iter().map(|s| s - 1).collect();
        Layout::new(&sizes)
    }
}

/// A mixed strategy for every player: the state `x` of the dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    layout: Layout,
    data: Vec<f64>,
}

impl StrategyProfile {
    /// Validates that every block is a probability vector.
    pub fn new<V: AsRef<[f64]>>(blocks: &[V]) -> Result<Self> {
        let sizes: Vec<usize> = blocks.iter().map(|b| b.as_ref().len()).collect();
        let data = blocks.iter().flat_map(|b| b.as_ref().iter().copied()).collect();
        StrategyProfile::from_flat(Layout::new(&sizes), data)
    }

    pub fn from_flat(layout: Layout, data: Vec<f64>) -> Result<Self> {
        if layout.total() != data.len() {
            return Err(Error::LayoutMismatch);
        }
        for i in 0..layout.players() {
            let block = &data[layout.range(i)];
            if block.is_empty() {
                return Err(Error::EmptyGame);
            }
            if let Some(v) = block.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidProfile {
                    player: i,
                    reason: format!("entry {v} is not a probability"),
                });
            }
            let sum: f64 = block.iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::InvalidProfile {
                    player: i,
                    reason: format!("entries sum to {sum}"),
                });
            }
        }
        Ok(StrategyProfile { layout, data })
    }

    /// Divides each block by its sum. Fails on negative or all-zero blocks.
    pub fn normalized<V: AsRef<[f64]>>(blocks: &[V]) -> Result<Self> {
        let scaled: Vec<Vec<f64>> = blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let b = b.as_ref();
                let sum: f64 = b.iter().sum();
                if !(sum > 0.0) || b.iter().any(|v| *v < 0.0 || !v.is_finite()) {
                    return Err(Error::InvalidProfile {
                        player: i,
                        reason: format!("cannot normalize {b:?}"),
                    });
                }
                Ok(b.iter().map(|v| v / sum).collect())
            })
            .collect::<Result<_>>()?;
        StrategyProfile::new(&scaled)
    }

    /// Builds a profile from data already known to lie on the simplex product
    /// up to rounding; used by the integrators.
    pub(crate) fn from_flat_unchecked(layout: Layout, data: Vec<f64>) -> Self {
        debug_assert_eq!(layout.total(), data.len());
        StrategyProfile { layout, data }
    }

    pub fn uniform(sizes: &[usize]) -> Self {
        let layout = Layout::new(sizes);
        let mut data = vec![0.0; layout.total()];
        for i in 0..layout.players() {
            let n = layout.size(i) as f64;
            data[layout.range(i)].iter_mut().for_each(|v| *v = 1.0 / n);
        }
        StrategyProfile { layout, data }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn players(&self) -> usize {
        self.layout.players()
    }

    pub fn player(&self, i: usize) -> &[f64] {
        &self.data[self.layout.range(i)]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    pub fn to_blocks(&self) -> Vec<Vec<f64>> {
        (0..self.players()).map(|i| self.player(i).to_vec()).collect()
    }

    pub fn min_coordinate(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `‖self − other‖∞` over all players' coordinates.
    pub fn max_distance(&self, other: &StrategyProfile) -> f64 {
        max_norm_distance(&self.data, &other.data)
    }

    /// Per-player set of actions with probability above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<Vec<usize>> {
        (0..self.players())
            .map(|i| {
                self.player(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v > threshold)
                    .map(|(a, _)| a)
                    .collect()
            })
            .collect()
    }
}

/// The image of an interior profile under the per-player log-ratio map.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeState {
    layout: Layout,
    data: Vec<f64>,
}

impl CumulativeState {
    pub fn new<V: AsRef<[f64]>>(blocks: &[V]) -> Result<Self> {
        let sizes: Vec<usize> = blocks.iter().map(|b| b.as_ref().len()).collect();
        let data = blocks.iter().flat_map(|b| b.as_ref().iter().copied()).collect();
        CumulativeState::from_flat(Layout::new(&sizes), data)
    }

    /// `layout` is the reduced layout (`n_i − 1` per player).
    pub fn from_flat(layout: Layout, data: Vec<f64>) -> Result<Self> {
        if layout.total() != data.len() {
            return Err(Error::LayoutMismatch);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "cumulative state",
            });
        }
        Ok(CumulativeState { layout, data })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn players(&self) -> usize {
        self.layout.players()
    }

    pub fn player(&self, i: usize) -> &[f64] {
        &self.data[self.layout.range(i)]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }
}

pub(crate) fn max_norm_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sums_and_negatives() {
        assert!(StrategyProfile::new(&[[0.5, 0.5]]).is_ok());
        assert!(matches!(
            StrategyProfile::new(&[[0.5, 0.4]]),
            Err(Error::InvalidProfile { player: 0, .. })
        ));
        assert!(StrategyProfile::new(&[[1.5, -0.5]]).is_err());
    }

    #[test]
    fn normalizes_typed_decimals() {
        let x = StrategyProfile::normalized(&[[0.333, 0.333, 0.333]]).unwrap();
        assert!((x.player(0)[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn support_and_layout() {
        let x = StrategyProfile::new(&[vec![0.5, 0.5, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(x.support(1e-9), vec![vec![0, 1], vec![0]]);
        assert_eq!(x.layout().reduced().sizes(), vec![2, 1]);
    }
}

// Serialized as the list of per-player blocks.
#[cfg(feature = "serde")]
mod ser {
    use super::*;
    use serde::ser::{Serialize, SerializeSeq, Serializer};

    fn blocks<S: Serializer>(layout: &Layout, data: &[f64], s: S) -> core::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(layout.players()))?;
        for i in 0..layout.players() {
            seq.serialize_element(&data[layout.range(i)])?;
        }
        seq.end()
    }

    impl Serialize for Layout {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            self.sizes().serialize(s)
        }
    }

    impl Serialize for StrategyProfile {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            blocks(&self.layout, &self.data, s)
        }
    }

    impl Serialize for CumulativeState {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            blocks(&self.layout, &self.data, s)
        }
    }
}
