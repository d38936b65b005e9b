//! Replicator dynamics on graphical polymatrix games with self-loops.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational: game
//! definitions and payoffs, the log-ratio chart onto cumulative-payoff space,
//! an adaptive Dormand–Prince integrator, equilibrium computation for zero-sum
//! games, and the analyses that measure conserved quantities and classify the
//! long-run behavior of orbits.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod cloud;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod games;
pub mod linalg;
pub mod lp;
pub mod ode;
pub mod profile;
pub mod transform;

pub use analysis::classify::{
    classify_limit_behavior, divergence_witness, zero_sum_equivalent, BehaviorKind, ClassifyOptions, DivergenceWitness,
    LimitVerdict,
};
pub use analysis::kl::{boundary_gap_bound, kl_sum, kl_time_derivative, kl_trace, KlTrace};
pub use analysis::period::{detect_period, refine_period, PeriodEstimate, PeriodOutcome, RefinedPeriod};
pub use analysis::recurrence::{recurrence_stats, RecurrenceOptions, RecurrenceReport, ReturnEvent};
pub use analysis::support::support_limit;
pub use analysis::volume::{estimate_volume, volume_trace, VolumeEstimate, VolumeTrace};
pub use dynamics::{
    evolve_cloud, flow_at, integrate, time_average, CloudSnapshot, CoordinateSystem, IntegratorOptions, Trajectory,
};
pub use equilibrium::{
    find_interior_nash, find_interior_nash_polymatrix, find_max_support_nash, is_nash, EquilibriumResult,
    NashCertificate,
};
pub use error::{Error, Result};
pub use game::{lift_to_two_player, zero_sum_decomposition, Edge, Game, GameSpec, ZeroSumVerdict};
pub use linalg::Matrix;
pub use profile::{CumulativeState, Layout, StrategyProfile};
pub use transform::{
    divergence_at_profile, divergence_cumulative, from_cumulative, to_cumulative, vector_field_cumulative,
    vector_field_strategy,
};
