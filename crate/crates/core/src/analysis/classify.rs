//! Predicts the long-run behavior of an orbit from the structure of the game
//! and checks the prediction on an integrated orbit.
//!
//! A zero-sum-equivalent game with an interior Nash equilibrium is recurrent
//! (periodic with three actions); without one, interior orbits collapse onto
//! the face spanned by a maximal-support equilibrium.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::kl::{boundary_gap_bound, kl_sum};
use super::period::{detect_period, PeriodOutcome};
use super::recurrence::{recurrence_stats, RecurrenceOptions, ReturnEvent};
use super::support::{support_limit, DEFAULT_SUPPORT_THRESHOLD, DEFAULT_TAIL_FRACTION};
use crate::dynamics::{integrate, CoordinateSystem, IntegratorOptions, Trajectory};
use crate::equilibrium::{
    find_interior_nash, find_interior_nash_polymatrix, find_max_support_nash, maximal_supports, EquilibriumResult,
};
use crate::error::Result;
use crate::game::{zero_sum_decomposition, Game, GameSpec, ZERO_SUM_TOL};
use crate::profile::StrategyProfile;
use crate::transform::{divergence_at_profile, from_cumulative, INTERIOR_FLOOR};
use crate::CumulativeState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BehaviorKind {
    Recurrent,
    Periodic,
    BoundaryCollapse,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClassifyOptions {
    pub integrator: IntegratorOptions,
    pub recurrence: RecurrenceOptions,
    pub period_tol: f64,
    pub support_threshold: f64,
    pub tail_fraction: f64,
    pub zero_sum_tol: f64,
    /// Points probed for a nonzero divergence when the game is not zero-sum.
    pub witness_samples: usize,
    /// Divergence magnitude that counts as a witness.
    pub witness_threshold: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            integrator: IntegratorOptions::default().with_max_time(500.0),
            recurrence: RecurrenceOptions::default(),
            period_tol: 1e-6,
            support_threshold: DEFAULT_SUPPORT_THRESHOLD,
            tail_fraction: DEFAULT_TAIL_FRACTION,
            zero_sum_tol: ZERO_SUM_TOL,
            witness_samples: 1000,
            witness_threshold: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DivergenceWitness {
    pub point: StrategyProfile,
    pub divergence: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LimitVerdict {
    pub predicted: BehaviorKind,
    /// Behavior measured on the integrated orbit.
    pub kind: BehaviorKind,
    pub agrees: bool,
    pub is_zero_sum: bool,
    pub equilibrium: Option<EquilibriumResult>,
    /// Union of all maximal equilibrium supports, when no interior equilibrium exists.
    pub maximal_support_union: Option<Vec<Vec<usize>>>,
    pub recurrence_returns: Vec<ReturnEvent>,
    pub estimated_period: Option<f64>,
    pub limit_support: Vec<Vec<usize>>,
    pub divergence_witness: Option<DivergenceWitness>,
    pub thresholds: ClassifyOptions,
    pub evidence: BTreeMap<String, f64>,
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let (mut inv, mut f) = (0.0, 1.0 / base as f64);
    while k > 0 {
        inv += (k % base) as f64 * f;
        k /= base;
        f /= base as f64;
    }
    inv
}

fn primes(count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut c = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Deterministic probe of cumulative space (a Halton sequence on `[-3, 3]^d`)
/// for the point of largest absolute divergence. Returns it once it exceeds
/// `threshold`, or the largest seen otherwise.
pub fn divergence_witness(game: &Game, samples: usize, threshold: f64) -> DivergenceWitness {
    let reduced = game.layout().reduced();
    let dim = reduced.total();
    let bases = primes(dim);
    let mut best = DivergenceWitness {
        point: StrategyProfile::uniform(&game.action_counts()),
        divergence: divergence_at_profile(game, &StrategyProfile::uniform(&game.action_counts())),
    };
    for k in 1..=samples as u64 {
        if best.divergence.abs() > threshold {
            break;
        }
        let y: Vec<f64> = (0..dim).map(|d| 6.0 * radical_inverse(k, bases[d]) - 3.0).collect();
        let Ok(state) = CumulativeState::from_flat(reduced.clone(), y) else {
            continue;
        };
        let x = from_cumulative(&state);
        let div = divergence_at_profile(game, &x);
        if div.abs() > best.divergence.abs() {
            best = DivergenceWitness {
                point: x,
                divergence: div,
            };
        }
    }
    best
}

/// Replaces every self-loop that is zero-sum-equivalent by its antisymmetric
/// part, which induces the same flow and the same Nash set. Returns `None`
/// if some loop fails the decomposition or the result is not block
/// antisymmetric within `tol`.
pub fn zero_sum_equivalent(game: &Game, tol: f64) -> Option<Game> {
    let mut spec = GameSpec::new(game.action_counts());
    for e in game.edges() {
        let m = if e.from == e.to {
            let v = zero_sum_decomposition(&e.matrix, tol);
            if !v.is_zero_sum {
                return None;
            }
            v.antisymmetric_part
        } else {
            e.matrix.clone()
        };
        spec = spec.edge(e.from, e.to, m);
    }
    spec.validate().ok().filter(|g| g.zero_sum_violation() <= tol)
}

fn orbit(
    game: &Game,
    x0: &StrategyProfile,
    opts: &ClassifyOptions,
    reference: Option<&StrategyProfile>,
) -> Result<Trajectory> {
    let interior = x0.min_coordinate() >= INTERIOR_FLOOR;
    let integrator = IntegratorOptions {
        coordinate_system: if interior {
            opts.integrator.coordinate_system
        } else {
            CoordinateSystem::Strategy
        },
        reference: reference.cloned(),
        ..opts.integrator.clone()
    };
    integrate(game, x0, &integrator)
}

fn strictly_smaller(support: &[Vec<usize>], game: &Game) -> bool {
    support.iter().enumerate().any(|(i, s)| s.len() < game.actions(i))
}

fn contained(inner: &[Vec<usize>], outer: &[Vec<usize>]) -> bool {
    inner.iter().zip(outer).all(|(a, b)| a.iter().all(|v| b.contains(v)))
}

fn union_of(supports: &[Vec<usize>]) -> Vec<usize> {
    let mut u: Vec<usize> = supports.iter().flatten().copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

fn agrees(predicted: BehaviorKind, measured: BehaviorKind) -> bool {
    match predicted {
        BehaviorKind::Recurrent => matches!(measured, BehaviorKind::Recurrent | BehaviorKind::Periodic),
        other => other == measured,
    }
}

pub fn classify_limit_behavior(game: &Game, x0: &StrategyProfile, opts: &ClassifyOptions) -> Result<LimitVerdict> {
    game.check_profile(x0)?;
    let mut evidence = BTreeMap::new();
    let full: Vec<Vec<usize>> = (0..game.players()).map(|i| (0..game.actions(i)).collect()).collect();
    let mut verdict = LimitVerdict {
        predicted: BehaviorKind::Undetermined,
        kind: BehaviorKind::Undetermined,
        agrees: true,
        is_zero_sum: false,
        equilibrium: None,
        maximal_support_union: None,
        recurrence_returns: Vec::new(),
        estimated_period: None,
        limit_support: full.clone(),
        divergence_witness: None,
        thresholds: opts.clone(),
        evidence: BTreeMap::new(),
    };

    let equivalent = zero_sum_equivalent(game, opts.zero_sum_tol);
    verdict.is_zero_sum = equivalent.is_some();
    let Some(reduced_game) = equivalent else {
        let w = divergence_witness(game, opts.witness_samples, opts.witness_threshold);
        evidence.insert("divergence_witness".to_string(), w.divergence);
        verdict.divergence_witness = Some(w);
        verdict.evidence = evidence;
        return Ok(verdict);
    };
    evidence.insert("zero_sum_violation".to_string(), reduced_game.zero_sum_violation());

    let single = game.players() == 1;
    let interior = if single {
        find_interior_nash(&reduced_game)?
    } else {
        find_interior_nash_polymatrix(&reduced_game)?
    };

    match interior {
        Some(eq) => {
            verdict.predicted = if single && game.actions(0) == 3 {
                BehaviorKind::Periodic
            } else {
                BehaviorKind::Recurrent
            };
            let traj = orbit(game, x0, opts, Some(&eq.profile))?;
            if let Some(drift) = traj.diagnostics.kl_drift {
                evidence.insert("kl_drift".to_string(), drift);
            }
            let min_coord = traj
                .states
                .iter()
                .map(|s| s.min_coordinate())
                .fold(f64::INFINITY, f64::min);
            evidence.insert("min_coordinate".to_string(), min_coord);
            if let Ok(level) = kl_sum(&eq.profile, x0) {
                evidence.insert("kl_initial".to_string(), level);
                evidence.insert("boundary_gap_bound".to_string(), boundary_gap_bound(&eq.profile, level));
            }
            let rec = recurrence_stats(&traj, x0, &opts.recurrence)?;
            evidence.insert("recurrence_events".to_string(), rec.events.len() as f64);
            verdict.limit_support = support_limit(&traj, opts.support_threshold, opts.tail_fraction)?;
            verdict.kind = if rec.events.is_empty() {
                BehaviorKind::Undetermined
            } else {
                BehaviorKind::Recurrent
            };
            if verdict.predicted == BehaviorKind::Periodic {
                match detect_period(&traj, opts.period_tol) {
                    Ok(PeriodOutcome::Stationary) => {
                        evidence.insert("stationary".to_string(), 1.0);
                        verdict.kind = BehaviorKind::Periodic;
                    }
                    Ok(PeriodOutcome::Periodic(est)) => {
                        evidence.insert("return_error".to_string(), est.return_error);
                        verdict.estimated_period = Some(est.period);
                        verdict.kind = BehaviorKind::Periodic;
                    }
                    Ok(PeriodOutcome::Aperiodic(est)) => {
                        evidence.insert("return_error".to_string(), est.return_error);
                    }
                    Err(_) => {
                        evidence.insert("section_crossings".to_string(), 0.0);
                    }
                }
            }
            verdict.recurrence_returns = rec.events;
            verdict.equilibrium = Some(eq);
        }
        None if single => {
            verdict.predicted = BehaviorKind::BoundaryCollapse;
            let eq = find_max_support_nash(&reduced_game)?;
            let union = alloc::vec![union_of(&maximal_supports(&reduced_game)?)];
            let traj = orbit(game, x0, opts, None)?;
            let last = traj.final_state();
            evidence.insert(
                "final_distance_to_equilibrium".to_string(),
                last.max_distance(&eq.profile),
            );
            if let (Ok(k0), Ok(k1)) = (kl_sum(&eq.profile, x0), kl_sum(&eq.profile, last)) {
                evidence.insert("kl_decrease".to_string(), k0 - k1);
            }
            let tail = traj.tail_from(traj.final_time() * (1.0 - opts.tail_fraction));
            let outside_max = tail
                .states
                .iter()
                .flat_map(|s| {
                    s.player(0)
                        .iter()
                        .enumerate()
                        .filter(|(a, _)| !union[0].contains(a))
                        .map(|(_, &v)| v)
                })
                .fold(0.0, f64::max);
            evidence.insert("tail_max_outside_support".to_string(), outside_max);
            let limit = support_limit(&traj, opts.support_threshold, opts.tail_fraction)?;
            verdict.kind = if strictly_smaller(&limit, game) && contained(&limit, &union) {
                BehaviorKind::BoundaryCollapse
            } else {
                BehaviorKind::Undetermined
            };
            verdict.limit_support = limit;
            verdict.maximal_support_union = Some(union);
            verdict.equilibrium = Some(eq);
        }
        None => {
            let traj = orbit(game, x0, opts, None)?;
            let rec = recurrence_stats(&traj, x0, &opts.recurrence)?;
            let limit = support_limit(&traj, opts.support_threshold, opts.tail_fraction)?;
            verdict.kind = if !rec.events.is_empty() {
                BehaviorKind::Recurrent
            } else if strictly_smaller(&limit, game) {
                BehaviorKind::BoundaryCollapse
            } else {
                BehaviorKind::Undetermined
            };
            verdict.recurrence_returns = rec.events;
            verdict.limit_support = limit;
        }
    }
    if verdict.predicted != BehaviorKind::Undetermined {
        verdict.agrees = agrees(verdict.predicted, verdict.kind);
    }
    verdict.evidence = evidence;
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games;
    use crate::linalg::Matrix;
    use alloc::vec;

    fn short() -> ClassifyOptions {
        ClassifyOptions {
            integrator: IntegratorOptions::default().with_max_time(100.0),
            ..Default::default()
        }
    }

    #[test]
    fn rps_periodic() {
        let x = StrategyProfile::new(&[[0.5, 0.25, 0.25]]).unwrap();
        let v = classify_limit_behavior(&games::rps(), &x, &short()).unwrap();
        assert_eq!(v.predicted, BehaviorKind::Periodic);
        assert_eq!(v.kind, BehaviorKind::Periodic);
        assert!(v.agrees && v.is_zero_sum);
        assert!(v.estimated_period.unwrap() > 0.0);
        assert_eq!(v.limit_support, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn fork_collapses() {
        let x = StrategyProfile::uniform(&[4]);
        let v = classify_limit_behavior(&games::rps_fork(), &x, &short()).unwrap();
        assert_eq!(v.predicted, BehaviorKind::BoundaryCollapse);
        assert_eq!(v.kind, BehaviorKind::BoundaryCollapse);
        assert_eq!(v.limit_support, vec![vec![0, 1, 2]]);
        assert!(v.evidence["final_distance_to_equilibrium"] < 1e-3);
    }

    #[test]
    fn column_constant_shift_is_equivalent() {
        let mut m = games::rps_matrix();
        for r in 0..3 {
            for (c, k) in [5.0, -2.0, 7.0].iter().enumerate() {
                m.set(r, c, m.get(r, c) + k);
            }
        }
        let x = StrategyProfile::new(&[[0.5, 0.25, 0.25]]).unwrap();
        let v = classify_limit_behavior(&Game::single_player(m).unwrap(), &x, &short()).unwrap();
        assert!(v.is_zero_sum);
        assert_eq!(v.kind, BehaviorKind::Periodic);
    }

    #[test]
    fn non_zero_sum_is_undetermined() {
        let m = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        let v = classify_limit_behavior(
            &Game::single_player(m).unwrap(),
            &StrategyProfile::uniform(&[3]),
            &short(),
        )
        .unwrap();
        assert!(!v.is_zero_sum);
        assert_eq!(v.kind, BehaviorKind::Undetermined);
        assert!(v.divergence_witness.unwrap().divergence.abs() > 1e-6);
    }

    #[test]
    fn first_primes() {
        assert_eq!(primes(6), vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn halton_is_in_unit_interval() {
        for k in 1..200 {
            let v = radical_inverse(k, 3);
            assert!((0.0..1.0).contains(&v));
        }
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }
}
