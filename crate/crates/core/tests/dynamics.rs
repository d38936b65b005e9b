use replicator_core::games::{rps, rps_fork};
use replicator_core::*;

fn rps_start() -> StrategyProfile {
    StrategyProfile::new(&[[0.5, 0.25, 0.25]]).unwrap()
}

fn uniform3() -> StrategyProfile {
    StrategyProfile::uniform(&[3])
}

#[test]
fn rest_point_is_constant() {
    let traj = integrate(&rps(), &uniform3(), &IntegratorOptions::default().with_max_time(10.0)).unwrap();
    for s in &traj.states {
        assert!(s.max_distance(&uniform3()) < 1e-15);
    }
}

#[test]
fn kl_conserved_over_hundred_time_units() {
    let opts = IntegratorOptions {
        reference: Some(uniform3()),
        ..IntegratorOptions::default().with_max_time(100.0)
    };
    let traj = integrate(&rps(), &rps_start(), &opts).unwrap();
    assert!(traj.diagnostics.kl_drift.unwrap() < 1e-6);
    let k0 = kl_sum(&uniform3(), &rps_start()).unwrap();
    for s in &traj.states {
        assert!((kl_sum(&uniform3(), s).unwrap() - k0).abs() < 1e-6);
    }
}

#[test]
fn self_convergence_at_unit_time() {
    let x = flow_at(&rps(), &rps_start(), 1.0, &IntegratorOptions::default()).unwrap();
    let tight = IntegratorOptions {
        max_step: 0.05,
        ..IntegratorOptions::default().with_tolerance(1e-12)
    };
    let reference = flow_at(&rps(), &rps_start(), 1.0, &tight).unwrap();
    assert!(x.max_distance(&reference) < 1e-7);
}

#[test]
fn flow_at_zero_is_identity() {
    let x0 = StrategyProfile::new(&[[0.2, 0.3, 0.5]]).unwrap();
    assert_eq!(flow_at(&rps(), &x0, 0.0, &IntegratorOptions::default()).unwrap(), x0);
}

#[test]
fn backward_flow_reverses_forward_flow() {
    let x0 = StrategyProfile::new(&[[0.2, 0.3, 0.5]]).unwrap();
    let opts = IntegratorOptions::default();
    let forward = flow_at(&rps(), &x0, 7.5, &opts).unwrap();
    let back = flow_at(&rps(), &forward, -7.5, &opts).unwrap();
    assert!(back.max_distance(&x0) < 1e-7);
}

#[test]
fn fork_vanishes_from_uniform_start() {
    let x0 = StrategyProfile::uniform(&[4]);
    let x = flow_at(&rps_fork(), &x0, 200.0, &IntegratorOptions::default()).unwrap();
    assert!(x.player(0)[3] < 1e-3);
}

// At the default max_step the step cap, not the tolerance, bounds the RPS
// error (about 2.6e-10 for any rel_tol above 1e-8), so the cap is lifted here.
#[test]
fn tightening_tolerance_reduces_error() {
    let loose = |rel: f64| IntegratorOptions {
        max_step: 10.0,
        ..IntegratorOptions::default().with_tolerance(rel)
    };
    let reference = flow_at(
        &rps(),
        &rps_start(),
        20.0,
        &IntegratorOptions {
            max_step: 0.05,
            ..IntegratorOptions::default().with_tolerance(1e-14)
        },
    )
    .unwrap();
    let err = |rel: f64| {
        flow_at(&rps(), &rps_start(), 20.0, &loose(rel))
            .unwrap()
            .max_distance(&reference)
    };
    for rel in [1e-5, 1e-6, 1e-7] {
        let (coarse, fine) = (err(rel), err(rel / 2.0));
        assert!(coarse >= 2.0 * fine, "rel {rel}: {coarse:e} vs {fine:e}");
    }
}

#[test]
fn long_run_kl_drift_at_default_tolerances() {
    let opts = IntegratorOptions {
        reference: Some(uniform3()),
        ..IntegratorOptions::default().with_max_time(1000.0)
    };
    let traj = integrate(&rps(), &StrategyProfile::new(&[[0.1, 0.6, 0.3]]).unwrap(), &opts).unwrap();
    assert!(traj.diagnostics.kl_drift.unwrap() < 1e-5);
}

#[test]
fn orbit_respects_boundary_gap() {
    for x0 in [[0.5, 0.25, 0.25], [0.05, 0.05, 0.9], [0.7, 0.2, 0.1]] {
        let p = StrategyProfile::new(&[x0]).unwrap();
        let delta = boundary_gap_bound(&uniform3(), kl_sum(&uniform3(), &p).unwrap());
        let traj = integrate(&rps(), &p, &IntegratorOptions::default().with_max_time(100.0)).unwrap();
        let lowest = traj.states.iter().map(|s| s.min_coordinate()).fold(1.0, f64::min);
        assert!(lowest >= delta, "{lowest} < {delta}");
    }
}

#[test]
fn lifted_symmetric_state_stays_symmetric() {
    let g2 = lift_to_two_player(&rps_fork()).unwrap();
    let x = [0.1, 0.2, 0.3, 0.4];
    let p = StrategyProfile::new(&[x, x]).unwrap();
    let traj = integrate(&g2, &p, &IntegratorOptions::default().with_max_time(100.0)).unwrap();
    for s in &traj.states {
        let d = s
            .player(0)
            .iter()
            .zip(s.player(1))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(d < 1e-8);
    }
}

#[test]
fn strategy_chart_clips_and_reports() {
    let opts = IntegratorOptions {
        coordinate_system: CoordinateSystem::Strategy,
        ..IntegratorOptions::default().with_max_time(50.0)
    };
    let x0 = StrategyProfile::new(&[[0.4, 0.3, 0.3, 0.0]]).unwrap();
    let traj = integrate(&rps_fork(), &x0, &opts).unwrap();
    assert!(traj.cumulative_states.is_none());
    assert_eq!(traj.diagnostics.coordinate_system, CoordinateSystem::Strategy);
    for s in &traj.states {
        assert!(s.min_coordinate() >= 0.0);
        assert!((s.as_flat().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(s.player(0)[3], 0.0);
    }
}

#[test]
fn cumulative_chart_rejects_boundary_start() {
    let x0 = StrategyProfile::new(&[[0.5, 0.5, 0.0]]).unwrap();
    assert!(integrate(&rps(), &x0, &IntegratorOptions::default()).is_err());
}

#[test]
fn single_point_cloud_matches_integrate() {
    let x0 = rps_start();
    let times = [0.0, 3.0, 7.5];
    let snaps = evolve_cloud(&rps(), &[x0.clone()], &times, &IntegratorOptions::default()).unwrap();
    assert_eq!(snaps.len(), 3);
    for s in &snaps {
        let direct = flow_at(&rps(), &x0, s.time, &IntegratorOptions::default()).unwrap();
        assert!(s.profiles[0].max_distance(&direct) < 1e-9);
    }
}

#[test]
fn cloud_errors_carry_point_index() {
    let pts = [rps_start(), StrategyProfile::new(&[[1.0, 0.0, 0.0]]).unwrap()];
    match evolve_cloud(&rps(), &pts, &[0.0, 1.0], &IntegratorOptions::default()) {
        Err(Error::CloudPoint { index, .. }) => assert_eq!(index, 1),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn sample_count_matches_record_interval() {
    let traj = integrate(&rps(), &rps_start(), &IntegratorOptions::default().with_max_time(100.0)).unwrap();
    assert_eq!(traj.len(), 2001);
    assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(traj.final_time(), 100.0);
}
