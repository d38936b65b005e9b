use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use replicator_core::analysis::classify::divergence_witness;
use replicator_core::cloud::{disk_point, profiles_from_planar, sunflower_disk};
use replicator_core::games::{rps, rps_fork};
use replicator_core::*;

fn p(x: &[f64]) -> StrategyProfile {
    StrategyProfile::new(&[x]).unwrap()
}

fn fork_star() -> StrategyProfile {
    p(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0])
}

#[test]
fn kl_closed_values() {
    let star = StrategyProfile::uniform(&[3]);
    let x = p(&[0.5, 0.25, 0.25]);
    let expect = ((2.0f64 / 3.0).ln() + 2.0 * (4.0f64 / 3.0).ln()) / 3.0;
    assert!((kl_sum(&star, &x).unwrap() - expect).abs() < 1e-15);
    let four = StrategyProfile::uniform(&[4]);
    let direct: f64 = (0..3).map(|_| (1.0f64 / 3.0) * ((1.0f64 / 3.0) / 0.25).ln()).sum();
    assert!((kl_sum(&fork_star(), &four).unwrap() - direct).abs() < 1e-15);
    assert!(matches!(
        kl_sum(&star, &p(&[0.5, 0.5, 0.0])),
        Err(Error::InfiniteDivergence { .. })
    ));
}

#[test]
fn kl_derivative_negative_without_interior_nash() {
    let x = StrategyProfile::uniform(&[4]);
    let d = kl_time_derivative(&rps_fork(), &fork_star(), &x).unwrap();
    // Σ u_i(x) − Σ x*_α u_α(x) by hand: u_i = x·Ax = 0 for antisymmetric A.
    let u = rps_fork().payoff_vector(&x, 0);
    let expect = -u[..3].iter().sum::<f64>() / 3.0;
    assert!(d < 0.0);
    assert!((d - expect).abs() < 1e-15);
}

#[test]
fn kl_derivative_matches_finite_differences() {
    let h = 1e-4;
    for (game, star, x0) in [
        (rps(), StrategyProfile::uniform(&[3]), p(&[0.5, 0.25, 0.25])),
        (rps_fork(), fork_star(), p(&[0.1, 0.2, 0.3, 0.4])),
    ] {
        for t in [0.5, 2.0, 7.0] {
            let opts = IntegratorOptions::default();
            let at = |s: f64| kl_sum(&star, &flow_at(&game, &x0, s, &opts).unwrap()).unwrap();
            let fd = (at(t + h) - at(t - h)) / (2.0 * h);
            let x = flow_at(&game, &x0, t, &opts).unwrap();
            let analytic = kl_time_derivative(&game, &star, &x).unwrap();
            assert!((fd - analytic).abs() < 1e-6, "t {t}: {fd} vs {analytic}");
        }
    }
}

#[test]
fn kl_strictly_decreases_away_from_boundary() {
    let traj = integrate(
        &rps_fork(),
        &p(&[0.25, 0.25, 0.25, 0.25]),
        &IntegratorOptions::default().with_max_time(50.0),
    )
    .unwrap();
    let trace = kl_trace(&rps_fork(), &fork_star(), &traj).unwrap();
    for k in 1..trace.times.len() {
        let drop = trace.kl_values[k - 1] - trace.kl_values[k];
        assert!(drop >= 0.0);
        if traj.states[k].min_coordinate() > 1e-6 {
            let dt = trace.times[k] - trace.times[k - 1];
            assert!(drop / dt > 1e-10, "t {}: rate {}", trace.times[k], drop / dt);
        }
    }
}

#[test]
fn boundary_gap_examples() {
    let star = StrategyProfile::uniform(&[3]);
    assert!((boundary_gap_bound(&star, 0.0) - 1.0 / 27.0).abs() < 1e-15);
    let levels = [0.0, 0.1, 1.0, 5.0, 20.0];
    let deltas: Vec<f64> = levels.iter().map(|&c| boundary_gap_bound(&star, c)).collect();
    assert!(deltas.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn kl_is_constant_on_the_periodic_orbit() {
    let star = StrategyProfile::uniform(&[3]);
    let x0 = p(&[0.5, 0.25, 0.25]);
    let traj = integrate(&rps(), &x0, &IntegratorOptions::default().with_max_time(100.0)).unwrap();
    let period = detect_period(&traj, 1e-6).unwrap().period().unwrap();
    let k0 = kl_sum(&star, &x0).unwrap();
    for dt in [-0.01, 0.0, 0.01] {
        let y = flow_at(&rps(), &x0, period + dt, &IntegratorOptions::default()).unwrap();
        assert!((kl_sum(&star, &y).unwrap() - k0).abs() < 2e-5);
    }
}

#[test]
fn period_is_consistent_across_tolerances() {
    let x0 = p(&[0.5, 0.25, 0.25]);
    let measure = |rel: f64| {
        let traj = integrate(
            &rps(),
            &x0,
            &IntegratorOptions::default().with_tolerance(rel).with_max_time(60.0),
        )
        .unwrap();
        match detect_period(&traj, 1e-6).unwrap() {
            PeriodOutcome::Periodic(e) => e,
            other => panic!("{other:?}"),
        }
    };
    let (a, b) = (measure(1e-9), measure(1e-12));
    assert!(a.return_error < 1e-6);
    assert!((a.period - b.period).abs() < 1e-5);
    assert!(!a.undersampled);
    let avg = time_average(&rps(), &x0, a.period, &IntegratorOptions::default()).unwrap();
    assert!(avg.max_distance(&StrategyProfile::uniform(&[3])) < 1e-4);
}

#[test]
fn rest_point_has_no_period() {
    let traj = integrate(
        &rps(),
        &StrategyProfile::uniform(&[3]),
        &IntegratorOptions::default().with_max_time(20.0),
    )
    .unwrap();
    assert!(matches!(detect_period(&traj, 1e-6).unwrap(), PeriodOutcome::Stationary));
    let rec = recurrence_stats(&traj, traj.initial_state(), &RecurrenceOptions::default()).unwrap();
    assert!(rec.stationary);
    assert!(rec.events.len() <= 1);
}

#[test]
fn rps_orbit_returns() {
    let x0 = p(&[0.5, 0.25, 0.25]);
    let traj = integrate(&rps(), &x0, &IntegratorOptions::default().with_max_time(500.0)).unwrap();
    let rec = recurrence_stats(&traj, &x0, &RecurrenceOptions::default()).unwrap();
    assert!(!rec.stationary);
    assert!(!rec.events.is_empty());
    assert!(rec.events.windows(2).all(|w| w[1].time - w[0].time >= 0.5));
    assert!(rec.events.iter().all(|e| e.time > 1.0 && e.distance < 1e-2));
}

#[test]
fn fork_orbit_never_returns() {
    let x0 = p(&[0.25, 0.25, 0.25, 0.25]);
    let traj = integrate(&rps_fork(), &x0, &IntegratorOptions::default().with_max_time(500.0)).unwrap();
    let opts = RecurrenceOptions {
        eps: 1e-3,
        ..RecurrenceOptions::default()
    };
    assert!(recurrence_stats(&traj, &x0, &opts).unwrap().events.is_empty());
    assert_eq!(support_limit(&traj, 1e-6, 0.2).unwrap(), vec![vec![0, 1, 2]]);
}

#[test]
fn off_center_fork_orbit_has_boundary_cycle() {
    let x0 = p(&[3.0 / 16.0, 5.0 / 16.0, 0.25, 0.25]);
    let opts = IntegratorOptions {
        coordinate_system: CoordinateSystem::Strategy,
        ..IntegratorOptions::default().with_max_time(500.0)
    };
    let traj = integrate(&rps_fork(), &x0, &opts).unwrap();
    assert_eq!(support_limit(&traj, 1e-6, 0.2).unwrap(), vec![vec![0, 1, 2]]);
    let tail = traj.tail_from(400.0);
    let projected: Vec<StrategyProfile> = tail
        .states
        .iter()
        .map(|s| StrategyProfile::normalized(&[&s.player(0)[..3]]).unwrap())
        .collect();
    let proj = Trajectory::from_samples(tail.times.clone(), projected).unwrap();
    let est = detect_period(&proj, 1e-4).unwrap();
    assert!(matches!(est, PeriodOutcome::Periodic(_)), "{est:?}");
    // Not converging: the tail keeps a positive distance from (1/3, 1/3, 1/3).
    let far = proj
        .states
        .iter()
        .map(|s| s.max_distance(&StrategyProfile::uniform(&[3])))
        .fold(0.0, f64::max);
    assert!(far > 1e-3);
}

#[test]
fn rps_support_limit_is_full() {
    let traj = integrate(
        &rps(),
        &p(&[0.5, 0.25, 0.25]),
        &IntegratorOptions::default().with_max_time(100.0),
    )
    .unwrap();
    assert_eq!(support_limit(&traj, 1e-6, 0.2).unwrap(), vec![vec![0, 1, 2]]);
}

/// Convex hull area by Andrew's monotone chain, the oracle for cloud areas.
fn hull_area(points: &[[f64; 2]]) -> f64 {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let ordered: Vec<[f64; 2]> = if pass == 0 {
            pts.clone()
        } else {
            pts.iter().rev().copied().collect()
        };
        for q in ordered {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    let n = hull.len();
    (0..n)
        .map(|k| hull[k][0] * hull[(k + 1) % n][1] - hull[k][1] * hull[(k + 1) % n][0])
        .sum::<f64>()
        / 2.0
}

#[test]
fn disk_area() {
    let r = 0.7;
    let truth = std::f64::consts::PI * r * r;
    let lattice = estimate_volume(&sunflower_disk([1.0, -2.0], r, 500), 3.0).unwrap();
    assert!(
        (lattice.area - truth).abs() / truth < 0.05,
        "{} vs {truth}",
        lattice.area
    );

    // 500 random points leave about 5% of the disk outside their hull, so a
    // random cloud is measured against its own hull instead of πr².
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pts: Vec<[f64; 2]> = (0..500)
        .map(|_| disk_point([1.0, -2.0], r, rng.random(), rng.random()))
        .collect();
    let est = estimate_volume(&pts, 3.0).unwrap();
    let hull = hull_area(&pts);
    assert!(est.area <= hull * (1.0 + 1e-12));
    assert!((hull - est.area) / hull < 0.05, "{} vs hull {hull}", est.area);
}

#[test]
fn pruning_separates_clusters() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pts = Vec::new();
    let mut hulls = 0.0;
    for center in [[0.0, 0.0], [50.0, 0.0]] {
        let cluster: Vec<[f64; 2]> = (0..300)
            .map(|_| disk_point(center, 1.0, rng.random(), rng.random()))
            .collect();
        hulls += hull_area(&cluster);
        pts.extend(cluster);
    }
    // Without pruning the bridge between the clusters adds about 100.
    assert!(estimate_volume(&pts, 1e9).unwrap().area > 90.0);
    let est = estimate_volume(&pts, 3.0).unwrap();
    assert!(est.pruned > 0);
    assert!((est.area - hulls).abs() / hulls < 0.05, "{} vs {hulls}", est.area);
}

#[test]
fn rps_cloud_keeps_kl_and_area() {
    let cloud = profiles_from_planar(&sunflower_disk([0.0, 0.0], 0.2, 500));
    let snaps = evolve_cloud(&rps(), &cloud, &[0.0, 112.0, 225.0], &IntegratorOptions::default()).unwrap();
    let star = StrategyProfile::uniform(&[3]);
    for s in &snaps[1..] {
        for (a, b) in snaps[0].profiles.iter().zip(&s.profiles) {
            assert!((kl_sum(&star, a).unwrap() - kl_sum(&star, b).unwrap()).abs() < 1e-6);
        }
    }
    let trace = volume_trace(&snaps, 3.0).unwrap();
    assert!(trace.max_relative_deviation() < 0.02);
}

#[test]
fn non_zero_sum_cloud_changes_area() {
    // Adding a symmetric part makes the game fail zero-sum equivalence.
    let a = Matrix::from_rows(&[[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut best: f64 = 0.0;
    for _ in 0..10 {
        let mut m = a.clone();
        for r in 0..3 {
            for c in 0..3 {
                m.set(r, c, m.get(r, c) + rng.random_range(-1.0..1.0));
            }
        }
        let g = Game::single_player(m.clone()).unwrap();
        if zero_sum_decomposition(&m, 1e-9).max_violation < 0.1 {
            continue;
        }
        let cloud = profiles_from_planar(&sunflower_disk([0.0, 0.0], 0.2, 200));
        let Ok(snaps) = evolve_cloud(&g, &cloud, &[0.0, 20.0], &IntegratorOptions::default()) else {
            continue;
        };
        if let Ok(trace) = volume_trace(&snaps, 3.0) {
            best = best.max(trace.max_relative_deviation());
        }
        if best > 0.05 {
            break;
        }
    }
    assert!(best > 0.05, "largest change {best}");
}

#[test]
fn volume_rejects_single_point_and_higher_dimensions() {
    let snaps = evolve_cloud(&rps(), &[p(&[0.5, 0.25, 0.25])], &[0.0], &IntegratorOptions::default()).unwrap();
    assert!(matches!(
        volume_trace(&snaps, 3.0),
        Err(Error::DegenerateCloud { points: 1 })
    ));
    let snaps = evolve_cloud(
        &rps_fork(),
        &[StrategyProfile::uniform(&[4])],
        &[0.0],
        &IntegratorOptions::default(),
    )
    .unwrap();
    assert!(matches!(
        volume_trace(&snaps, 3.0),
        Err(Error::NotPlanar { dimension: 3 })
    ));
}

#[test]
fn classify_examples() {
    let opts = ClassifyOptions::default();
    let v = classify_limit_behavior(&rps(), &p(&[0.5, 0.25, 0.25]), &opts).unwrap();
    assert_eq!(
        (v.predicted, v.kind, v.agrees),
        (BehaviorKind::Periodic, BehaviorKind::Periodic, true)
    );
    assert!(v.estimated_period.unwrap() > 0.0);

    let v = classify_limit_behavior(&rps_fork(), &StrategyProfile::uniform(&[4]), &opts).unwrap();
    assert_eq!(v.predicted, BehaviorKind::BoundaryCollapse);
    assert!(v.agrees);
    assert_eq!(v.limit_support, vec![vec![0, 1, 2]]);

    let skewed = Matrix::from_rows(&[[0.0, 2.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]]).unwrap();
    let g = Game::single_player(skewed).unwrap();
    let v = classify_limit_behavior(&g, &p(&[0.5, 0.25, 0.25]), &opts).unwrap();
    assert_eq!(v.kind, BehaviorKind::Undetermined);
    assert!(!v.is_zero_sum);
    assert!(v.divergence_witness.unwrap().divergence.abs() > 1e-6);
}

#[test]
fn witness_search_finds_nonzero_divergence() {
    let g = Game::single_player(Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap()).unwrap();
    assert!(divergence_witness(&g, 1000, 1e-6).divergence.abs() > 1e-6);
}
