use proptest::prelude::*;

use replicator_core::*;

fn antisymmetric(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-5.0f64..5.0, n * n).prop_map(move |v| {
        let mut m = Matrix::zeros(n, n);
        for r in 0..n {
            for c in r + 1..n {
                m.set(r, c, v[r * n + c]);
                m.set(c, r, -v[r * n + c]);
            }
        }
        m
    })
}

fn square(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-5.0f64..5.0, n * n).prop_map(move |v| Matrix::from_vec(n, n, v).unwrap())
}

fn interior(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

fn sized<T: std::fmt::Debug, S: Strategy<Value = T>>(
    f: impl Fn(usize) -> S + Clone + 'static,
) -> impl Strategy<Value = (usize, T)>
where
    S: 'static,
{
    (2usize..=6).prop_flat_map(move |n| f(n).prop_map(move |t| (n, t)))
}

fn a_and_x() -> impl Strategy<Value = (Matrix, Vec<f64>)> {
    (2usize..=6).prop_flat_map(|n| (antisymmetric(n), interior(n)))
}

fn m_and_x() -> impl Strategy<Value = (Matrix, Vec<f64>)> {
    (2usize..=6).prop_flat_map(|n| (square(n), interior(n)))
}

/// Three players with antisymmetric loops and a zero-sum pair of cross edges
/// between players 0 and 1, plus a one-way edge from 2 to 0.
fn mixed_game() -> impl Strategy<Value = (Game, Vec<Vec<f64>>)> {
    (2usize..=4, 2usize..=4, 2usize..=4).prop_flat_map(|(a, b, c)| {
        (
            antisymmetric(a),
            antisymmetric(b),
            antisymmetric(c),
            prop::collection::vec(-3.0f64..3.0, a * b),
            prop::collection::vec(-3.0f64..3.0, c * a),
            interior(a),
            interior(b),
            interior(c),
        )
            .prop_map(move |(l0, l1, l2, x01, x20, p0, p1, p2)| {
                let m01 = Matrix::from_vec(a, b, x01).unwrap();
                let m10 = m01.transpose().scaled(-1.0);
                let g = GameSpec::new(vec![a, b, c])
                    .edge(0, 0, l0)
                    .edge(1, 1, l1)
                    .edge(2, 2, l2)
                    .edge(0, 1, m01)
                    .edge(1, 0, m10)
                    .edge(2, 0, Matrix::from_vec(c, a, x20).unwrap())
                    .validate()
                    .unwrap();
                (g, vec![p0, p1, p2])
            })
    })
}

fn fd_trace(game: &Game, y: &CumulativeState, h: f64) -> f64 {
    let base = y.as_flat().to_vec();
    let mut trace = 0.0;
    for k in 0..base.len() {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[k] += h;
        minus[k] -= h;
        let fp = vector_field_cumulative(game, &CumulativeState::from_flat(y.layout().clone(), plus).unwrap());
        let fm = vector_field_cumulative(game, &CumulativeState::from_flat(y.layout().clone(), minus).unwrap());
        trace += (fp[k] - fm[k]) / (2.0 * h);
    }
    trace
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn antisymmetric_self_play_is_zero((a, x) in a_and_x()) {
        let g = Game::single_player(a.clone()).unwrap();
        let p = StrategyProfile::new(&[x.clone()]).unwrap();
        prop_assert!(g.payoff(&p, 0).abs() < 1e-12);
        prop_assert!(a.bilinear(&x, &x).abs() < 1e-12);
    }

    #[test]
    fn decomposition_recovers_column_constants(
        (b, c) in (2usize..=6).prop_flat_map(|n| (antisymmetric(n), prop::collection::vec(-10.0f64..10.0, n)))
    ) {
        let n = b.rows();
        let mut a = b.clone();
        for r in 0..n {
            for k in 0..n {
                a.set(r, k, b.get(r, k) + c[k]);
            }
        }
        let v = zero_sum_decomposition(&a, 1e-9);
        prop_assert!(v.is_zero_sum);
        for k in 0..n {
            prop_assert!((v.column_constants[k] - c[k]).abs() < 1e-9);
        }
        prop_assert!(v.antisymmetric_part.is_antisymmetric(1e-9));
    }

    #[test]
    fn lift_restricted_to_diagonal((a, x) in a_and_x()) {
        let g1 = Game::single_player(a).unwrap();
        let g2 = lift_to_two_player(&g1).unwrap();
        let p1 = StrategyProfile::new(&[x.clone()]).unwrap();
        let p2 = StrategyProfile::new(&[x.clone(), x]).unwrap();
        let u1 = g1.payoff_vector(&p1, 0);
        let u2 = g2.payoff_vector(&p2, 0);
        for (p, q) in u1.iter().zip(&u2) {
            prop_assert!((p - q).abs() < 1e-14);
        }
    }

    #[test]
    fn block_antisymmetric_payoffs_sum_to_zero(
        (a, b, x01, p0, p1) in (2usize..=5, 2usize..=5).prop_flat_map(|(a, b)| (
            antisymmetric(a), antisymmetric(b), prop::collection::vec(-3.0f64..3.0, a * b), interior(a), interior(b)
        ))
    ) {
        let (na, nb) = (a.rows(), b.rows());
        let m01 = Matrix::from_vec(na, nb, x01).unwrap();
        let g = GameSpec::new(vec![na, nb])
            .edge(0, 0, a)
            .edge(1, 1, b)
            .edge(1, 0, m01.transpose().scaled(-1.0))
            .edge(0, 1, m01)
            .validate()
            .unwrap();
        prop_assert!(g.is_zero_sum(1e-12));
        let x = StrategyProfile::new(&[p0, p1]).unwrap();
        prop_assert!((g.payoff(&x, 0) + g.payoff(&x, 1)).abs() < 1e-12);
    }

    #[test]
    fn chart_round_trip((_, x) in sized(interior)) {
        let p = StrategyProfile::new(&[x]).unwrap();
        let y = to_cumulative(&p).unwrap();
        let back = from_cumulative(&y);
        prop_assert!(back.max_distance(&p) < 1e-12);
        let again = to_cumulative(&back).unwrap();
        for (a, b) in again.as_flat().iter().zip(y.as_flat()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn divergence_vanishes_for_antisymmetric_loops((g, x) in mixed_game()) {
        let p = StrategyProfile::new(&x).unwrap();
        let y = to_cumulative(&p).unwrap();
        prop_assert!(divergence_cumulative(&g, &y).abs() < 1e-9);
    }

    #[test]
    fn divergence_matches_jacobian_trace((m, x) in m_and_x()) {
        let g = Game::single_player(m).unwrap();
        let y = to_cumulative(&StrategyProfile::new(&[x]).unwrap()).unwrap();
        let closed = divergence_cumulative(&g, &y);
        prop_assert!((closed - fd_trace(&g, &y, 1e-5)).abs() < 1e-5, "closed form {closed}");
    }

    #[test]
    fn divergence_matches_jacobian_trace_polymatrix((g, x) in mixed_game()) {
        let y = to_cumulative(&StrategyProfile::new(&x).unwrap()).unwrap();
        prop_assert!((divergence_cumulative(&g, &y) - fd_trace(&g, &y, 1e-5)).abs() < 1e-5);
    }

    #[test]
    fn cumulative_field_is_pushforward((m, x) in m_and_x()) {
        // dy_α/dt = d/dt ln(x_{α+1}/x_1) = ẋ_{α+1}/x_{α+1} − ẋ_1/x_1.
        let g = Game::single_player(m).unwrap();
        let p = StrategyProfile::new(&[x.clone()]).unwrap();
        let fx = vector_field_strategy(&g, &p);
        let fy = vector_field_cumulative(&g, &to_cumulative(&p).unwrap());
        for a in 0..fy.len() {
            let expect = fx[a + 1] / x[a + 1] - fx[0] / x[0];
            prop_assert!((fy[a] - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn strategy_field_is_tangent((g, x) in mixed_game()) {
        let p = StrategyProfile::new(&x).unwrap();
        let f = vector_field_strategy(&g, &p);
        for i in 0..3 {
            let s: f64 = f[g.layout().range(i)].iter().sum();
            prop_assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn equilibria_are_nash_with_zero_value(a in (2usize..=7).prop_flat_map(antisymmetric)) {
        let g = Game::single_player(a.clone()).unwrap();
        let eq = find_max_support_nash(&g).unwrap();
        let cert = is_nash(&g, &eq.profile, 1e-9).unwrap();
        prop_assert!(cert.is_nash, "residual {}", cert.max_residual());
        let x = eq.profile.as_flat();
        prop_assert!(a.bilinear(x, x).abs() < 1e-12);
        if let Some(int) = find_interior_nash(&g).unwrap() {
            prop_assert!(is_nash(&g, &int.profile, 1e-9).unwrap().is_nash);
            prop_assert!(eq.is_interior);
        }
    }

    #[test]
    fn kl_is_nonnegative((x, y) in (2usize..=6).prop_flat_map(|n| (interior(n), interior(n)))) {
        let p = StrategyProfile::new(&[x]).unwrap();
        let q = StrategyProfile::new(&[y]).unwrap();
        prop_assert!(kl_sum(&p, &q).unwrap() >= 0.0);
        prop_assert_eq!(kl_sum(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn kl_constant_for_interior_equilibria((a, x) in a_and_x()) {
        let g = Game::single_player(a).unwrap();
        if let Some(eq) = find_interior_nash(&g).unwrap() {
            let p = StrategyProfile::new(&[x]).unwrap();
            prop_assert!(kl_time_derivative(&g, &eq.profile, &p).unwrap().abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn emitted_profiles_are_normalized((g, x) in mixed_game()) {
        let p = StrategyProfile::new(&x).unwrap();
        let traj = integrate(&g, &p, &IntegratorOptions::default().with_max_time(5.0)).unwrap();
        for s in &traj.states {
            for i in 0..3 {
                let sum: f64 = s.player(i).iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_states_stay_symmetric((a, x) in a_and_x()) {
        let g2 = lift_to_two_player(&Game::single_player(a).unwrap()).unwrap();
        let p = StrategyProfile::new(&[x.clone(), x]).unwrap();
        let traj = integrate(&g2, &p, &IntegratorOptions::default().with_max_time(20.0)).unwrap();
        for s in &traj.states {
            let d = s.player(0).iter().zip(s.player(1)).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            prop_assert!(d < 1e-8);
        }
    }
}
