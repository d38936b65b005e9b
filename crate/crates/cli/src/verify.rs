//! Invariant checks on one game: chart round trip, simplex tangency,
//! divergence nullity, the equilibrium certificate, and either KL
//! conservation (interior Nash) or KL decrease (single player without one).

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use replicator_core::{
    boundary_gap_bound, divergence_cumulative, from_cumulative, integrate, kl_sum, to_cumulative,
    vector_field_strategy, CumulativeState, Game, IntegratorOptions, StrategyProfile,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::common::{interior_equilibrium, parse_profile, write_file, Common};
use crate::equilibrium::{self, Method};
use crate::failure::{to_json_text, Failure};

pub const SAMPLES: usize = 1000;
pub const ROUND_TRIP_TOL: f64 = 1e-12;
pub const CHART_TOL: f64 = 1e-10;
pub const TANGENCY_TOL: f64 = 1e-12;
pub const DIVERGENCE_TOL: f64 = 1e-9;
pub const KL_DRIFT_TOL: f64 = 1e-5;
/// Largest KL increase between samples still read as non-increasing, as a
/// multiple of the relative tolerance: KL evaluated on integrated states
/// carries an error of that order (about 0.1 rel_tol measured on RPS+Fork).
pub const KL_MONOTONE_SLACK: f64 = 10.0;
/// Random initial conditions keep every coordinate above this.
pub const START_FLOOR: f64 = 0.02;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Initial profile for the orbit checks; random interior (from the seed) if omitted.
    #[arg(long)]
    pub x0: Option<String>,
}

#[derive(Debug, Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: Value,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub game: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn check(name: &'static str, ok: bool, detail: Value) -> Check {
    Check {
        name,
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn skipped(name: &'static str, reason: &str) -> Check {
    Check {
        name,
        status: Status::Skipped,
        detail: json!({ "reason": reason }),
    }
}

/// Dirichlet(1) draw per player, redrawn until every coordinate clears `floor`.
fn random_interior(rng: &mut ChaCha8Rng, sizes: &[usize], floor: f64) -> StrategyProfile {
    let blocks: Vec<Vec<f64>> = sizes
        .iter()
        .map(|&n| loop {
            let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let s: f64 = e.iter().sum();
            let b: Vec<f64> = e.iter().map(|v| v / s).collect();
            if b.iter().all(|&v| v > floor) {
                break b;
            }
        })
        .collect();
    StrategyProfile::normalized(&blocks).expect("positive blocks")
}

fn chart_checks(game: &Game, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, Failure> {
    let sizes = game.action_counts();
    let reduced = game.layout().reduced();
    let (mut forward, mut backward, mut tangency) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..SAMPLES {
        let x = random_interior(rng, &sizes, 1e-6);
        let y = to_cumulative(&x)?;
        forward = forward.max(from_cumulative(&y).max_distance(&x));
        let y2: Vec<f64> = (0..reduced.total()).map(|_| rng.random_range(-5.0..5.0)).collect();
        let y2 = CumulativeState::from_flat(reduced.clone(), y2)?;
        let back = to_cumulative(&from_cumulative(&y2))?;
        backward = backward.max(
            back.as_flat()
                .iter()
                .zip(y2.as_flat())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
        let f = vector_field_strategy(game, &x);
        for i in 0..game.players() {
            tangency = tangency.max(f[game.layout().range(i)].iter().sum::<f64>().abs());
        }
    }
    Ok(vec![
        check(
            "round_trip",
            forward < ROUND_TRIP_TOL && backward < CHART_TOL,
            json!({ "samples": SAMPLES, "profile_error": forward, "cumulative_error": backward,
                    "profile_tol": ROUND_TRIP_TOL, "cumulative_tol": CHART_TOL }),
        ),
        check(
            "simplex_tangency",
            tangency < TANGENCY_TOL,
            json!({ "samples": SAMPLES, "max_block_sum": tangency, "tol": TANGENCY_TOL }),
        ),
    ])
}

fn divergence_check(game: &Game, rng: &mut ChaCha8Rng) -> Result<Check, Failure> {
    let reduced = game.layout().reduced();
    let mut worst: Option<(CumulativeState, f64)> = None;
    for _ in 0..SAMPLES {
        let y: Vec<f64> = (0..reduced.total()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y = CumulativeState::from_flat(reduced.clone(), y)?;
        let d = divergence_cumulative(game, &y);
        if worst.as_ref().is_none_or(|(_, w)| d.abs() > w.abs()) {
            worst = Some((y, d));
        }
    }
    let (y, d) = worst.expect("at least one sample");
    let ok = d.abs() <= DIVERGENCE_TOL;
    let mut detail = json!({ "samples": SAMPLES, "max_abs_divergence": d.abs(), "tol": DIVERGENCE_TOL });
    if !ok {
        detail["witness"] = json!({ "cumulative": y, "profile": from_cumulative(&y), "divergence": d });
    }
    Ok(check("divergence_nullity", ok, detail))
}

fn kl_checks(
    game: &Game,
    x0: &StrategyProfile,
    opts: &IntegratorOptions,
    report: &equilibrium::EquilibriumReport,
) -> Result<Vec<Check>, Failure> {
    if let Some(eq) = interior_equilibrium(game)? {
        let opts = IntegratorOptions {
            reference: Some(eq.profile.clone()),
            ..opts.clone()
        };
        let traj = integrate(game, x0, &opts)?;
        let drift = traj.diagnostics.kl_drift.unwrap_or(f64::NAN);
        let level = kl_sum(&eq.profile, x0)?;
        let delta = boundary_gap_bound(&eq.profile, level);
        let lowest = traj
            .states
            .iter()
            .map(|s| s.min_coordinate())
            .fold(f64::INFINITY, f64::min);
        return Ok(vec![
            check(
                "kl_conservation",
                drift < KL_DRIFT_TOL,
                json!({ "horizon": opts.max_time, "kl_initial": level, "drift": drift, "tol": KL_DRIFT_TOL }),
            ),
            check(
                "boundary_gap",
                lowest >= delta,
                json!({ "min_coordinate": lowest, "bound": delta }),
            ),
        ]);
    }
    let eq = match (&report.equilibrium, report.method) {
        (Some(eq), Method::MaxSupport) => eq,
        _ => {
            return Ok(vec![skipped(
                "kl_monotone_decrease",
                "needs a single-player zero-sum game without interior equilibrium",
            )])
        }
    };
    let traj = integrate(game, x0, opts)?;
    let values: Vec<f64> = traj
        .states
        .iter()
        .map(|s| kl_sum(&eq.profile, s))
        .collect::<Result<_, _>>()?;
    let max_increase = values.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let decrease = values[0] - values[values.len() - 1];
    let slack = KL_MONOTONE_SLACK * opts.rel_tol;
    let ok = max_increase <= slack && decrease > 0.0;
    Ok(vec![check(
        "kl_monotone_decrease",
        ok,
        json!({ "horizon": opts.max_time, "kl_initial": values[0], "kl_final": values[values.len() - 1],
                "total_decrease": decrease, "max_step_increase": max_increase, "slack": slack }),
    )])
}

pub fn verify(
    name: &str,
    game: &Game,
    x0: Option<&str>,
    seed: u64,
    opts: &IntegratorOptions,
) -> Result<Report, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = chart_checks(game, &mut rng)?;
    checks.push(divergence_check(game, &mut rng)?);
    let x0 = match x0 {
        Some(text) => parse_profile(text, game)?,
        None => random_interior(&mut rng, &game.action_counts(), START_FLOOR),
    };
    match equilibrium::solve(name, game) {
        Ok(report) => {
            match (&report.equilibrium, &report.certificate) {
                (Some(eq), Some(cert)) => checks.push(check(
                    "equilibrium_certificate",
                    cert.is_nash,
                    json!({ "method": report.method, "profile": eq.profile, "residuals": cert.residuals,
                            "degenerate": eq.degenerate }),
                )),
                _ => checks.push(skipped("equilibrium_certificate", "no interior equilibrium")),
            }
            checks.extend(kl_checks(game, &x0, opts, &report)?);
        }
        Err(Failure::Core(e)) => {
            let reason = format!("not zero-sum: {e}");
            checks.push(skipped("equilibrium_certificate", &reason));
            checks.push(skipped("kl_invariant", &reason));
        }
        Err(other) => return Err(other),
    }
    Ok(Report {
        game: name.to_owned(),
        seed,
        passed: checks.iter().all(|c| c.status != Status::Fail),
        checks,
    })
}

/// Returns whether every check passed.
pub fn run(args: &VerifyArgs) -> Result<bool, Failure> {
    let loaded = args.common.load()?;
    let opts = args.common.integrator(100.0)?;
    let report = verify(&loaded.name, &loaded.game, args.x0.as_deref(), args.common.seed, &opts)?;
    let text = to_json_text(&report);
    if let Some(dir) = args.common.out_dir()? {
        write_file(dir, "verify.json", text.as_bytes())?;
    }
    print!("{text}");
    Ok(report.passed)
}
