use std::io::Write;

use clap::{Args, ValueEnum};
use replicator_core::{integrate, CoordinateSystem, IntegratorOptions, StrategyProfile, Trajectory};
use serde::Serialize;

use crate::common::{initial_profile, interior_equilibrium, write_file, Common};
use crate::failure::{to_json_text, Failure};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Coords {
    /// Cumulative for interior starts, strategy coordinates otherwise.
    Auto,
    Cumulative,
    Strategy,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Initial profile, e.g. `0.5,0.25,0.25` or `1/2,1/2;1/3,2/3`; uniform if omitted.
    #[arg(long)]
    pub x0: Option<String>,
    /// Output sampling interval.
    #[arg(long, default_value_t = 0.05)]
    pub record_dt: f64,
    #[arg(long, value_enum, default_value_t = Coords::Auto)]
    pub coords: Coords,
}

#[derive(Serialize)]
struct DiagnosticsReport<'a> {
    game: &'a str,
    x0: &'a StrategyProfile,
    options: &'a IntegratorOptions,
    rows: usize,
    final_time: f64,
    final_state: &'a StrategyProfile,
    diagnostics: &'a replicator_core::dynamics::Diagnostics,
}

#[derive(Serialize)]
struct Summary<'a> {
    game: &'a str,
    rows: usize,
    final_time: f64,
    final_state: &'a StrategyProfile,
    kl_drift: Option<f64>,
    clipping_events: usize,
    files: [&'a str; 2],
}

pub fn trajectory_csv(traj: &Trajectory) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let layout = traj.layout();
    let mut header = vec!["t".to_owned()];
    for i in 0..layout.players() {
        header.extend((0..layout.size(i)).map(|a| format!("x_{i}_{a}")));
    }
    w.write_record(&header)?;
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![t.to_string()];
        row.extend(x.as_flat().iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Failure::usage(e.to_string()))
}

pub fn run(args: &SimulateArgs) -> Result<(), Failure> {
    let loaded = args.common.load()?;
    let game = &loaded.game;
    let x0 = initial_profile(args.x0.as_deref(), game)?;
    let coordinate_system = match args.coords {
        Coords::Cumulative => CoordinateSystem::Cumulative,
        Coords::Strategy => CoordinateSystem::Strategy,
        Coords::Auto if x0.min_coordinate() > 0.0 => CoordinateSystem::Cumulative,
        Coords::Auto => CoordinateSystem::Strategy,
    };
    let opts = IntegratorOptions {
        record_dt: args.record_dt,
        coordinate_system,
        reference: interior_equilibrium(game)?.map(|eq| eq.profile),
        ..args.common.integrator(100.0)?
    };
    let traj = integrate(game, &x0, &opts)?;
    let csv = trajectory_csv(&traj)?;

    let Some(dir) = args.common.out_dir()? else {
        std::io::stdout()
            .write_all(&csv)
            .map_err(|e| Failure::usage(e.to_string()))?;
        return Ok(());
    };
    write_file(dir, "trajectory.csv", &csv)?;
    let report = DiagnosticsReport {
        game: &loaded.name,
        x0: &x0,
        options: &opts,
        rows: traj.len(),
        final_time: traj.final_time(),
        final_state: traj.final_state(),
        diagnostics: &traj.diagnostics,
    };
    write_file(dir, "diagnostics.json", to_json_text(&report).as_bytes())?;
    print!(
        "{}",
        to_json_text(&Summary {
            game: &loaded.name,
            rows: traj.len(),
            final_time: traj.final_time(),
            final_state: traj.final_state(),
            kl_drift: traj.diagnostics.kl_drift,
            clipping_events: traj.diagnostics.clipping.events,
            files: ["trajectory.csv", "diagnostics.json"],
        })
    );
    Ok(())
}
