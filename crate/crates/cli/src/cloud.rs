use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use replicator_core::analysis::volume::{planar_points, DEFAULT_PRUNE_FACTOR};
use replicator_core::cloud::{disk_point, profiles_from_planar, sunflower_disk};
use replicator_core::{evolve_cloud, kl_sum, volume_trace, CloudSnapshot, Error, StrategyProfile, VolumeTrace};
use serde::Serialize;

use crate::common::{interior_equilibrium, write_file, Common};
use crate::failure::{to_json_text, Failure};
use crate::svg;

pub const BANDS: usize = 8;

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Independent uniform draws; point `k` uses stream `k` of the seeded generator.
    Random,
    /// Deterministic sunflower spiral of uniform density.
    Sunflower,
}

#[derive(Debug, Args)]
pub struct CloudArgs {
    #[command(flatten)]
    pub common: Common,
    /// Disk center in cumulative coordinates.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 0.0], allow_negative_numbers = true)]
    pub center: Vec<f64>,
    #[arg(long, default_value_t = 0.2)]
    pub radius: f64,
    #[arg(long, default_value_t = 500)]
    pub count: usize,
    /// Snapshot times; `--T` adds a final snapshot if it is later.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 112.0, 225.0])]
    pub times: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Layout::Sunflower)]
    pub layout: Layout,
    /// Triangles longer than this multiple of the median edge are dropped.
    #[arg(long, default_value_t = DEFAULT_PRUNE_FACTOR)]
    pub prune_factor: f64,
}

#[derive(Serialize)]
struct CloudReport<'a> {
    game: &'a str,
    layout: Layout,
    seed: u64,
    center: &'a [f64],
    radius: f64,
    count: usize,
    times: &'a [f64],
    prune_factor: f64,
    kl_reference: &'a StrategyProfile,
    band_edges: &'a [f64],
    max_relative_volume_deviation: f64,
    max_kl_drift: f64,
    band_changes: usize,
    volume: &'a VolumeTrace,
    files: Vec<String>,
}

pub fn initial_points(args: &CloudArgs) -> Vec<[f64; 2]> {
    let center = [args.center[0], args.center[1]];
    match args.layout {
        Layout::Sunflower => sunflower_disk(center, args.radius, args.count),
        Layout::Random => (0..args.count)
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(args.common.seed);
                rng.set_stream(k as u64);
                disk_point(center, args.radius, rng.random(), rng.random())
            })
            .collect(),
    }
}

/// Band edges at the `k/BANDS` quantiles of the initial KL values, placed
/// halfway between neighbouring values so no point sits on an edge. Needs at
/// least two values.
pub fn band_edges(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    (1..BANDS)
        .map(|k| {
            let j = (k * n / BANDS).max(1);
            (sorted[j - 1] + sorted[j]) / 2.0
        })
        .collect()
}

pub fn band(edges: &[f64], v: f64) -> usize {
    edges.iter().take_while(|&&e| v > e).count()
}

fn snapshots_csv(snaps: &[CloudSnapshot], kl: &[Vec<f64>], bands: &[Vec<usize>]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "point", "y_0", "y_1", "x_0", "x_1", "x_2", "kl", "band"])?;
    for (s, snap) in snaps.iter().enumerate() {
        for (k, (y, x)) in snap.cumulative.iter().zip(&snap.profiles).enumerate() {
            let mut row = vec![snap.time.to_string(), k.to_string()];
            row.extend(y.as_flat().iter().map(f64::to_string));
            row.extend(x.as_flat().iter().map(f64::to_string));
            row.push(kl[s][k].to_string());
            row.push(bands[s][k].to_string());
            w.write_record(&row)?;
        }
    }
    w.into_inner().map_err(|e| Failure::usage(e.to_string()))
}

fn volume_csv(trace: &VolumeTrace) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "volume", "relative_change", "triangles", "pruned", "threshold"])?;
    let v0 = trace.volumes[0];
    for (t, e) in trace.times.iter().zip(&trace.estimates) {
        w.write_record([
            t.to_string(),
            e.area.to_string(),
            ((e.area - v0) / v0).to_string(),
            e.triangles.to_string(),
            e.pruned.to_string(),
            e.threshold.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Failure::usage(e.to_string()))
}

pub fn run(args: &CloudArgs) -> Result<(), Failure> {
    let loaded = args.common.load()?;
    let game = &loaded.game;
    if game.players() != 1 || game.actions(0) != 3 {
        let dimension = game.layout().reduced().total();
        return Err(Error::NotPlanar { dimension }.into());
    }
    let dir = args.common.require_out()?;
    let mut times = args.times.clone();
    if let Some(t) = args.common.horizon {
        if times.last().is_none_or(|&last| t > last) {
            times.push(t);
        }
    }
    let opts = args.common.integrator(times.last().copied().unwrap_or(0.0))?;

    let points = initial_points(args);
    let cloud = profiles_from_planar(&points);
    let snaps = evolve_cloud(game, &cloud, &times, &opts)?;
    let trace = volume_trace(&snaps, args.prune_factor)?;

    let reference = interior_equilibrium(game)?
        .map(|eq| eq.profile)
        .unwrap_or_else(|| StrategyProfile::uniform(&[3]));
    let kl: Vec<Vec<f64>> = snaps
        .iter()
        .map(|s| {
            s.profiles
                .iter()
                .map(|x| kl_sum(&reference, x))
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;
    let edges = band_edges(&kl[0]);
    let bands: Vec<Vec<usize>> = kl
        .iter()
        .map(|ks| ks.iter().map(|&v| band(&edges, v)).collect())
        .collect();
    let max_kl_drift = kl
        .iter()
        .flat_map(|ks| ks.iter().zip(&kl[0]).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    let band_changes = bands
        .iter()
        .flat_map(|bs| bs.iter().zip(&bands[0]).filter(|(a, b)| a != b))
        .count();

    let planar: Vec<Vec<[f64; 2]>> = snaps.iter().map(planar_points).collect::<Result<_, _>>()?;
    let frame = svg::Frame::enclosing(&planar);
    let mut files = vec!["snapshots.csv".to_owned(), "volume.csv".to_owned()];
    for (s, snap) in snaps.iter().enumerate() {
        let name = format!("frame_{s:03}.svg");
        let title = format!("t = {}   area = {:.6}", snap.time, trace.volumes[s]);
        write_file(dir, &name, frame.render(&planar[s], &bands[s], &title).as_bytes())?;
        files.push(name);
    }
    write_file(dir, "snapshots.csv", &snapshots_csv(&snaps, &kl, &bands)?)?;
    write_file(dir, "volume.csv", &volume_csv(&trace)?)?;
    files.push("cloud.json".to_owned());
    let report = CloudReport {
        game: &loaded.name,
        layout: args.layout,
        seed: args.common.seed,
        center: &args.center,
        radius: args.radius,
        count: args.count,
        times: &times,
        prune_factor: args.prune_factor,
        kl_reference: &reference,
        band_edges: &edges,
        max_relative_volume_deviation: trace.max_relative_deviation(),
        max_kl_drift,
        band_changes,
        volume: &trace,
        files,
    };
    let text = to_json_text(&report);
    write_file(dir, "cloud.json", text.as_bytes())?;
    print!("{text}");
    Ok(())
}
