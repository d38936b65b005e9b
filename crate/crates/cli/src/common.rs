use std::path::{Path, PathBuf};

use clap::Args;
use replicator_core::{
    find_interior_nash, find_interior_nash_polymatrix, zero_sum_equivalent, EquilibriumResult, Game, IntegratorOptions,
    StrategyProfile,
};

use crate::failure::Failure;
use crate::gamefile::{self, LoadedGame};

/// A profile typed by hand may be off by rounding (`0.333,0.333,0.333`);
/// blocks within this distance of summing to one are renormalized.
pub const INPUT_SUM_TOL: f64 = 1e-2;

pub const ZERO_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Game definition file (JSON).
    #[arg(long, value_name = "PATH")]
    pub game: PathBuf,
    /// Output directory; nothing is written outside it.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Relative integrator tolerance (absolute tolerance is 1e-2 of it).
    #[arg(long, value_name = "REL")]
    pub tol: Option<f64>,
    /// Seed for every random choice the command makes.
    #[arg(long, value_name = "U64", default_value_t = 0)]
    pub seed: u64,
    /// Time horizon.
    #[arg(long = "T", value_name = "REAL")]
    pub horizon: Option<f64>,
}

impl Common {
    pub fn load(&self) -> Result<LoadedGame, Failure> {
        gamefile::load(&self.game)
    }

    pub fn integrator(&self, default_horizon: f64) -> Result<IntegratorOptions, Failure> {
        let mut opts = IntegratorOptions::default().with_max_time(self.horizon.unwrap_or(default_horizon));
        if let Some(rel) = self.tol {
            opts = opts.with_tolerance(rel);
        }
        opts.validate()?;
        Ok(opts)
    }

    pub fn out_dir(&self) -> Result<Option<&Path>, Failure> {
        match &self.out {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
                Ok(Some(dir.as_path()))
            }
            None => Ok(None),
        }
    }

    pub fn require_out(&self) -> Result<&Path, Failure> {
        self.out_dir()?
            .ok_or_else(|| Failure::usage("this command writes several files and needs --out DIR"))
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<(), Failure> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::io(&path, e))
}

fn parse_number(token: &str) -> Result<f64, Failure> {
    let token = token.trim();
    let bad = || Failure::usage(format!("cannot read {token:?} as a probability"));
    match token.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            );
            Ok(a / b)
        }
        None => token.parse().map_err(|_| bad()),
    }
}

/// Parses `0.5,0.25,0.25` (one player) or `1/2,1/2;0.3,0.7` (players
/// separated by `;`; fractions allowed).
pub fn parse_profile(text: &str, game: &Game) -> Result<StrategyProfile, Failure> {
    let blocks = text
        .split(';')
        .map(|b| b.split(',').map(parse_number).collect::<Result<Vec<f64>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    if blocks.len() != game.players() {
        return Err(Failure::usage(format!(
            "--x0 has {} blocks but the game has {} players",
            blocks.len(),
            game.players()
        )));
    }
    for (i, b) in blocks.iter().enumerate() {
        let sum: f64 = b.iter().sum();
        if (sum - 1.0).abs() > INPUT_SUM_TOL {
            return Err(Failure::usage(format!("--x0 block {i} sums to {sum}, not 1")));
        }
    }
    let x = StrategyProfile::normalized(&blocks)?;
    game.check_profile(&x)?;
    Ok(x)
}

pub fn initial_profile(text: Option<&str>, game: &Game) -> Result<StrategyProfile, Failure> {
    match text {
        Some(t) => parse_profile(t, game),
        None => Ok(StrategyProfile::uniform(&game.action_counts())),
    }
}

/// Interior Nash equilibrium of the zero-sum game equivalent to `game`, if
/// there is one.
pub fn interior_equilibrium(game: &Game) -> Result<Option<EquilibriumResult>, Failure> {
    let Some(reduced) = zero_sum_equivalent(game, ZERO_SUM_TOL) else {
        return Ok(None);
    };
    Ok(if game.players() == 1 {
        find_interior_nash(&reduced)?
    } else {
        find_interior_nash_polymatrix(&reduced)?
    })
}
