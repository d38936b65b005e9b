use clap::Args;
use replicator_core::{
    find_interior_nash, find_interior_nash_polymatrix, find_max_support_nash, is_nash, zero_sum_decomposition,
    zero_sum_equivalent, EquilibriumResult, Error, Game, NashCertificate, ZeroSumVerdict,
};
use serde::Serialize;

use crate::common::{write_file, Common, ZERO_SUM_TOL};
use crate::failure::{to_json_text, Failure};

#[derive(Debug, Args)]
pub struct EquilibriumArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Serialize, PartialEq, Eq, Clone, Copy)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Interior,
    MaxSupport,
    PolymatrixInterior,
}

#[derive(Debug, Serialize)]
pub struct EquilibriumReport {
    pub game: String,
    pub found: bool,
    pub method: Method,
    pub equilibrium: Option<EquilibriumResult>,
    /// Nash check against the game as given (not its zero-sum reduction).
    pub certificate: Option<NashCertificate>,
    /// Self-loop decomposition `A = B + 1·cᵀ`, single-player games only.
    pub decomposition: Option<ZeroSumVerdict>,
    pub zero_sum_violation: f64,
}

pub fn solve(name: &str, game: &Game) -> Result<EquilibriumReport, Failure> {
    let mut report = EquilibriumReport {
        game: name.to_owned(),
        found: false,
        method: Method::PolymatrixInterior,
        equilibrium: None,
        certificate: None,
        decomposition: None,
        zero_sum_violation: game.zero_sum_violation(),
    };
    if game.players() == 1 {
        let v = zero_sum_decomposition(&game.single_matrix()?, ZERO_SUM_TOL);
        if !v.is_zero_sum {
            return Err(Error::NotAntisymmetric {
                max_violation: v.max_violation,
            }
            .into());
        }
        let reduced = Game::single_player(v.antisymmetric_part.clone())?;
        let (method, eq) = match find_interior_nash(&reduced)? {
            Some(eq) => (Method::Interior, eq),
            None => (Method::MaxSupport, find_max_support_nash(&reduced)?),
        };
        report.method = method;
        report.decomposition = Some(v);
        report.certificate = Some(is_nash(game, &eq.profile, replicator_core::equilibrium::NASH_TOL)?);
        report.found = true;
        report.equilibrium = Some(eq);
        return Ok(report);
    }
    let Some(reduced) = zero_sum_equivalent(game, ZERO_SUM_TOL) else {
        return Err(Error::NotZeroSum {
            max_violation: game.zero_sum_violation(),
        }
        .into());
    };
    if let Some(eq) = find_interior_nash_polymatrix(&reduced)? {
        report.certificate = Some(is_nash(game, &eq.profile, replicator_core::equilibrium::NASH_TOL)?);
        report.found = true;
        report.equilibrium = Some(eq);
    }
    Ok(report)
}

pub fn run(args: &EquilibriumArgs) -> Result<(), Failure> {
    let loaded = args.common.load()?;
    let report = solve(&loaded.name, &loaded.game)?;
    let text = to_json_text(&report);
    if let Some(dir) = args.common.out_dir()? {
        write_file(dir, "equilibrium.json", text.as_bytes())?;
    }
    print!("{text}");
    Ok(())
}
