use alloc::string::String;
use core::fmt;

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Error {
    /// A payoff matrix does not match the action counts of its endpoints.
    ShapeMismatch {
        from: usize,
        to: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// The same ordered pair of players carries two matrices.
    DuplicateEdge { from: usize, to: usize },
    /// An edge names a player that does not exist.
    PlayerOutOfRange { player: usize, players: usize },
    /// A player was declared with zero actions, or the game has no players.
    EmptyGame,
    /// Non-finite entry in a matrix or state vector.
    NonFinite { context: &'static str },
    /// A strategy vector is negative or does not sum to one.
    InvalidProfile { player: usize, reason: String },
    /// Profile shape differs from the game's action counts.
    LayoutMismatch,
    /// A coordinate is at (or below) the interior floor.
    BoundaryPoint { player: usize, action: usize, value: f64 },
    /// A matrix required to be antisymmetric is not.
    NotAntisymmetric { max_violation: f64 },
    /// The block payoff matrix of a polymatrix game is not antisymmetric.
    NotZeroSum { max_violation: f64 },
    /// An operation restricted to one player received another game.
    NotSinglePlayer { players: usize },
    /// Support enumeration bound exceeded.
    TooManyActions { actions: usize, limit: usize },
    /// The adaptive integrator could not keep the step above its floor.
    StepSizeUnderflow { t: f64, h: f64 },
    /// The step budget ran out before reaching the requested time.
    TooManySteps { t: f64, steps: usize },
    /// Invalid integrator or analysis option.
    InvalidOption { name: &'static str, reason: String },
    /// Point cloud is too small or collinear.
    DegenerateCloud { points: usize },
    /// Volume estimation needs 2-dimensional cumulative states.
    NotPlanar { dimension: usize },
    /// Kullback-Leibler divergence is infinite.
    InfiniteDivergence { player: usize, action: usize },
    /// The orbit never re-crossed the return section.
    NoCrossing,
    /// Error from the integration of one point of a cloud.
    CloudPoint {
        index: usize,
        source: alloc::boxed::Box<Error>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch {
                from,
                to,
                expected,
                found,
            } => write!(
                f,
                "matrix on edge ({from}, {to}) is {}x{}, expected {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Error::DuplicateEdge { from, to } => write!(f, "duplicate edge ({from}, {to})"),
            Error::PlayerOutOfRange { player, players } => {
                write!(f, "player {player} out of range (game has {players})")
            }
            Error::EmptyGame => f.write_str("game has no players or a player has no actions"),
            Error::NonFinite { context } => write!(f, "non-finite value in {context}"),
            Error::InvalidProfile { player, reason } => {
                write!(f, "invalid strategy for player {player}: {reason}")
            }
            Error::LayoutMismatch => f.write_str("profile shape does not match the game"),
            Error::BoundaryPoint { player, action, value } => {
                write!(f, "coordinate ({player}, {action}) = {value:e} is on the boundary")
            }
            Error::NotAntisymmetric { max_violation } => {
                write!(f, "matrix is not antisymmetric (max violation {max_violation:e})")
            }
            Error::NotZeroSum { max_violation } => {
                write!(f, "game is not zero-sum (max violation {max_violation:e})")
            }
            Error::NotSinglePlayer { players } => {
                write!(f, "expected a 1-player game, found {players} players")
            }
            Error::TooManyActions { actions, limit } => {
                write!(f, "{actions} actions exceeds the enumeration limit {limit}")
            }
            Error::StepSizeUnderflow { t, h } => {
                write!(f, "step size underflow at t = {t} (h = {h:e})")
            }
            Error::TooManySteps { t, steps } => {
                write!(f, "step budget of {steps} exhausted at t = {t}")
            }
            Error::InvalidOption { name, reason } => write!(f, "invalid option {name}: {reason}"),
            Error::DegenerateCloud { points } => {
                write!(f, "degenerate point cloud ({points} points, or collinear)")
            }
            Error::NotPlanar { dimension } => {
                write!(f, "volume estimation needs planar states, found dimension {dimension}")
            }
            Error::InfiniteDivergence { player, action } => write!(
                f,
                "infinite divergence: x[{player}][{action}] = 0 inside the reference support"
            ),
            Error::NoCrossing => f.write_str("orbit never re-crosses the return section"),
            Error::CloudPoint { index, source } => write!(f, "cloud point {index}: {source}"),
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
