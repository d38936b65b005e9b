//! Canonical games used throughout the tests, the CLI and the examples.

use alloc::vec;

use crate::game::{Game, GameSpec};
use crate::linalg::Matrix;

/// Rock-Paper-Scissors: rows `(0, 1, −1)`, `(−1, 0, 1)`, `(1, −1, 0)`.
pub fn rps_matrix() -> Matrix {
    Matrix::from_rows(&[[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]]).unwrap()
}

/// One-population Rock-Paper-Scissors.
pub fn rps() -> Game {
    Game::single_player(rps_matrix()).unwrap()
}

/// Rock-Paper-Scissors plus a dummy "Fork" action that loses 10 against
/// every other action and ties against itself.
pub fn rps_fork_matrix() -> Matrix {
    Matrix::from_rows(&[
        [0.0, -1.0, 1.0, 10.0],
        [1.0, 0.0, -1.0, 10.0],
        [-1.0, 1.0, 0.0, 10.0],
        [-10.0, -10.0, -10.0, 0.0],
    ])
    .unwrap()
}

pub fn rps_fork() -> Game {
    Game::single_player(rps_fork_matrix()).unwrap()
}

/// Two-player matching pennies, `A^{2,1} = −(A^{1,2})ᵀ`.
pub fn matching_pennies() -> Game {
    let a = Matrix::from_rows(&[[1.0, -1.0], [-1.0, 1.0]]).unwrap();
    let b = a.transpose().scaled(-1.0);
    GameSpec::new(vec![2, 2])
        .edge(0, 1, a)
        .edge(1, 0, b)
        .validate()
        .unwrap()
}

/// Three players mixing both settings: players 0 and 1 play each other and
/// each carries an antisymmetric self-loop; player 1 also collects a payoff
/// driven by player 2, with no edge back.
pub fn merged_three_player() -> Game {
    let loop0 = rps_matrix();
    let loop1 = Matrix::from_rows(&[[0.0, 2.0], [-2.0, 0.0]]).unwrap();
    let a01 = Matrix::from_rows(&[[1.0, -1.0], [0.0, 2.0], [-1.0, 0.5]]).unwrap();
    let a10 = a01.transpose().scaled(-1.0);
    let a12 = Matrix::from_rows(&[[0.5, -0.5], [-1.0, 1.0]]).unwrap();
    GameSpec::new(vec![3, 2, 2])
        .edge(0, 0, loop0)
        .edge(1, 1, loop1)
        .edge(0, 1, a01)
        .edge(1, 0, a10)
        .edge(1, 2, a12)
        .validate()
        .unwrap()
}
