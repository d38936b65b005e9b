//! Graphical polymatrix games with self-loops.
//!
//! A game is a directed graph over players; the edge `(i, j)` carries the
//! payoff matrix `A^{i,j}` (`n_i × n_j`) that player `i` collects against
//! player `j`'s mixed strategy. An edge with `i == j` is a self-loop: a matrix
//! game the player plays against its own population state.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::profile::{Layout, StrategyProfile};

/// Default absolute tolerance for antisymmetry and zero-sum checks.
pub const ZERO_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub matrix: Matrix,
}

impl Edge {
    pub fn new(from: usize, to: usize, matrix: Matrix) -> Self {
        Edge { from, to, matrix }
    }
}

/// Unvalidated game description, as read from a game file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GameSpec {
    pub action_counts: Vec<usize>,
    pub edges: Vec<Edge>,
}

impl GameSpec {
    pub fn new(action_counts: Vec<usize>) -> Self {
        GameSpec {
            action_counts,
            edges: Vec::new(),
        }
    }

    pub fn edge(mut self, from: usize, to: usize, matrix: Matrix) -> Self {
        self.edges.push(Edge::new(from, to, matrix));
        self
    }

    /// Checks shapes and edge uniqueness and builds the lookup tables.
    pub fn validate(self) -> Result<Game> {
        let players = self.action_counts.len();
        if players == 0 || self.action_counts.contains(&0) {
            return Err(Error::EmptyGame);
        }
        let mut slot: Vec<Option<usize>> = vec![None; players * players];
        for (k, e) in self.edges.iter().enumerate() {
            for p in [e.from, e.to] {
                if p >= players {
                    return Err(Error::PlayerOutOfRange { player: p, players });
                }
            }
            let expected = (self.action_counts[e.from], self.action_counts[e.to]);
            let found = (e.matrix.rows(), e.matrix.cols());
            if expected != found {
                return Err(Error::ShapeMismatch {
                    from: e.from,
                    to: e.to,
                    expected,
                    found,
                });
            }
            let s = &mut slot[e.from * players + e.to];
            if s.is_some() {
                return Err(Error::DuplicateEdge { from: e.from, to: e.to });
            }
            *s = Some(k);
        }
        let mut out_edges = vec![Vec::new(); players];
        for (k, e) in self.edges.iter().enumerate() {
            out_edges[e.from].push(k);
        }
        Ok(Game {
            layout: Layout::new(&self.action_counts),
            edges: self.edges,
            slot,
            out_edges,
        })
    }
}

/// A validated polymatrix game. Immutable; cheap to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    layout: Layout,
    edges: Vec<Edge>,
    slot: Vec<Option<usize>>,
    out_edges: Vec<Vec<usize>>,
}

impl Game {
    /// One-player game on a single self-loop matrix.
    pub fn single_player(matrix: Matrix) -> Result<Game> {
        let n = matrix.rows();
        GameSpec::new(vec![n]).edge(0, 0, matrix).validate()
    }

    pub fn players(&self) -> usize {
        self.layout.players()
    }

    pub fn action_counts(&self) -> Vec<usize> {
        self.layout.sizes()
    }

    pub fn actions(&self, i: usize) -> usize {
        self.layout.size(i)
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, from: usize, to: usize) -> Option<&Matrix> {
        let p = self.players();
        if from >= p || to >= p {
            return None;
        }
        self.slot[from * p + to].map(|k| &self.edges[k].matrix)
    }

    pub fn self_loop(&self, i: usize) -> Option<&Matrix> {
        self.edge(i, i)
    }

    /// The self-loop matrix of a 1-player game (zero when the loop is absent).
    pub fn single_matrix(&self) -> Result<Matrix> {
        if self.players() != 1 {
            return Err(Error::NotSinglePlayer {
                players: self.players(),
            });
        }
        let n = self.actions(0);
        Ok(self.self_loop(0).cloned().unwrap_or_else(|| Matrix::zeros(n, n)))
    }

    pub fn check_profile(&self, x: &StrategyProfile) -> Result<()> {
        if x.layout() != &self.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(())
    }

    /// All action payoffs `u_{i,α}(x) = Σ_j (A^{i,j} x_j)_α` for a flat state,
    /// written into `out` (same layout as `x`).
    pub fn payoffs_flat(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for e in &self.edges {
            let (src, dst) = (self.layout.range(e.from), self.layout.range(e.to));
            e.matrix.mul_vec_add(&x[dst], &mut out[src]);
        }
    }

    /// Payoff of each action of player `i` against profile `x`.
    pub fn payoff_vector(&self, x: &StrategyProfile, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.actions(i)];
        for &k in &self.out_edges[i] {
            let e = &self.edges[k];
            e.matrix.mul_vec_add(x.player(e.to), &mut out);
        }
        out
    }

    /// Expected payoff `u_i(x) = x_i · Σ_j A^{i,j} x_j`.
    pub fn payoff(&self, x: &StrategyProfile, i: usize) -> f64 {
        dot(x.player(i), &self.payoff_vector(x, i))
    }

    /// The full block matrix, absent edges as zero blocks.
    pub fn block_matrix(&self) -> Matrix {
        let total = self.layout.total();
        let mut m = Matrix::zeros(total, total);
        for e in &self.edges {
            let (r0, c0) = (self.layout.range(e.from).start, self.layout.range(e.to).start);
            for a in 0..e.matrix.rows() {
                for b in 0..e.matrix.cols() {
                    m.set(r0 + a, c0 + b, e.matrix.get(a, b));
                }
            }
        }
        m
    }

    /// Largest residual of block antisymmetry, `|A^{i,j}_{a,b} + A^{j,i}_{b,a}|`.
    pub fn zero_sum_violation(&self) -> f64 {
        self.block_matrix().antisymmetry_violation()
    }

    pub fn is_zero_sum(&self, tol: f64) -> bool {
        self.zero_sum_violation() <= tol
    }

    /// Zero-sum decomposition of every self-loop (`None` where no loop exists).
    pub fn diagonal_decompositions(&self, tol: f64) -> Vec<Option<ZeroSumVerdict>> {
        (0..self.players())
            .map(|i| self.self_loop(i).map(|m| zero_sum_decomposition(m, tol)))
            .collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outcome of splitting a square matrix into antisymmetric and column-constant parts.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ZeroSumVerdict {
    pub is_zero_sum: bool,
    /// `B = A − 1·diag(A)ᵀ`; antisymmetric iff `is_zero_sum`.
    pub antisymmetric_part: Matrix,
    /// The diagonal of `A`, i.e. the constant of each column.
    pub column_constants: Vec<f64>,
    /// `max_{α,β} |A_{αα} + A_{ββ} − A_{αβ} − A_{βα}|`.
    pub max_violation: f64,
}

/// Tests whether `A` is equivalent to a zero-sum game, i.e. whether
/// `A_{αα} + A_{ββ} − A_{αβ} − A_{βα} = 0` for every pair of actions, and
/// returns the decomposition `A = B + 1·(A_{11} … A_{nn})`.
pub fn zero_sum_decomposition(matrix: &Matrix, tol: f64) -> ZeroSumVerdict {
    assert!(matrix.is_square(), "zero-sum decomposition needs a square matrix");
    let n = matrix.rows();
    let column_constants: Vec<f64> = (0..n).map(|a| matrix.get(a, a)).collect();
    let mut b = matrix.clone();
    for r in 0..n {
        for c in 0..n {
            b.set(r, c, matrix.get(r, c) - column_constants[c]);
        }
    }
    let mut max_violation = 0.0f64;
    for a in 0..n {
        for c in a + 1..n {
            let r = matrix.get(a, a) + matrix.get(c, c) - matrix.get(a, c) - matrix.get(c, a);
            max_violation = max_violation.max(r.abs());
        }
    }
    ZeroSumVerdict {
        is_zero_sum: max_violation <= tol,
        antisymmetric_part: b,
        column_constants,
        max_violation,
    }
}

/// The two-player game `A^{1,2} = A`, `A^{2,1} = −Aᵀ` of a 1-player game with
/// antisymmetric `A`. Symmetric Nash equilibria of the lift are exactly the
/// Nash equilibria of the original, and the diagonal is invariant.
pub fn lift_to_two_player(game: &Game) -> Result<Game> {
    let a = game.single_matrix()?;
    let max_violation = a.antisymmetry_violation();
    if max_violation > ZERO_SUM_TOL {
        return Err(Error::NotAntisymmetric { max_violation });
    }
    let n = a.rows();
    let minus_at = a.transpose().scaled(-1.0);
    GameSpec::new(vec![n, n]).edge(0, 1, a).edge(1, 0, minus_at).validate()
}
