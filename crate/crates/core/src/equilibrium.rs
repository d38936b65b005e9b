//! Nash equilibria of zero-sum games.
//!
//! For an antisymmetric matrix the game value is zero, so a profile is Nash
//! iff `(A x)_β ≤ 0` for every action with equality on the support. Interior
//! equilibria are the kernel of `A` intersected with the open simplex; other
//! equilibria come from support enumeration, one small LP per support.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::{dot, Game, ZERO_SUM_TOL};
use crate::linalg::{null_space, Matrix};
use crate::lp::{LinearProgram, LpOutcome};
use crate::profile::{Layout, StrategyProfile};

pub const SUPPORT_THRESHOLD: f64 = 1e-9;
pub const NASH_TOL: f64 = 1e-9;
pub const KERNEL_REL_TOL: f64 = 1e-10;
pub const MAX_ENUMERATION_ACTIONS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EquilibriumResult {
    pub profile: StrategyProfile,
    pub support: Vec<Vec<usize>>,
    pub is_interior: bool,
    /// Per player, `max_α u_{i,α}(x) − u_i(x)`.
    pub residuals: Vec<f64>,
    /// The equilibrium set is not a single point (kernel dimension above one).
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NashCertificate {
    pub is_nash: bool,
    pub residuals: Vec<f64>,
}

impl NashCertificate {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Checks the Nash property against pure deviations, which suffice by linearity.
pub fn is_nash(game: &Game, x: &StrategyProfile, nash_tol: f64) -> Result<NashCertificate> {
    game.check_profile(x)?;
    let residuals: Vec<f64> = (0..game.players())
        .map(|i| {
            let u = game.payoff_vector(x, i);
            let mean = dot(x.player(i), &u);
            u.iter().map(|v| v - mean).fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(NashCertificate {
        is_nash: residuals.iter().all(|&r| r <= nash_tol),
        residuals,
    })
}

fn antisymmetric_matrix(game: &Game) -> Result<Matrix> {
    let a = game.single_matrix()?;
    let max_violation = a.antisymmetry_violation();
    if max_violation > ZERO_SUM_TOL {
        return Err(Error::NotAntisymmetric { max_violation });
    }
    Ok(a)
}

fn result_from(game: &Game, layout: Layout, mut data: Vec<f64>, degenerate: bool) -> Result<EquilibriumResult> {
    for i in 0..layout.players() {
        let block = &mut data[layout.range(i)];
        block.iter_mut().for_each(|v| *v = v.max(0.0));
        let s: f64 = block.iter().sum();
        block.iter_mut().for_each(|v| *v /= s);
    }
    let profile = StrategyProfile::from_flat(layout, data)?;
    let support = profile.support(SUPPORT_THRESHOLD);
    let is_interior = (0..profile.players()).all(|i| support[i].len() == profile.player(i).len());
    let residuals = is_nash(game, &profile, NASH_TOL)?.residuals;
    Ok(EquilibriumResult {
        profile,
        support,
        is_interior,
        residuals,
        degenerate,
    })
}

/// Interior Nash of a 1-player antisymmetric game. When the interior set is
/// not a point, returns the element maximizing the smallest coordinate.
/// `Ok(None)` means no interior equilibrium exists.
pub fn find_interior_nash(game: &Game) -> Result<Option<EquilibriumResult>> {
    let a = antisymmetric_matrix(game)?;
    let n = a.rows();
    let kernel = null_space(&a, KERNEL_REL_TOL);
    let k = kernel.len();
    if k == 0 {
        return Ok(None);
    }
    // Variables: c⁺ (k), c⁻ (k), t; x = K(c⁺ − c⁻).
    let nv = 2 * k + 1;
    let mut lp = LinearProgram::new(nv);
    lp.objective[2 * k] = 1.0;
    let mut sum_row = vec![0.0; nv];
    for (j, v) in kernel.iter().enumerate() {
        let s: f64 = v.iter().sum();
        sum_row[j] = s;
        sum_row[k + j] = -s;
    }
    lp.equality(sum_row, 1.0);
    for alpha in 0..n {
        let mut row = vec![0.0; nv];
        for (j, v) in kernel.iter().enumerate() {
            row[j] = -v[alpha];
            row[k + j] = v[alpha];
        }
        row[2 * k] = 1.0;
        lp.at_most(row, 0.0);
    }
    let LpOutcome::Optimal { x: sol, value } = lp.solve() else {
        return Ok(None);
    };
    if value <= SUPPORT_THRESHOLD {
        return Ok(None);
    }
    let mut x = vec![0.0; n];
    for (j, v) in kernel.iter().enumerate() {
        let c = sol[j] - sol[k + j];
        for (xa, va) in x.iter_mut().zip(v) {
            *xa += c * va;
        }
    }
    let res = result_from(game, game.layout().clone(), x, k > 1)?;
    Ok(res.is_interior.then_some(res))
}

/// Solves the support LP for `S`: maximize `t` subject to `A_SS x_S = 0`,
/// `Σ x_S = 1`, `A_{β,S} x_S ≤ 0` off the support and `x_S ≥ t`. Returns the
/// full-length profile when `t` exceeds the support threshold.
fn solve_support(a: &Matrix, support: &[usize]) -> Option<Vec<f64>> {
    let n = a.rows();
    let s = support.len();
    let nv = s + 1;
    let mut lp = LinearProgram::new(nv);
    lp.objective[s] = 1.0;
    lp.equality((0..nv).map(|j| if j < s { 1.0 } else { 0.0 }).collect(), 1.0);
    for beta in 0..n {
        let mut row = vec![0.0; nv];
        for (j, &col) in support.iter().enumerate() {
            row[j] = a.get(beta, col);
        }
        if support.contains(&beta) {
            lp.equality(row, 0.0);
        } else {
            lp.at_most(row, 0.0);
        }
    }
    for j in 0..s {
        let mut row = vec![0.0; nv];
        row[j] = -1.0;
        row[s] = 1.0;
        lp.at_most(row, 0.0);
    }
    match lp.solve() {
        LpOutcome::Optimal { x, value } if value > SUPPORT_THRESHOLD => {
            let mut full = vec![0.0; n];
            for (j, &col) in support.iter().enumerate() {
                full[col] = x[j];
            }
            Some(full)
        }
        _ => None,
    }
}

/// Advances `c` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Every support of size `size` that carries an equilibrium, in lexicographic order.
fn feasible_supports(a: &Matrix, size: usize, first_only: bool) -> Vec<(Vec<usize>, Vec<f64>)> {
    let n = a.rows();
    let mut found = Vec::new();
    let mut c: Vec<usize> = (0..size).collect();
    loop {
        if let Some(x) = solve_support(a, &c) {
            found.push((c.clone(), x));
            if first_only {
                break;
            }
        }
        if !next_combination(&mut c, n) {
            break;
        }
    }
    found
}

fn check_enumeration_size(a: &Matrix) -> Result<()> {
    if a.rows() > MAX_ENUMERATION_ACTIONS {
        return Err(Error::TooManyActions {
            actions: a.rows(),
            limit: MAX_ENUMERATION_ACTIONS,
        });
    }
    Ok(())
}

/// Nash equilibrium of maximal support of a 1-player antisymmetric game,
/// trying supports by decreasing size and lexicographically within a size.
pub fn find_max_support_nash(game: &Game) -> Result<EquilibriumResult> {
    let a = antisymmetric_matrix(game)?;
    check_enumeration_size(&a)?;
    for size in (1..=a.rows()).rev() {
        if let Some((support, x)) = feasible_supports(&a, size, true).pop() {
            let degenerate = null_space(&a.select(&support, &support), KERNEL_REL_TOL).len() > 1;
            return result_from(game, game.layout().clone(), x, degenerate);
        }
    }
    Err(Error::InvalidOption {
        name: "matrix",
        reason: "support enumeration found no equilibrium".into(),
    })
}

/// All supports of maximal size that carry an equilibrium.
pub fn maximal_supports(game: &Game) -> Result<Vec<Vec<usize>>> {
    let a = antisymmetric_matrix(game)?;
    check_enumeration_size(&a)?;
    for size in (1..=a.rows()).rev() {
        let found = feasible_supports(&a, size, false);
        if !found.is_empty() {
            return Ok(found.into_iter().map(|(s, _)| s).collect());
        }
    }
    Ok(Vec::new())
}

/// Interior Nash of a zero-sum polymatrix game from the indifference system
/// `u_{i,α}(x) = v_i`, with the smallest coordinate maximized.
pub fn find_interior_nash_polymatrix(game: &Game) -> Result<Option<EquilibriumResult>> {
    let max_violation = game.zero_sum_violation();
    if max_violation > ZERO_SUM_TOL {
        return Err(Error::NotZeroSum { max_violation });
    }
    let layout = game.layout().clone();
    let total = layout.total();
    let players = layout.players();
    let block = game.block_matrix();
    // Variables: x (total), v⁺ (players), v⁻ (players), t.
    let nv = total + 2 * players + 1;
    let t_col = nv - 1;
    let mut lp = LinearProgram::new(nv);
    lp.objective[t_col] = 1.0;
    for i in 0..players {
        for r in layout.range(i) {
            let mut row = vec![0.0; nv];
            row[..total].copy_from_slice(block.row(r));
            row[total + i] = -1.0;
            row[total + players + i] = 1.0;
            lp.equality(row, 0.0);
        }
        let mut sum = vec![0.0; nv];
        for c in layout.range(i) {
            sum[c] = 1.0;
        }
        lp.equality(sum, 1.0);
    }
    for c in 0..total {
        let mut row = vec![0.0; nv];
        row[c] = -1.0;
        row[t_col] = 1.0;
        lp.at_most(row, 0.0);
    }
    let LpOutcome::Optimal { x: sol, value } = lp.solve() else {
        return Ok(None);
    };
    if value <= SUPPORT_THRESHOLD {
        return Ok(None);
    }
    // The solution set of the homogeneous indifference system has positive
    // dimension exactly when the interior equilibria form more than a point.
    let mut homogeneous = Matrix::zeros(total + players, total + players);
    for i in 0..players {
        for r in layout.range(i) {
            for c in 0..total {
                homogeneous.set(r, c, block.get(r, c));
            }
            homogeneous.set(r, total + i, -1.0);
            homogeneous.set(total + i, r, 1.0);
        }
    }
    let degenerate = !null_space(&homogeneous, KERNEL_REL_TOL).is_empty();
    let res = result_from(game, layout, sol[..total].to_vec(), degenerate)?;
    Ok(res.is_interior.then_some(res))
}
