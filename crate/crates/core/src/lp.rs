//! Small dense linear programs: two-phase tableau simplex with Bland's rule.
//!
//! Sizes here are a few dozen variables at most (equilibrium supports and
//! kernel parametrizations), so a dense tableau is the right tool.

use alloc::vec;
use alloc::vec::Vec;

const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;

/// `maximize cᵀx` subject to equality and `≤` rows, with `x ≥ 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub equalities: Vec<(Vec<f64>, f64)>,
    pub inequalities: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.rhs[i] -= f * pivot_rhs;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations over the first `active` columns.
    /// Returns `false` on unboundedness.
    fn optimize(&mut self, active: usize) -> bool {
        for _ in 0..50_000 {
            let Some(enter) = (0..active).find(|&j| self.obj[j] > PIVOT_EPS) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_EPS {
                    let ratio = self.rhs[i] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14 || ((ratio - lr).abs() <= 1e-14 && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, enter),
            }
        }
        true
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; num_vars],
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn equality(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        debug_assert_eq!(coeffs.len(), self.num_vars());
        self.equalities.push((coeffs, rhs));
        self
    }

    pub fn at_most(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        debug_assert_eq!(coeffs.len(), self.num_vars());
        self.inequalities.push((coeffs, rhs));
        self
    }

    pub fn solve(&self) -> LpOutcome {
        let n = self.num_vars();
        let n_le = self.inequalities.len();
        // Rows: inequalities first, then equalities.
        let mut rows: Vec<(Vec<f64>, f64, Option<f64>)> = Vec::new();
        for (k, (a, b)) in self.inequalities.iter().enumerate() {
            let mut row = vec![0.0; n + n_le];
            row[..n].copy_from_slice(a);
            row[n + k] = 1.0;
            rows.push((row, *b, Some(1.0)));
        }
        for (a, b) in &self.equalities {
            let mut row = vec![0.0; n + n_le];
            row[..n].copy_from_slice(a);
            rows.push((row, *b, None));
        }
        let m = rows.len();
        // Every row whose slack cannot start basic gets an artificial column.
        let mut needs_art = vec![false; m];
        for (i, (row, b, slack)) in rows.iter_mut().enumerate() {
            if *b < 0.0 {
                for v in row.iter_mut() {
                    *v = -*v;
                }
                *b = -*b;
                needs_art[i] = true;
            } else if slack.is_none() {
                needs_art[i] = true;
            }
        }
        let n_art = needs_art.iter().filter(|&&x| x).count();
        let total = n + n_le + n_art;
        let mut t = Tableau {
            rows: Vec::with_capacity(m),
            rhs: Vec::with_capacity(m),
            obj: vec![0.0; total],
            basis: Vec::with_capacity(m),
        };
        let mut art = n + n_le;
        for (i, (row, b, _)) in rows.into_iter().enumerate() {
            let mut full = vec![0.0; total];
            full[..n + n_le].copy_from_slice(&row);
            if needs_art[i] {
                full[art] = 1.0;
                t.basis.push(art);
                art += 1;
            } else {
                t.basis.push(n + i);
            }
            t.rows.push(full);
            t.rhs.push(b);
        }

        // Phase 1: maximize -(sum of artificials).
        if n_art > 0 {
            for j in 0..total {
                t.obj[j] = if j >= n + n_le { -1.0 } else { 0.0 };
            }
            for i in 0..m {
                if t.basis[i] >= n + n_le {
                    for j in 0..total {
                        t.obj[j] += t.rows[i][j];
                    }
                }
            }
            t.optimize(total);
            let infeasibility: f64 = (0..m).filter(|&i| t.basis[i] >= n + n_le).map(|i| t.rhs[i]).sum();
            if infeasibility > FEAS_EPS {
                return LpOutcome::Infeasible;
            }
            // Drive zero-level artificials out of the basis, dropping redundant rows.
            let mut i = 0;
            while i < t.rows.len() {
                if t.basis[i] >= n + n_le {
                    let col = (0..n + n_le)
                        .filter(|&j| t.rows[i][j].abs() > PIVOT_EPS)
                        .max_by(|&a, &b| t.rows[i][a].abs().total_cmp(&t.rows[i][b].abs()));
                    match col {
                        Some(c) => t.pivot(i, c),
                        None => {
                            t.rows.remove(i);
                            t.rhs.remove(i);
                            t.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }

        // Phase 2 over structural and slack columns only.
        let active = n + n_le;
        for j in 0..total {
            t.obj[j] = if j < n { self.objective[j] } else { 0.0 };
        }
        for i in 0..t.rows.len() {
            let cb = if t.basis[i] < n {
                self.objective[t.basis[i]]
            } else {
                0.0
            };
            if cb != 0.0 {
                for j in 0..total {
                    t.obj[j] -= cb * t.rows[i][j];
                }
            }
        }
        if !t.optimize(active) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; n];
        for (i, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.rhs[i].max(0.0);
            }
        }
        let value = x.iter().zip(&self.objective).map(|(a, c)| a * c).sum();
        LpOutcome::Optimal { x, value }
    }
}
