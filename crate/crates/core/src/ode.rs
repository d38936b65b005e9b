//! Dormand–Prince 5(4) with step-size control and continuous output.
//!
//! A stepper rather than a driver: callers advance one accepted step at a
//! time and may sample the dense interpolant over the last step. Step control
//! follows the PI controller of Hairer–Nørsett–Wanner (`DOPRI5`); the dense
//! output is the classic 4th-order continuous extension.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// 5th minus embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Continuous extension.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolverOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on `|h|`.
    pub max_step: f64,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_step: 0.1,
            initial_step: None,
            max_steps: 10_000_000,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidOption {
                    name,
                    reason: alloc::format!("must be positive, got {v}"),
                })
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("max_step", self.max_step)?;
        if let Some(h) = self.initial_step {
            positive("initial_step", h)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub min_step: f64,
    pub max_step: f64,
}

/// Accepted step summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub t_start: f64,
    pub t_end: f64,
    /// Scaled local error estimate (≤ 1 for accepted steps).
    pub error: f64,
}

pub struct Dopri5<F> {
    f: F,
    t: f64,
    y: Vec<f64>,
    h: f64,
    direction: f64,
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
    y_new: Vec<f64>,
    cont: [Vec<f64>; 5],
    t_old: f64,
    h_old: f64,
    fsal_valid: bool,
    err_old: f64,
    opts: SolverOptions,
    stats: SolverStats,
}

impl<F: FnMut(f64, &[f64], &mut [f64])> Dopri5<F> {
    /// `direction` is `1.0` to integrate forward in time and `-1.0` backward.
    pub fn new(f: F, t0: f64, y0: &[f64], direction: f64, opts: SolverOptions) -> Result<Self> {
        opts.validate()?;
        if y0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "initial state",
            });
        }
        let n = y0.len();
        let z = || vec![0.0; n];
        let mut s = Dopri5 {
            f,
            t: t0,
            y: y0.to_vec(),
            h: 0.0,
            direction: if direction < 0.0 { -1.0 } else { 1.0 },
            k: [z(), z(), z(), z(), z(), z(), z()],
            y_stage: z(),
            y_new: z(),
            cont: [y0.to_vec(), z(), z(), z(), z()],
            t_old: t0,
            h_old: 0.0,
            fsal_valid: false,
            err_old: 1e-4,
            opts,
            stats: SolverStats {
                min_step: f64::INFINITY,
                ..Default::default()
            },
        };
        s.refresh_derivative();
        s.h = s.direction * s.opts.initial_step.unwrap_or_else(|| s.initial_step());
        Ok(s)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    /// Mutable access to the current state; the cached derivative is
    /// recomputed before the next step.
    pub fn y_mut(&mut self) -> &mut [f64] {
        self.fsal_valid = false;
        &mut self.y
    }

    fn refresh_derivative(&mut self) {
        (self.f)(self.t, &self.y, &mut self.k[0]);
        self.stats.evaluations += 1;
        self.fsal_valid = true;
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.opts.abs_tol + self.opts.rel_tol * a.abs().max(b.abs())
    }

    fn initial_step(&mut self) -> f64 {
        let n = self.y.len().max(1) as f64;
        let (mut d0, mut d1) = (0.0, 0.0);
        for i in 0..self.y.len() {
            let sk = self.scale(self.y[i], self.y[i]);
            d0 += (self.y[i] / sk) * (self.y[i] / sk);
            d1 += (self.k[0][i] / sk) * (self.k[0][i] / sk);
        }
        let (d0, d1) = (libm::sqrt(d0 / n), libm::sqrt(d1 / n));
        let mut h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(self.opts.max_step);
        for i in 0..self.y.len() {
            self.y_stage[i] = self.y[i] + self.direction * h0 * self.k[0][i];
        }
        (self.f)(self.t + self.direction * h0, &self.y_stage, &mut self.k[1]);
        self.stats.evaluations += 1;
        let mut d2 = 0.0;
        for i in 0..self.y.len() {
            let sk = self.scale(self.y[i], self.y[i]);
            let v = (self.k[1][i] - self.k[0][i]) / sk;
            d2 += v * v;
        }
        let d2 = libm::sqrt(d2 / n) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            libm::pow(0.01 / d1.max(d2), 0.2)
        };
        (100.0 * h0).min(h1).min(self.opts.max_step)
    }

    /// Advances by one accepted step without passing `t_bound`.
    pub fn step(&mut self, t_bound: f64) -> Result<StepReport> {
        if !self.fsal_valid {
            self.refresh_derivative();
        }
        let n = self.y.len();
        let remaining = (t_bound - self.t) * self.direction;
        if remaining <= 0.0 {
            return Err(Error::InvalidOption {
                name: "t_bound",
                reason: alloc::format!("{t_bound} is not ahead of t = {}", self.t),
            });
        }
        loop {
            if self.stats.accepted + self.stats.rejected >= self.opts.max_steps {
                return Err(Error::TooManySteps {
                    t: self.t,
                    steps: self.opts.max_steps,
                });
            }
            let mut h_abs = self.h.abs().min(self.opts.max_step);
            let mut last = false;
            if h_abs >= remaining * (1.0 - 1e-12) {
                h_abs = remaining;
                last = true;
            }
            let floor = 16.0 * f64::EPSILON * self.t.abs().max(1.0);
            if h_abs < floor && !last {
                return Err(Error::StepSizeUnderflow { t: self.t, h: h_abs });
            }
            let h = self.direction * h_abs;
            let t = self.t;

            self.stage(&[A21], h);
            (self.f)(t + C2 * h, &self.y_stage, &mut self.k[1]);
            self.stage(&[A31, A32], h);
            (self.f)(t + C3 * h, &self.y_stage, &mut self.k[2]);
            self.stage(&[A41, A42, A43], h);
            (self.f)(t + C4 * h, &self.y_stage, &mut self.k[3]);
            self.stage(&[A51, A52, A53, A54], h);
            (self.f)(t + C5 * h, &self.y_stage, &mut self.k[4]);
            self.stage(&[A61, A62, A63, A64, A65], h);
            (self.f)(t + h, &self.y_stage, &mut self.k[5]);
            for i in 0..n {
                self.y_new[i] = self.y[i]
                    + h * (A71 * self.k[0][i]
                        + A73 * self.k[2][i]
                        + A74 * self.k[3][i]
                        + A75 * self.k[4][i]
                        + A76 * self.k[5][i]);
            }
            let t_new = if last { t_bound } else { t + h };
            (self.f)(t_new, &self.y_new, &mut self.k[6]);
            self.stats.evaluations += 6;

            let mut err = 0.0;
            for i in 0..n {
                let e = h
                    * (E1 * self.k[0][i]
                        + E3 * self.k[2][i]
                        + E4 * self.k[3][i]
                        + E5 * self.k[4][i]
                        + E6 * self.k[5][i]
                        + E7 * self.k[6][i]);
                let sk = self.scale(self.y[i], self.y_new[i]);
                err += (e / sk) * (e / sk);
            }
            let err = if n == 0 { 0.0 } else { libm::sqrt(err / n as f64) };
            if !err.is_finite() {
                self.h *= FAC_MIN;
                self.stats.rejected += 1;
                continue;
            }

            let fac11 = libm::pow(err, 0.2 - BETA * 0.75);
            if err <= 1.0 {
                let fac = (fac11 / libm::pow(self.err_old, BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                self.err_old = err.max(1e-4);
                for i in 0..n {
                    let ydiff = self.y_new[i] - self.y[i];
                    let bspl = h * self.k[0][i] - ydiff;
                    self.cont[0][i] = self.y[i];
                    self.cont[1][i] = ydiff;
                    self.cont[2][i] = bspl;
                    self.cont[3][i] = ydiff - h * self.k[6][i] - bspl;
                    self.cont[4][i] = h
                        * (D1 * self.k[0][i]
                            + D3 * self.k[2][i]
                            + D4 * self.k[3][i]
                            + D5 * self.k[4][i]
                            + D6 * self.k[5][i]
                            + D7 * self.k[6][i]);
                }
                self.t_old = t;
                self.h_old = t_new - t;
                self.t = t_new;
                core::mem::swap(&mut self.y, &mut self.y_new);
                self.k.swap(0, 6);
                self.fsal_valid = true;
                self.stats.accepted += 1;
                self.stats.min_step = self.stats.min_step.min(h_abs);
                self.stats.max_step = self.stats.max_step.max(h_abs);
                self.h = self.direction * (h_abs / fac);
                return Ok(StepReport {
                    t_start: t,
                    t_end: t_new,
                    error: err,
                });
            }
            self.stats.rejected += 1;
            self.h = self.direction * (h_abs / (1.0 / FAC_MIN).min(fac11 / SAFETY));
        }
    }

    fn stage(&mut self, coeffs: &[f64], h: f64) {
        for i in 0..self.y.len() {
            let mut acc = 0.0;
            for (j, c) in coeffs.iter().enumerate() {
                acc += c * self.k[j][i];
            }
            self.y_stage[i] = self.y[i] + h * acc;
        }
    }

    /// Evaluates the continuous extension of the last accepted step at `t`.
    pub fn dense(&self, t: f64, out: &mut [f64]) {
        if self.h_old == 0.0 {
            out.copy_from_slice(&self.y);
            return;
        }
        let theta = (t - self.t_old) / self.h_old;
        let theta1 = 1.0 - theta;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.cont[0][i]
                + theta
                    * (self.cont[1][i]
                        + theta1 * (self.cont[2][i] + theta * (self.cont[3][i] + theta1 * self.cont[4][i])));
        }
    }

    /// Interval covered by the last accepted step.
    pub fn last_step(&self) -> (f64, f64) {
        (self.t_old, self.t_old + self.h_old)
    }
}
