//! Pieces shared by the outer saddle-point solvers.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::counters::OracleCounters;
use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::lo::FEASIBILITY_TOL;
use crate::metrics::fw_gap;
use crate::problem::SaddleProblem;
use crate::trace::{TraceRecord, TraceSink};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Start each inner maximization from the previous round's `y` instead of
    /// the prox-step input. Off by default.
    pub warm_start: bool,
    /// Evaluate the FW-gap of every iterate for the trace.
    pub trace_fw_gap: bool,
    /// Stop after the first iteration that exceeds this much solver time.
    pub time_limit: Option<Duration>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            warm_start: false,
            trace_fw_gap: true,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Prox-step rounds `R_k` used at each outer iteration.
    pub prox_rounds: Vec<usize>,
    /// Total CndG loop iterations (one LO call each).
    pub cndg_iterations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSolution {
    /// Last primal iterate `x_N`.
    pub x_final: DenseVector,
    /// Weighted dual average `ȳ_N`.
    pub y_bar: DenseVector,
    /// Last dual iterate `y_N`.
    pub y_last: DenseVector,
    pub iterations: usize,
    pub trace: Vec<TraceRecord>,
    pub stats: SolveStats,
}

/// Weights of `y_1..y_k` in `ȳ_k = 3/(k(k+1)(k+2)) Σ s(s+1) y_s`.
pub fn dual_average_weights(k: usize) -> Vec<f64> {
    let kf = k as f64;
    let norm = 3.0 / (kf * (kf + 1.0) * (kf + 2.0));
    (1..=k).map(|s| norm * (s * (s + 1)) as f64).collect()
}

/// Running form of the weighted average: `ȳ_k = (1 − 3/(k+2))·ȳ_{k−1} + 3/(k+2)·y_k`.
pub(crate) fn update_dual_average(y_bar: &mut DenseVector, y_k: &[f64], k: usize) {
    y_bar.lerp_toward(y_k, 3.0 / (k as f64 + 2.0));
}

pub(crate) fn check_start(problem: &dyn SaddleProblem, x0: &[f64], y0: &[f64]) -> Result<()> {
    if x0.len() != problem.set_x().dim() || y0.len() != problem.set_y().dim() {
        return Err(Error::argument("start point has the wrong shape"));
    }
    let x_ok = match problem.set_x().membership(x0, FEASIBILITY_TOL) {
        Ok(b) => b,
        Err(Error::Unsupported(_)) => true,
        Err(e) => return Err(e),
    };
    if !x_ok || !problem.set_y().membership(y0, FEASIBILITY_TOL)? {
        return Err(Error::argument("start point is not feasible"));
    }
    Ok(())
}

/// Solver-time clock that excludes metric evaluation, plus trace emission.
pub(crate) struct TraceClock<'s> {
    solver_time: Duration,
    running_since: Instant,
    sink: Option<&'s mut dyn TraceSink>,
    pub(crate) records: Vec<TraceRecord>,
    options: SolverOptions,
}

impl<'s> TraceClock<'s> {
    pub(crate) fn start(options: SolverOptions, sink: Option<&'s mut dyn TraceSink>) -> Self {
        TraceClock {
            solver_time: Duration::ZERO,
            running_since: Instant::now(),
            sink,
            records: Vec::new(),
            options,
        }
    }

    /// Close out iteration `k`: stop the clock, evaluate the FW-gap on
    /// private counters, emit the record, restart the clock. Returns whether
    /// the time budget is exhausted.
    pub(crate) fn record(
        &mut self,
        problem: &dyn SaddleProblem,
        k: usize,
        x: &[f64],
        y: &[f64],
        theory_bound: Option<f64>,
        counters: &OracleCounters,
    ) -> Result<bool> {
        self.solver_time += self.running_since.elapsed();
        let gap = if self.options.trace_fw_gap {
            let mut scratch = OracleCounters::new();
            fw_gap(problem, x, y, &mut scratch)?
        } else {
            f64::NAN
        };
        let rec = TraceRecord {
            k: k as u64,
            wall_ms: self.solver_time.as_secs_f64() * 1e3,
            fw_gap: gap,
            theory_bound,
            counters: *counters,
        };
        if let Some(s) = self.sink.as_mut() {
            s.record(&rec);
        }
        self.records.push(rec);
        let out_of_time = self
            .options
            .time_limit
            .is_some_and(|lim| self.solver_time >= lim);
        self.running_since = Instant::now();
        Ok(out_of_time)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_at_three() {
        let w = dual_average_weights(3);
        // s(s+1) = 2, 6, 12 with total 20
        let expect = [0.1, 0.3, 0.6];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn running_average_matches_weights() {
        let ys = [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.2, 0.8]];
        let mut bar = DenseVector::from_vec(vec![9.0, 9.0]);
        for (k, y) in ys.iter().enumerate() {
            update_dual_average(&mut bar, y, k + 1);
        }
        let w = dual_average_weights(4);
        for j in 0..2 {
            let direct: f64 = ys.iter().zip(&w).map(|(y, w)| w * y[j]).sum();
            assert!((direct - bar[j]).abs() < 1e-14);
        }
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
