//! Solution-quality measures: the FW-gap and a reference primal-dual gap for
//! small problems.

pub mod oracle;

use serde::{Deserialize, Serialize};

use crate::counters::OracleCounters;
use crate::error::{Error, Result};
use crate::linalg::{dot, DenseVector};
use crate::problem::{PrimalSlice, SaddleProblem, SmoothObjective};

/// Default accuracy of the reference gap oracle.
pub const DEFAULT_GAP_ACCURACY: f64 = 1e-9;

const ORACLE_MAX_ITER: usize = 200_000;

/// `G(x, y) = max_{u∈X} ⟨x − u, ∇_x f⟩ + max_{v∈Y} ⟨y − v, −∇_y f⟩`.
/// One FO call and two LO calls.
pub fn fw_gap(problem: &dyn SaddleProblem, x: &[f64], y: &[f64], counters: &mut OracleCounters) -> Result<f64> {
    let gx = problem.grad_x(x, y);
    let gy = problem.grad_y(x, y);
    counters.fo += 1;
    let u = problem.set_x().lo_solve(&gx, counters)?;
    let neg: Vec<f64> = gy.iter().map(|g| -g).collect();
    let v = problem.set_y().lo_solve(&neg, counters)?;
    Ok(dot(&gx, x) - u.dot(&gx) + dot(&neg, y) - v.dot(&neg))
}

/// Primal-dual gap `max_y f(x, ·) − min_x f(·, y)` bracketed by certified
/// bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Bracket `[lower, upper]` for an inner optimum.
struct Bracket {
    lower: f64,
    upper: f64,
}

fn max_over_y(problem: &dyn SaddleProblem, x: &[f64], y_start: &[f64], accuracy: f64) -> Result<Bracket> {
    if let Some(ystar) = problem.best_response_y(x) {
        let v = problem.value(x, &ystar);
        return Ok(Bracket { lower: v, upper: v });
    }
    let h = problem.dual_objective(x);
    let m = oracle::minimize(&*h, problem.set_y(), y_start, accuracy, ORACLE_MAX_ITER)?;
    Ok(Bracket {
        lower: -m.value,
        upper: -m.lower,
    })
}

fn min_over_x(problem: &dyn SaddleProblem, x_start: &[f64], y: &[f64], accuracy: f64) -> Result<Bracket> {
    if problem.linear_in_x() {
        let g = problem.grad_x(x_start, y);
        let mut scratch = OracleCounters::new();
        let u = problem.set_x().lo_solve(&g, &mut scratch)?.densify();
        let v = problem.value(&u, y);
        return Ok(Bracket { lower: v, upper: v });
    }
    let h = PrimalSlice::new(problem, y);
    let m = oracle::minimize(&h, problem.set_x(), x_start, accuracy, ORACLE_MAX_ITER)?;
    Ok(Bracket {
        lower: m.lower,
        upper: m.value,
    })
}

/// Reference primal-dual gap at `(x, y)`. Each inner problem is solved in
/// closed form when the problem provides one, otherwise by the projection
/// oracle to `accuracy/4`.
pub fn primal_dual_gap(problem: &dyn SaddleProblem, x: &[f64], y: &[f64], accuracy: f64) -> Result<GapEstimate> {
    oracle::check_oracle_size(problem.set_x())?;
    oracle::check_oracle_size(problem.set_y())?;
    if x.len() != problem.set_x().dim() || y.len() != problem.set_y().dim() {
        return Err(Error::argument("primal-dual gap: point has the wrong shape"));
    }
    let hi = max_over_y(problem, x, y, accuracy / 4.0)?;
    let lo = min_over_x(problem, x, y, accuracy / 4.0)?;
    let lower = hi.lower - lo.upper;
    let upper = hi.upper - lo.lower;
    Ok(GapEstimate {
        value: 0.5 * (lower + upper),
        lower,
        upper,
    })
}

/// `φ(x) = max_y f(x, y)` for problems with a closed-form best response;
/// its gradient is `∇_x f(x, y*(x))`.
pub struct PrimalEnvelope<'a> {
    problem: &'a dyn SaddleProblem,
}

impl<'a> PrimalEnvelope<'a> {
    pub fn new(problem: &'a dyn SaddleProblem) -> Result<Self> {
        let probe = problem.set_x().center_point();
        if problem.best_response_y(&probe).is_none() {
            return Err(Error::Unsupported("primal envelope needs a closed-form best response".into()));
        }
        Ok(PrimalEnvelope { problem })
    }

    fn y_star(&self, x: &[f64]) -> DenseVector {
        self.problem.best_response_y(x).expect("checked at construction")
    }
}

impl SmoothObjective for PrimalEnvelope<'_> {
    fn dim(&self) -> usize {
        self.problem.set_x().dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.problem.value(x, &self.y_star(x))
    }
    fn gradient(&self, x: &[f64]) -> DenseVector {
        self.problem.grad_x(x, &self.y_star(x))
    }
}

/// High-accuracy saddle point of a problem with a closed-form best response,
/// found by minimizing the primal envelope with the projection oracle.
pub fn reference_saddle(problem: &dyn SaddleProblem, accuracy: f64) -> Result<(DenseVector, DenseVector)> {
    let env = PrimalEnvelope::new(problem)?;
    let start = problem.set_x().center_point();
    let m = oracle::minimize(&env, problem.set_x(), &start, accuracy, ORACLE_MAX_ITER)?;
    let y = env.y_star(&m.point);
    Ok((m.point, y))
}
