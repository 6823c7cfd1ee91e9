//! Saddle-point Frank-Wolfe (SPFW) with the `2/(k+2)` step.

use crate::counters::OracleCounters;
use crate::error::Result;
use crate::linalg::DenseVector;
use crate::problem::SaddleProblem;
use crate::solver::{check_start, SaddleSolution, SolveStats, SolverOptions, TraceClock};
use crate::trace::TraceSink;

/// One simultaneous FW step from `(x, y)` at step index `k` (`γ = 2/(k+2)`).
/// One FO call and two LO calls.
pub fn spfw_step(
    problem: &dyn SaddleProblem,
    x: &[f64],
    y: &[f64],
    k: usize,
    counters: &mut OracleCounters,
) -> Result<(DenseVector, DenseVector)> {
    let gx = problem.grad_x(x, y);
    let gy = problem.grad_y(x, y);
    counters.fo += 1;
    let u = problem.set_x().lo_solve(&gx, counters)?;
    let neg: Vec<f64> = gy.iter().map(|g| -g).collect();
    let v = problem.set_y().lo_solve(&neg, counters)?;
    let gamma = 2.0 / (k as f64 + 2.0);
    let mut xn = DenseVector::from_vec(x.to_vec());
    let mut yn = DenseVector::from_vec(y.to_vec());
    u.blend_into(&mut xn, gamma);
    v.blend_into(&mut yn, gamma);
    Ok((xn, yn))
}

/// Run `iters` SPFW steps (`k = 0..iters−1`), recording the trace after each
/// at `(x_k, y_k)`. No theory bound is attached. `y_bar` holds the plain last
/// iterate, as SPFW does not average.
pub fn spfw_solve(
    problem: &dyn SaddleProblem,
    x0: &[f64],
    y0: &[f64],
    iters: usize,
    options: &SolverOptions,
    counters: &mut OracleCounters,
    sink: Option<&mut dyn TraceSink>,
) -> Result<SaddleSolution> {
    check_start(problem, x0, y0)?;
    let mut clock = TraceClock::start(*options, sink);
    let mut x = DenseVector::from_vec(x0.to_vec());
    let mut y = DenseVector::from_vec(y0.to_vec());
    let mut done = 0;
    for k in 0..iters {
        let (xn, yn) = spfw_step(problem, &x, &y, k, counters)?;
        x = xn;
        y = yn;
        done = k + 1;
        if clock.record(problem, k + 1, &x, &y, None, counters)? {
            log::info!("spfw: time limit reached after {done} steps");
            break;
        }
    }
    Ok(SaddleSolution {
        x_final: x,
        y_bar: y.clone(),
        y_last: y,
        iterations: done,
        trace: clock.records,
        stats: SolveStats::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::synthetic_make;

    #[test]
    fn first_step_lands_on_vertices() {
        let p = synthetic_make(2, 4, 3, 3.0).unwrap();
        let x = p.set_x().center_point();
        let y = p.set_y().center_point();
        let mut c = OracleCounters::new();
        let (xn, yn) = spfw_step(&p, &x, &y, 0, &mut c).unwrap();
        let mut c2 = OracleCounters::new();
        let u = p.set_x().lo_solve(&p.grad_x(&x, &y), &mut c2).unwrap().densify();
        let neg: Vec<f64> = p.grad_y(&x, &y).iter().map(|g| -g).collect();
        let v = p.set_y().lo_solve(&neg, &mut c2).unwrap().densify();
        assert_eq!(xn, u);
        assert_eq!(yn, v);
        assert_eq!((c.fo, c.lo), (1, 2));
    }
}
