//! Empirical estimates of the problem constants for problems without
//! analytic ones.

use crate::error::{Error, Result};
use crate::linalg::{dist_sq, DenseVector};
use crate::problem::{ProblemConstants, SaddleProblem, SampleBatch};
use crate::rng::RngState;

/// Inflation applied to the sampled smoothness ratio.
pub const SMOOTHNESS_INFLATION: f64 = 1.5;

/// Single-sample draws used by the pilot when the problem is in expectation form.
const STREAM_PILOT_DRAWS: usize = 1000;

fn joint_gradient(p: &dyn SaddleProblem, x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut g = p.grad_x(x, y).into_vec();
    g.extend(p.grad_y(x, y).iter());
    g
}

/// `√(E‖∇F(x, y; ξ) − ∇f(x, y)‖²)` at one point: exact enumeration over the
/// components of a finite sum, otherwise a Monte-Carlo mean over single draws.
pub fn sample_deviation(p: &dyn SaddleProblem, x: &[f64], y: &[f64]) -> Result<f64> {
    let full = joint_gradient(p, x, y);
    let one = |batch: &SampleBatch| -> Result<f64> {
        let mut g = p.grad_x_batch(x, y, batch)?.into_vec();
        g.extend(p.grad_y_batch(x, y, batch)?.iter());
        Ok(dist_sq(&g, &full))
    };
    let second = match p.component_count() {
        Some(n) => {
            let mut s = 0.0;
            for i in 0..n {
                s += one(&SampleBatch::Indices(vec![i]))?;
            }
            s / n as f64
        }
        None => {
            let mut rng = RngState::new(0x51_6a);
            let mut s = 0.0;
            for _ in 0..STREAM_PILOT_DRAWS {
                s += one(&SampleBatch::draw(None, &mut rng, 1))?;
            }
            s / STREAM_PILOT_DRAWS as f64
        }
    };
    Ok(second.sqrt())
}

/// Constants for schedules. Analytic constants are returned untouched.
/// Otherwise `L` is the largest gradient-difference ratio over `trials`
/// random point pairs times [`SMOOTHNESS_INFLATION`], `μ` the analytic
/// modulus (or the smallest sampled curvature in `y`), and `σ` the largest
/// pilot deviation over `trials` random points.
pub fn estimate_constants(p: &dyn SaddleProblem, trials: usize, rng: &mut RngState) -> Result<ProblemConstants> {
    if let Some(c) = p.analytic_constants() {
        return Ok(c);
    }
    if trials < 10 {
        return Err(Error::argument(format!("estimate_constants needs at least 10 trials, got {trials}")));
    }
    let (sx, sy) = (p.set_x(), p.set_y());
    let mut ratio: f64 = 0.0;
    let mut curvature = f64::INFINITY;
    let mut sigma: f64 = 0.0;
    for _ in 0..trials {
        let (x1, y1) = (sx.sample_point(rng), sy.sample_point(rng));
        let (x2, y2) = (sx.sample_point(rng), sy.sample_point(rng));
        let g1 = joint_gradient(p, &x1, &y1);
        let g2 = joint_gradient(p, &x2, &y2);
        let step = dist_sq(&x1, &x2) + dist_sq(&y1, &y2);
        if step > 0.0 {
            ratio = ratio.max((dist_sq(&g1, &g2) / step).sqrt());
        }
        if p.strong_concavity().is_none() {
            let a: DenseVector = p.grad_y(&x1, &y1);
            let b: DenseVector = p.grad_y(&x1, &y2);
            let dy = dist_sq(&y1, &y2);
            if dy > 0.0 {
                let c: f64 = -a.iter().zip(b.iter()).zip(y1.iter().zip(y2.iter()))
                    .map(|((ga, gb), (u, v))| (ga - gb) * (u - v))
                    .sum::<f64>()
                    / dy;
                curvature = curvature.min(c);
            }
        }
        sigma = sigma.max(sample_deviation(p, &x1, &y1)?);
    }
    let mu = match p.strong_concavity() {
        Some(m) => m,
        None if curvature > 0.0 && curvature.is_finite() => curvature,
        None => {
            return Err(Error::Config(
                "could not certify strong concavity in y from samples".into(),
            ))
        }
    };
    let l = (SMOOTHNESS_INFLATION * ratio).max(mu);
    ProblemConstants::new(l, mu, sigma, sx.diameter(), sy.diameter())
}
