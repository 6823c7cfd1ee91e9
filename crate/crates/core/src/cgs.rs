//! Conditional gradient sliding for smooth strongly convex minimization.

use serde::{Deserialize, Serialize};

use crate::cndg::cndg;
use crate::counters::OracleCounters;
use crate::error::{Error, Result};
use crate::linalg::{combine, DenseVector};
use crate::lo::FeasibleSet;
use crate::problem::SmoothObjective;

/// Constants of one CGS run: `M = ⌈√(24L/μ)⌉` inner steps per epoch and
/// `n` epochs, with `δ₀` bounding the initial suboptimality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgsSchedule {
    pub l: f64,
    pub mu: f64,
    pub m: usize,
    pub n: usize,
    pub delta0: f64,
}

impl CgsSchedule {
    pub fn new(l: f64, mu: f64, n: usize, delta0: f64) -> Result<Self> {
        if !(mu > 0.0 && l >= mu && delta0 > 0.0) || !l.is_finite() || !delta0.is_finite() {
            return Err(Error::argument(format!(
                "CGS schedule needs L ≥ μ > 0 and δ₀ > 0 (L = {l}, μ = {mu}, δ₀ = {delta0})"
            )));
        }
        let m = ((24.0 * l / mu).sqrt().ceil() as usize).max(1);
        Ok(CgsSchedule {
            l,
            mu,
            m,
            n,
            delta0,
        })
    }

    /// `δ₀ = L·D²/2`, the smoothness bound on the initial gap.
    pub fn default_delta0(l: f64, diameter: f64) -> f64 {
        0.5 * l * diameter * diameter
    }

    /// Schedule targeting `h(x̄_N) − h* ≤ epsilon` under the halving guarantee.
    pub fn for_accuracy(l: f64, mu: f64, delta0: f64, epsilon: f64) -> Result<Self> {
        let n = cgs_iterations_for(epsilon, l, mu, delta0)?;
        CgsSchedule::new(l, mu, n, delta0)
    }

    pub fn lambda(&self, k: usize) -> f64 {
        2.0 / (k as f64 + 1.0)
    }

    pub fn beta(&self, k: usize) -> f64 {
        2.0 * self.l / k as f64
    }

    pub fn eta(&self, t: usize, k: usize) -> f64 {
        8.0 * self.l * self.delta0 * 0.5f64.powi(t as i32) / (self.mu * self.n as f64 * k as f64)
    }

    /// FO calls made by a full run: one gradient per inner step.
    pub fn fo_calls(&self) -> u64 {
        (self.n * self.m) as u64
    }
}

/// Epochs needed to shrink the gap bound from `delta0` to `epsilon`:
/// `⌈log₂(δ₀/ε)⌉`, or zero when `ε ≥ δ₀`.
pub fn cgs_iterations_for(epsilon: f64, _l: f64, _mu: f64, delta0: f64) -> Result<usize> {
    if !(epsilon > 0.0) {
        return Err(Error::argument("target accuracy must be positive"));
    }
    if epsilon >= delta0 {
        return Ok(0);
    }
    Ok((delta0 / epsilon).log2().ceil() as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgsOutput {
    pub x: DenseVector,
    pub cndg_iterations: u64,
}

pub fn cgs_minimize(
    h: &dyn SmoothObjective,
    set: &FeasibleSet,
    x0: &[f64],
    schedule: &CgsSchedule,
    counters: &mut OracleCounters,
) -> Result<CgsOutput> {
    cgs_minimize_observed(h, set, x0, schedule, counters, &mut |_, _| {})
}

/// [`cgs_minimize`] reporting `x̄_t` after every epoch `t`.
pub fn cgs_minimize_observed(
    h: &dyn SmoothObjective,
    set: &FeasibleSet,
    x0: &[f64],
    schedule: &CgsSchedule,
    counters: &mut OracleCounters,
    on_epoch: &mut dyn FnMut(usize, &[f64]),
) -> Result<CgsOutput> {
    if x0.len() != set.dim() || h.dim() != set.dim() {
        return Err(Error::argument("CGS shape mismatch"));
    }
    let mut x_bar = DenseVector::from_vec(x0.to_vec());
    let mut lo_iters = 0u64;
    for t in 1..=schedule.n {
        let mut x = x_bar.clone();
        let mut u = x.clone();
        for k in 1..=schedule.m {
            let lambda = schedule.lambda(k);
            let w = combine(&x, &u, lambda);
            let grad = h.gradient(&w);
            counters.fo += 1;
            let res = cndg(&grad, &u, schedule.beta(k), schedule.eta(t, k), set, counters)?;
            lo_iters += res.iterations as u64;
            u = res.q_plus;
            x.lerp_toward(&u, lambda);
        }
        x_bar = x;
        on_epoch(t, &x_bar);
    }
    Ok(CgsOutput {
        x: x_bar,
        cndg_iterations: lo_iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dist_sq;

    struct Shifted {
        c: Vec<f64>,
    }

    impl SmoothObjective for Shifted {
        fn dim(&self) -> usize {
            self.c.len()
        }
        fn value(&self, p: &[f64]) -> f64 {
            0.5 * dist_sq(p, &self.c)
        }
        fn gradient(&self, p: &[f64]) -> DenseVector {
            p.iter().zip(&self.c).map(|(a, b)| a - b).collect()
        }
    }

    #[test]
    fn iterations_for_examples() {
        assert_eq!(cgs_iterations_for(0.125, 1.0, 1.0, 1.0).unwrap(), 3);
        assert_eq!(cgs_iterations_for(2.0, 1.0, 1.0, 1.0).unwrap(), 0);
        assert_eq!(cgs_iterations_for(1.0, 1.0, 1.0, 1.0).unwrap(), 0);
        assert!(cgs_iterations_for(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn schedule_values() {
        let s = CgsSchedule::new(6.0, 1.0, 4, 2.0).unwrap();
        assert_eq!(s.m, 12);
        assert_eq!(s.lambda(1), 1.0);
        assert_eq!(s.beta(3), 4.0);
        assert!((s.eta(1, 1) - 8.0 * 6.0 * 2.0 * 0.5 / 4.0).abs() < 1e-12);
        assert!(s.eta(2, 1) < s.eta(1, 1) && s.eta(1, 2) < s.eta(1, 1));
        assert_eq!(s.fo_calls(), 48);
    }

    #[test]
    fn zero_epochs_returns_start() {
        let set = FeasibleSet::l2_ball(2, 1.0);
        let h = Shifted { c: vec![0.3, 0.1] };
        let s = CgsSchedule::new(1.0, 1.0, 0, 1.0).unwrap();
        let mut c = OracleCounters::new();
        let out = cgs_minimize(&h, &set, &[0.5, 0.5], &s, &mut c).unwrap();
        assert_eq!(out.x.as_slice(), &[0.5, 0.5]);
        assert_eq!(c, OracleCounters::new());
    }

    #[test]
    fn interior_target_gap_halves() {
        let set = FeasibleSet::l2_ball(3, 1.0);
        let h = Shifted {
            c: vec![0.2, -0.3, 0.1],
        };
        let delta0 = CgsSchedule::default_delta0(1.0, set.diameter());
        let s = CgsSchedule::new(1.0, 1.0, 10, delta0).unwrap();
        let mut c = OracleCounters::new();
        let mut gaps = Vec::new();
        let out = cgs_minimize_observed(&h, &set, &[1.0, 0.0, 0.0], &s, &mut c, &mut |_, x| {
            gaps.push(h.value(x))
        })
        .unwrap();
        for (t, g) in gaps.iter().enumerate() {
            assert!(*g <= delta0 * 0.5f64.powi(t as i32 + 1), "epoch {}: {g}", t + 1);
        }
        assert!(dist_sq(&out.x, &h.c).sqrt() < 1e-2);
        assert_eq!(c.fo, s.fo_calls());
        assert_eq!(c.lo, out.cndg_iterations);
    }
}
