//! Inexact stochastic variance-reduced conditional gradient sliding.
//!
//! Each epoch anchors the control variate at `x₀ = x̄_{t−1}` with a batch
//! estimate `ν = ∇h_Q(x₀)` (the exact gradient for finite sums once the
//! anchor batch reaches `n`), then runs `M` sliding steps on
//! `r_k = ∇h_S(w_k) − ∇h_S(x₀) + ν`.

use serde::{Deserialize, Serialize};

use crate::cndg::cndg;
use crate::counters::OracleCounters;
use crate::error::{Error, Result};
use crate::linalg::{combine, DenseVector};
use crate::lo::FeasibleSet;
use crate::problem::StochasticObjective;
use crate::rng::RngState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IstorcSchedule {
    pub l: f64,
    pub mu: f64,
    pub kappa: f64,
    pub sigma: f64,
    /// Diameter of the feasible set.
    pub diameter: f64,
    /// Inner steps per epoch, `⌈4√(2κ)⌉`.
    pub m: usize,
    /// Inner batch size, `⌈scale · 4800·M·κ⌉`.
    pub s: usize,
    /// Epoch count.
    pub n: usize,
    /// Multiplier applied to the inner and anchor batch sizes.
    pub scale: f64,
}

impl IstorcSchedule {
    pub fn new(l: f64, mu: f64, sigma: f64, diameter: f64, n: usize, scale: f64) -> Result<Self> {
        if !(mu > 0.0 && l >= mu && sigma >= 0.0 && diameter > 0.0 && scale > 0.0)
            || !l.is_finite()
            || !scale.is_finite()
        {
            return Err(Error::argument(format!(
                "iSTORC schedule needs L ≥ μ > 0, σ ≥ 0, D > 0, scale > 0 \
                 (L = {l}, μ = {mu}, σ = {sigma}, D = {diameter}, scale = {scale})"
            )));
        }
        let kappa = l / mu;
        let m = (4.0 * (2.0 * kappa).sqrt()).ceil() as usize;
        let s = ((scale * 4800.0 * m as f64 * kappa).ceil() as usize).max(1);
        Ok(IstorcSchedule {
            l,
            mu,
            kappa,
            sigma,
            diameter,
            m,
            s,
            n,
            scale,
        })
    }

    pub fn lambda(&self, k: usize) -> f64 {
        2.0 / (k as f64 + 1.0)
    }

    pub fn beta(&self, k: usize) -> f64 {
        3.0 * self.l / k as f64
    }

    /// `κLD² / (2^{t−2}·M·k)`
    pub fn eta(&self, t: usize, k: usize) -> f64 {
        self.kappa * self.l * self.diameter * self.diameter
            / (2f64.powi(t as i32 - 2) * self.m as f64 * k as f64)
    }

    /// Anchor batch size for epoch `t`, before finite-sum clamping:
    /// `⌈scale · ⌈1200·2^{t−1}σ²√κ/(L²D²)⌉⌉`, at least one.
    pub fn q(&self, t: usize) -> usize {
        let raw = (1200.0 * 2f64.powi(t as i32 - 1) * self.sigma * self.sigma * self.kappa.sqrt()
            / (self.l * self.l * self.diameter * self.diameter))
            .ceil();
        ((self.scale * raw).ceil() as usize).max(1)
    }

    /// Sample-gradient evaluations of one full run on an objective with
    /// `component_count` components (`None` for expectation form).
    pub fn sample_calls(&self, component_count: Option<usize>) -> u64 {
        (1..=self.n)
            .map(|t| {
                let anchor = match component_count {
                    Some(n) if self.q(t) >= n => n,
                    _ => self.q(t),
                };
                anchor as u64 + 2 * (self.m * self.s) as u64
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IstorcOutput {
    pub x: DenseVector,
    pub cndg_iterations: u64,
}

/// Anchor gradient `ν` for epoch `t` at `x0`, charging the oracle counters.
fn anchor_gradient(
    h: &dyn StochasticObjective,
    x0: &[f64],
    q: usize,
    rng: &mut RngState,
    counters: &mut OracleCounters,
) -> Result<DenseVector> {
    match h.component_count() {
        Some(n) if q >= n => {
            counters.add_samples(n as u64, true);
            Ok(h.gradient(x0))
        }
        cc => {
            let batch = h.draw(rng, q);
            counters.add_samples(q as u64, cc.is_some());
            h.batch_gradient(x0, &batch)
        }
    }
}

pub fn istorc_minimize(
    h: &dyn StochasticObjective,
    set: &FeasibleSet,
    x0: &[f64],
    schedule: &IstorcSchedule,
    rng: &mut RngState,
    counters: &mut OracleCounters,
) -> Result<IstorcOutput> {
    istorc_minimize_observed(h, set, x0, schedule, rng, counters, &mut |_, _| {})
}

/// [`istorc_minimize`] reporting `x̄_t` after every epoch.
pub fn istorc_minimize_observed(
    h: &dyn StochasticObjective,
    set: &FeasibleSet,
    x0: &[f64],
    schedule: &IstorcSchedule,
    rng: &mut RngState,
    counters: &mut OracleCounters,
    on_epoch: &mut dyn FnMut(usize, &[f64]),
) -> Result<IstorcOutput> {
    if x0.len() != set.dim() || h.dim() != set.dim() {
        return Err(Error::argument("iSTORC shape mismatch"));
    }
    let finite_sum = h.component_count().is_some();
    let mut x_bar = DenseVector::from_vec(x0.to_vec());
    let mut lo_iters = 0u64;
    for t in 1..=schedule.n {
        let anchor = x_bar.clone();
        let nu = anchor_gradient(h, &anchor, schedule.q(t), rng, counters)?;
        let mut x = anchor.clone();
        let mut u = anchor.clone();
        for k in 1..=schedule.m {
            let lambda = schedule.lambda(k);
            let w = combine(&x, &u, lambda);
            let batch = h.draw(rng, schedule.s);
            let gw = h.batch_gradient(&w, &batch)?;
            let ga = h.batch_gradient(&anchor, &batch)?;
            counters.add_samples(2 * schedule.s as u64, finite_sum);
            let r: DenseVector = gw
                .iter()
                .zip(ga.iter())
                .zip(nu.iter())
                .map(|((a, b), c)| a - b + c)
                .collect();
            let res = cndg(&r, &u, schedule.beta(k), schedule.eta(t, k), set, counters)?;
            lo_iters += res.iterations as u64;
            u = res.q_plus;
            x.lerp_toward(&u, lambda);
        }
        x_bar = x;
        on_epoch(t, &x_bar);
    }
    Ok(IstorcOutput {
        x: x_bar,
        cndg_iterations: lo_iters,
    })
}

/// How the probe forms the anchor gradient `ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorGradient {
    /// `ν = ∇h(x₀)` exactly.
    Exact,
    /// `ν = ∇h_Q(x₀)` with a fresh batch of `Q` samples per trial.
    Sampled(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    /// Sample mean of `r − ∇h(point)`.
    pub mean_error: DenseVector,
    /// Standard error of each coordinate of `mean_error`.
    pub std_error: DenseVector,
    /// Sample mean of `‖r − ∇h(point)‖²`.
    pub second_moment: f64,
}

/// Monte-Carlo statistics of the control-variate estimator
/// `r = ∇h_S(point) − ∇h_S(anchor) + ν` around the true gradient.
pub fn estimator_variance_probe(
    h: &dyn StochasticObjective,
    point: &[f64],
    anchor: &[f64],
    anchor_grad: AnchorGradient,
    s: usize,
    trials: usize,
    rng: &mut RngState,
) -> Result<ProbeResult> {
    if trials < 100 {
        return Err(Error::argument("the variance probe needs at least 100 trials"));
    }
    if s == 0 {
        return Err(Error::argument("inner batch size must be positive"));
    }
    let d = point.len();
    let truth = h.gradient(point);
    let exact_anchor = h.gradient(anchor);
    let mut sum = vec![0.0; d];
    let mut sum_sq = vec![0.0; d];
    let mut second = 0.0;
    for _ in 0..trials {
        let nu = match anchor_grad {
            AnchorGradient::Exact => exact_anchor.clone(),
            AnchorGradient::Sampled(q) => {
                let b = h.draw(rng, q);
                h.batch_gradient(anchor, &b)?
            }
        };
        let batch = h.draw(rng, s);
        let gw = h.batch_gradient(point, &batch)?;
        let ga = h.batch_gradient(anchor, &batch)?;
        let mut e2 = 0.0;
        for i in 0..d {
            let e = gw[i] - ga[i] + nu[i] - truth[i];
            sum[i] += e;
            sum_sq[i] += e * e;
            e2 += e * e;
        }
        second += e2;
    }
    let t = trials as f64;
    let mean: DenseVector = sum.iter().map(|s| s / t).collect();
    let std_error = sum_sq
        .iter()
        .zip(mean.iter())
        .map(|(sq, m)| ((sq / t - m * m).max(0.0) * t / (t - 1.0) / t).sqrt())
        .collect();
    Ok(ProbeResult {
        mean_error: mean,
        std_error,
        second_moment: second / t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{SampleBatch, SmoothObjective};

    /// `h(p) = ½‖p − c‖²` observed with zero noise.
    struct Exact {
        c: Vec<f64>,
    }

    impl SmoothObjective for Exact {
        fn dim(&self) -> usize {
            self.c.len()
        }
        fn value(&self, p: &[f64]) -> f64 {
            0.5 * crate::linalg::dist_sq(p, &self.c)
        }
        fn gradient(&self, p: &[f64]) -> DenseVector {
            p.iter().zip(&self.c).map(|(a, b)| a - b).collect()
        }
    }

    impl StochasticObjective for Exact {
        fn component_count(&self) -> Option<usize> {
            None
        }
        fn batch_gradient(&self, p: &[f64], _b: &SampleBatch) -> Result<DenseVector> {
            Ok(self.gradient(p))
        }
    }

    #[test]
    fn schedule_values() {
        let s = IstorcSchedule::new(2.0, 1.0, 0.5, 1.0, 3, 1.0).unwrap();
        assert_eq!(s.m, 8);
        assert_eq!(s.s, 4800 * 8 * 2);
        assert_eq!(s.beta(2), 3.0);
        // κLD²/(2^{-1}·M·1) = 2·2·1·2/8
        assert!((s.eta(1, 1) - 1.0).abs() < 1e-12);
        // 1200·σ²√κ/(L²D²) = 1200·0.25·√2/4 = 106.07 → 107
        assert_eq!(s.q(1), 107);
        assert!(s.q(2) >= s.q(1) && s.q(3) >= s.q(2));
        let scaled = IstorcSchedule::new(2.0, 1.0, 0.5, 1.0, 3, 0.01).unwrap();
        assert_eq!(scaled.s, 768);
        assert_eq!(scaled.q(1), 2);
    }

    #[test]
    fn zero_variance_estimator_is_exact_gradient() {
        let h = Exact {
            c: vec![0.1, 0.2, 0.3],
        };
        let mut rng = RngState::new(1);
        let p = estimator_variance_probe(
            &h,
            &[0.5, 0.1, 0.0],
            &[0.0, 0.0, 1.0],
            AnchorGradient::Sampled(5),
            3,
            100,
            &mut rng,
        )
        .unwrap();
        assert!(p.second_moment < 1e-28);
        assert!(estimator_variance_probe(&h, &[0.0; 3], &[0.0; 3], AnchorGradient::Exact, 1, 99, &mut rng).is_err());
    }

    #[test]
    fn deterministic_objective_converges_and_counts() {
        let h = Exact {
            c: vec![0.2, 0.5, 0.3],
        };
        let set = FeasibleSet::simplex(3);
        let sched = IstorcSchedule::new(1.0, 1.0, 0.0, set.diameter(), 6, 1e-3).unwrap();
        let mut c = OracleCounters::new();
        let out = istorc_minimize(&h, &set, &[1.0, 0.0, 0.0], &sched, &mut RngState::new(0), &mut c).unwrap();
        // LD²/2^{t+1} at t = 6 with L = 1, D² = 2
        assert!(h.value(&out.x) <= 2.0 * 0.5f64.powi(7));
        assert_eq!(c.sfo, sched.sample_calls(None));
        assert_eq!(c.lo, out.cndg_iterations);
        assert_eq!(c.fo, 0);
    }
}
