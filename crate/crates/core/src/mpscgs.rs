//! Stochastic mirror-prox conditional gradient sliding: the x-gradient is
//! a batch average over a sample set drawn once per outer iteration, and the
//! inner maximization runs iSTORC.

use serde::{Deserialize, Serialize};

use crate::cgs::{cgs_iterations_for, CgsSchedule};
use crate::cndg::cndg;
use crate::counters::OracleCounters;
use crate::error::{Error, Result};
use crate::istorc::{istorc_minimize, IstorcSchedule};
use crate::linalg::{combine, DenseVector};
use crate::mpcgs::ProxOutput;
use crate::problem::{ProblemConstants, SaddleProblem, SampleBatch};
use crate::rng::RngState;
use crate::solver::{check_start, update_dual_average, SaddleSolution, SolveStats, SolverOptions, TraceClock};
use crate::trace::TraceSink;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpscgsSchedule {
    pub constants: ProblemConstants,
    pub n: usize,
    /// Multiplier on `P_k` and on the inner iSTORC batch sizes.
    pub scale: f64,
}

impl MpscgsSchedule {
    pub fn new(constants: ProblemConstants, n: usize, scale: f64) -> Result<Self> {
        constants.validate()?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Config(format!("scale must be positive, got {scale}")));
        }
        Ok(MpscgsSchedule { constants, n, scale })
    }

    pub fn gamma(&self, k: usize) -> f64 {
        3.0 / (k as f64 + 2.0)
    }

    pub fn alpha(&self, k: usize) -> f64 {
        6.0 * self.constants.kappa * self.constants.l / (k as f64 + 1.0)
    }

    pub fn zeta(&self, k: usize) -> f64 {
        let k = k as f64;
        self.constants.l * self.constants.d_x.powi(2) / (576.0 * k * (k + 1.0))
    }

    pub fn eps(&self, k: usize) -> f64 {
        let c = &self.constants;
        let k = k as f64;
        c.kappa * c.l * c.d_x.powi(2) / (k * (k + 1.0) * (k + 2.0))
    }

    /// `⌈scale · ⌈96σ²(k+1)³/(κL²·dX²)⌉⌉`, at least one.
    pub fn batch_size(&self, k: usize) -> usize {
        let c = &self.constants;
        let raw = (96.0 * c.sigma * c.sigma * (k as f64 + 1.0).powi(3)
            / (c.kappa * c.l * c.l * c.d_x * c.d_x))
            .ceil();
        ((self.scale * raw).ceil() as usize).max(1)
    }

    /// `12κL·dX²/((k+1)(k+2))`
    pub fn theory_bound(&self, k: usize) -> f64 {
        let c = &self.constants;
        let k = k as f64;
        12.0 * c.kappa * c.l * c.d_x.powi(2) / ((k + 1.0) * (k + 2.0))
    }

    pub fn prox_config(&self, k: usize) -> Result<StochasticProxConfig> {
        StochasticProxConfig::new(
            &self.constants,
            self.gamma(k),
            self.alpha(k),
            self.zeta(k),
            self.eps(k),
            self.batch_size(k),
        )
    }

    pub fn inner_schedule(&self, k: usize) -> Result<IstorcSchedule> {
        inner_istorc_schedule(&self.constants, self.prox_config(k)?.eps_cgs, self.scale)
    }

    /// Sample-gradient calls (SFO, or IFO for finite sums) of a full run.
    pub fn sample_calls(&self, component_count: Option<usize>) -> Result<u64> {
        let mut total = 0u64;
        for k in 1..=self.n {
            let cfg = self.prox_config(k)?;
            let inner = self.inner_schedule(k)?.sample_calls(component_count);
            total += cfg.rounds as u64 * (cfg.batch_size as u64 + inner);
        }
        Ok(total)
    }
}

fn inner_istorc_schedule(c: &ProblemConstants, eps_cgs: f64, scale: f64) -> Result<IstorcSchedule> {
    let delta0 = CgsSchedule::default_delta0(c.l, c.d_y);
    let n = cgs_iterations_for(eps_cgs, c.l, c.mu, delta0)?;
    IstorcSchedule::new(c.l, c.mu, c.sigma, c.d_y, n, scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StochasticProxConfig {
    pub gamma: f64,
    pub alpha: f64,
    pub zeta: f64,
    pub eps: f64,
    pub batch_size: usize,
    /// `ε/(64κ)`
    pub eps_cgs: f64,
    /// `8γ²(4κLε_cgs/α² + 2ζ/α + 2σ²/(|P|α²))`
    pub eps_mp: f64,
    /// `⌈log₂(4·dX²/ε_mp)⌉`, at least one.
    pub rounds: usize,
}

impl StochasticProxConfig {
    pub fn new(
        c: &ProblemConstants,
        gamma: f64,
        alpha: f64,
        zeta: f64,
        eps: f64,
        batch_size: usize,
    ) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0 && alpha > 0.0 && zeta > 0.0 && eps > 0.0) || batch_size == 0 {
            return Err(Error::argument(format!(
                "stochastic prox-step needs γ ∈ (0, 1], α, ζ, ε > 0 and |P| ≥ 1 \
                 (γ = {gamma}, α = {alpha}, ζ = {zeta}, ε = {eps}, |P| = {batch_size})"
            )));
        }
        let eps_cgs = eps / (64.0 * c.kappa);
        let a2 = alpha * alpha;
        let eps_mp = 8.0
            * gamma
            * gamma
            * (4.0 * c.kappa * c.l * eps_cgs / a2
                + 2.0 * zeta / alpha
                + 2.0 * c.sigma * c.sigma / (batch_size as f64 * a2));
        if !(eps_mp > 0.0 && eps_mp.is_finite()) {
            return Err(Error::numeric("stochastic prox-step tolerance is not positive", eps_mp));
        }
        let rounds = ((4.0 * c.d_x * c.d_x / eps_mp).log2().ceil().max(1.0)) as usize;
        Ok(StochasticProxConfig {
            gamma,
            alpha,
            zeta,
            eps,
            batch_size,
            eps_cgs,
            eps_mp,
            rounds,
        })
    }
}

/// One stochastic prox-step. `batch` is the sample set `P` used for every
/// `∇_x f_P(z, y_r)`; the inner iSTORC runs draw their own samples.
#[allow(clippy::too_many_arguments)]
pub fn stochastic_prox_step(
    problem: &dyn SaddleProblem,
    x0: &[f64],
    y0: &[f64],
    z: &[f64],
    v: &[f64],
    config: &StochasticProxConfig,
    batch: &SampleBatch,
    scale: f64,
    warm_start: bool,
    rng: &mut RngState,
    counters: &mut OracleCounters,
) -> Result<ProxOutput> {
    batch.ensure_nonempty()?;
    let c = problem.constants();
    let inner = inner_istorc_schedule(&c, config.eps_cgs, scale)?;
    let finite_sum = problem.component_count().is_some();
    let mut x = DenseVector::from_vec(x0.to_vec());
    let mut y = DenseVector::from_vec(y0.to_vec());
    let mut v_r = DenseVector::from_vec(v.to_vec());
    let mut lo_iters = 0u64;
    for _ in 1..=config.rounds {
        let start = if warm_start { y.as_slice() } else { y0 };
        let h = problem.dual_objective(&x);
        let out = istorc_minimize(&*h, problem.set_y(), start, &inner, rng, counters)?;
        drop(h);
        y = out.x;
        lo_iters += out.cndg_iterations;

        let g = problem.grad_x_batch(z, &y, batch)?;
        counters.add_samples(batch.len() as u64, finite_sum);
        let res = cndg(&g, v, config.alpha, config.zeta, problem.set_x(), counters)?;
        lo_iters += res.iterations as u64;
        v_r = res.q_plus;
        x = combine(x0, &v_r, config.gamma);
    }
    Ok(ProxOutput {
        x,
        y,
        v: v_r,
        rounds: config.rounds,
        cndg_iterations: lo_iters,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn mpscgs_solve(
    problem: &dyn SaddleProblem,
    x0: &[f64],
    y0: &[f64],
    schedule: &MpscgsSchedule,
    options: &SolverOptions,
    rng: &mut RngState,
    counters: &mut OracleCounters,
    sink: Option<&mut dyn TraceSink>,
) -> Result<SaddleSolution> {
    check_start(problem, x0, y0)?;
    let mut clock = TraceClock::start(*options, sink);
    let mut x = DenseVector::from_vec(x0.to_vec());
    let mut v = x.clone();
    let mut y = DenseVector::from_vec(y0.to_vec());
    let mut y_bar = y.clone();
    let mut stats = SolveStats::default();
    let mut done = 0;
    for k in 1..=schedule.n {
        let cfg = schedule.prox_config(k)?;
        let z = combine(&x, &v, cfg.gamma);
        let batch = problem.draw_batch(rng, cfg.batch_size);
        let out = stochastic_prox_step(
            problem,
            &x,
            &y,
            &z,
            &v,
            &cfg,
            &batch,
            schedule.scale,
            options.warm_start,
            rng,
            counters,
        )?;
        x = out.x;
        y = out.y;
        v = out.v;
        update_dual_average(&mut y_bar, &y, k);
        stats.prox_rounds.push(out.rounds);
        stats.cndg_iterations += out.cndg_iterations;
        done = k;
        if clock.record(problem, k, &x, &y_bar, Some(schedule.theory_bound(k)), counters)? {
            log::info!("mpscgs: time limit reached after {k} iterations");
            break;
        }
    }
    Ok(SaddleSolution {
        x_final: x,
        y_bar,
        y_last: y,
        iterations: done,
        trace: clock.records,
        stats,
    })
}
