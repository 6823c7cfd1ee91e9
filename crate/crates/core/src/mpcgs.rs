//! Mirror-prox conditional gradient sliding for strongly-concave saddle
//! problems `min_x max_y f(x, y)` with exact gradients.

use serde::{Deserialize, Serialize};

use crate::cgs::{cgs_iterations_for, cgs_minimize, CgsSchedule};
use crate::cndg::cndg;
use crate::counters::OracleCounters;
use crate::error::{Error, Result};
use crate::linalg::{combine, DenseVector};
use crate::problem::{ProblemConstants, SaddleProblem};
use crate::solver::{check_start, update_dual_average, SaddleSolution, SolveStats, SolverOptions, TraceClock};
use crate::trace::TraceSink;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpcgsSchedule {
    pub constants: ProblemConstants,
    /// Outer iterations.
    pub n: usize,
}

impl MpcgsSchedule {
    pub fn new(constants: ProblemConstants, n: usize) -> Result<Self> {
        constants.validate()?;
        Ok(MpcgsSchedule { constants, n })
    }

    pub fn gamma(&self, k: usize) -> f64 {
        3.0 / (k as f64 + 2.0)
    }

    pub fn alpha(&self, k: usize) -> f64 {
        6.0 * self.constants.kappa * self.constants.l / (k as f64 + 1.0)
    }

    pub fn zeta(&self, k: usize) -> f64 {
        let k = k as f64;
        self.constants.l * self.constants.d_x.powi(2) / (384.0 * k * (k + 1.0))
    }

    pub fn eps(&self, k: usize) -> f64 {
        let c = &self.constants;
        let k = k as f64;
        c.kappa * c.l * c.d_x.powi(2) / (k * (k + 1.0) * (k + 2.0))
    }

    /// `11κL·dX²/((k+1)(k+2))`
    pub fn theory_bound(&self, k: usize) -> f64 {
        let c = &self.constants;
        let k = k as f64;
        11.0 * c.kappa * c.l * c.d_x.powi(2) / ((k + 1.0) * (k + 2.0))
    }

    pub fn prox_config(&self, k: usize) -> Result<ProxConfig> {
        ProxConfig::new(
            &self.constants,
            self.gamma(k),
            self.alpha(k),
            self.zeta(k),
            self.eps(k),
        )
    }

    /// Inner CGS schedule used for every round at iteration `k`.
    pub fn inner_schedule(&self, k: usize) -> Result<CgsSchedule> {
        inner_cgs_schedule(&self.constants, self.prox_config(k)?.eps_cgs)
    }

    /// FO calls of a full run: each round makes one inner CGS run plus one
    /// `∇_x f` evaluation.
    pub fn fo_calls(&self) -> Result<u64> {
        let mut total = 0u64;
        for k in 1..=self.n {
            let rounds = self.prox_config(k)?.rounds as u64;
            total += rounds * (1 + self.inner_schedule(k)?.fo_calls());
        }
        Ok(total)
    }
}

fn inner_cgs_schedule(c: &ProblemConstants, eps_cgs: f64) -> Result<CgsSchedule> {
    let delta0 = CgsSchedule::default_delta0(c.l, c.d_y);
    CgsSchedule::new(c.l, c.mu, cgs_iterations_for(eps_cgs, c.l, c.mu, delta0)?, delta0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxConfig {
    pub gamma: f64,
    pub alpha: f64,
    pub zeta: f64,
    pub eps: f64,
    /// `ε/(64κ)`
    pub eps_cgs: f64,
    /// `4γ√(2κLε_cgs/α² + 2ζ/α)`
    pub eps_mp: f64,
    /// `⌈log₂(4·dX/ε_mp)⌉`, at least one.
    pub rounds: usize,
}

impl ProxConfig {
    pub fn new(c: &ProblemConstants, gamma: f64, alpha: f64, zeta: f64, eps: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0 && alpha > 0.0 && zeta > 0.0 && eps > 0.0) {
            return Err(Error::argument(format!(
                "prox-step needs γ ∈ (0, 1] and α, ζ, ε > 0 (γ = {gamma}, α = {alpha}, ζ = {zeta}, ε = {eps})"
            )));
        }
        let eps_cgs = eps / (64.0 * c.kappa);
        let eps_mp = 4.0 * gamma * (2.0 * c.kappa * c.l * eps_cgs / (alpha * alpha) + 2.0 * zeta / alpha).sqrt();
        if !(eps_mp > 0.0 && eps_mp.is_finite()) {
            return Err(Error::numeric("prox-step tolerance is not positive", eps_mp));
        }
        let rounds = ((4.0 * c.d_x / eps_mp).log2().ceil().max(1.0)) as usize;
        Ok(ProxConfig {
            gamma,
            alpha,
            zeta,
            eps,
            eps_cgs,
            eps_mp,
            rounds,
        })
    }

    /// Additive slack in the round-to-round contraction
    /// `‖x_{r+1} − x_r‖ ≤ ½‖x_r − x_{r−1}‖ + slack`.
    pub fn contraction_slack(&self) -> f64 {
        0.5 * self.eps_mp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProxOutput {
    pub x: DenseVector,
    pub y: DenseVector,
    pub v: DenseVector,
    pub rounds: usize,
    pub cndg_iterations: u64,
}

/// One prox-step. `x0` is used as the anchor in every round; `z` and `v`
/// stay fixed.
#[allow(clippy::too_many_arguments)]
pub fn prox_step(
    problem: &dyn SaddleProblem,
    x0: &[f64],
    y0: &[f64],
    z: &[f64],
    v: &[f64],
    config: &ProxConfig,
    warm_start: bool,
    counters: &mut OracleCounters,
) -> Result<ProxOutput> {
    prox_step_observed(problem, x0, y0, z, v, config, warm_start, counters, &mut |_, _, _| {})
}

/// [`prox_step`] reporting `(r, x_r, y_r)` after every round.
#[allow(clippy::too_many_arguments)]
pub fn prox_step_observed(
    problem: &dyn SaddleProblem,
    x0: &[f64],
    y0: &[f64],
    z: &[f64],
    v: &[f64],
    config: &ProxConfig,
    warm_start: bool,
    counters: &mut OracleCounters,
    on_round: &mut dyn FnMut(usize, &[f64], &[f64]),
) -> Result<ProxOutput> {
    let c = problem.constants();
    let inner = inner_cgs_schedule(&c, config.eps_cgs)?;
    let mut x = DenseVector::from_vec(x0.to_vec());
    let mut y = DenseVector::from_vec(y0.to_vec());
    let mut v_r = DenseVector::from_vec(v.to_vec());
    let mut lo_iters = 0u64;
    for r in 1..=config.rounds {
        let start = if warm_start { y.as_slice() } else { y0 };
        let h = problem.dual_objective(&x);
        let out = cgs_minimize(&*h, problem.set_y(), start, &inner, counters)?;
        drop(h);
        y = out.x;
        lo_iters += out.cndg_iterations;

        let g = problem.grad_x(z, &y);
        counters.fo += 1;
        let res = cndg(&g, v, config.alpha, config.zeta, problem.set_x(), counters)?;
        lo_iters += res.iterations as u64;
        v_r = res.q_plus;
        x = combine(x0, &v_r, config.gamma);
        on_round(r, &x, &y);
    }
    Ok(ProxOutput {
        x,
        y,
        v: v_r,
        rounds: config.rounds,
        cndg_iterations: lo_iters,
    })
}

pub fn mpcgs_solve(
    problem: &dyn SaddleProblem,
    x0: &[f64],
    y0: &[f64],
    schedule: &MpcgsSchedule,
    options: &SolverOptions,
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
        let out = prox_step(problem, &x, &y, &z, &v, &cfg, options.warm_start, counters)?;
        x = out.x;
        y = out.y;
        v = out.v;
        update_dual_average(&mut y_bar, &y, k);
        stats.prox_rounds.push(out.rounds);
        stats.cndg_iterations += out.cndg_iterations;
        done = k;
        let out_of_time = clock.record(problem, k, &x, &y_bar, Some(schedule.theory_bound(k)), counters)?;
        if out_of_time {
            log::info!("mpcgs: time limit reached after {k} iterations");
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
