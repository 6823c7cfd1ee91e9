//! Synthetic bilinear-plus-quadratic saddle with a closed-form best response:
//! `f(x, y) = cᵀx + xᵀAy − (μ/2)‖y − y₀‖²` over `simplex(dx) × ball(dy)`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix, DenseVector, LinearOperator};
use crate::lo::power::top_singular_pair;
use crate::lo::FeasibleSet;
use crate::metrics::reference_saddle;
use crate::problem::{ProblemConstants, SaddleProblem, SampleBatch, SmoothObjective, StochasticObjective};
use crate::rng::RngState;

/// Accuracy of the cached reference saddle point.
pub const SADDLE_ACCURACY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub dx: usize,
    pub dy: usize,
    pub target_kappa: f64,
    pub mu: f64,
    /// Per-coordinate standard deviation of the additive gradient noise.
    pub noise: f64,
    /// Radius of the dual ball, centered at the origin.
    pub radius: f64,
}

impl SyntheticConfig {
    pub fn new(dx: usize, dy: usize, target_kappa: f64) -> Self {
        SyntheticConfig {
            dx,
            dy,
            target_kappa,
            mu: 1.0,
            noise: 0.0,
            radius: 1.0,
        }
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }
}

#[derive(Debug)]
pub struct SyntheticSaddle {
    a: DenseMatrix,
    c: DenseVector,
    y0: DenseVector,
    mu: f64,
    noise: f64,
    set_x: FeasibleSet,
    set_y: FeasibleSet,
    constants: ProblemConstants,
    saddle: OnceLock<(DenseVector, DenseVector)>,
}

/// `L` of the joint gradient map: the spectral norm of `[[0, A], [Aᵀ, −μI]]`.
pub fn joint_smoothness(a_norm: f64, mu: f64) -> f64 {
    0.5 * (mu + (mu * mu + 4.0 * a_norm * a_norm).sqrt())
}

/// Random instance whose `L/μ` equals `target_kappa`.
pub fn synthetic_make(seed: u64, dx: usize, dy: usize, target_kappa: f64) -> Result<SyntheticSaddle> {
    SyntheticSaddle::generate(seed, SyntheticConfig::new(dx, dy, target_kappa))
}

impl SyntheticSaddle {
    pub fn generate(seed: u64, cfg: SyntheticConfig) -> Result<Self> {
        if cfg.dx == 0 || cfg.dy == 0 {
            return Err(Error::argument("synthetic saddle needs dx, dy ≥ 1"));
        }
        if !(cfg.target_kappa >= 1.0) || !cfg.target_kappa.is_finite() {
            return Err(Error::Config(format!(
                "kappa must be at least 1, got {}",
                cfg.target_kappa
            )));
        }
        if !(cfg.mu > 0.0 && cfg.noise >= 0.0 && cfg.radius > 0.0) {
            return Err(Error::argument("synthetic saddle needs μ > 0, noise ≥ 0, radius > 0"));
        }
        let mut rng = RngState::new(seed);
        // ‖A‖ = μ√(κ² − κ) makes joint_smoothness(‖A‖, μ) = κμ.
        let k = cfg.target_kappa;
        let a_norm = cfg.mu * (k * k - k).max(0.0).sqrt();
        let raw = DenseMatrix::from_row_major(cfg.dx, cfg.dy, rng.normal_vec(cfg.dx * cfg.dy))?;
        let a = if a_norm == 0.0 {
            DenseMatrix::zeros(cfg.dx, cfg.dy)
        } else {
            let mut power_rng = rng.fork();
            let top = top_singular_pair(&raw, 1e-13, 100_000, &mut power_rng)?;
            let s = a_norm / top.sigma;
            DenseMatrix::from_row_major(cfg.dx, cfg.dy, raw.data().iter().map(|v| v * s).collect())?
        };
        let c = DenseVector::from_vec(rng.normal_vec(cfg.dx));
        let dir = rng.normal_vec(cfg.dy);
        let dn = crate::linalg::norm(&dir);
        let r0 = 0.5 * cfg.radius * rng.uniform();
        let y0: DenseVector = dir.iter().map(|v| r0 * v / dn).collect();
        Self::from_parts(a, c, y0, cfg.mu, cfg.noise, cfg.radius)
    }

    /// Build from explicit data. `L` is the exact joint smoothness constant.
    pub fn from_parts(
        a: DenseMatrix,
        c: DenseVector,
        y0: DenseVector,
        mu: f64,
        noise: f64,
        radius: f64,
    ) -> Result<Self> {
        let (dx, dy) = (a.rows(), a.cols());
        if c.len() != dx || y0.len() != dy {
            return Err(Error::argument("synthetic saddle: inconsistent shapes"));
        }
        let a_norm = if a.frobenius_norm() == 0.0 {
            0.0
        } else {
            let mut rng = RngState::new(0x5a);
            top_singular_pair(&a, 1e-13, 100_000, &mut rng)?.sigma
        };
        let set_x = FeasibleSet::simplex(dx);
        let set_y = FeasibleSet::l2_ball(dy, radius);
        let sigma = noise * ((dx + dy) as f64).sqrt();
        let d_x = if dx > 1 { set_x.diameter() } else { std::f64::consts::SQRT_2 };
        let constants = ProblemConstants::new(joint_smoothness(a_norm, mu), mu, sigma, d_x, set_y.diameter())?;
        Ok(SyntheticSaddle {
            a,
            c,
            y0,
            mu,
            noise,
            set_x,
            set_y,
            constants,
            saddle: OnceLock::new(),
        })
    }

    pub fn coupling(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn linear_term(&self) -> &DenseVector {
        &self.c
    }

    pub fn y_center(&self) -> &DenseVector {
        &self.y0
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// `clip_ball(y₀ + Aᵀx/μ)`
    pub fn y_star(&self, x: &[f64]) -> DenseVector {
        let mut t = DenseVector::zeros(self.a.cols());
        self.a.apply_transpose(x, &mut t);
        let mut y: DenseVector = t.iter().zip(self.y0.iter()).map(|(t, c)| c + t / self.mu).collect();
        if let FeasibleSet::L2Ball { radius, .. } = &self.set_y {
            let n = y.norm();
            if n > *radius {
                y.scale(radius / n);
            }
        }
        y
    }

    /// Reference saddle point, computed once to high accuracy.
    pub fn saddle_point(&self) -> Result<(DenseVector, DenseVector)> {
        if let Some(s) = self.saddle.get() {
            return Ok(s.clone());
        }
        let s = reference_saddle(self, SADDLE_ACCURACY)?;
        Ok(self.saddle.get_or_init(|| s).clone())
    }

    /// Batch-mean noise `(ξ_x, ξ_y)`, reproducible from the batch seed.
    fn batch_noise(&self, batch: &SampleBatch) -> Result<(DenseVector, DenseVector)> {
        batch.ensure_nonempty()?;
        let (dx, dy) = (self.a.rows(), self.a.cols());
        match batch {
            SampleBatch::Stream { seed, size } => {
                if self.noise == 0.0 {
                    return Ok((DenseVector::zeros(dx), DenseVector::zeros(dy)));
                }
                let sd = self.noise / (*size as f64).sqrt();
                let mut rng = RngState::new(*seed);
                let xi_x = rng.normal_vec(dx).into_iter().map(|v| v * sd).collect();
                let xi_y = rng.normal_vec(dy).into_iter().map(|v| v * sd).collect();
                Ok((xi_x, xi_y))
            }
            SampleBatch::Indices(_) => Err(Error::argument(
                "synthetic saddle is in expectation form; index batches are not defined",
            )),
        }
    }

    fn grad_y_with(&self, atx: &[f64], y: &[f64]) -> DenseVector {
        atx.iter()
            .zip(y.iter().zip(self.y0.iter()))
            .map(|(t, (yi, ci))| t - self.mu * (yi - ci))
            .collect()
    }
}

impl SaddleProblem for SyntheticSaddle {
    fn set_x(&self) -> &FeasibleSet {
        &self.set_x
    }
    fn set_y(&self) -> &FeasibleSet {
        &self.set_y
    }
    fn constants(&self) -> ProblemConstants {
        self.constants
    }

    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut ay = DenseVector::zeros(self.a.rows());
        self.a.apply(y, &mut ay);
        dot(&self.c, x) + dot(x, &ay) - 0.5 * self.mu * crate::linalg::dist_sq(y, &self.y0)
    }

    fn grad_x(&self, _x: &[f64], y: &[f64]) -> DenseVector {
        let mut g = DenseVector::zeros(self.a.rows());
        self.a.apply(y, &mut g);
        g.axpy(1.0, &self.c);
        g
    }

    fn grad_y(&self, x: &[f64], y: &[f64]) -> DenseVector {
        let mut atx = DenseVector::zeros(self.a.cols());
        self.a.apply_transpose(x, &mut atx);
        self.grad_y_with(&atx, y)
    }

    fn grad_x_batch(&self, x: &[f64], y: &[f64], batch: &SampleBatch) -> Result<DenseVector> {
        let (xi_x, _) = self.batch_noise(batch)?;
        let mut g = self.grad_x(x, y);
        g.axpy(1.0, &xi_x);
        Ok(g)
    }

    fn grad_y_batch(&self, x: &[f64], y: &[f64], batch: &SampleBatch) -> Result<DenseVector> {
        let (_, xi_y) = self.batch_noise(batch)?;
        let mut g = self.grad_y(x, y);
        g.axpy(1.0, &xi_y);
        Ok(g)
    }

    fn dual_objective<'a>(&'a self, x: &'a [f64]) -> Box<dyn StochasticObjective + 'a> {
        let mut atx = DenseVector::zeros(self.a.cols());
        self.a.apply_transpose(x, &mut atx);
        let offset = dot(&self.c, x);
        Box::new(SyntheticDual {
            problem: self,
            atx,
            offset,
        })
    }

    fn best_response_y(&self, x: &[f64]) -> Option<DenseVector> {
        Some(self.y_star(x))
    }

    fn linear_in_x(&self) -> bool {
        true
    }

    fn strong_concavity(&self) -> Option<f64> {
        Some(self.mu)
    }

    fn analytic_constants(&self) -> Option<ProblemConstants> {
        Some(self.constants)
    }
}

/// `−f(x, ·)` with `Aᵀx` precomputed.
struct SyntheticDual<'a> {
    problem: &'a SyntheticSaddle,
    atx: DenseVector,
    offset: f64,
}

impl SmoothObjective for SyntheticDual<'_> {
    fn dim(&self) -> usize {
        self.atx.len()
    }
    fn value(&self, y: &[f64]) -> f64 {
        let p = self.problem;
        -(self.offset + dot(&self.atx, y) - 0.5 * p.mu * crate::linalg::dist_sq(y, &p.y0))
    }
    fn gradient(&self, y: &[f64]) -> DenseVector {
        let mut g = self.problem.grad_y_with(&self.atx, y);
        g.scale(-1.0);
        g
    }
}

impl StochasticObjective for SyntheticDual<'_> {
    fn component_count(&self) -> Option<usize> {
        None
    }
    fn batch_gradient(&self, y: &[f64], batch: &SampleBatch) -> Result<DenseVector> {
        let (_, xi_y) = self.problem.batch_noise(batch)?;
        let mut g = self.problem.grad_y_with(&self.atx, y);
        g.axpy(1.0, &xi_y);
        g.scale(-1.0);
        Ok(g)
    }
}
