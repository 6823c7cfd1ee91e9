//! Evaluation contracts shared by all solvers.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::lo::{FeasibleSet, FEASIBILITY_TOL};
use crate::rng::RngState;

/// Smoothness `l`, strong-concavity modulus `mu`, condition number
/// `kappa = l / mu`, stochastic-gradient deviation bound `sigma`, and the
/// diameters of the two feasible sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemConstants {
    pub l: f64,
    pub mu: f64,
    pub kappa: f64,
    pub sigma: f64,
    pub d_x: f64,
    pub d_y: f64,
}

impl ProblemConstants {
    pub fn new(l: f64, mu: f64, sigma: f64, d_x: f64, d_y: f64) -> Result<Self> {
        let c = ProblemConstants {
            l,
            mu,
            kappa: l / mu,
            sigma,
            d_x,
            d_y,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.l, self.mu, self.sigma, self.d_x, self.d_y]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("problem constants must be finite".into()));
        }
        if !(self.mu > 0.0) {
            return Err(Error::Config(format!("mu must be positive, got {}", self.mu)));
        }
        if self.l < self.mu {
            return Err(Error::Config(format!(
                "kappa = L/mu must be at least 1 (L = {}, mu = {})",
                self.l, self.mu
            )));
        }
        if self.sigma < 0.0 {
            return Err(Error::Config("sigma must be nonnegative".into()));
        }
        if !(self.d_x > 0.0 && self.d_y > 0.0) {
            return Err(Error::Config("set diameters must be positive".into()));
        }
        Ok(())
    }
}

/// A pair `(x, y)` in `X × Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalDualPoint {
    pub x: DenseVector,
    pub y: DenseVector,
}

impl PrimalDualPoint {
    pub fn new(x: DenseVector, y: DenseVector) -> Self {
        PrimalDualPoint { x, y }
    }

    pub fn is_feasible(&self, problem: &dyn SaddleProblem) -> Result<bool> {
        Ok(problem.set_x().membership(&self.x, FEASIBILITY_TOL)?
            && problem.set_y().membership(&self.y, FEASIBILITY_TOL)?)
    }
}

/// A set of samples ξ. Finite sums are sampled by component index; for
/// expectation problems a batch is a seeded stream of `size` draws, which the
/// problem expands (or aggregates in closed form) deterministically, so the
/// same batch evaluated at two points sees the same samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleBatch {
    Indices(Vec<usize>),
    Stream { seed: u64, size: usize },
}

impl SampleBatch {
    /// Draw `size` samples with replacement.
    pub fn draw(component_count: Option<usize>, rng: &mut RngState, size: usize) -> Self {
        match component_count {
            Some(n) => SampleBatch::Indices((0..size).map(|_| rng.index(n)).collect()),
            None => SampleBatch::Stream {
                seed: rng.next_u64(),
                size,
            },
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SampleBatch::Indices(ix) => ix.len(),
            SampleBatch::Stream { size, .. } => *size,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn ensure_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::argument("empty sample batch"))
        } else {
            Ok(())
        }
    }
}

/// A smooth function to be minimized over a feasible set.
pub trait SmoothObjective {
    fn dim(&self) -> usize;
    fn value(&self, p: &[f64]) -> f64;
    fn gradient(&self, p: &[f64]) -> DenseVector;
}

/// `h(p) = E_ξ[H(p; ξ)]` with access to averaged sample gradients.
pub trait StochasticObjective: SmoothObjective {
    /// `Some(n)` for a finite sum of `n` components.
    fn component_count(&self) -> Option<usize>;

    fn draw(&self, rng: &mut RngState, size: usize) -> SampleBatch {
        SampleBatch::draw(self.component_count(), rng, size)
    }

    /// `∇h_B(p) = (1/|B|) Σ_{ξ∈B} ∇H(p; ξ)`.
    fn batch_gradient(&self, p: &[f64], batch: &SampleBatch) -> Result<DenseVector>;
}

/// Convex-concave objective `f(x, y)` over `X × Y`.
pub trait SaddleProblem {
    fn set_x(&self) -> &FeasibleSet;
    fn set_y(&self) -> &FeasibleSet;
    fn constants(&self) -> ProblemConstants;

    fn value(&self, x: &[f64], y: &[f64]) -> f64;
    fn grad_x(&self, x: &[f64], y: &[f64]) -> DenseVector;
    fn grad_y(&self, x: &[f64], y: &[f64]) -> DenseVector;

    /// `Some(n)` for finite-sum objectives `f = (1/n) Σ F_i`.
    fn component_count(&self) -> Option<usize> {
        None
    }

    fn draw_batch(&self, rng: &mut RngState, size: usize) -> SampleBatch {
        SampleBatch::draw(self.component_count(), rng, size)
    }

    /// `∇_x f_B(x, y)` averaged over `batch`.
    fn grad_x_batch(&self, x: &[f64], y: &[f64], batch: &SampleBatch) -> Result<DenseVector>;
    /// `∇_y f_B(x, y)` averaged over `batch`.
    fn grad_y_batch(&self, x: &[f64], y: &[f64], batch: &SampleBatch) -> Result<DenseVector>;

    /// `−f(x, ·)` as a minimization objective over `Y`.
    fn dual_objective<'a>(&'a self, x: &'a [f64]) -> Box<dyn StochasticObjective + 'a>;

    /// Closed-form `argmax_y f(x, y)` when one exists.
    fn best_response_y(&self, _x: &[f64]) -> Option<DenseVector> {
        None
    }

    /// True when `f(·, y)` is affine for every `y`.
    fn linear_in_x(&self) -> bool {
        false
    }

    /// Analytic strong-concavity modulus, if known.
    fn strong_concavity(&self) -> Option<f64> {
        None
    }

    /// Analytic constants, returned untouched by constant estimation.
    fn analytic_constants(&self) -> Option<ProblemConstants> {
        None
    }
}

/// `−f(x, ·)` for a fixed `x`, evaluated through the problem's own methods.
pub struct DualSlice<'a, P: SaddleProblem + ?Sized> {
    problem: &'a P,
    x: &'a [f64],
}

impl<'a, P: SaddleProblem + ?Sized> DualSlice<'a, P> {
    pub fn new(problem: &'a P, x: &'a [f64]) -> Self {
        DualSlice { problem, x }
    }
}

impl<P: SaddleProblem + ?Sized> SmoothObjective for DualSlice<'_, P> {
    fn dim(&self) -> usize {
        self.problem.set_y().dim()
    }
    fn value(&self, y: &[f64]) -> f64 {
        -self.problem.value(self.x, y)
    }
    fn gradient(&self, y: &[f64]) -> DenseVector {
        let mut g = self.problem.grad_y(self.x, y);
        g.scale(-1.0);
        g
    }
}

impl<P: SaddleProblem + ?Sized> StochasticObjective for DualSlice<'_, P> {
    fn component_count(&self) -> Option<usize> {
        self.problem.component_count()
    }
    fn batch_gradient(&self, y: &[f64], batch: &SampleBatch) -> Result<DenseVector> {
        let mut g = self.problem.grad_y_batch(self.x, y, batch)?;
        g.scale(-1.0);
        Ok(g)
    }
}

/// `f(·, y)` for a fixed `y` as a minimization objective over `X`.
pub struct PrimalSlice<'a, P: SaddleProblem + ?Sized> {
    problem: &'a P,
    y: &'a [f64],
}

impl<'a, P: SaddleProblem + ?Sized> PrimalSlice<'a, P> {
    pub fn new(problem: &'a P, y: &'a [f64]) -> Self {
        PrimalSlice { problem, y }
    }
}

impl<P: SaddleProblem + ?Sized> SmoothObjective for PrimalSlice<'_, P> {
    fn dim(&self) -> usize {
        self.problem.set_x().dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.problem.value(x, self.y)
    }
    fn gradient(&self, x: &[f64]) -> DenseVector {
        self.problem.grad_x(x, self.y)
    }
}
