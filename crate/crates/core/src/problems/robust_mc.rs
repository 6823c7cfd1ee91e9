//! Distributionally robust multiclass logistic regression:
//! `f(X, y) = Σ_i y_i ℓ_i(X) − (λ/2)‖n·y − 1‖²` over the nuclear ball in `X`
//! and the simplex in `y`, with `ℓ_i(X) = log(1 + Σ_{j≠b_i} exp(x_jᵀa_i − x_{b_i}ᵀa_i))`.

use crate::error::{Error, Result};
use crate::linalg::{DenseVector, SparseRowMatrix};
use crate::lo::FeasibleSet;
use crate::metrics::oracle::project_simplex;
use crate::problem::{ProblemConstants, SaddleProblem, SampleBatch, SmoothObjective, StochasticObjective};
use crate::rng::RngState;

/// Labelled sparse samples with classes remapped to `0..h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: SparseRowMatrix,
    labels: Vec<usize>,
    /// Original label value of each class index, ascending.
    classes: Vec<f64>,
}

impl Dataset {
    pub fn new(features: SparseRowMatrix, labels: Vec<usize>, classes: Vec<f64>) -> Result<Self> {
        if features.rows() == 0 {
            return Err(Error::argument("dataset has no samples"));
        }
        if labels.len() != features.rows() {
            return Err(Error::argument(format!(
                "{} labels for {} samples",
                labels.len(),
                features.rows()
            )));
        }
        if classes.is_empty() || classes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::argument("class values must be strictly increasing"));
        }
        if let Some(b) = labels.iter().find(|&&b| b >= classes.len()) {
            return Err(Error::argument(format!(
                "label {b} out of range for {} classes",
                classes.len()
            )));
        }
        Ok(Dataset {
            features,
            labels,
            classes,
        })
    }

    pub fn n(&self) -> usize {
        self.features.rows()
    }

    pub fn d(&self) -> usize {
        self.features.cols()
    }

    pub fn h(&self) -> usize {
        self.classes.len()
    }

    pub fn features(&self) -> &SparseRowMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> &[f64] {
        &self.classes
    }

    /// Largest sample norm `max_i ‖a_i‖`.
    pub fn max_row_norm(&self) -> f64 {
        (0..self.n())
            .map(|i| self.features.row_norm_sq(i))
            .fold(0.0, f64::max)
            .sqrt()
    }
}

/// Gaussian class clusters in `d` dimensions with unit-norm samples and
/// labels `1..=h`. Every class appears at least once when `n ≥ h`.
pub fn make_classification(seed: u64, n: usize, d: usize, h: usize) -> Result<Dataset> {
    if n == 0 || d == 0 || h == 0 {
        return Err(Error::argument("make_classification needs n, d, h ≥ 1"));
    }
    let mut rng = RngState::new(seed);
    let centers: Vec<Vec<f64>> = (0..h).map(|_| rng.normal_vec(d)).collect();
    let mut features = SparseRowMatrix::new(d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let b = if i < h { i } else { rng.index(h) };
        let noise = rng.normal_vec(d);
        let raw: Vec<f64> = centers[b].iter().zip(noise).map(|(c, e)| c + 1.5 * e).collect();
        let nrm = crate::linalg::norm(&raw).max(f64::MIN_POSITIVE);
        let row: Vec<(usize, f64)> = raw.iter().enumerate().map(|(j, v)| (j, v / nrm)).collect();
        features.push_row(&row)?;
        labels.push(b);
    }
    let classes = (1..=h).map(|c| c as f64).collect();
    Dataset::new(features, labels, classes)
}

#[derive(Debug, Clone)]
pub struct RobustMulticlass {
    data: Dataset,
    tau: f64,
    lambda: f64,
    set_x: FeasibleSet,
    set_y: FeasibleSet,
    constants: ProblemConstants,
}

impl RobustMulticlass {
    /// Constants default to the analytic smoothness bound
    /// `max(R²/2, λn²) + √(2n)·R` with `R = max_i ‖a_i‖`, `μ = λn²`, and `σ`
    /// from an exact enumeration at the center point. Replace them with
    /// [`RobustMulticlass::with_constants`].
    pub fn new(data: Dataset, tau: f64, lambda: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Config(format!("tau must be positive, got {tau}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!(
                "lambda must be positive for strong concavity, got {lambda}"
            )));
        }
        let (n, d, h) = (data.n(), data.d(), data.h());
        let set_x = FeasibleSet::nuclear_ball(h, d, tau);
        let set_y = FeasibleSet::simplex(n);
        let nf = n as f64;
        let mu = lambda * nf * nf;
        let r = data.max_row_norm();
        let l = (0.5 * r * r).max(mu) + (2.0 * nf).sqrt() * r;
        let d_y = if n > 1 { set_y.diameter() } else { std::f64::consts::SQRT_2 };
        let placeholder = ProblemConstants::new(l, mu, 0.0, set_x.diameter(), d_y)?;
        let mut p = RobustMulticlass {
            data,
            tau,
            lambda,
            set_x,
            set_y,
            constants: placeholder,
        };
        let x0 = p.set_x.center_point();
        let y0 = p.set_y.center_point();
        p.constants.sigma = crate::problems::estimate::sample_deviation(&p, &x0, &y0)?;
        Ok(p)
    }

    pub fn with_constants(mut self, constants: ProblemConstants) -> Result<Self> {
        constants.validate()?;
        self.constants = constants;
        Ok(self)
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Class scores `s_j = x_jᵀa_i` for sample `i`.
    fn scores(&self, x: &[f64], i: usize) -> Vec<f64> {
        let d = self.data.d();
        (0..self.data.h())
            .map(|j| self.data.features.row_dot(i, &x[j * d..(j + 1) * d]))
            .collect()
    }

    /// `ℓ_i(X)` and the softmax of the scores.
    fn loss_and_probs(&self, x: &[f64], i: usize) -> (f64, Vec<f64>) {
        let s = self.scores(x, i);
        let m = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut p: Vec<f64> = s.iter().map(|v| (v - m).exp()).collect();
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= z);
        let b = self.data.labels[i];
        // log Σ_j exp(s_j) − s_b, the j = b term being the leading 1
        (m + z.ln() - s[b], p)
    }

    /// `ℓ_i(X)` for every sample.
    pub fn losses(&self, x: &[f64]) -> Vec<f64> {
        (0..self.data.n()).map(|i| self.loss_and_probs(x, i).0).collect()
    }

    /// Adds `w·∇ℓ_i(X)` to `out`.
    fn add_loss_grad(&self, x: &[f64], i: usize, w: f64, out: &mut [f64]) {
        if w == 0.0 {
            return;
        }
        let (_, p) = self.loss_and_probs(x, i);
        let d = self.data.d();
        let b = self.data.labels[i];
        let (idx, vals) = self.data.features.row(i);
        for (j, pj) in p.iter().enumerate() {
            let coef = w * (pj - if j == b { 1.0 } else { 0.0 });
            if coef == 0.0 {
                continue;
            }
            let row = &mut out[j * d..(j + 1) * d];
            for (k, v) in idx.iter().zip(vals) {
                row[*k] += coef * v;
            }
        }
    }

    fn regularizer(&self, y: &[f64]) -> f64 {
        let n = self.data.n() as f64;
        0.5 * self.lambda * y.iter().map(|v| (n * v - 1.0).powi(2)).sum::<f64>()
    }

    /// `λn(n·y − 1)`
    fn regularizer_grad(&self, y: &[f64]) -> Vec<f64> {
        let n = self.data.n() as f64;
        y.iter().map(|v| self.lambda * n * (n * v - 1.0)).collect()
    }

    fn indices<'b>(&self, batch: &'b SampleBatch) -> Result<&'b [usize]> {
        batch.ensure_nonempty()?;
        match batch {
            SampleBatch::Indices(ix) => {
                if let Some(i) = ix.iter().find(|&&i| i >= self.data.n()) {
                    return Err(Error::argument(format!(
                        "sample index {i} out of range for {} samples",
                        self.data.n()
                    )));
                }
                Ok(ix)
            }
            SampleBatch::Stream { .. } => Err(Error::argument(
                "robust multiclass is a finite sum; stream batches are not defined",
            )),
        }
    }
}

impl SaddleProblem for RobustMulticlass {
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
        let loss: f64 = (0..self.data.n())
            .filter(|&i| y[i] != 0.0)
            .map(|i| y[i] * self.loss_and_probs(x, i).0)
            .sum();
        loss - self.regularizer(y)
    }

    fn grad_x(&self, x: &[f64], y: &[f64]) -> DenseVector {
        let mut g = DenseVector::zeros(x.len());
        for i in 0..self.data.n() {
            self.add_loss_grad(x, i, y[i], &mut g);
        }
        g
    }

    fn grad_y(&self, x: &[f64], y: &[f64]) -> DenseVector {
        self.losses(x)
            .into_iter()
            .zip(self.regularizer_grad(y))
            .map(|(l, r)| l - r)
            .collect()
    }

    fn component_count(&self) -> Option<usize> {
        Some(self.data.n())
    }

    fn grad_x_batch(&self, x: &[f64], y: &[f64], batch: &SampleBatch) -> Result<DenseVector> {
        let ix = self.indices(batch)?;
        let w = self.data.n() as f64 / ix.len() as f64;
        let mut g = DenseVector::zeros(x.len());
        for &i in ix {
            self.add_loss_grad(x, i, w * y[i], &mut g);
        }
        Ok(g)
    }

    fn grad_y_batch(&self, x: &[f64], y: &[f64], batch: &SampleBatch) -> Result<DenseVector> {
        let ix = self.indices(batch)?;
        let w = self.data.n() as f64 / ix.len() as f64;
        let mut g: DenseVector = self.regularizer_grad(y).into_iter().map(|r| -r).collect();
        for &i in ix {
            g[i] += w * self.loss_and_probs(x, i).0;
        }
        Ok(g)
    }

    fn dual_objective<'a>(&'a self, x: &'a [f64]) -> Box<dyn StochasticObjective + 'a> {
        Box::new(RobustDual {
            problem: self,
            losses: self.losses(x),
        })
    }

    /// `proj_simplex(1/n + ℓ/(λn²))`, the maximizer of the concave quadratic.
    fn best_response_y(&self, x: &[f64]) -> Option<DenseVector> {
        let n = self.data.n() as f64;
        let t: Vec<f64> = self
            .losses(x)
            .iter()
            .map(|l| 1.0 / n + l / (self.lambda * n * n))
            .collect();
        Some(project_simplex(&t))
    }

    fn strong_concavity(&self) -> Option<f64> {
        Some(self.constants.mu)
    }
}

/// `−f(X, ·)` for fixed `X` with the per-sample losses cached, so that
/// gradients cost `O(n)` and batch gradients `O(|B| + n)`.
struct RobustDual<'a> {
    problem: &'a RobustMulticlass,
    losses: Vec<f64>,
}

impl SmoothObjective for RobustDual<'_> {
    fn dim(&self) -> usize {
        self.losses.len()
    }
    fn value(&self, y: &[f64]) -> f64 {
        let loss: f64 = self.losses.iter().zip(y).map(|(l, v)| l * v).sum();
        self.problem.regularizer(y) - loss
    }
    fn gradient(&self, y: &[f64]) -> DenseVector {
        self.problem
            .regularizer_grad(y)
            .into_iter()
            .zip(&self.losses)
            .map(|(r, l)| r - l)
            .collect()
    }
}

impl StochasticObjective for RobustDual<'_> {
    fn component_count(&self) -> Option<usize> {
        Some(self.losses.len())
    }
    fn batch_gradient(&self, y: &[f64], batch: &SampleBatch) -> Result<DenseVector> {
        let ix = self.problem.indices(batch)?;
        let w = self.losses.len() as f64 / ix.len() as f64;
        let mut g = DenseVector::from_vec(self.problem.regularizer_grad(y));
        for &i in ix {
            g[i] -= w * self.losses[i];
        }
        Ok(g)
    }
}
