//! Independent reference oracles and fixtures shared by the integration
//! tests. Nothing here calls the solver code it is used to check.

#![allow(dead_code)]

use mpcgs::linalg::DenseVector;
use mpcgs::problem::{SmoothObjective, StochasticObjective};
use mpcgs::{FeasibleSet, RngState, SampleBatch};
use nalgebra::DMatrix;

/// Central finite differences with step `h·max(1, |p_i|)`.
pub fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, p: &[f64], h: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    (0..p.len())
        .map(|i| {
            let step = h * p[i].abs().max(1.0);
            q[i] = p[i] + step;
            let up = f(&q);
            q[i] = p[i] - step;
            let down = f(&q);
            q[i] = p[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
    diff / scale
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Singular values of a row-major matrix, descending, from a dense SVD.
pub fn singular_values(rows: usize, cols: usize, data: &[f64]) -> Vec<f64> {
    let m = DMatrix::from_row_slice(rows, cols, data);
    let mut s: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Euclidean projection onto the probability simplex by sorting.
pub fn proj_simplex(p: &[f64]) -> Vec<f64> {
    let mut u = p.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        css += uj;
        let t = (css - 1.0) / (j as f64 + 1.0);
        if uj - t > 0.0 {
            theta = t;
        }
    }
    p.iter().map(|x| (x - theta).max(0.0)).collect()
}

pub fn proj_ball(p: &[f64], center: &[f64], radius: f64) -> Vec<f64> {
    let d = dist(p, center);
    if d <= radius {
        return p.to_vec();
    }
    center.iter().zip(p).map(|(c, x)| c + (x - c) * radius / d).collect()
}

/// Projection onto `set` for simplex and origin-centred balls.
pub fn proj(set: &FeasibleSet, p: &[f64]) -> Vec<f64> {
    match set {
        FeasibleSet::Simplex { .. } => proj_simplex(p),
        FeasibleSet::L2Ball { center, radius } => proj_ball(p, center.as_slice(), *radius),
        FeasibleSet::NuclearBall { .. } => panic!("no nuclear projection in the test oracles"),
    }
}

/// Plain projected gradient descent with step `1/l`, run for `iters` steps.
pub fn pgd_minimize(h: &dyn SmoothObjective, set: &FeasibleSet, x0: &[f64], l: f64, iters: usize) -> Vec<f64> {
    let mut x = x0.to_vec();
    for _ in 0..iters {
        let g = h.gradient(&x);
        let step: Vec<f64> = x.iter().zip(g.iter()).map(|(a, b)| a - b / l).collect();
        x = proj(set, &step);
    }
    x
}

/// Minimum of `f` over `[0, 1]` by a uniform grid of `n + 1` points.
pub fn grid_min_1d(f: &dyn Fn(f64) -> f64, n: usize) -> (f64, f64) {
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            (t, f(t))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

/// Random symmetric matrix with eigenvalues spread over `[mu, l]`.
pub fn spd_matrix(rng: &mut RngState, d: usize, mu: f64, l: f64) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.normal());
    let q = g.qr().q();
    let eig = DMatrix::from_fn(d, d, |i, j| {
        if i != j {
            0.0
        } else if d == 1 {
            l
        } else {
            mu + (l - mu) * i as f64 / (d - 1) as f64
        }
    });
    &q * eig * q.transpose()
}

/// `h(x) = ½(x − c)ᵀH(x − c)`, optionally with additive Gaussian gradient
/// noise of standard deviation `noise` per coordinate (stream form), or as
/// the finite sum `(1/n) Σ ½(x − c_i)ᵀH(x − c_i)` when `centers` is set.
pub struct Quadratic {
    pub h: DMatrix<f64>,
    pub c: Vec<f64>,
    pub noise: f64,
    pub centers: Option<Vec<Vec<f64>>>,
    pub l: f64,
    pub mu: f64,
}

impl Quadratic {
    pub fn new(rng: &mut RngState, d: usize, mu: f64, l: f64, c: Vec<f64>) -> Self {
        Quadratic {
            h: spd_matrix(rng, d, mu, l),
            c,
            noise: 0.0,
            centers: None,
            l,
            mu,
        }
    }

    /// Finite sum whose component centres average to `c`.
    pub fn with_components(mut self, rng: &mut RngState, n: usize, spread: f64) -> Self {
        let d = self.c.len();
        let mut centers: Vec<Vec<f64>> = (0..n).map(|_| rng.normal_vec(d).iter().map(|v| v * spread).collect()).collect();
        for j in 0..d {
            let mean: f64 = centers.iter().map(|c| c[j]).sum::<f64>() / n as f64;
            for c in centers.iter_mut() {
                c[j] += self.c[j] - mean;
            }
        }
        self.centers = Some(centers);
        self
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    /// `E‖∇H(x; ξ) − ∇h(x)‖²` in closed form.
    pub fn variance(&self) -> f64 {
        match &self.centers {
            Some(cs) => {
                let n = cs.len() as f64;
                cs.iter()
                    .map(|ci| {
                        let diff = DMatrix::from_fn(ci.len(), 1, |j, _| ci[j] - self.c[j]);
                        (&self.h * diff).norm_squared()
                    })
                    .sum::<f64>()
                    / n
            }
            None => self.noise * self.noise * self.c.len() as f64,
        }
    }

    fn h_times(&self, v: &[f64]) -> Vec<f64> {
        let d = v.len();
        (0..d).map(|i| (0..d).map(|j| self.h[(i, j)] * v[j]).sum()).collect()
    }
}

impl SmoothObjective for Quadratic {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(&self.c).map(|(a, b)| a - b).collect();
        let base = 0.5 * dot(&diff, &self.h_times(&diff));
        match &self.centers {
            // Component spread adds a constant; keep h exactly as documented.
            Some(cs) => {
                let n = cs.len() as f64;
                base + cs
                    .iter()
                    .map(|ci| {
                        let e: Vec<f64> = ci.iter().zip(&self.c).map(|(a, b)| a - b).collect();
                        0.5 * dot(&e, &self.h_times(&e))
                    })
                    .sum::<f64>()
                    / n
            }
            None => base,
        }
    }
    fn gradient(&self, x: &[f64]) -> DenseVector {
        let diff: Vec<f64> = x.iter().zip(&self.c).map(|(a, b)| a - b).collect();
        DenseVector::from_vec(self.h_times(&diff))
    }
}

impl StochasticObjective for Quadratic {
    fn component_count(&self) -> Option<usize> {
        self.centers.as_ref().map(Vec::len)
    }

    fn batch_gradient(&self, x: &[f64], batch: &SampleBatch) -> mpcgs::Result<DenseVector> {
        match (batch, &self.centers) {
            (SampleBatch::Indices(ix), Some(cs)) => {
                assert!(!ix.is_empty());
                let d = x.len();
                let mut mean = vec![0.0; d];
                for &i in ix {
                    for j in 0..d {
                        mean[j] += cs[i][j] / ix.len() as f64;
                    }
                }
                let diff: Vec<f64> = x.iter().zip(&mean).map(|(a, b)| a - b).collect();
                Ok(DenseVector::from_vec(self.h_times(&diff)))
            }
            (SampleBatch::Stream { seed, size }, None) => {
                let mut g = self.gradient(x).into_vec();
                let mut rng = RngState::new(*seed);
                let s = self.noise / (*size as f64).sqrt();
                for gi in g.iter_mut() {
                    *gi += s * rng.normal();
                }
                Ok(DenseVector::from_vec(g))
            }
            _ => panic!("batch kind does not match the objective"),
        }
    }
}

/// Random point of `set` for tests, independent of the library sampler.
pub fn random_point(set: &FeasibleSet, rng: &mut RngState) -> Vec<f64> {
    match set {
        FeasibleSet::Simplex { dim } => {
            let e: Vec<f64> = (0..*dim).map(|_| -rng.uniform().max(1e-300).ln()).collect();
            let s: f64 = e.iter().sum();
            e.iter().map(|v| v / s).collect()
        }
        FeasibleSet::L2Ball { center, radius } => {
            let g = rng.normal_vec(center.len());
            let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            let r = radius * rng.uniform().powf(1.0 / center.len() as f64);
            center.iter().zip(&g).map(|(c, v)| c + r * v / n).collect()
        }
        FeasibleSet::NuclearBall { rows, cols, radius, .. } => {
            // Sum of a few rank-one terms with weights summing to at most tau.
            let terms = 3;
            let w: Vec<f64> = (0..terms).map(|_| rng.uniform()).collect();
            let ws: f64 = w.iter().sum::<f64>().max(1e-12);
            let mut m = vec![0.0; rows * cols];
            for &wi in &w {
                let u = rng.normal_vec(*rows);
                let v = rng.normal_vec(*cols);
                let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
                let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                let s = radius * rng.uniform() * wi / ws;
                for i in 0..*rows {
                    for j in 0..*cols {
                        m[i * cols + j] += s * u[i] * v[j] / (nu * nv);
                    }
                }
            }
            m
        }
    }
}

/// Closed-form pieces of `f(x, y) = cᵀx + xᵀAy − (μ/2)‖y − y₀‖²` over
/// `simplex × ball(radius)`, read off the problem's public data.
pub struct SyntheticOracle {
    pub a: DMatrix<f64>,
    pub c: Vec<f64>,
    pub y0: Vec<f64>,
    pub mu: f64,
    pub radius: f64,
}

impl SyntheticOracle {
    pub fn new(p: &mpcgs::problems::SyntheticSaddle) -> Self {
        use mpcgs::SaddleProblem;
        let a = p.coupling();
        let radius = match p.set_y() {
            FeasibleSet::L2Ball { radius, .. } => *radius,
            _ => unreachable!(),
        };
        SyntheticOracle {
            a: DMatrix::from_row_slice(a.rows(), a.cols(), a.data()),
            c: p.linear_term().to_vec(),
            y0: p.y_center().to_vec(),
            mu: p.strong_concavity().unwrap(),
            radius,
        }
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay: Vec<f64> = (0..self.a.nrows()).map(|i| (0..self.a.ncols()).map(|j| self.a[(i, j)] * y[j]).sum()).collect();
        let q: f64 = y.iter().zip(&self.y0).map(|(a, b)| (a - b).powi(2)).sum();
        dot(&self.c, x) + dot(x, &ay) - 0.5 * self.mu * q
    }

    /// The maximizer over the ball is the projection of the free maximizer,
    /// as the quadratic part is isotropic.
    pub fn best_y(&self, x: &[f64]) -> Vec<f64> {
        let free: Vec<f64> = (0..self.a.ncols())
            .map(|j| self.y0[j] + (0..self.a.nrows()).map(|i| self.a[(i, j)] * x[i]).sum::<f64>() / self.mu)
            .collect();
        proj_ball(&free, &vec![0.0; free.len()], self.radius)
    }

    pub fn max_y(&self, x: &[f64]) -> f64 {
        self.value(x, &self.best_y(x))
    }

    /// `f(·, y)` is linear over the simplex, so the minimum sits at a vertex.
    pub fn min_x(&self, y: &[f64]) -> f64 {
        (0..self.a.nrows())
            .map(|i| {
                let mut e = vec![0.0; self.a.nrows()];
                e[i] = 1.0;
                self.value(&e, y)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn pd_gap(&self, x: &[f64], y: &[f64]) -> f64 {
        self.max_y(x) - self.min_x(y)
    }
}

/// `(1/n) Σ ½ a_i ‖x − c_i‖²`: components with different curvature, so the
/// control variate does not cancel exactly.
pub struct Scaled {
    pub a: Vec<f64>,
    pub c: Vec<Vec<f64>>,
}

impl Scaled {
    pub fn new(rng: &mut RngState, n: usize, d: usize) -> Self {
        Scaled {
            a: (0..n).map(|_| 0.5 + rng.uniform()).collect(),
            c: (0..n).map(|_| rng.normal_vec(d)).collect(),
        }
    }
    pub fn component(&self, i: usize, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.c[i]).map(|(xj, cj)| self.a[i] * (xj - cj)).collect()
    }
    pub fn lipschitz(&self) -> f64 {
        self.a.iter().cloned().fold(0.0, f64::max)
    }
    pub fn variance_at(&self, x: &[f64]) -> f64 {
        let g = self.gradient(x);
        (0..self.a.len())
            .map(|i| self.component(i, x).iter().zip(g.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
            .sum::<f64>()
            / self.a.len() as f64
    }
}

impl SmoothObjective for Scaled {
    fn dim(&self) -> usize {
        self.c[0].len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (0..self.a.len())
            .map(|i| 0.5 * self.a[i] * x.iter().zip(&self.c[i]).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
            .sum::<f64>()
            / self.a.len() as f64
    }
    fn gradient(&self, x: &[f64]) -> DenseVector {
        let ix: Vec<usize> = (0..self.a.len()).collect();
        self.batch_gradient(x, &SampleBatch::Indices(ix)).unwrap()
    }
}

impl StochasticObjective for Scaled {
    fn component_count(&self) -> Option<usize> {
        Some(self.a.len())
    }
    fn batch_gradient(&self, x: &[f64], batch: &SampleBatch) -> mpcgs::Result<DenseVector> {
        let SampleBatch::Indices(ix) = batch else { panic!("finite sum only") };
        let mut g = vec![0.0; x.len()];
        for &i in ix {
            for (gj, cj) in g.iter_mut().zip(self.component(i, x)) {
                *gj += cj / ix.len() as f64;
            }
        }
        Ok(DenseVector::from_vec(g))
    }
}
