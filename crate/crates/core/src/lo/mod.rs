//! Feasible sets and their linear-optimization oracles.

pub mod power;

pub use power::{top_singular_pair, top_singular_pair_from, SingularPair, DEFAULT_MAX_ITER, DEFAULT_TOL};

use serde::{Deserialize, Serialize};

use crate::counters::OracleCounters;
use crate::error::{Error, Result};
use crate::linalg::{dist_sq, dot, norm, DenseVector, MatrixView};
use crate::rng::RngState;

/// Membership tolerance used throughout for feasibility checks.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Largest side for which nuclear-norm membership is evaluated (dense SVD).
pub const DENSE_SVD_LIMIT: usize = 64;

/// Matrices whose smaller side is at most this size start power iteration
/// from the exact top eigenvector of their small Gram matrix.
pub const THIN_GRAM_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Seed for the random start vectors; each oracle call uses its own
    /// stream keyed by the running LO count.
    pub seed: u64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0x5eed,
        }
    }
}

/// A convex compact set with a cheap linear-optimization oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeasibleSet {
    /// Probability simplex `{p ≥ 0, Σ p = 1}`.
    Simplex { dim: usize },
    /// Euclidean ball `‖p − center‖ ≤ radius`.
    L2Ball { center: DenseVector, radius: f64 },
    /// Nuclear-norm ball `‖P‖_* ≤ radius` over row-major `rows × cols` matrices.
    NuclearBall {
        rows: usize,
        cols: usize,
        radius: f64,
        power: PowerConfig,
    },
}

/// An extreme point returned by [`FeasibleSet::lo_solve`], kept in factored
/// form where that is cheaper than a dense vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Vertex {
    /// Simplex vertex `e_index`.
    Basis { index: usize, dim: usize },
    Dense(DenseVector),
    /// `scale · u vᵀ` with unit `u`, `v`, flattened row-major.
    RankOne {
        scale: f64,
        u: DenseVector,
        v: DenseVector,
    },
}

impl Vertex {
    pub fn dim(&self) -> usize {
        match self {
            Vertex::Basis { dim, .. } => *dim,
            Vertex::Dense(p) => p.len(),
            Vertex::RankOne { u, v, .. } => u.len() * v.len(),
        }
    }

    /// `⟨V, g⟩`
    pub fn dot(&self, g: &[f64]) -> f64 {
        match self {
            Vertex::Basis { index, .. } => g[*index],
            Vertex::Dense(p) => dot(p, g),
            Vertex::RankOne { scale, u, v } => {
                let cols = v.len();
                scale
                    * u.iter()
                        .enumerate()
                        .map(|(i, ui)| ui * dot(&g[i * cols..(i + 1) * cols], v))
                        .sum::<f64>()
            }
        }
    }

    /// `out ← out + coef · V`
    pub fn add_scaled_to(&self, out: &mut [f64], coef: f64) {
        match self {
            Vertex::Basis { index, .. } => out[*index] += coef,
            Vertex::Dense(p) => crate::linalg::axpy(out, coef, p),
            Vertex::RankOne { scale, u, v } => {
                let cols = v.len();
                for (i, ui) in u.iter().enumerate() {
                    let a = coef * scale * ui;
                    if a != 0.0 {
                        crate::linalg::axpy(&mut out[i * cols..(i + 1) * cols], a, v);
                    }
                }
            }
        }
    }

    /// `q ← (1 − t)·q + t·V`
    pub fn blend_into(&self, q: &mut [f64], t: f64) {
        q.iter_mut().for_each(|x| *x *= 1.0 - t);
        self.add_scaled_to(q, t);
    }

    pub fn norm_sq(&self) -> f64 {
        match self {
            Vertex::Basis { .. } => 1.0,
            Vertex::Dense(p) => dot(p, p),
            Vertex::RankOne { scale, u, v } => scale * scale * dot(u, u) * dot(v, v),
        }
    }

    /// `‖q − V‖²`
    pub fn dist_sq(&self, q: &[f64]) -> f64 {
        match self {
            Vertex::Basis { index, .. } => dot(q, q) - 2.0 * q[*index] + 1.0,
            Vertex::Dense(p) => dist_sq(q, p),
            Vertex::RankOne { .. } => (dot(q, q) - 2.0 * self.dot(q) + self.norm_sq()).max(0.0),
        }
    }

    pub fn densify(&self) -> DenseVector {
        match self {
            Vertex::Dense(p) => p.clone(),
            _ => {
                let mut out = DenseVector::zeros(self.dim());
                self.add_scaled_to(&mut out, 1.0);
                out
            }
        }
    }
}

impl FeasibleSet {
    pub fn simplex(dim: usize) -> Self {
        FeasibleSet::Simplex { dim }
    }

    pub fn l2_ball(dim: usize, radius: f64) -> Self {
        FeasibleSet::L2Ball {
            center: DenseVector::zeros(dim),
            radius,
        }
    }

    pub fn l2_ball_centered(center: DenseVector, radius: f64) -> Self {
        FeasibleSet::L2Ball { center, radius }
    }

    pub fn nuclear_ball(rows: usize, cols: usize, radius: f64) -> Self {
        FeasibleSet::NuclearBall {
            rows,
            cols,
            radius,
            power: PowerConfig::default(),
        }
    }

    pub fn with_power(self, cfg: PowerConfig) -> Self {
        match self {
            FeasibleSet::NuclearBall {
                rows, cols, radius, ..
            } => FeasibleSet::NuclearBall {
                rows,
                cols,
                radius,
                power: cfg,
            },
            other => other,
        }
    }

    /// Number of coordinates of a point.
    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Simplex { dim } => *dim,
            FeasibleSet::L2Ball { center, .. } => center.len(),
            FeasibleSet::NuclearBall { rows, cols, .. } => rows * cols,
        }
    }

    /// Euclidean (Frobenius) diameter.
    pub fn diameter(&self) -> f64 {
        match self {
            FeasibleSet::Simplex { dim } if *dim < 2 => 0.0,
            FeasibleSet::Simplex { .. } => std::f64::consts::SQRT_2,
            FeasibleSet::L2Ball { radius, .. } => 2.0 * radius,
            FeasibleSet::NuclearBall { radius, .. } => 2.0 * radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            FeasibleSet::Simplex { dim } => *dim > 0,
            FeasibleSet::L2Ball { center, radius } => {
                !center.is_empty() && *radius > 0.0 && radius.is_finite() && center.is_finite()
            }
            FeasibleSet::NuclearBall {
                rows, cols, radius, ..
            } => *rows > 0 && *cols > 0 && *radius > 0.0 && radius.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::argument(format!("degenerate feasible set {self:?}")))
        }
    }

    /// The point returned by the oracle for a zero gradient: simplex vertex 0,
    /// the ball center, or the zero matrix.
    pub fn canonical_point(&self) -> DenseVector {
        match self {
            FeasibleSet::Simplex { dim } => {
                let mut p = DenseVector::zeros(*dim);
                p[0] = 1.0;
                p
            }
            FeasibleSet::L2Ball { center, .. } => center.clone(),
            FeasibleSet::NuclearBall { rows, cols, .. } => DenseVector::zeros(rows * cols),
        }
    }

    /// A central interior point: barycenter, center or zero.
    pub fn center_point(&self) -> DenseVector {
        match self {
            FeasibleSet::Simplex { dim } => DenseVector::from_vec(vec![1.0 / *dim as f64; *dim]),
            _ => self.canonical_point(),
        }
    }

    fn check_shape(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::argument(format!(
                "shape mismatch: set has {} coordinates, got {len}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// `argmin_{v ∈ set} ⟨v, g⟩`. Increments `counters.lo` by one.
    pub fn lo_solve(&self, g: &[f64], counters: &mut OracleCounters) -> Result<Vertex> {
        self.check_shape(g.len())?;
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::argument("LO gradient must be finite"));
        }
        let call = counters.lo;
        counters.lo += 1;
        let all_zero = g.iter().all(|x| *x == 0.0);
        match self {
            FeasibleSet::Simplex { dim } => {
                // Lowest index wins ties.
                let mut best = 0;
                for (i, gi) in g.iter().enumerate().skip(1) {
                    if *gi < g[best] {
                        best = i;
                    }
                }
                Ok(Vertex::Basis {
                    index: best,
                    dim: *dim,
                })
            }
            FeasibleSet::L2Ball { center, radius } => {
                if all_zero {
                    return Ok(Vertex::Dense(center.clone()));
                }
                let gn = norm(g);
                Ok(Vertex::Dense(
                    center
                        .iter()
                        .zip(g)
                        .map(|(c, gi)| c - radius * gi / gn)
                        .collect(),
                ))
            }
            FeasibleSet::NuclearBall {
                rows,
                cols,
                radius,
                power,
            } => {
                if all_zero {
                    return Ok(Vertex::Dense(DenseVector::zeros(rows * cols)));
                }
                let view = MatrixView::new(*rows, *cols, g)?;
                let pair = if (*rows).min(*cols) <= THIN_GRAM_LIMIT {
                    let start = gram_start(*rows, *cols, g);
                    top_singular_pair_from(&view, &start, power.tol, power.max_iter)?
                } else {
                    let mut rng = RngState::new(power.seed).split(call);
                    top_singular_pair(&view, power.tol, power.max_iter, &mut rng)?
                };
                Ok(Vertex::RankOne {
                    scale: -radius,
                    u: pair.u,
                    v: pair.v,
                })
            }
        }
    }

    /// Whether `p` lies in the set up to `tol`. Nuclear-norm membership uses a
    /// dense SVD and is limited to matrices up to 64×64.
    pub fn membership(&self, p: &[f64], tol: f64) -> Result<bool> {
        self.check_shape(p.len())?;
        if p.iter().any(|x| !x.is_finite()) {
            return Ok(false);
        }
        Ok(match self {
            FeasibleSet::Simplex { .. } => {
                p.iter().all(|x| *x >= -tol) && (p.iter().sum::<f64>() - 1.0).abs() <= tol
            }
            FeasibleSet::L2Ball { center, radius } => dist_sq(p, center).sqrt() <= radius + tol,
            FeasibleSet::NuclearBall {
                rows, cols, radius, ..
            } => {
                if *rows > DENSE_SVD_LIMIT || *cols > DENSE_SVD_LIMIT {
                    return Err(Error::Unsupported(format!(
                        "nuclear-norm membership for {rows}x{cols} (limit {DENSE_SVD_LIMIT}x{DENSE_SVD_LIMIT})"
                    )));
                }
                nuclear_norm(*rows, *cols, p) <= radius + tol
            }
        })
    }

    /// A random feasible point (uniform on simplex and ball; scaled Gaussian
    /// matrix for the nuclear ball).
    pub fn sample_point(&self, rng: &mut RngState) -> DenseVector {
        match self {
            FeasibleSet::Simplex { dim } => {
                let e: Vec<f64> = (0..*dim).map(|_| -(1.0 - rng.uniform()).ln()).collect();
                let s: f64 = e.iter().sum();
                e.into_iter().map(|x| x / s).collect()
            }
            FeasibleSet::L2Ball { center, radius } => {
                let d = center.len();
                let dir = rng.normal_vec(d);
                let n = norm(&dir);
                let r = radius * rng.uniform().powf(1.0 / d as f64);
                center
                    .iter()
                    .zip(dir)
                    .map(|(c, x)| c + r * x / n)
                    .collect()
            }
            FeasibleSet::NuclearBall {
                rows, cols, radius, ..
            } => {
                let g = rng.normal_vec(rows * cols);
                // ‖P‖_* ≤ √rank · ‖P‖_F
                let bound = ((*rows).min(*cols) as f64).sqrt() * norm(&g);
                let s = radius * rng.uniform() / bound;
                g.into_iter().map(|x| x * s).collect()
            }
        }
    }
}

/// Right start vector for a thin matrix: the top eigenvector of the smaller
/// Gram matrix, mapped to the column space when needed.
fn gram_start(rows: usize, cols: usize, g: &[f64]) -> Vec<f64> {
    let m = nalgebra::DMatrix::from_row_slice(rows, cols, g);
    let top = |k: nalgebra::DMatrix<f64>| {
        let eig = k.symmetric_eigen();
        let (i, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, v)| if *v > b.1 { (i, *v) } else { b });
        eig.eigenvectors.column(i).into_owned()
    };
    if rows <= cols {
        let u = top(&m * m.transpose());
        (m.transpose() * u).iter().copied().collect()
    } else {
        top(m.transpose() * &m).iter().copied().collect()
    }
}

/// Singular values of a row-major `rows × cols` matrix, descending.
pub fn dense_singular_values(rows: usize, cols: usize, data: &[f64]) -> Vec<f64> {
    let m = nalgebra::DMatrix::from_row_slice(rows, cols, data);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn nuclear_norm(rows: usize, cols: usize, data: &[f64]) -> f64 {
    dense_singular_values(rows, cols, data).iter().sum()
}

/// Top-level convenience mirroring [`FeasibleSet::lo_solve`].
pub fn lo_solve(set: &FeasibleSet, g: &[f64], counters: &mut OracleCounters) -> Result<Vertex> {
    set.lo_solve(g, counters)
}

pub fn membership(set: &FeasibleSet, p: &[f64], tol: f64) -> Result<bool> {
    set.membership(p, tol)
}
