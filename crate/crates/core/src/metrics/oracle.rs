//! Projection-based reference solvers for small problems. Used only to
//! measure solution quality, never inside the projection-free solvers.

use crate::error::{Error, Result};
use crate::linalg::{dist_sq, dot, DenseVector};
use crate::lo::{FeasibleSet, DENSE_SVD_LIMIT};
use crate::problem::SmoothObjective;

/// Largest point dimension the oracle accepts on a simplex or ball.
pub const ORACLE_DIM_LIMIT: usize = 4096;

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(p: &[f64]) -> DenseVector {
    project_capped_l1(p, 1.0, true)
}

/// Projection of a nonnegative-or-signed vector onto `{Σ x = r, x ≥ 0}`
/// (`equality`) or onto the ℓ1 ball of radius `r`.
fn project_capped_l1(p: &[f64], r: f64, equality: bool) -> DenseVector {
    if !equality {
        let l1: f64 = p.iter().map(|x| x.abs()).sum();
        if l1 <= r {
            return DenseVector::from_vec(p.to_vec());
        }
        let mags: Vec<f64> = p.iter().map(|x| x.abs()).collect();
        let proj = project_capped_l1(&mags, r, true);
        return p.iter().zip(proj.iter()).map(|(s, m)| s.signum() * m).collect();
    }
    let mut u: Vec<f64> = p.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - r) / (j as f64 + 1.0);
        if uj - t > 0.0 {
            theta = t;
        }
    }
    p.iter().map(|x| (x - theta).max(0.0)).collect()
}

pub fn project_l2_ball(p: &[f64], center: &[f64], radius: f64) -> DenseVector {
    let d = dist_sq(p, center).sqrt();
    if d <= radius {
        return DenseVector::from_vec(p.to_vec());
    }
    let s = radius / d;
    p.iter().zip(center).map(|(x, c)| c + s * (x - c)).collect()
}

/// Projection onto the nuclear ball: project the singular values onto the
/// ℓ1 ball of radius `radius`.
pub fn project_nuclear_ball(rows: usize, cols: usize, radius: f64, p: &[f64]) -> DenseVector {
    let m = nalgebra::DMatrix::from_row_slice(rows, cols, p);
    let svd = m.svd(true, true);
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    if s.iter().sum::<f64>() <= radius {
        return DenseVector::from_vec(p.to_vec());
    }
    let ps = project_capped_l1(&s, radius, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let mut out = DenseVector::zeros(rows * cols);
    for (k, sk) in ps.iter().enumerate() {
        if *sk == 0.0 {
            continue;
        }
        for i in 0..rows {
            let ui = u[(i, k)] * sk;
            for j in 0..cols {
                out[i * cols + j] += ui * vt[(k, j)];
            }
        }
    }
    out
}

pub fn project(set: &FeasibleSet, p: &[f64]) -> Result<DenseVector> {
    check_oracle_size(set)?;
    Ok(match set {
        FeasibleSet::Simplex { .. } => project_simplex(p),
        FeasibleSet::L2Ball { center, radius } => project_l2_ball(p, center, *radius),
        FeasibleSet::NuclearBall {
            rows, cols, radius, ..
        } => project_nuclear_ball(*rows, *cols, *radius, p),
    })
}

pub fn check_oracle_size(set: &FeasibleSet) -> Result<()> {
    let ok = match set {
        FeasibleSet::NuclearBall { rows, cols, .. } => {
            *rows <= DENSE_SVD_LIMIT && *cols <= DENSE_SVD_LIMIT
        }
        _ => set.dim() <= ORACLE_DIM_LIMIT,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::argument(format!(
            "problem too large for the reference oracle ({} coordinates)",
            set.dim()
        )))
    }
}

/// Frank-Wolfe gap `max_{u∈set} ⟨∇h(x), x − u⟩`, computed exactly through
/// the set's LO (not counted).
pub fn frank_wolfe_gap(h: &dyn SmoothObjective, set: &FeasibleSet, x: &[f64]) -> Result<f64> {
    let g = h.gradient(x);
    let mut scratch = crate::counters::OracleCounters::new();
    let u = set.lo_solve(&g, &mut scratch)?;
    Ok(dot(&g, x) - u.dot(&g))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleMinimum {
    pub point: DenseVector,
    /// `h(point)`, an upper bound on the minimum.
    pub value: f64,
    /// Certified lower bound `h(point) − FW-gap`.
    pub lower: f64,
    pub iterations: usize,
}

/// Minimize a smooth convex `h` over `set` by accelerated projected gradient
/// with backtracking and adaptive restart, until the Frank-Wolfe certificate
/// drops below `accuracy`.
pub fn minimize(
    h: &dyn SmoothObjective,
    set: &FeasibleSet,
    start: &[f64],
    accuracy: f64,
    max_iter: usize,
) -> Result<OracleMinimum> {
    check_oracle_size(set)?;
    if !(accuracy > 0.0) {
        return Err(Error::argument("oracle accuracy must be positive"));
    }
    let mut x = project(set, start)?;
    let mut y = x.clone();
    let mut fx = h.value(&x);
    let mut t = 1.0f64;
    let mut lip = 1.0f64;
    for it in 0..max_iter {
        if it % 10 == 0 {
            let gap = frank_wolfe_gap(h, set, &x)?;
            if gap <= accuracy {
                return Ok(OracleMinimum {
                    value: fx,
                    lower: fx - gap.max(0.0),
                    point: x,
                    iterations: it,
                });
            }
        }
        let gy = h.gradient(&y);
        let fy = h.value(&y);
        // backtracking on the quadratic upper model at y
        let x_new = loop {
            let step: Vec<f64> = y.iter().zip(gy.iter()).map(|(a, g)| a - g / lip).collect();
            let cand = project(set, &step)?;
            let diff: Vec<f64> = cand.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
            let model = fy + dot(&gy, &diff) + 0.5 * lip * dot(&diff, &diff);
            if h.value(&cand) <= model + 1e-15 * fy.abs().max(1.0) || lip > 1e300 {
                break cand;
            }
            lip *= 2.0;
        };
        let f_new = h.value(&x_new);
        if f_new > fx && t > 1.0 {
            // restart momentum; a plain step from x is always taken
            t = 1.0;
            y = x.clone();
            continue;
        }
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_new;
        y = x_new
            .iter()
            .zip(x.iter())
            .map(|(a, b)| a + beta * (a - b))
            .collect();
        x = x_new;
        fx = f_new;
        t = t_new;
        lip *= 0.9;
    }
    let gap = frank_wolfe_gap(h, set, &x)?;
    if gap <= accuracy {
        return Ok(OracleMinimum {
            value: fx,
            lower: fx - gap.max(0.0),
            point: x,
            iterations: max_iter,
        });
    }
    Err(Error::numeric(
        format!("reference oracle did not reach accuracy {accuracy:e} in {max_iter} iterations"),
        gap,
    ))
}
