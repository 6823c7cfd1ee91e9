//! Top singular pair by alternating power iteration.

use crate::error::{Error, Result};
use crate::linalg::{norm, DenseVector, LinearOperator};
use crate::rng::RngState;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct SingularPair {
    pub sigma: f64,
    pub u: DenseVector,
    pub v: DenseVector,
    pub iterations: usize,
}

/// Leading singular triple of `g`.
///
/// Alternates `u ∝ G·v`, `v ∝ Gᵀ·u`, which is power iteration on `GᵀG`
/// without forming it. Stops once `‖G·v − σ·u‖ ≤ tol·σ`; the other residual
/// `‖Gᵀ·u − σ·v‖` is zero by construction of `v`. The pair is normalised so
/// that the first nonzero entry of `u` is nonnegative.
pub fn top_singular_pair(
    g: &dyn LinearOperator,
    tol: f64,
    max_iter: usize,
    rng: &mut RngState,
) -> Result<SingularPair> {
    let start = rng.normal_vec(g.cols());
    top_singular_pair_from(g, &start, tol, max_iter)
}

/// [`top_singular_pair`] from a given right start vector.
pub fn top_singular_pair_from(
    g: &dyn LinearOperator,
    start: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<SingularPair> {
    if !(tol > 0.0) {
        return Err(Error::argument("power iteration tolerance must be positive"));
    }
    let (m, n) = (g.rows(), g.cols());
    if m == 0 || n == 0 {
        return Err(Error::argument("empty matrix"));
    }
    if start.len() != n {
        return Err(Error::argument("start vector has the wrong length"));
    }

    let mut v = DenseVector::from_vec(start.to_vec());
    let vn = v.norm();
    if vn > 0.0 && vn.is_finite() {
        v.scale(1.0 / vn);
    }
    let mut w = DenseVector::zeros(m);
    g.apply(&v, &mut w);
    let mut wn = w.norm();
    if wn == 0.0 {
        // Start vector landed in the null space (or G = 0): try basis vectors.
        let mut found = false;
        for j in 0..n {
            v.iter_mut().for_each(|x| *x = 0.0);
            v[j] = 1.0;
            g.apply(&v, &mut w);
            wn = w.norm();
            if wn > 0.0 {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::argument("top singular pair of a zero matrix"));
        }
    }
    let mut u = w.clone();
    u.scale(1.0 / wn);

    let mut z = DenseVector::zeros(n);
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        g.apply_transpose(&u, &mut z);
        let sigma = z.norm();
        if sigma == 0.0 {
            return Err(Error::numeric("power iteration collapsed to zero", 1.0));
        }
        for (vi, zi) in v.iter_mut().zip(z.iter()) {
            *vi = zi / sigma;
        }
        g.apply(&v, &mut w);
        residual = w
            .iter()
            .zip(u.iter())
            .map(|(wi, ui)| (wi - sigma * ui).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * sigma {
            let mut pair = SingularPair {
                sigma,
                u,
                v,
                iterations: it,
            };
            canonical_sign(&mut pair);
            return Ok(pair);
        }
        let wn = norm(&w);
        for (ui, wi) in u.iter_mut().zip(w.iter()) {
            *ui = wi / wn;
        }
        residual /= sigma;
    }
    Err(Error::numeric(
        format!("power iteration did not converge in {max_iter} iterations"),
        residual,
    ))
}

fn canonical_sign(pair: &mut SingularPair) {
    if let Some(first) = pair.u.iter().find(|x| **x != 0.0) {
        if *first < 0.0 {
            pair.u.scale(-1.0);
            pair.v.scale(-1.0);
        }
    }
}
