//! Conditional-gradient solve of the prox subproblem
//! `min_{u ∈ Ω} ⟨r, u⟩ + (β/2)‖u − q‖²` to Wolfe-gap tolerance `η`.

use crate::counters::OracleCounters;
use crate::error::{Error, Result};
use crate::linalg::{dot, DenseVector};
use crate::lo::FeasibleSet;

#[derive(Debug, Clone, PartialEq)]
pub struct CndgResult {
    pub q_plus: DenseVector,
    /// Loop iterations, equal to the number of LO calls made.
    pub iterations: usize,
    /// Wolfe gap `τ_t` at `q_plus`.
    pub final_gap: f64,
}

/// Default safety cap: ten times the `βD²/η` termination bound.
pub fn default_iteration_cap(beta: f64, eta: f64, diameter: f64) -> usize {
    let bound = (beta * diameter * diameter / eta).ceil();
    let bound = if bound.is_finite() { bound.max(1.0) } else { f64::MAX };
    (10.0 * bound).min(usize::MAX as f64 / 2.0) as usize
}

pub fn cndg(
    r: &[f64],
    q: &[f64],
    beta: f64,
    eta: f64,
    set: &FeasibleSet,
    counters: &mut OracleCounters,
) -> Result<CndgResult> {
    let cap = default_iteration_cap(beta, eta, set.diameter());
    cndg_observed(r, q, beta, eta, set, counters, cap, &mut |_| {})
}

/// [`cndg`] with an explicit iteration cap and a callback receiving every
/// iterate `q_t` (including the first).
#[allow(clippy::too_many_arguments)]
pub fn cndg_observed(
    r: &[f64],
    q: &[f64],
    beta: f64,
    eta: f64,
    set: &FeasibleSet,
    counters: &mut OracleCounters,
    cap: usize,
    observe: &mut dyn FnMut(&[f64]),
) -> Result<CndgResult> {
    if !(beta > 0.0) || !(eta > 0.0) {
        return Err(Error::argument(format!(
            "CndG needs beta > 0 and eta > 0 (beta = {beta}, eta = {eta})"
        )));
    }
    if r.len() != set.dim() || q.len() != set.dim() {
        return Err(Error::argument("CndG shape mismatch"));
    }

    let mut qt = DenseVector::from_vec(q.to_vec());
    // g = r + β(q_t − q)
    let mut g = DenseVector::from_vec(r.to_vec());
    let mut gap = f64::INFINITY;
    for t in 1..=cap {
        observe(&qt);
        let p = set.lo_solve(&g, counters)?;
        gap = dot(&g, &qt) - p.dot(&g);
        if gap <= eta {
            return Ok(CndgResult {
                q_plus: qt,
                iterations: t,
                final_gap: gap,
            });
        }
        let d2 = p.dist_sq(&qt);
        let theta = if d2 > 0.0 {
            (gap / (beta * d2)).min(1.0)
        } else {
            1.0
        };
        p.blend_into(&mut qt, theta);
        for ((gi, ri), (qti, qi)) in g.iter_mut().zip(r).zip(qt.iter().zip(q)) {
            *gi = ri + beta * (qti - qi);
        }
    }
    Err(Error::numeric(
        format!("CndG hit its iteration cap of {cap} before reaching gap {eta:e}"),
        gap,
    ))
}

/// Wolfe gap `max_{x∈Ω} ⟨r + β(point − q), point − x⟩` (one LO call).
pub fn wolfe_gap(
    r: &[f64],
    q: &[f64],
    beta: f64,
    point: &[f64],
    set: &FeasibleSet,
    counters: &mut OracleCounters,
) -> Result<f64> {
    let g: Vec<f64> = r
        .iter()
        .zip(point.iter().zip(q))
        .map(|(ri, (pi, qi))| ri + beta * (pi - qi))
        .collect();
    let v = set.lo_solve(&g, counters)?;
    Ok(dot(&g, point) - v.dot(&g))
}

/// `⟨r, u⟩ + (β/2)‖u − q‖²`
pub fn prox_objective(r: &[f64], q: &[f64], beta: f64, u: &[f64]) -> f64 {
    dot(r, u) + 0.5 * beta * crate::linalg::dist_sq(u, q)
}
