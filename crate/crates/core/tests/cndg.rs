mod common;

use common::{dot, grid_min_1d, random_point};
use mpcgs::cndg::{cndg, cndg_observed, default_iteration_cap, wolfe_gap};
use mpcgs::{FeasibleSet, OracleCounters, RngState};
use proptest::prelude::*;

fn recomputed_gap(set: &FeasibleSet, r: &[f64], q: &[f64], beta: f64, qp: &[f64]) -> f64 {
    let g: Vec<f64> = r.iter().zip(qp.iter().zip(q)).map(|(ri, (a, b))| ri + beta * (a - b)).collect();
    let v = set.lo_solve(&g, &mut OracleCounters::new()).unwrap();
    dot(&g, qp) - v.dot(&g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn certificate_holds(dim in 1usize..=50, ball in any::<bool>(), beta in 0.1f64..20.0,
                         log_eta in -6.0f64..-1.0, seed in any::<u64>()) {
        let set = if ball { FeasibleSet::l2_ball(dim, 1.0) } else { FeasibleSet::simplex(dim) };
        let mut rng = RngState::new(seed);
        let q = random_point(&set, &mut rng);
        let r = rng.normal_vec(dim);
        let eta = 10f64.powf(log_eta);
        let mut c = OracleCounters::new();
        let res = cndg(&r, &q, beta, eta, &set, &mut c).unwrap();
        prop_assert!(recomputed_gap(&set, &r, &q, beta, res.q_plus.as_slice()) <= eta + 1e-12);
        prop_assert!(res.final_gap <= eta);
        prop_assert_eq!(c.lo, res.iterations as u64);
        prop_assert!(set.membership(res.q_plus.as_slice(), 1e-9).unwrap());
    }

    #[test]
    fn reported_gap_matches_helper(dim in 1usize..20, seed in any::<u64>()) {
        let set = FeasibleSet::simplex(dim);
        let mut rng = RngState::new(seed);
        let q = random_point(&set, &mut rng);
        let r = rng.normal_vec(dim);
        let res = cndg(&r, &q, 2.0, 1e-4, &set, &mut OracleCounters::new()).unwrap();
        let g = wolfe_gap(&r, &q, 2.0, res.q_plus.as_slice(), &set, &mut OracleCounters::new()).unwrap();
        prop_assert!((g - recomputed_gap(&set, &r, &q, 2.0, res.q_plus.as_slice())).abs() < 1e-12);
    }
}

#[test]
fn two_simplex_example_matches_grid() {
    // min u₁ + ½‖u − e₁‖² over the 2-simplex, u = (t, 1 − t)
    let f = |t: f64| t + 0.5 * ((t - 1.0).powi(2) + (1.0 - t).powi(2));
    let (t_star, _) = grid_min_1d(&f, 1_000_000);
    let res = cndg(&[1.0, 0.0], &[1.0, 0.0], 1.0, 1e-6, &FeasibleSet::simplex(2), &mut OracleCounters::new()).unwrap();
    assert!((res.q_plus[0] - t_star).abs() < 1e-3, "{:?} vs {t_star}", res.q_plus);
    assert!((res.q_plus[1] - (1.0 - t_star)).abs() < 1e-3);
}

#[test]
fn optimal_start_uses_one_call() {
    // r pushes toward e₀ and q = e₀ is already optimal
    let mut c = OracleCounters::new();
    let res = cndg(&[-1.0, 1.0, 1.0], &[1.0, 0.0, 0.0], 1.0, 1e-9, &FeasibleSet::simplex(3), &mut c).unwrap();
    assert_eq!(res.iterations, 1);
    assert_eq!(c.lo, 1);
    assert_eq!(res.q_plus.as_slice(), &[1.0, 0.0, 0.0]);
}

#[test]
fn full_step_when_clamped() {
    // From q = e₀ with a large pull toward e₁ the first step is clamped to θ = 1.
    let set = FeasibleSet::simplex(2);
    let mut seen = Vec::new();
    let _ = cndg_observed(&[100.0, 0.0], &[1.0, 0.0], 1.0, 1e-9, &set, &mut OracleCounters::new(), 10, &mut |q| {
        seen.push(q.to_vec())
    });
    assert_eq!(seen[1], vec![0.0, 1.0]);
}

#[test]
fn cap_exceeded_is_numeric_error() {
    // interior optimum on the simplex, where CndG converges sublinearly
    let set = FeasibleSet::simplex(5);
    let q = [0.2; 5];
    let r = [0.03, -0.02, 0.01, -0.04, 0.02];
    let err = cndg_observed(&r, &q, 1.0, 1e-12, &set, &mut OracleCounters::new(), 3, &mut |_| {}).unwrap_err();
    assert!(matches!(err, mpcgs::Error::Numeric { .. }));
    assert_eq!(default_iteration_cap(1.0, 0.5, 1.0), 20);
}
