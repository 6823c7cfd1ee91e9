use mpcgs::baselines::{spfw_solve, spfw_step};
use mpcgs::problems::synthetic_make;
use mpcgs::solver::SolverOptions;
use mpcgs::{OracleCounters, SaddleProblem};

#[test]
fn counts_feasibility_and_trace() {
    let p = synthetic_make(1, 10, 5, 3.0).unwrap();
    let mut counters = OracleCounters::new();
    let sol = spfw_solve(&p, &p.set_x().canonical_point(), &p.set_y().center_point(), 50, &SolverOptions::default(), &mut counters, None).unwrap();
    assert_eq!(counters.fo, 50);
    assert_eq!(counters.lo, 100);
    assert_eq!(sol.iterations, 50);
    assert_eq!(sol.trace.len(), 50);
    assert!(sol.trace.iter().all(|r| r.theory_bound.is_none()));
    assert!(p.set_x().membership(&sol.x_final, 1e-9).unwrap());
    assert!(p.set_y().membership(&sol.y_bar, 1e-9).unwrap());
    assert!(sol.trace[49].fw_gap < sol.trace[0].fw_gap);
}

#[test]
fn first_step_is_a_vertex_pair() {
    let p = synthetic_make(2, 4, 3, 2.0).unwrap();
    let x0 = p.set_x().canonical_point();
    let y0 = p.set_y().center_point();
    let (x, y) = spfw_step(&p, &x0, &y0, 0, &mut OracleCounters::new()).unwrap();
    assert_eq!(x.iter().filter(|v| **v == 1.0).count(), 1);
    assert!((y.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn time_limit_stops_early() {
    let p = synthetic_make(3, 10, 5, 3.0).unwrap();
    let opts = SolverOptions { time_limit: Some(std::time::Duration::from_millis(20)), ..Default::default() };
    let sol = spfw_solve(&p, &p.set_x().canonical_point(), &p.set_y().center_point(), usize::MAX, &opts, &mut OracleCounters::new(), None).unwrap();
    assert!(sol.iterations < usize::MAX);
    assert!(sol.trace.last().unwrap().wall_ms >= 20.0);
}
