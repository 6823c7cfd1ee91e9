//! Python bindings: problems, feasible sets, the three saddle solvers and the
//! gap metrics.

use std::fs::File;
use std::io::BufReader;
use std::time::Duration;

use mpcgs::baselines::spfw_solve;
use mpcgs::data_io::parse_libsvm;
use mpcgs::metrics::{fw_gap as core_fw_gap, primal_dual_gap as core_pd_gap};
use mpcgs::mpcgs::{mpcgs_solve, MpcgsSchedule};
use mpcgs::mpscgs::{mpscgs_solve, MpscgsSchedule};
use mpcgs::problems::{estimate_constants, make_classification, RobustMulticlass, SyntheticConfig, SyntheticSaddle};
use mpcgs::solver::{SaddleSolution, SolverOptions};
use mpcgs::{FeasibleSet, OracleCounters, ProblemConstants, RngState, SaddleProblem};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(err: mpcgs::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn constants_dict<'py>(py: Python<'py>, c: &ProblemConstants) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("L", c.l)?;
    d.set_item("mu", c.mu)?;
    d.set_item("kappa", c.kappa)?;
    d.set_item("sigma", c.sigma)?;
    d.set_item("d_x", c.d_x)?;
    d.set_item("d_y", c.d_y)?;
    Ok(d)
}

fn counters_dict<'py>(py: Python<'py>, c: &OracleCounters) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("fo", c.fo)?;
    d.set_item("sfo", c.sfo)?;
    d.set_item("ifo", c.ifo)?;
    d.set_item("lo", c.lo)?;
    Ok(d)
}

/// A compact convex set with a linear optimization oracle.
#[pyclass(name = "FeasibleSet", module = "mpcgs", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySet(FeasibleSet);

#[pymethods]
impl PySet {
    #[staticmethod]
    fn simplex(dim: usize) -> PyResult<Self> {
        let s = FeasibleSet::simplex(dim);
        s.validate().map_err(value_error)?;
        Ok(PySet(s))
    }

    #[staticmethod]
    fn l2_ball(dim: usize, radius: f64) -> PyResult<Self> {
        let s = FeasibleSet::l2_ball(dim, radius);
        s.validate().map_err(value_error)?;
        Ok(PySet(s))
    }

    /// Row-major `rows x cols` matrices with nuclear norm at most `radius`.
    #[staticmethod]
    fn nuclear_ball(rows: usize, cols: usize, radius: f64) -> PyResult<Self> {
        let s = FeasibleSet::nuclear_ball(rows, cols, radius);
        s.validate().map_err(value_error)?;
        Ok(PySet(s))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn diameter(&self) -> f64 {
        self.0.diameter()
    }

    /// `argmin_{v in set} <g, v>` as a dense list.
    fn lo(&self, g: Vec<f64>) -> PyResult<Vec<f64>> {
        if g.len() != self.0.dim() {
            return Err(PyValueError::new_err(format!("expected {} entries, got {}", self.0.dim(), g.len())));
        }
        let v = self.0.lo_solve(&g, &mut OracleCounters::new()).map_err(value_error)?;
        Ok(v.densify().into_vec())
    }

    #[pyo3(signature = (p, tol=1e-9))]
    fn contains(&self, p: Vec<f64>, tol: f64) -> PyResult<bool> {
        self.0.membership(&p, tol).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        match &self.0 {
            FeasibleSet::Simplex { dim } => format!("FeasibleSet.simplex({dim})"),
            FeasibleSet::L2Ball { center, radius } => format!("FeasibleSet.l2_ball({}, {radius})", center.len()),
            FeasibleSet::NuclearBall { rows, cols, radius, .. } => {
                format!("FeasibleSet.nuclear_ball({rows}, {cols}, {radius})")
            }
        }
    }
}

enum Inner {
    Synthetic(SyntheticSaddle),
    Robust(RobustMulticlass),
}

/// A convex / strongly-concave saddle problem `min_x max_y f(x, y)`.
#[pyclass(name = "Problem", module = "mpcgs", frozen)]
struct PyProblem(Inner);

impl PyProblem {
    fn get(&self) -> &(dyn SaddleProblem + Sync) {
        match &self.0 {
            Inner::Synthetic(p) => p,
            Inner::Robust(p) => p,
        }
    }

    fn check_point(&self, x: &[f64], y: &[f64]) -> PyResult<()> {
        let p = self.get();
        if x.len() != p.set_x().dim() || y.len() != p.set_y().dim() {
            return Err(PyValueError::new_err(format!(
                "expected x of length {} and y of length {}, got {} and {}",
                p.set_x().dim(),
                p.set_y().dim(),
                x.len(),
                y.len()
            )));
        }
        Ok(())
    }
}

#[pymethods]
impl PyProblem {
    /// Bilinear problem over simplex x unit ball with condition number
    /// `kappa`. `noise > 0` makes the stochastic oracles noisy.
    #[staticmethod]
    #[pyo3(signature = (seed, dx, dy, kappa, noise=0.0))]
    fn synthetic(seed: u64, dx: usize, dy: usize, kappa: f64, noise: f64) -> PyResult<Self> {
        let p = SyntheticSaddle::generate(seed, SyntheticConfig::new(dx, dy, kappa).with_noise(noise))
            .map_err(value_error)?;
        Ok(PyProblem(Inner::Synthetic(p)))
    }

    /// Robust multiclass classification from a LIBSVM file. `lam=None`
    /// means `1/n`.
    #[staticmethod]
    #[pyo3(signature = (path, tau, lam=None, dim=None))]
    fn robust_mc(path: &str, tau: f64, lam: Option<f64>, dim: Option<usize>) -> PyResult<Self> {
        let file = File::open(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        let data = parse_libsvm(BufReader::new(file), dim).map_err(value_error)?;
        let lam = lam.unwrap_or(1.0 / data.n() as f64);
        let p = RobustMulticlass::new(data, tau, lam).map_err(value_error)?;
        Ok(PyProblem(Inner::Robust(p)))
    }

    /// Robust multiclass classification on generated Gaussian clusters.
    #[staticmethod]
    #[pyo3(signature = (seed, n, d, classes, tau, lam=None))]
    fn robust_mc_generated(seed: u64, n: usize, d: usize, classes: usize, tau: f64, lam: Option<f64>) -> PyResult<Self> {
        let data = make_classification(seed, n, d, classes).map_err(value_error)?;
        let p = RobustMulticlass::new(data, tau, lam.unwrap_or(1.0 / n as f64)).map_err(value_error)?;
        Ok(PyProblem(Inner::Robust(p)))
    }

    /// Copy of this problem with `L` and `sigma` replaced by sampled
    /// estimates.
    #[pyo3(signature = (trials=20, seed=0))]
    fn with_estimated_constants(&self, trials: usize, seed: u64) -> PyResult<Self> {
        let c = estimate_constants(self.get(), trials, &mut RngState::new(seed)).map_err(value_error)?;
        match &self.0 {
            Inner::Robust(p) => Ok(PyProblem(Inner::Robust(p.clone().with_constants(c).map_err(value_error)?))),
            Inner::Synthetic(_) => Err(PyValueError::new_err("synthetic problems carry exact constants")),
        }
    }

    #[getter]
    fn set_x(&self) -> PySet {
        PySet(self.get().set_x().clone())
    }

    #[getter]
    fn set_y(&self) -> PySet {
        PySet(self.get().set_y().clone())
    }

    fn constants<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        constants_dict(py, &self.get().constants())
    }

    fn value(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        self.check_point(&x, &y)?;
        Ok(self.get().value(&x, &y))
    }

    fn grad_x(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_point(&x, &y)?;
        Ok(self.get().grad_x(&x, &y).into_vec())
    }

    fn grad_y(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_point(&x, &y)?;
        Ok(self.get().grad_y(&x, &y).into_vec())
    }

    fn fw_gap(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        self.check_point(&x, &y)?;
        core_fw_gap(self.get(), &x, &y, &mut OracleCounters::new()).map_err(value_error)
    }

    /// Bracket `(lower, upper)` on the primal-dual gap.
    #[pyo3(signature = (x, y, accuracy=1e-8))]
    fn primal_dual_gap(&self, x: Vec<f64>, y: Vec<f64>, accuracy: f64) -> PyResult<(f64, f64)> {
        self.check_point(&x, &y)?;
        let g = core_pd_gap(self.get(), &x, &y, accuracy).map_err(value_error)?;
        Ok((g.lower, g.upper))
    }

    /// `(x*, y*)` for synthetic problems.
    fn saddle_point(&self) -> PyResult<(Vec<f64>, Vec<f64>)> {
        match &self.0 {
            Inner::Synthetic(p) => {
                let (x, y) = p.saddle_point().map_err(value_error)?;
                Ok((x.into_vec(), y.into_vec()))
            }
            Inner::Robust(_) => Err(PyValueError::new_err("no closed-form saddle point for robust_mc")),
        }
    }

    fn __repr__(&self) -> String {
        let p = self.get();
        let kind = match self.0 {
            Inner::Synthetic(_) => "synthetic",
            Inner::Robust(_) => "robust_mc",
        };
        format!("Problem({kind}, dim_x={}, dim_y={})", p.set_x().dim(), p.set_y().dim())
    }
}

fn options(warm_start: bool, time_limit: Option<f64>, trace: bool) -> PyResult<SolverOptions> {
    let time_limit = match time_limit {
        Some(t) if !(t > 0.0 && t.is_finite()) => {
            return Err(PyValueError::new_err(format!("time_limit must be positive, got {t}")))
        }
        t => t.map(Duration::from_secs_f64),
    };
    Ok(SolverOptions { warm_start, trace_fw_gap: trace, time_limit })
}

fn start(p: &dyn SaddleProblem, x0: Option<Vec<f64>>, y0: Option<Vec<f64>>) -> (Vec<f64>, Vec<f64>) {
    (
        x0.unwrap_or_else(|| p.set_x().center_point().into_vec()),
        y0.unwrap_or_else(|| p.set_y().center_point().into_vec()),
    )
}

fn solution_dict<'py>(py: Python<'py>, sol: SaddleSolution, counters: &OracleCounters) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("x", sol.x_final.into_vec())?;
    d.set_item("y_bar", sol.y_bar.into_vec())?;
    d.set_item("y_last", sol.y_last.into_vec())?;
    d.set_item("iterations", sol.iterations)?;
    d.set_item("counters", counters_dict(py, counters)?)?;
    let mut trace = Vec::with_capacity(sol.trace.len());
    for rec in &sol.trace {
        let r = PyDict::new(py);
        r.set_item("k", rec.k)?;
        r.set_item("wall_ms", rec.wall_ms)?;
        r.set_item("fw_gap", rec.fw_gap)?;
        r.set_item("theory_bound", rec.theory_bound)?;
        r.set_item("counters", counters_dict(py, &rec.counters)?)?;
        trace.push(r);
    }
    d.set_item("trace", trace)?;
    Ok(d)
}

/// Mirror-prox with CGS inner solves, deterministic oracles.
#[pyfunction]
#[pyo3(name = "mpcgs", signature = (problem, iters, x0=None, y0=None, warm_start=false, time_limit=None, trace=true))]
#[allow(clippy::too_many_arguments)]
fn run_mpcgs<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    iters: usize,
    x0: Option<Vec<f64>>,
    y0: Option<Vec<f64>>,
    warm_start: bool,
    time_limit: Option<f64>,
    trace: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let p = problem.get();
    let (x0, y0) = start(p, x0, y0);
    let opts = options(warm_start, time_limit, trace)?;
    let sched = MpcgsSchedule::new(p.constants(), iters).map_err(value_error)?;
    let mut counters = OracleCounters::new();
    let sol = py
        .detach(|| mpcgs_solve(p, &x0, &y0, &sched, &opts, &mut counters, None))
        .map_err(value_error)?;
    solution_dict(py, sol, &counters)
}

/// Stochastic mirror-prox with iSTORC inner solves. `scale` multiplies
/// every sample size.
#[pyfunction]
#[pyo3(name = "mpscgs", signature = (problem, iters, seed=0, scale=1.0, x0=None, y0=None, warm_start=false, time_limit=None, trace=true))]
#[allow(clippy::too_many_arguments)]
fn run_mpscgs<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    iters: usize,
    seed: u64,
    scale: f64,
    x0: Option<Vec<f64>>,
    y0: Option<Vec<f64>>,
    warm_start: bool,
    time_limit: Option<f64>,
    trace: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let p = problem.get();
    let (x0, y0) = start(p, x0, y0);
    let opts = options(warm_start, time_limit, trace)?;
    let sched = MpscgsSchedule::new(p.constants(), iters, scale).map_err(value_error)?;
    let mut counters = OracleCounters::new();
    let mut rng = RngState::new(seed);
    let sol = py
        .detach(|| mpscgs_solve(p, &x0, &y0, &sched, &opts, &mut rng, &mut counters, None))
        .map_err(value_error)?;
    solution_dict(py, sol, &counters)
}

/// Saddle-point Frank-Wolfe baseline.
#[pyfunction]
#[pyo3(name = "spfw", signature = (problem, iters, x0=None, y0=None, time_limit=None, trace=true))]
fn run_spfw<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    iters: usize,
    x0: Option<Vec<f64>>,
    y0: Option<Vec<f64>>,
    time_limit: Option<f64>,
    trace: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let p = problem.get();
    let (x0, y0) = start(p, x0, y0);
    let opts = options(false, time_limit, trace)?;
    let mut counters = OracleCounters::new();
    let sol = py
        .detach(|| spfw_solve(p, &x0, &y0, iters, &opts, &mut counters, None))
        .map_err(value_error)?;
    solution_dict(py, sol, &counters)
}

/// Worst-case primal-dual gap bound of MPCGS after `k` iterations.
#[pyfunction]
fn mpcgs_bound(problem: &PyProblem, k: usize) -> PyResult<f64> {
    let sched = MpcgsSchedule::new(problem.get().constants(), k.max(1)).map_err(value_error)?;
    Ok(sched.theory_bound(k))
}

#[pymodule(name = "mpcgs")]
fn build_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySet>()?;
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(run_mpcgs, m)?)?;
    m.add_function(wrap_pyfunction!(run_mpscgs, m)?)?;
    m.add_function(wrap_pyfunction!(run_spfw, m)?)?;
    m.add_function(wrap_pyfunction!(mpcgs_bound, m)?)?;
    Ok(())
}
