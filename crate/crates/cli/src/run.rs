use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use serde::Serialize;

use mpcgs::baselines::spfw_solve;
use mpcgs::data_io::{parse_libsvm, write_trace, TraceFormat};
use mpcgs::mpcgs::{mpcgs_solve, MpcgsSchedule};
use mpcgs::mpscgs::{mpscgs_solve, MpscgsSchedule};
use mpcgs::problems::{estimate_constants, RobustMulticlass, SyntheticConfig, SyntheticSaddle};
use mpcgs::solver::{SaddleSolution, SolverOptions};
use mpcgs::{OracleCounters, ProblemConstants, RngState, SaddleProblem};

use crate::config::{ConstantsSource, ProblemSpec, RunConfig, SolverKind};

/// Pilot trials for [`estimate_constants`].
pub const ESTIMATE_TRIALS: usize = 20;

#[derive(Debug, Serialize)]
#[serde(tag = "solver", rename_all = "snake_case")]
pub enum ScheduleRecord {
    Mpcgs(MpcgsSchedule),
    Mpscgs(MpscgsSchedule),
    Spfw { step: &'static str },
}

#[derive(Debug, Serialize)]
pub struct DatasetRecord {
    pub n: usize,
    pub d: usize,
    pub h: usize,
    /// Original label of each dense class index.
    pub label_mapping: Vec<f64>,
    pub lambda: f64,
}

/// Everything needed to replay a run from its config and data file.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub config: RunConfig,
    pub constants: ProblemConstants,
    pub constants_source: &'static str,
    pub schedule: ScheduleRecord,
    pub dataset: Option<DatasetRecord>,
    pub iterations: usize,
    pub counters: OracleCounters,
    pub solver_seconds: f64,
    pub trace: PathBuf,
    pub deviations: Vec<String>,
}

pub struct RunOutcome {
    pub solution: SaddleSolution,
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn build_problem(cfg: &RunConfig) -> Result<(Box<dyn SaddleProblem>, &'static str, Option<DatasetRecord>)> {
    match &cfg.problem {
        ProblemSpec::Synthetic { dx, dy, kappa, noise } => {
            let p = SyntheticSaddle::generate(cfg.seed, SyntheticConfig::new(*dx, *dy, *kappa).with_noise(*noise))?;
            Ok((Box::new(p), "analytic", None))
        }
        ProblemSpec::RobustMc {
            data,
            dim,
            tau,
            lambda,
            constants,
        } => {
            let file = File::open(data).with_context(|| format!("opening dataset {}", data.display()))?;
            let ds = parse_libsvm(BufReader::new(file), *dim).with_context(|| format!("reading {}", data.display()))?;
            let lam = lambda.resolve(ds.n());
            let record = DatasetRecord {
                n: ds.n(),
                d: ds.d(),
                h: ds.h(),
                label_mapping: ds.classes().to_vec(),
                lambda: lam,
            };
            let mut p = RobustMulticlass::new(ds, *tau, lam)?;
            let source = match constants {
                ConstantsSource::Analytic => "analytic",
                ConstantsSource::Estimated => {
                    let mut rng = RngState::new(cfg.seed).split(0);
                    let c = estimate_constants(&p, ESTIMATE_TRIALS, &mut rng)?;
                    p = p.with_constants(c)?;
                    "estimated"
                }
            };
            Ok((Box::new(p), source, Some(record)))
        }
    }
}

/// Load, solve and write the trace plus its manifest.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.check_files()?;
    let (problem, constants_source, dataset) = build_problem(cfg)?;
    let problem = &*problem;
    let constants = problem.constants();
    log::info!("constants ({constants_source}): {constants:?}");
    let options = SolverOptions {
        warm_start: cfg.warm_start,
        time_limit: cfg.time_limit.map(Duration::from_secs_f64),
        ..Default::default()
    };
    let x0 = problem.set_x().center_point();
    let y0 = problem.set_y().center_point();
    let mut counters = OracleCounters::new();
    let mut deviations = Vec::new();
    if cfg.warm_start {
        deviations.push("warm_start: inner maximizations start from the previous round".to_string());
    }
    if let Some(t) = cfg.time_limit {
        deviations.push(format!("time_limit: stops after {t} s of solver time"));
    }
    let started = Instant::now();
    let (solution, schedule) = match cfg.solver {
        SolverKind::Mpcgs => {
            let s = MpcgsSchedule::new(constants, cfg.iters)?;
            let sol = mpcgs_solve(problem, &x0, &y0, &s, &options, &mut counters, None)?;
            (sol, ScheduleRecord::Mpcgs(s))
        }
        SolverKind::Mpscgs => {
            if cfg.scale != 1.0 {
                deviations.push(format!("scale={}: sample sizes scaled from their theory values", cfg.scale));
            }
            let s = MpscgsSchedule::new(constants, cfg.iters, cfg.scale)?;
            let mut rng = RngState::new(cfg.seed).split(1);
            let sol = mpscgs_solve(problem, &x0, &y0, &s, &options, &mut rng, &mut counters, None)?;
            (sol, ScheduleRecord::Mpscgs(s))
        }
        SolverKind::Spfw => {
            let sol = spfw_solve(problem, &x0, &y0, cfg.iters, &options, &mut counters, None)?;
            (sol, ScheduleRecord::Spfw { step: "2/(k+2)" })
        }
    };
    let solver_seconds = started.elapsed().as_secs_f64();
    log::info!("{} iterations in {solver_seconds:.3} s", solution.iterations);

    let out = BufWriter::new(File::create(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?);
    write_trace(&solution.trace, TraceFormat::from_path(&cfg.out), out)?;
    let manifest = Manifest {
        config: cfg.clone(),
        constants,
        constants_source,
        schedule,
        dataset,
        iterations: solution.iterations,
        counters,
        solver_seconds,
        trace: cfg.out.clone(),
        deviations,
    };
    let manifest_path = manifest_path(&cfg.out);
    let f = BufWriter::new(File::create(&manifest_path).with_context(|| format!("creating {}", manifest_path.display()))?);
    serde_json::to_writer_pretty(f, &manifest)?;
    Ok(RunOutcome {
        solution,
        manifest,
        manifest_path,
    })
}
