//! Projection-free solvers for convex / strongly-concave saddle problems:
//! conditional gradient sliding (CGS), its variance-reduced stochastic form
//! (iSTORC), and the mirror-prox outer solvers MPCGS and MPSCGS built on them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cgs;
pub mod cndg;
pub mod counters;
pub mod data_io;
pub mod error;
pub mod istorc;
pub mod linalg;
pub mod lo;
pub mod metrics;
pub mod mpcgs;
pub mod mpscgs;
pub mod problem;
pub mod problems;
pub mod rng;
pub mod solver;
pub mod trace;

pub use counters::OracleCounters;
pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector, SparseRowMatrix};
pub use lo::{FeasibleSet, Vertex};
pub use problem::{ProblemConstants, SaddleProblem, SampleBatch};
pub use rng::RngState;
pub use trace::TraceRecord;
