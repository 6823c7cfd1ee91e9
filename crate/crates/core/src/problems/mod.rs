//! Concrete saddle problems.

pub mod estimate;
pub mod robust_mc;
pub mod synthetic;

pub use estimate::{estimate_constants, sample_deviation};
pub use robust_mc::{make_classification, Dataset, RobustMulticlass};
pub use synthetic::{synthetic_make, SyntheticConfig, SyntheticSaddle};
