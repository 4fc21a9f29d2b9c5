//! Scenario registry, synthetic data, experiment runner and verification
//! suites for the coupled subdiffusion source inversion.

pub mod error;
pub mod experiment;
pub mod format;
pub mod registry;
pub mod scenario;
pub mod synth;
pub mod verify;

pub use error::{HarnessError, HarnessResult};
pub use experiment::{invert, run_scenario, Inversion, Overrides, RunArtifacts};
pub use registry::{lookup, registry};
pub use scenario::ScenarioSpec;
pub use synth::{synthesize_data, SyntheticData};
