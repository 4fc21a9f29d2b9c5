//! Forward problem for the coupled subdiffusion system on (0, 1):
//! finite-difference and spectral solvers, point observations, and the
//! positivity, Duhamel and direct-estimate verifiers.

pub mod direct;
pub mod duhamel;
pub mod expr;
pub mod fd;
pub mod map;
pub mod observe;
pub mod positivity;
pub mod space;
pub mod spectral;
pub mod spread;
pub mod system;

pub use direct::direct_estimate;
pub use duhamel::{duhamel_check, duhamel_check_with, DuhamelForm, HomogeneousSolver};
pub use expr::Expr;
pub use fd::{solve_fd, FdSolver};
pub use map::ResponseMap;
pub use observe::observe;
pub use positivity::{positivity_check, PositivityReport};
pub use space::SpaceGrid;
pub use spectral::{majorant_depth, solve_spectral, PicardDepth, SpectralOptions, SpectralSolution};
pub use spread::{indicator_data, indicator_data_for, spread_index, SpreadData};
pub use system::{StateField, SystemSpec, TemporalSignal};
