//! Fractional-calculus kernel: Γ, Mittag-Leffler, Riemann–Liouville
//! quadrature and the L1 Caputo discretization on uniform time grids.
//!
//! All fractional operators return 0 at t = 0.

pub mod caputo;
pub mod gamma;
pub mod grid;
pub mod mittag_leffler;
pub mod quad;
pub mod rl;

pub use caputo::{caputo_l1, l1_scale, l1_weights};
pub use gamma::{gamma, ln_gamma, rgamma};
pub use grid::{GridFunction, TimeGrid};
pub use mittag_leffler::mittag_leffler;
pub use rl::{rl_derivative, rl_integral};
