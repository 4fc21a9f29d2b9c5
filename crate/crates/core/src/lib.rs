//! Coupled time-fractional subdiffusion systems: forward solvers and
//! ensemble Kalman reconstruction of temporal source components.

pub mod error;
pub mod forward;
pub mod fraccalc;
pub mod irekm;
pub mod prior;

pub use error::{Error, Result};
