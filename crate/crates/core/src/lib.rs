//! Simulation of multistable subordinators, their inverses and the
//! multifractional Poisson process, with a scheme-of-series (CTRW)
//! approximation and the statistics used to validate both.

pub mod cli;
pub mod ctrw;
pub mod error;
pub mod experiments;
pub mod mfpp;
pub mod numeric;
pub mod ppp;
pub mod report;
pub mod rng;
pub mod stability;
pub mod stats;
pub mod subordinator;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use stability::StabilityIndex;
