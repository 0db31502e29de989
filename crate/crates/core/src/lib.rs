//! Constructive nonnegative realization of spectra padded with zeros.

pub mod bound;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod perturb;
pub mod poly;
pub mod realize;
pub mod report;
pub mod scalar;
pub mod sign;
pub mod spectrum;

pub use error::{Error, Result};
