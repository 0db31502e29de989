//! Numerical tolerances and the starting precision shared by the pipeline.

use crate::error::{Error, Result};
use crate::poly::{DEFAULT_TAU_CONJ, DEFAULT_TAU_ROOT};
use crate::scalar::{valid_bits, DOUBLE_BITS};

pub const DEFAULT_TAU_SIGN: f64 = 1e-12;
pub const DEFAULT_TAU_FEAS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    /// Conjugate pairing, relative to the largest modulus.
    pub tau_conj: f64,
    /// Sign band for the power sums of the input list.
    pub tau_sign: f64,
    /// Sign band for the x-sequence.
    pub tau_feas: f64,
    /// Root-finder residual.
    pub tau_root: f64,
    /// Mantissa bits of the first attempt; escalation starts from here.
    pub start_bits: u32,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tau_conj: DEFAULT_TAU_CONJ,
            tau_sign: DEFAULT_TAU_SIGN,
            tau_feas: DEFAULT_TAU_FEAS,
            tau_root: DEFAULT_TAU_ROOT,
            start_bits: DOUBLE_BITS,
        }
    }
}

impl Settings {
    pub fn validate(&self) -> Result<()> {
        if !valid_bits(self.start_bits) {
            return Err(Error::InvalidArgument(format!(
                "precision {} bits is outside {{53}} or [64, 1024]",
                self.start_bits
            )));
        }
        for (name, v) in [
            ("tau_conj", self.tau_conj),
            ("tau_sign", self.tau_sign),
            ("tau_feas", self.tau_feas),
            ("tau_root", self.tau_root),
        ] {
            if !(v > 0.0 && v < 1e-3) {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {v} is outside (0, 1e-3)"
                )));
            }
        }
        Ok(())
    }

    pub fn with_bits(mut self, bits: u32) -> Self {
        self.start_bits = bits;
        self
    }
}
