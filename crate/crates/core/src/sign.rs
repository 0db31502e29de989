//! Sign decisions with a tolerance band and precision escalation.

use crate::error::Result;
use crate::scalar::{next_bits, DOUBLE_BITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignClass {
    Positive,
    Negative,
    Ambiguous,
}

/// Classifies `v` against the band `(-band, band)`. Zero is always ambiguous.
pub fn classify(v: f64, band: f64) -> SignClass {
    if v > 0.0 && v >= band {
        SignClass::Positive
    } else if v < 0.0 && v <= -band {
        SignClass::Negative
    } else {
        SignClass::Ambiguous
    }
}

/// A band quoted for double precision, narrowed for a wider mantissa.
pub fn band_at(base: f64, bits: u32) -> f64 {
    base * 2f64.powi(DOUBLE_BITS as i32 - bits as i32)
}

#[derive(Clone, Debug)]
pub(crate) struct Escalated<R> {
    pub value: R,
    pub bits: u32,
    /// Still ambiguous at the top of the ladder.
    pub ambiguous: bool,
}

/// Re-runs `attempt` up the precision ladder until it reports no ambiguous
/// sign, or the ladder is exhausted.
pub(crate) fn escalate<R>(
    start_bits: u32,
    mut attempt: impl FnMut(u32) -> Result<(R, bool)>,
) -> Result<Escalated<R>> {
    let mut bits = start_bits;
    loop {
        let (value, ambiguous) = attempt(bits)?;
        if !ambiguous {
            return Ok(Escalated {
                value,
                bits,
                ambiguous: false,
            });
        }
        match next_bits(bits) {
            Some(b) => bits = b,
            None => {
                return Ok(Escalated {
                    value,
                    bits,
                    ambiguous: true,
                })
            }
        }
    }
}

/// Calls a `Scalar`-generic function with `f64` at double precision and
/// `BigReal` otherwise.
macro_rules! at_precision {
    ($bits:expr, $f:ident ( $($arg:expr),* $(,)? )) => {
        if $bits == $crate::scalar::DOUBLE_BITS {
            $f::<f64>($($arg),*)
        } else {
            $f::<$crate::scalar::BigReal>($($arg),*)
        }
    };
}
pub(crate) use at_precision;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(classify(1.0, 1e-12), SignClass::Positive);
        assert_eq!(classify(-1.0, 1e-12), SignClass::Negative);
        assert_eq!(classify(1e-13, 1e-12), SignClass::Ambiguous);
        assert_eq!(classify(0.0, 0.0), SignClass::Ambiguous);
    }

    #[test]
    fn band_narrows_with_precision() {
        assert_eq!(band_at(1e-12, 53), 1e-12);
        assert!(band_at(1e-12, 128) < 1e-34);
    }

    #[test]
    fn escalation_walks_the_ladder() {
        let mut seen = Vec::new();
        let r = escalate(53, |bits| {
            seen.push(bits);
            Ok((bits, bits < 256))
        })
        .unwrap();
        assert_eq!(seen, vec![53, 128, 256]);
        assert_eq!(r.bits, 256);
        assert!(!r.ambiguous);
    }

    #[test]
    fn escalation_gives_up_at_cap() {
        let r = escalate(53, |bits| Ok((bits, true))).unwrap();
        assert_eq!(r.bits, 1024);
        assert!(r.ambiguous);
    }
}
