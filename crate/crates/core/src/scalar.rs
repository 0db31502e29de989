//! Working-precision arithmetic.
//!
//! Sign-sensitive kernels are written once against [`Scalar`] and run either
//! on hardware doubles or on a binary software float with a fixed mantissa
//! width. [`next_bits`] gives the escalation ladder used when a sign decision
//! is too close to call.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;

use crate::poly::ComplexValue;

/// Mantissa width of an IEEE double.
pub const DOUBLE_BITS: u32 = 53;
/// Upper end of the escalation ladder.
pub const MAX_BITS: u32 = 1024;

/// Next rung on the precision ladder, or `None` at the cap.
///
/// The ladder is 53 -> 128 -> 256 -> 512 -> 1024.
pub fn next_bits(bits: u32) -> Option<u32> {
    if bits >= MAX_BITS {
        None
    } else {
        Some((2 * bits).clamp(128, MAX_BITS))
    }
}

/// Whether `bits` is an accepted working precision.
pub fn valid_bits(bits: u32) -> bool {
    bits == DOUBLE_BITS || (64..=MAX_BITS).contains(&bits)
}

/// Unit roundoff for a mantissa of `bits` bits.
pub fn unit_roundoff(bits: u32) -> f64 {
    2f64.powi(-(bits as i32))
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64, bits: u32) -> Self;
    fn to_f64(&self) -> f64;
    fn bits(&self) -> u32;
    fn is_finite(&self) -> bool;
    fn abs(&self) -> Self;

    /// A constant at the same precision as `self`.
    fn constant(&self, v: f64) -> Self {
        Self::from_f64(v, self.bits())
    }

    fn is_negative(&self) -> bool {
        *self < self.constant(0.0)
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64, _bits: u32) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn bits(&self) -> u32 {
        DOUBLE_BITS
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

type Inner = FBig<HalfEven, 2>;

/// Binary software float with an explicit mantissa width.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigReal(Inner);

impl BigReal {
    pub fn new(v: f64, bits: u32) -> Self {
        assert!(v.is_finite(), "BigReal from non-finite {v}");
        let exact = Inner::try_from(v).expect("finite f64 converts exactly");
        BigReal(exact.with_precision(bits as usize).value())
    }

    pub fn sqrt(&self) -> Self {
        BigReal(self.0.sqrt())
    }

    pub fn ln(&self) -> Self {
        BigReal(self.0.ln())
    }

    pub fn exp(&self) -> Self {
        BigReal(self.0.exp())
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = self.constant(1.0);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    /// Smallest integer not below `self`, if it fits in a `u64`.
    pub fn ceil_u64(&self) -> Option<u64> {
        let c = self.0.ceil();
        let i: IBig = c.to_int().value();
        u64::try_from(i).ok()
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({:e}@{})", self.to_f64(), self.bits())
    }
}

impl Add for BigReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        BigReal(self.0 + rhs.0)
    }
}

impl Sub for BigReal {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        BigReal(self.0 - rhs.0)
    }
}

impl Mul for BigReal {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        BigReal(self.0 * rhs.0)
    }
}

impl Div for BigReal {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        BigReal(self.0 / rhs.0)
    }
}

impl Neg for BigReal {
    type Output = Self;
    fn neg(self) -> Self {
        BigReal(-self.0)
    }
}

impl Scalar for BigReal {
    fn from_f64(v: f64, bits: u32) -> Self {
        BigReal::new(v, bits)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn bits(&self) -> u32 {
        self.0.precision() as u32
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Minimal complex number over a [`Scalar`].
#[derive(Clone, Debug)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

impl<T: Scalar> Cx<T> {
    pub fn from_value(z: ComplexValue, bits: u32) -> Self {
        Cx {
            re: T::from_f64(z.re, bits),
            im: T::from_f64(z.im, bits),
        }
    }

    pub fn one_like(x: &T) -> Self {
        Cx {
            re: x.constant(1.0),
            im: x.constant(0.0),
        }
    }

    pub fn zero_like(x: &T) -> Self {
        Cx {
            re: x.constant(0.0),
            im: x.constant(0.0),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Cx {
            re: self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            im: self.re.clone() * o.im.clone() + self.im.clone() * o.re.clone(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Cx {
            re: self.re.clone() + o.re.clone(),
            im: self.im.clone() + o.im.clone(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        Cx {
            re: self.re.clone() * s.clone(),
            im: self.im.clone() * s.clone(),
        }
    }
}
