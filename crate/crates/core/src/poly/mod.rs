//! Monic real polynomials, Newton's identities and root finding.

mod newton;
mod roots;

pub use newton::{coeffs_from_power_sums, power_sums_from_coeffs};
pub(crate) use newton::newton_power_sums;
pub use roots::{find_roots, find_roots_with};

use crate::error::{Error, Result};
use crate::scalar::{Cx, Scalar};

pub type ComplexValue = num_complex::Complex64;

/// Default conjugate-closure tolerance, relative to the largest root modulus.
pub const DEFAULT_TAU_CONJ: f64 = 1e-9;
/// Default root residual tolerance, relative to the coefficient magnitude.
pub const DEFAULT_TAU_ROOT: f64 = 1e-12;

/// `x^n + p_1 x^{n-1} + ... + p_n` with real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicRealPoly {
    coeffs: Vec<f64>,
}

impl MonicRealPoly {
    /// Builds a polynomial from `p_1..p_n`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a monic polynomial needs degree at least 1".into(),
            ));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::OverflowAtIndex(k + 1));
        }
        Ok(MonicRealPoly { coeffs })
    }

    /// `x^n`.
    pub fn monomial(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `p_1..p_n`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `p_k` with `p_0 = 1` and `p_k = 0` past the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        match k {
            0 => 1.0,
            k if k <= self.coeffs.len() => self.coeffs[k - 1],
            _ => 0.0,
        }
    }

    /// Largest coefficient magnitude, floored at one.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, z: ComplexValue) -> ComplexValue {
        self.coeffs
            .iter()
            .fold(ComplexValue::new(1.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Coefficients of `x^{dim-n} f(x)`, i.e. the list padded with zeros to `dim`.
    pub fn padded(&self, dim: usize) -> Result<Self> {
        if dim < self.degree() {
            return Err(Error::DimensionTooSmall {
                dim,
                needed: self.degree(),
            });
        }
        let mut c = self.coeffs.clone();
        c.resize(dim, 0.0);
        Ok(MonicRealPoly { coeffs: c })
    }
}

/// Free-function form of [`MonicRealPoly::eval`].
pub fn eval(p: &MonicRealPoly, z: ComplexValue) -> ComplexValue {
    p.eval(z)
}

/// A finite sequence of power sums `t_1..t_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSumSeq {
    pub values: Vec<f64>,
    pub source_degree: usize,
}

impl PowerSumSeq {
    pub fn new(values: Vec<f64>, source_degree: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty power-sum sequence".into()));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::OverflowAtIndex(k + 1));
        }
        Ok(PowerSumSeq {
            values,
            source_degree,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `t_k`, 1-based.
    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
}

/// A real linear or quadratic factor of a root list.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Factor {
    /// `x - a`
    Linear(f64),
    /// `(x - a - bi)(x - a + bi)`
    Quadratic { re: f64, im: f64 },
}

/// Groups a root list into real factors, pairing each non-real root with
/// its nearest conjugate partner.
pub(crate) fn conjugate_factors(roots: &[ComplexValue], tau_conj: f64) -> Result<Vec<Factor>> {
    let scale = roots.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let tol = tau_conj * scale;

    let mut factors = Vec::with_capacity(roots.len());
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for &z in roots {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite root {z}")));
        }
        if z.im.abs() <= tol {
            factors.push(Factor::Linear(z.re));
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }

    let mut used = vec![false; lower.len()];
    for u in upper {
        let target = u.conj();
        let best = lower
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, l)| (j, (*l - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((j, d)) if d <= tol => {
                used[j] = true;
                let l = lower[j];
                factors.push(Factor::Quadratic {
                    re: 0.5 * (u.re + l.re),
                    im: 0.5 * (u.im - l.im),
                });
            }
            _ => {
                return Err(Error::ConjugateClosureViolation { re: u.re, im: u.im });
            }
        }
    }
    if let Some(j) = used.iter().position(|u| !u) {
        let l = lower[j];
        return Err(Error::ConjugateClosureViolation { re: l.re, im: l.im });
    }
    Ok(factors)
}

/// Multiplies out real factors at the working precision of `T`.
pub(crate) fn expand_factors<T: Scalar>(factors: &[Factor], bits: u32) -> Vec<T> {
    expand_factors_mapped(factors, |v| T::from_f64(v, bits))
}

/// Like [`expand_factors`], with every root coordinate passed through `lift`
/// first (used to rescale the roots at working precision).
pub(crate) fn expand_factors_mapped<T: Scalar>(factors: &[Factor], lift: impl Fn(f64) -> T) -> Vec<T> {
    // c[0] is the leading 1.
    let one = lift(0.0).constant(1.0);
    let mut c: Vec<T> = vec![one.clone()];
    for f in factors {
        match *f {
            Factor::Linear(a) => {
                let a = lift(a);
                let mut next = c.clone();
                next.push(one.constant(0.0));
                for i in 0..c.len() {
                    next[i + 1] = next[i + 1].clone() - a.clone() * c[i].clone();
                }
                c = next;
            }
            Factor::Quadratic { re, im } => {
                let re = lift(re);
                let im = lift(im);
                let b1 = -(re.clone() + re.clone());
                let b2 = re.clone() * re + im.clone() * im;
                let mut next = c.clone();
                next.push(one.constant(0.0));
                next.push(one.constant(0.0));
                for i in 0..c.len() {
                    next[i + 1] = next[i + 1].clone() + b1.clone() * c[i].clone();
                    next[i + 2] = next[i + 2].clone() + b2.clone() * c[i].clone();
                }
                c = next;
            }
        }
    }
    c.remove(0);
    c
}

/// The monic polynomial whose roots are `roots`.
pub fn coeffs_from_roots(roots: &[ComplexValue]) -> Result<MonicRealPoly> {
    coeffs_from_roots_with(roots, DEFAULT_TAU_CONJ)
}

pub fn coeffs_from_roots_with(roots: &[ComplexValue], tau_conj: f64) -> Result<MonicRealPoly> {
    if roots.is_empty() {
        return Err(Error::InvalidArgument("empty root list".into()));
    }
    let factors = conjugate_factors(roots, tau_conj)?;
    MonicRealPoly::new(expand_factors::<f64>(&factors, crate::scalar::DOUBLE_BITS))
}

/// Direct summation `sum_i z_i^k` for `k = 1..=k_max`, real parts only.
pub(crate) fn direct_power_sums<T: Scalar>(roots: &[ComplexValue], k_max: usize, bits: u32) -> Vec<T> {
    let lifted: Vec<Cx<T>> = roots.iter().map(|&z| Cx::from_value(z, bits)).collect();
    power_sums_of(&lifted, k_max, &T::from_f64(0.0, bits))
}

pub(crate) fn power_sums_of<T: Scalar>(roots: &[Cx<T>], k_max: usize, zero: &T) -> Vec<T> {
    let mut sums = vec![zero.clone(); k_max];
    for base in roots {
        let mut pow = Cx::one_like(zero);
        for s in sums.iter_mut() {
            pow = pow.mul(base);
            *s = s.clone() + pow.re.clone();
        }
    }
    sums
}
