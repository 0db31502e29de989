//! The explicit dimension bound and its auxiliary constants.

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::poly::{direct_power_sums, MonicRealPoly};
use crate::scalar::{BigReal, Scalar};
use crate::spectrum::{check_hypotheses_with, SpectrumList};

/// Bounds above this are reported by their base-10 logarithm only.
pub const SATURATION: f64 = 1e18;

const CEIL_BITS: u32 = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct BoundConstants {
    pub n: usize,
    pub gamma: f64,
    pub lambda1: f64,
    pub lambda0: f64,
    pub big_r: f64,
    pub ell: f64,
    pub r: f64,
    pub m: f64,
    pub n0: u64,
    pub big_m: f64,
    pub delta: f64,
    /// `ceil(N)` when it is at most [`SATURATION`].
    pub n_bound: Option<u64>,
    pub log10_n_bound: f64,
    pub saturated: bool,
}

/// `2 max(1, |p_1|, |p_2|^{1/2}, ..., |p_n|^{1/n})`.
pub fn gamma(f: &MonicRealPoly) -> f64 {
    2.0 * f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.abs().powf(1.0 / (k as f64 + 1.0)))
        .fold(1.0, f64::max)
}

/// `ceil(ln(2n-2) / ln(ell))`.
pub fn n0_from_ell(n: usize, ell: f64) -> u64 {
    ((2.0 * n as f64 - 2.0).ln() / ell.ln()).ceil().max(1.0) as u64
}

pub fn compute_constants(sigma: &SpectrumList, f: &MonicRealPoly) -> Result<BoundConstants> {
    compute_constants_with(sigma, f, &Settings::default())
}

pub fn compute_constants_with(
    sigma: &SpectrumList,
    f: &MonicRealPoly,
    settings: &Settings,
) -> Result<BoundConstants> {
    let n = sigma.len();
    if n < 2 {
        return Err(Error::NeedsTwoEntries(n));
    }
    if f.degree() != n {
        return Err(Error::DegreeMismatch(f.degree(), n));
    }
    let l1 = sigma.perron();
    let l0 = sigma.lambda0();
    if !(l1 > l0) {
        return Err(Error::StrictDominanceRequired);
    }
    let report = check_hypotheses_with(sigma, settings);
    if !report.perron_ok {
        return Err(Error::StrictDominanceRequired);
    }
    if !report.passed() {
        return Err(Error::HypothesesNotSatisfied);
    }

    let gamma = gamma(f);
    let big_r = (l1 - l0) / 4.0;
    let ell = (3.0 * l1 + l0) / (l1 + 3.0 * l0);
    let r = big_r.min(1.0);
    let m = l1.max(1.0);
    let n0 = n0_from_ell(n, ell);

    let mut big_m = 1.0f64;
    if n0 >= 2 {
        let s = direct_power_sums::<f64>(sigma.entries(), n0 as usize, 53);
        // non-finite sums only occur once λ₁^k has overflowed, far above 1
        for v in s[1..].iter().filter(|v| v.is_finite()) {
            big_m = big_m.min(*v);
        }
    }
    if !(big_m > 0.0) {
        return Err(Error::HypothesesNotSatisfied);
    }

    let nn = n as f64;
    let ln_inner = (16.0 * gamma * nn * n0 as f64).ln()
        + (n0 as f64 - 1.0) * (m + r).ln()
        - (3.0f64.sqrt() * big_m * r).ln();
    let ln_delta = big_m.ln() + r.ln() - (nn * n0 as f64).ln() - (n0 as f64 - 1.0) * (m + r).ln();
    let ln_bound = 2f64.ln() + nn * ln_inner;
    let saturated = ln_bound > SATURATION.ln();
    let n_bound = if saturated {
        None
    } else {
        Some(exact_bound(n, gamma, n0, m, r, big_m))
    };

    Ok(BoundConstants {
        n,
        gamma,
        lambda1: l1,
        lambda0: l0,
        big_r,
        ell,
        r,
        m,
        n0,
        big_m,
        delta: ln_delta.exp(),
        n_bound,
        log10_n_bound: ln_bound / std::f64::consts::LN_10,
        saturated,
    })
}

/// `ceil(2 (16 γ n N₀ (m+r)^{N₀-1} / (√3 M r))^n)` in wide arithmetic, so the
/// ceiling is taken on the correctly rounded value of the f64 constants.
fn exact_bound(n: usize, gamma: f64, n0: u64, m: f64, r: f64, big_m: f64) -> u64 {
    let b = |v: f64| BigReal::new(v, CEIL_BITS);
    let inner = b(16.0) * b(gamma) * b(n as f64) * b(n0 as f64) * (b(m) + b(r)).powi(n0 as u32 - 1)
        / (b(3.0).sqrt() * b(big_m) * b(r));
    let v = b(2.0) * inner.powi(n as u32);
    v.ceil_u64().expect("bound below saturation fits in u64")
}

/// `M r / (n N₀ (m+r)^{N₀-1})`.
pub fn delta(c: &BoundConstants) -> f64 {
    c.delta
}

/// `N^{k-1} / ((N-1)...(N-k+1)) - 1`.
///
/// Infinite once `k > N` makes the product vanish.
pub fn ratio_gap(big_n: u64, k: usize) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    if k as u64 > big_n {
        return f64::INFINITY;
    }
    let nf = big_n as f64;
    let s: f64 = (1..k).map(|j| -(-(j as f64) / nf).ln_1p()).sum();
    s.exp_m1()
}
