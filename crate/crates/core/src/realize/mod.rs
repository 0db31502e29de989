//! The J_N transform, the x-sequence feasibility test and the dimension scan.

mod matrix;

pub use matrix::{
    build_c, build_p, build_x, certify, verify, PatternMatrix, RealizationCertificate,
    Verification, CHARPOLY_MAX_DIM, DET_MAX_DIM, K_VERIFY, TRACE_TOL,
};

use rayon::prelude::*;

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::poly::{
    coeffs_from_roots_with, conjugate_factors, expand_factors_mapped, newton_power_sums,
    power_sums_from_coeffs, Factor, MonicRealPoly, PowerSumSeq,
};
use crate::scalar::{Scalar, DOUBLE_BITS};
use crate::sign::{at_precision, band_at, classify, escalate, SignClass};
use crate::spectrum::SpectrumList;

fn check_dim(f: &MonicRealPoly, big_n: usize) -> Result<()> {
    if big_n < f.degree() || big_n == 0 {
        return Err(Error::DimensionTooSmall {
            dim: big_n,
            needed: f.degree().max(1),
        });
    }
    Ok(())
}

/// `N^{k-1} / ((N-1)...(N-k+1))` for `k = 1..=n`.
fn jn_factors<T: Scalar>(one: &T, n: usize, big_n: usize) -> Vec<T> {
    let nn = one.constant(big_n as f64);
    let mut out = Vec::with_capacity(n);
    let mut acc = one.clone();
    for k in 1..=n {
        if k > 1 {
            acc = acc * nn.clone() / one.constant((big_n - k + 1) as f64);
        }
        out.push(acc.clone());
    }
    out
}

/// `g_k = p_k N^{k-1} / ((N-1)...(N-k+1))`.
pub fn jn_transform(f: &MonicRealPoly, big_n: usize) -> Result<MonicRealPoly> {
    check_dim(f, big_n)?;
    let w = jn_factors(&1.0f64, f.degree(), big_n);
    MonicRealPoly::new(f.coeffs().iter().zip(w).map(|(p, w)| p * w).collect())
}

/// `q_i = p_i / (N(N-1)...(N-i+1))`.
pub fn q_substitution(f: &MonicRealPoly, big_n: usize) -> Result<MonicRealPoly> {
    check_dim(f, big_n)?;
    let mut fall = 1.0;
    let q = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            fall *= (big_n - i) as f64;
            p / fall
        })
        .collect();
    MonicRealPoly::new(q)
}

/// Power sums `x_1..x_N` of the roots of `q`.
pub fn x_sequence(q: &MonicRealPoly, big_n: usize) -> Result<PowerSumSeq> {
    if big_n < q.degree() {
        return Err(Error::DimensionTooSmall {
            dim: big_n,
            needed: q.degree(),
        });
    }
    power_sums_from_coeffs(q, big_n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Feasible,
    Infeasible,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityReport {
    pub n: usize,
    pub big_n: usize,
    pub q_coeffs: Vec<f64>,
    /// `x_1..x_N`; an accepted `x_1` within the trace tolerance of zero is
    /// stored as zero.
    pub x_seq: Vec<f64>,
    /// `N^k x_k / λ₁^k`: power sums of the roots of `J_N(f)` with the Perron
    /// root scaled to one.
    pub y_seq: Vec<f64>,
    pub feasible: bool,
    pub first_negative_index: Option<usize>,
    /// `min_k x_k / scale_k` with `scale_k = n (λ₁/N)^k`.
    pub min_margin: f64,
    pub precision_bits_used: u32,
    pub indeterminate: bool,
}

impl FeasibilityReport {
    pub fn verdict(&self) -> Verdict {
        if self.feasible {
            Verdict::Feasible
        } else if self.indeterminate {
            Verdict::Indeterminate
        } else {
            Verdict::Infeasible
        }
    }

    pub fn x_power_sums(&self) -> Result<PowerSumSeq> {
        PowerSumSeq::new(self.x_seq.clone(), self.n)
    }
}

/// `y_1..y_N` at the precision of `T`, with the Newton term mass for each.
fn y_kernel<T: Scalar>(
    factors: &[Factor],
    l1: f64,
    n: usize,
    big_n: usize,
    bits: u32,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let one = T::from_f64(1.0, bits);
    let inv = one.clone() / T::from_f64(l1, bits);
    let p = expand_factors_mapped(factors, |v| T::from_f64(v, bits) * inv.clone());
    let g: Vec<T> = p
        .into_iter()
        .zip(jn_factors(&one, n, big_n))
        .map(|(a, w)| a * w)
        .collect();
    let trace = newton_power_sums(&g, big_n)?;
    Ok((
        trace.values.iter().map(|v| v.to_f64()).collect(),
        trace.term_mass,
    ))
}

/// Whether σ padded with `N - n` zeros is realized by `X_N`.
pub fn check_feasible(sigma: &SpectrumList, big_n: usize) -> Result<FeasibilityReport> {
    check_feasible_with(sigma, big_n, &Settings::default())
}

pub fn check_feasible_with(
    sigma: &SpectrumList,
    big_n: usize,
    settings: &Settings,
) -> Result<FeasibilityReport> {
    let n = sigma.len();
    let f = coeffs_from_roots_with(sigma.entries(), settings.tau_conj)?;
    let q = q_substitution(&f, big_n)?;
    let l1 = sigma.perron();

    if l1 == 0.0 {
        // every entry is zero and so is every x_k
        return Ok(FeasibilityReport {
            n,
            big_n,
            q_coeffs: q.coeffs().to_vec(),
            x_seq: vec![0.0; big_n],
            y_seq: vec![0.0; big_n],
            feasible: true,
            first_negative_index: None,
            min_margin: 0.0,
            precision_bits_used: settings.start_bits,
            indeterminate: false,
        });
    }

    let factors = conjugate_factors(sigma.entries(), settings.tau_conj)?;
    let nf = n as f64;
    let s1_floor = settings.tau_sign * l1.max(1.0) / l1;

    let attempt = |bits: u32| -> Result<(Option<(Vec<f64>, Vec<SignClass>)>, bool)> {
        let run = at_precision!(bits, y_kernel(&factors, l1, n, big_n, bits));
        let (y, mass) = match run {
            Ok(v) => v,
            // doubles ran out of range; a wider exponent settles it
            Err(Error::OverflowAtIndex(_)) if bits == DOUBLE_BITS => return Ok((None, true)),
            Err(e) => return Err(e),
        };
        let unit = 2f64.powi(-(bits as i32));
        let classes: Vec<SignClass> = y
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let k = i + 1;
                if k == 1 {
                    return if v >= -s1_floor {
                        SignClass::Positive
                    } else {
                        SignClass::Negative
                    };
                }
                let policy = band_at(settings.tau_feas * nf, bits);
                let rounding = 16.0 * unit * k as f64 * mass[i];
                classify(v, policy.max(rounding))
            })
            .collect();
        let negative = classes.contains(&SignClass::Negative);
        let ambiguous = classes.contains(&SignClass::Ambiguous);
        Ok((Some((y, classes)), ambiguous && !negative))
    };
    let run = escalate(settings.start_bits, attempt)?;
    let (y, classes) = run.value.ok_or(Error::OverflowAtIndex(big_n))?;

    let first_negative_index = classes
        .iter()
        .position(|c| *c == SignClass::Negative)
        .map(|i| i + 1);
    let indeterminate = first_negative_index.is_none() && run.ambiguous;
    let feasible = first_negative_index.is_none() && !indeterminate;

    let ratio = l1 / big_n as f64;
    let scale_at = |k: usize| {
        let direct = ratio.powi(k as i32);
        if direct.is_normal() {
            direct
        } else {
            (k as f64 * ratio.ln()).exp()
        }
    };
    let x_seq: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if i == 0 && v < 0.0 && classes[0] == SignClass::Positive {
                0.0
            } else {
                v * scale_at(i + 1)
            }
        })
        .collect();
    let min_margin = y.iter().map(|v| v / nf).fold(f64::INFINITY, f64::min);

    Ok(FeasibilityReport {
        n,
        big_n,
        q_coeffs: q.coeffs().to_vec(),
        x_seq,
        y_seq: y,
        feasible,
        first_negative_index,
        min_margin,
        precision_bits_used: run.bits,
        indeterminate,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub first_feasible: Option<usize>,
    /// `(N, verdict)` for `N = n..=N_max`, ascending.
    pub profile: Vec<(usize, Verdict)>,
}

/// Scans every `N` in `n..=n_max`; no monotonicity in `N` is assumed.
pub fn search_min_feasible(sigma: &SpectrumList, n_max: usize) -> Result<SearchResult> {
    search_min_feasible_with(sigma, n_max, &Settings::default())
}

pub fn search_min_feasible_with(
    sigma: &SpectrumList,
    n_max: usize,
    settings: &Settings,
) -> Result<SearchResult> {
    let lo = sigma.len();
    let profile: Vec<(usize, Verdict)> = (lo..=n_max.max(lo - 1))
        .into_par_iter()
        .map(|big_n| check_feasible_with(sigma, big_n, settings).map(|r| (big_n, r.verdict())))
        .collect::<Result<_>>()?;
    let first_feasible = profile
        .iter()
        .find(|(_, v)| *v == Verdict::Feasible)
        .map(|(n, _)| *n);
    Ok(SearchResult {
        first_feasible,
        profile,
    })
}
