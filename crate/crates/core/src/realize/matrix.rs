use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{check_feasible_with, q_substitution, FeasibilityReport};
use crate::config::Settings;
use crate::error::{Error, Result};
use crate::poly::{coeffs_from_power_sums, direct_power_sums, MonicRealPoly, PowerSumSeq};
use crate::spectrum::SpectrumList;

/// Number of traces compared against the power sums.
pub const K_VERIFY: usize = 20;
/// Relative trace tolerance, against `max(1, sum_i |λ_i|^k)`.
pub const TRACE_TOL: f64 = 1e-8;
/// Largest dimension for which the characteristic polynomial is rebuilt.
pub const CHARPOLY_MAX_DIM: usize = 64;
/// Largest dimension for which the determinant is checked.
pub const DET_MAX_DIM: usize = 12;

const CHARPOLY_TOL: f64 = 1e-6;
const DET_TOL: f64 = 1e-10;

/// `X_N` held as its first column: entry `(i, j)` is `x_{i-j+1}` for
/// `j <= i`, entry `(k, k+1)` is `k`, everything else zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternMatrix {
    x: Vec<f64>,
}

impl PatternMatrix {
    /// No sign check; used for matrices read back from disk.
    pub fn from_raw(x: Vec<f64>) -> Self {
        PatternMatrix { x }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `x_1..x_N`.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.x[i - j]
        } else if j == i + 1 {
            i as f64
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(i + 1, j + 1))
    }

    /// `X v` straight from the pattern.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let lower: f64 = (0..=i).map(|j| self.x[i - j] * v[j]).sum();
                if i + 1 < n {
                    lower + (i + 1) as f64 * v[i + 1]
                } else {
                    lower
                }
            })
            .collect()
    }

    /// `trace(X^k)` for `k = 1..=k_max`, from `N` chains `X^k e_j`.
    pub fn traces(&self, k_max: usize) -> Vec<f64> {
        let n = self.dim();
        let per_column: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut v = vec![0.0; n];
                v[j] = 1.0;
                (0..k_max)
                    .map(|_| {
                        v = self.matvec(&v);
                        v[j]
                    })
                    .collect()
            })
            .collect();
        (0..k_max)
            .map(|k| per_column.iter().map(|c| c[k]).sum())
            .collect()
    }
}

/// The pattern matrix for `x_1..x_N`.
pub fn build_x(x: &PowerSumSeq, big_n: usize) -> Result<PatternMatrix> {
    if x.len() != big_n {
        return Err(Error::LengthMismatch(x.len(), big_n));
    }
    if let Some(i) = x.values.iter().position(|v| *v < 0.0) {
        return Err(Error::NegativeEntry {
            index: i + 1,
            value: x.values[i],
        });
    }
    Ok(PatternMatrix {
        x: x.values.clone(),
    })
}

/// Lower triangular, entry `(i, j)` = `q_{i-j} / (j-1)!`.
pub fn build_p(q: &MonicRealPoly, dim: usize) -> DMatrix<f64> {
    let mut inv_fact = vec![1.0f64; dim.max(1)];
    for j in 1..dim {
        inv_fact[j] = inv_fact[j - 1] / j as f64;
    }
    DMatrix::from_fn(dim, dim, |i, j| {
        if j <= i {
            q.coeff(i - j) * inv_fact[j]
        } else {
            0.0
        }
    })
}

/// Companion matrix of `Q = x^{N-n} f`, with last row
/// `-(N!/(j-1)!) q_{N-j+1}`.
pub fn build_c(f: &MonicRealPoly, big_n: usize) -> Result<DMatrix<f64>> {
    let q = q_substitution(f, big_n)?;
    let mut c = DMatrix::zeros(big_n, big_n);
    for i in 0..big_n.saturating_sub(1) {
        c[(i, i + 1)] = 1.0;
    }
    for j in 1..=big_n {
        let idx = big_n - j + 1;
        // N!/(j-1)! = N (N-1) ... j
        let fall: f64 = (j..=big_n).map(|v| v as f64).product();
        c[(big_n - 1, j - 1)] = -fall * q.coeff(idx);
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub k_verify: usize,
    /// `|trace(X^k) - s_k|`, `k = 1..=k_verify`.
    pub trace_residuals: Vec<f64>,
    pub trace_tolerances: Vec<f64>,
    /// Largest relative coefficient error of the rebuilt characteristic
    /// polynomial against `x^{N-n} f`, for `N <= 64`.
    pub charpoly_residual: Option<f64>,
    /// `|det X - (-1)^N N! q_N|` over the Hadamard bound, for `N <= 12`.
    pub det_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizationCertificate {
    pub report: FeasibilityReport,
    pub matrix_dim: usize,
    pub verification: Verification,
}

/// Compares `X` against σ padded with zeros.
pub fn verify(sigma: &SpectrumList, x: &PatternMatrix, k_verify: usize) -> Result<Verification> {
    let big_n = x.dim();
    let n = sigma.len();
    if big_n < n {
        return Err(Error::DimensionTooSmall {
            dim: big_n,
            needed: n,
        });
    }
    let charpoly = big_n <= CHARPOLY_MAX_DIM;
    let k_traces = if charpoly { k_verify.max(big_n) } else { k_verify };
    let traces = x.traces(k_traces);

    let s: Vec<f64> = direct_power_sums::<f64>(sigma.entries(), k_verify, 53);
    let moduli: Vec<f64> = sigma.entries().iter().map(|z| z.norm()).collect();
    let mut trace_residuals = Vec::with_capacity(k_verify);
    let mut trace_tolerances = Vec::with_capacity(k_verify);
    for k in 1..=k_verify {
        let scale: f64 = moduli.iter().map(|m| m.powi(k as i32)).sum();
        let res = (traces[k - 1] - s[k - 1]).abs();
        let tol = TRACE_TOL * scale.max(1.0);
        trace_residuals.push(res);
        trace_tolerances.push(tol);
        if !(res <= tol) {
            return Err(Error::VerificationFailed {
                what: format!("trace of X^{k}"),
                residual: res,
                tolerance: tol,
            });
        }
    }

    let f = crate::poly::coeffs_from_roots(sigma.entries())?;
    let charpoly_residual = if charpoly {
        let t = PowerSumSeq::new(traces[..big_n].to_vec(), big_n)?;
        let rebuilt = coeffs_from_power_sums(&t, big_n)?;
        let want = f.padded(big_n)?;
        // coefficient scale: elementary symmetric functions of the moduli
        let mags = crate::poly::coeffs_from_roots(
            &moduli
                .iter()
                .map(|m| crate::poly::ComplexValue::new(-m, 0.0))
                .collect::<Vec<_>>(),
        )?;
        let res = (1..=big_n)
            .map(|k| (rebuilt.coeff(k) - want.coeff(k)).abs() / mags.coeff(k).max(1.0))
            .fold(0.0, f64::max);
        if !(res <= CHARPOLY_TOL) {
            return Err(Error::VerificationFailed {
                what: "characteristic polynomial".into(),
                residual: res,
                tolerance: CHARPOLY_TOL,
            });
        }
        Some(res)
    } else {
        None
    };

    let det_residual = if big_n <= DET_MAX_DIM {
        let dense = x.to_dense();
        let det = dense.clone().determinant();
        let q = q_substitution(&f, big_n)?;
        let fact: f64 = (1..=big_n).map(|v| v as f64).product();
        let sign = if big_n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let want = sign * fact * q.coeff(big_n);
        let hadamard: f64 = dense.row_iter().map(|r| r.norm().max(1.0)).product();
        let res = (det - want).abs() / hadamard;
        if !(res <= DET_TOL) {
            return Err(Error::VerificationFailed {
                what: "determinant".into(),
                residual: res,
                tolerance: DET_TOL,
            });
        }
        Some(res)
    } else {
        None
    };

    Ok(Verification {
        k_verify,
        trace_residuals,
        trace_tolerances,
        charpoly_residual,
        det_residual,
    })
}

/// Feasibility, matrix assembly and verification in one pass.
pub fn certify(
    sigma: &SpectrumList,
    big_n: usize,
    settings: &Settings,
) -> Result<(FeasibilityReport, Option<(PatternMatrix, RealizationCertificate)>)> {
    let report = check_feasible_with(sigma, big_n, settings)?;
    if !report.feasible {
        return Ok((report, None));
    }
    let x = build_x(&report.x_power_sums()?, big_n)?;
    let verification = verify(sigma, &x, K_VERIFY)?;
    let cert = RealizationCertificate {
        report: report.clone(),
        matrix_dim: big_n,
        verification,
    };
    Ok((report, Some((x, cert))))
}
