//! Candidate spectra: validation, the power-sum hypotheses and the JLL
//! diagnostic.

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::poly::{conjugate_factors, direct_power_sums, power_sums_of, ComplexValue};
use crate::scalar::{Cx, Scalar};
use crate::sign::{at_precision, band_at, classify, escalate, SignClass};

/// Largest cutoff the hypothesis check will sum up to.
pub const MAX_CUTOFF: usize = 10_000_000;

/// A conjugate-closed list whose first entry is the Perron element.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumList {
    entries: Vec<ComplexValue>,
}

impl SpectrumList {
    pub fn entries(&self) -> &[ComplexValue] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Position of λ₁, always the front after validation.
    pub fn perron_index(&self) -> usize {
        0
    }

    /// λ₁, real and nonnegative.
    pub fn perron(&self) -> f64 {
        self.entries[0].re
    }

    /// Largest modulus among the non-Perron entries; zero when n = 1.
    pub fn lambda0(&self) -> f64 {
        self.entries[1..]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest modulus over the whole list.
    pub fn max_modulus(&self) -> f64 {
        self.perron().max(self.lambda0())
    }

    /// Every entry multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<SpectrumList> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale {c} must be positive")));
        }
        Ok(SpectrumList {
            entries: self.entries.iter().map(|z| z * c).collect(),
        })
    }
}

/// Locates the Perron element, moves it to the front and checks closure.
pub fn validate(entries: &[ComplexValue]) -> Result<SpectrumList> {
    validate_with(entries, &Settings::default())
}

pub fn validate_with(entries: &[ComplexValue], settings: &Settings) -> Result<SpectrumList> {
    if entries.is_empty() {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    conjugate_factors(entries, settings.tau_conj)?;
    let max_mod = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = settings.tau_conj * max_mod;
    let perron = entries
        .iter()
        .position(|z| z.im.abs() <= tol && z.re >= 0.0 && z.re >= max_mod - tol)
        .ok_or(Error::NoPerronElement)?;

    let mut list = Vec::with_capacity(entries.len());
    list.push(ComplexValue::new(entries[perron].re, 0.0));
    list.extend(
        entries
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != perron)
            .map(|(_, z)| *z),
    );
    Ok(SpectrumList { entries: list })
}

/// Index past which `s_k > 0` is guaranteed by `s_k >= λ₁^k - (n-1)λ₀^k`.
pub fn power_sum_cutoff(sigma: &SpectrumList) -> Result<usize> {
    let n = sigma.len();
    let l1 = sigma.perron();
    let l0 = sigma.lambda0();
    if n == 1 {
        return Ok(2);
    }
    if !(l1 > l0 && l1 > 0.0) {
        return Err(Error::StrictDominanceRequired);
    }
    if l0 == 0.0 {
        return Ok(2);
    }
    let ratio = ((n - 1) as f64).ln() / (l1 / l0).ln();
    let k = ratio.ceil() + 1.0;
    Ok(if k >= usize::MAX as f64 {
        usize::MAX
    } else {
        (k as usize).max(2)
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JllViolation {
    pub k: usize,
    pub m: usize,
    /// `n^{k-1} s_{km} - s_m^k`, negative for a violation.
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    /// λ₁ > λ₀ with margin τ_sign·λ₁ (λ₁ > 0 when n = 1).
    pub perron_ok: bool,
    pub perron_gap: f64,
    pub s1: f64,
    pub s1_ok: bool,
    pub cutoff_k: usize,
    /// Smallest `s_m` over `2 <= m <= cutoff_k`, with its index.
    pub min_power_sum: Option<(usize, f64)>,
    /// First `m` in `2..=cutoff_k` whose sign is negative or zero.
    pub first_failure: Option<usize>,
    pub power_sums_ok: bool,
    /// Some sign could not be settled even at the top of the precision ladder.
    pub indeterminate: bool,
    pub precision_bits_used: u32,
    pub jll_violations: Vec<JllViolation>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.perron_ok && self.power_sums_ok
    }
}

/// Checks strict Perron dominance, `s_1 >= 0` and `s_m > 0` for
/// `2 <= m <= K*`; the cutoff extends the last check to every `m >= 2`.
pub fn check_hypotheses(sigma: &SpectrumList) -> HypothesisReport {
    check_hypotheses_with(sigma, &Settings::default())
}

pub fn check_hypotheses_with(sigma: &SpectrumList, settings: &Settings) -> HypothesisReport {
    let n = sigma.len();
    let l1 = sigma.perron();
    let l0 = sigma.lambda0();
    let tau = settings.tau_sign;

    let (perron_ok, perron_gap) = if n == 1 {
        (l1 > 0.0, l1)
    } else {
        (l1 - l0 > tau * l1 && l1 > 0.0, l1 - l0)
    };

    let s1: f64 = sigma.entries().iter().map(|z| z.re).sum();
    let s1_ok = s1 >= -tau * l1.max(1.0);

    let jll_violations = jll_check_with(sigma, 5, 5, settings);

    let mut report = HypothesisReport {
        perron_ok,
        perron_gap,
        s1,
        s1_ok,
        cutoff_k: 2,
        min_power_sum: None,
        first_failure: None,
        power_sums_ok: false,
        indeterminate: false,
        precision_bits_used: settings.start_bits,
        jll_violations,
    };
    if l1 == 0.0 {
        // every power sum is zero
        report.min_power_sum = Some((2, 0.0));
        report.first_failure = Some(2);
        return report;
    }

    let cutoff = if perron_ok {
        power_sum_cutoff(sigma).unwrap_or(2)
    } else {
        2
    };
    report.cutoff_k = cutoff;
    if cutoff > MAX_CUTOFF {
        report.indeterminate = true;
        return report;
    }

    let entries = sigma.entries();
    let attempt = |bits: u32| -> Result<(Vec<(f64, SignClass)>, bool)> {
        let sums: Vec<f64> = at_precision!(bits, normalized_sums(entries, cutoff, bits));
        let ln_l1 = l1.ln();
        let classes: Vec<(f64, SignClass)> = sums
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let m = i + 1;
                let floor = (-(m as f64) * ln_l1).exp().max(1.0);
                (v, classify(v, band_at(tau * floor, bits)))
            })
            .collect();
        let ambiguous = classes[1..]
            .iter()
            .any(|(_, c)| *c == SignClass::Ambiguous);
        Ok((classes, ambiguous))
    };
    // the attempt closure never fails
    let run = escalate(settings.start_bits, attempt).expect("power sums are infallible");
    report.precision_bits_used = run.bits;
    report.indeterminate = run.ambiguous;

    let mut min: Option<(usize, f64)> = None;
    for (i, (v, class)) in run.value.iter().enumerate().skip(1) {
        let m = i + 1;
        let s = v * (m as f64 * l1.ln()).exp();
        if min.map(|(_, best)| s < best).unwrap_or(true) {
            min = Some((m, s));
        }
        if report.first_failure.is_none() && *class == SignClass::Negative {
            report.first_failure = Some(m);
        }
    }
    report.min_power_sum = min;
    report.power_sums_ok = s1_ok && report.first_failure.is_none() && !report.indeterminate;
    report
}

/// `sum_i (λ_i/λ₁)^k`, `k = 1..=k_max`.
fn normalized_sums<T: Scalar>(entries: &[ComplexValue], k_max: usize, bits: u32) -> Vec<f64> {
    let l1 = T::from_f64(entries[0].re, bits);
    let inv = l1.constant(1.0) / l1;
    let roots: Vec<Cx<T>> = entries
        .iter()
        .map(|&z| Cx::<T>::from_value(z, bits).scale(&inv))
        .collect();
    power_sums_of(&roots, k_max, &inv.constant(0.0))
        .iter()
        .map(|v| v.to_f64())
        .collect()
}

/// Every `(k, m)` in range with `n^{k-1} s_{km} < s_m^k - τ|s_m|^k`.
pub fn jll_check(sigma: &SpectrumList, k_max: usize, m_max: usize) -> Vec<JllViolation> {
    jll_check_with(sigma, k_max, m_max, &Settings::default())
}

pub fn jll_check_with(
    sigma: &SpectrumList,
    k_max: usize,
    m_max: usize,
    settings: &Settings,
) -> Vec<JllViolation> {
    jll_check_padded(sigma, sigma.len(), k_max, m_max, settings)
}

/// JLL for `sigma` padded with zeros to length `dim`; the power sums are
/// unchanged and only the factor `n^{k-1}` grows.
pub fn jll_check_padded(
    sigma: &SpectrumList,
    dim: usize,
    k_max: usize,
    m_max: usize,
    settings: &Settings,
) -> Vec<JllViolation> {
    let n = dim.max(sigma.len()) as f64;
    let l1 = sigma.max_modulus();
    let horizon = if l1 > 1.0 {
        ((700.0 / l1.ln()).floor() as usize).min(k_max * m_max)
    } else {
        k_max * m_max
    };
    if horizon == 0 {
        return Vec::new();
    }
    let s: Vec<f64> = direct_power_sums::<f64>(sigma.entries(), horizon, 53);
    let mut out = Vec::new();
    for k in 1..=k_max {
        for m in 1..=m_max {
            if k * m > horizon {
                continue;
            }
            let lhs = n.powi(k as i32 - 1) * s[k * m - 1];
            let sm = s[m - 1];
            let rhs = sm.powi(k as i32);
            if !lhs.is_finite() || !rhs.is_finite() {
                continue;
            }
            if lhs < rhs - settings.tau_sign * sm.abs().powi(k as i32) {
                out.push(JllViolation {
                    k,
                    m,
                    slack: lhs - rhs,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{coeffs_from_roots, power_sums_from_coeffs};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    fn disk(rho: f64) -> Vec<ComplexValue> {
        let t = std::f64::consts::PI / 10.0;
        vec![c(t.cos(), t.sin()), c(rho, 0.0), c(t.cos(), -t.sin())]
    }

    fn real(v: &[f64]) -> SpectrumList {
        validate(&v.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn validate_reorders_perron_first() {
        let s = validate(&disk(1.1)).unwrap();
        assert_eq!(s.perron(), 1.1);
        assert_eq!(s.len(), 3);
        assert!(s.entries()[1].im > 0.0 && s.entries()[2].im < 0.0);
    }

    #[test]
    fn negative_dominant_entry_has_no_perron() {
        assert_eq!(
            validate(&[c(-2.0, 0.0), c(1.0, 0.0)]).unwrap_err(),
            Error::NoPerronElement
        );
    }

    #[test]
    fn tie_is_valid_but_not_strict() {
        let s = real(&[1.0, 1.0]);
        assert_eq!(s.perron(), 1.0);
        let r = check_hypotheses(&s);
        assert!(!r.perron_ok);
        assert!(!r.passed());
        assert_eq!(power_sum_cutoff(&s), Err(Error::StrictDominanceRequired));
    }

    #[test]
    fn unpaired_entry_rejected() {
        assert!(matches!(
            validate(&[c(1.1, 0.0), c(0.0, 1.0)]),
            Err(Error::ConjugateClosureViolation { .. })
        ));
    }

    #[test]
    fn cutoff_examples() {
        assert_eq!(power_sum_cutoff(&validate(&disk(1.1)).unwrap()).unwrap(), 9);
        assert_eq!(power_sum_cutoff(&real(&[2.0, -1.0])).unwrap(), 2);
        assert_eq!(power_sum_cutoff(&real(&[5.0])).unwrap(), 2);
        assert_eq!(power_sum_cutoff(&real(&[1.0, 0.0, 0.0])).unwrap(), 2);
    }

    #[test]
    fn cutoff_certifies_disk_example_to_200() {
        let s = validate(&disk(1.1)).unwrap();
        let k = power_sum_cutoff(&s).unwrap();
        // oracle: polar form, independent of the summation kernel
        for j in k..=200 {
            let t = std::f64::consts::PI / 10.0;
            let v = 1.1f64.powi(j as i32) + 2.0 * (j as f64 * t).cos();
            assert!(v > 0.0, "s_{j} = {v}");
        }
    }

    #[test]
    fn disk_hypotheses_pass_with_min_at_nine() {
        let r = check_hypotheses(&validate(&disk(1.1)).unwrap());
        assert!(r.passed());
        assert_eq!(r.cutoff_k, 9);
        let (k, v) = r.min_power_sum.unwrap();
        assert_eq!(k, 9);
        // mpmath: 0.45583465841...
        assert!((v - 0.455_834_658_41).abs() < 1e-9);
        assert_eq!(r.precision_bits_used, 53);
    }

    #[test]
    fn disk_below_threshold_fails_at_nine() {
        let r = check_hypotheses(&validate(&disk(1.05)).unwrap());
        assert!(r.perron_ok);
        assert!(!r.power_sums_ok);
        // s_8 = 1.05^8 + 2cos(4pi/5) < 0 already; s_9 < 0 as well
        assert_eq!(r.first_failure, Some(8));
        let t = std::f64::consts::PI / 10.0;
        assert!(1.05f64.powi(9) + 2.0 * (9.0 * t).cos() < 0.0);
    }

    #[test]
    fn single_entry_reduces_to_positivity() {
        assert!(check_hypotheses(&real(&[5.0])).passed());
        assert!(!check_hypotheses(&real(&[0.0])).passed());
    }

    #[test]
    fn jll_examples() {
        assert!(jll_check(&real(&[2.0, -1.0]), 4, 4).is_empty());
        assert!(jll_check(&real(&[1.0]), 6, 6).is_empty());
        // (1, 1, -1), k = 2, m = 1: 3 * s_2 = 9 >= s_1^2 = 1
        let s = real(&[1.0, 1.0, -1.0]);
        assert!(!jll_check(&s, 2, 1).iter().any(|v| v.k == 2 && v.m == 1));
    }

    #[test]
    fn jll_brute_force_two_minus_one() {
        // brute force both sides from integer power sums 2^j + (-1)^j
        let s = |j: u32| 2i64.pow(j) + (-1i64).pow(j);
        for k in 1..=4u32 {
            for m in 1..=4u32 {
                assert!(2i64.pow(k - 1) * s(k * m) >= s(m).pow(k));
            }
        }
    }

    #[test]
    fn jll_detects_a_violation() {
        // s_1 = 0.2 but s_2 = 1 + 0.64 = 1.64; JLL at (k, m) = (2, 1) holds,
        // so use a list with small s_2 relative to s_1^2: (1, 0.9i, -0.9i)
        let s = validate(&[c(1.0, 0.0), c(0.0, 0.9), c(0.0, -0.9)]).unwrap();
        // s_1 = 1, s_2 = 1 - 1.62 = -0.62 < 0; n s_2 < s_1^2
        let v = jll_check(&s, 2, 1);
        assert_eq!(v.len(), 1);
        assert!(v[0].slack < 0.0);
    }

    #[test]
    fn suleimanova_zero_trace_passes() {
        let r = check_hypotheses(&real(&[1.0, -0.5, -0.5]));
        assert!(r.s1_ok);
        assert!(r.passed());
    }

    #[test]
    fn jll_is_about_the_padded_list() {
        // Passes the hypotheses, yet 5 s_4 < s_2^2 at its own length; the
        // realization lives at a larger dimension, where JLL holds.
        let s = validate(&[
            c(0.5, 0.0),
            c(-0.3334205031001869, 0.16303148104774054),
            c(-0.3334205031001869, -0.16303148104774054),
            c(0.41551954060259544, 0.0),
            c(0.41551954060259544, 0.0),
        ])
        .unwrap();
        assert!(check_hypotheses(&s).passed());
        let v = jll_check(&s, 5, 5);
        assert_eq!(v.iter().map(|v| (v.k, v.m)).collect::<Vec<_>>(), vec![(2, 2)]);
        assert!(jll_check_padded(&s, 6, 5, 5, &Settings::default()).is_empty());
    }

    fn valid_lists() -> impl Strategy<Value = Vec<ComplexValue>> {
        (
            0.5f64..3.0,
            prop::collection::vec((0.0f64..0.95, 0.0f64..std::f64::consts::PI, any::<bool>()), 0..5),
        )
            .prop_map(|(l1, rest)| {
                let mut v = vec![c(l1, 0.0)];
                for (r, t, real) in rest {
                    let r = r * l1;
                    if real {
                        v.push(c(if t > 1.5 { -r } else { r }, 0.0));
                    } else {
                        v.push(ComplexValue::from_polar(r, t));
                        v.push(ComplexValue::from_polar(r, -t));
                    }
                }
                v
            })
    }

    proptest! {
        #[test]
        fn cutoff_lemma(list in valid_lists()) {
            let s = validate(&list).unwrap();
            prop_assume!(s.perron() > s.lambda0() * (1.0 + 1e-3));
            let k = power_sum_cutoff(&s).unwrap();
            prop_assume!(k < 5000);
            let sums = direct_power_sums::<f64>(&[c(1.0, 0.0)], 1, 53);
            prop_assert_eq!(sums.len(), 1);
            let l1 = s.perron();
            let norm: Vec<ComplexValue> = s.entries().iter().map(|z| z / l1).collect();
            let t = direct_power_sums::<f64>(&norm, k + 50, 53);
            for j in k..=k + 50 {
                prop_assert!(t[j - 1] > 0.0, "s_{} = {}", j, t[j - 1]);
            }
        }

        #[test]
        fn direct_sums_match_newton(list in valid_lists(), k in 1usize..100) {
            prop_assume!(list.len() <= 10);
            let s = validate(&list).unwrap();
            let p = coeffs_from_roots(s.entries()).unwrap();
            let t = power_sums_from_coeffs(&p, k).unwrap();
            let d = direct_power_sums::<f64>(s.entries(), k, 53);
            for j in 0..k {
                let scale = s.len() as f64 * s.max_modulus().powi(j as i32 + 1);
                prop_assert!((t.values[j] - d[j]).abs() <= 1e-9 * scale.max(1.0),
                    "k={} {} vs {}", j + 1, t.values[j], d[j]);
            }
        }

        #[test]
        fn validate_is_idempotent(list in valid_lists()) {
            let s = validate(&list).unwrap();
            let again = validate(s.entries()).unwrap();
            prop_assert_eq!(s, again);
        }

    }
}
