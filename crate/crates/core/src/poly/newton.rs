use super::{MonicRealPoly, PowerSumSeq};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, DOUBLE_BITS};

/// Power sums together with the magnitude of the terms that produced them.
pub(crate) struct NewtonTrace<T> {
    pub values: Vec<T>,
    /// `k|c_k| + sum_i |c_i||t_{k-i}|`, the size of what was summed at step k.
    pub term_mass: Vec<f64>,
}

/// Runs Newton's recurrence on `c_1..c_n` (coefficients past `n` are exact
/// zeros) and returns `t_1..t_{k_max}`.
pub(crate) fn newton_power_sums<T: Scalar>(c: &[T], k_max: usize) -> Result<NewtonTrace<T>> {
    let n = c.len();
    let mut t: Vec<T> = Vec::with_capacity(k_max);
    let mut mass = Vec::with_capacity(k_max);
    let cabs: Vec<f64> = c.iter().map(|x| x.to_f64().abs()).collect();
    let zero = match c.first() {
        Some(x) => x.constant(0.0),
        None => T::from_f64(0.0, DOUBLE_BITS),
    };
    for k in 1..=k_max {
        let (mut acc, mut m) = if k <= n {
            let kf = c[k - 1].constant(k as f64);
            (kf * c[k - 1].clone(), k as f64 * cabs[k - 1])
        } else {
            (zero.clone(), 0.0)
        };
        for i in 1..=n.min(k - 1) {
            acc = acc + c[i - 1].clone() * t[k - i - 1].clone();
            m += cabs[i - 1] * t[k - i - 1].to_f64().abs();
        }
        let v = -acc;
        if !v.is_finite() {
            return Err(Error::OverflowAtIndex(k));
        }
        t.push(v);
        mass.push(m);
    }
    Ok(NewtonTrace {
        values: t,
        term_mass: mass,
    })
}

/// Power sums `t_1..t_K` of the roots of `p`.
pub fn power_sums_from_coeffs(p: &MonicRealPoly, k_max: usize) -> Result<PowerSumSeq> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    let trace = newton_power_sums::<f64>(p.coeffs(), k_max)?;
    PowerSumSeq::new(trace.values, p.degree())
}

/// The monic degree-`n` polynomial whose first `n` power sums are `t_1..t_n`.
pub fn coeffs_from_power_sums(t: &PowerSumSeq, n: usize) -> Result<MonicRealPoly> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    if t.len() < n {
        return Err(Error::LengthMismatch(t.len(), n));
    }
    let mut c: Vec<f64> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut acc = t.get(k);
        for i in 1..k {
            acc += c[i - 1] * t.get(k - i);
        }
        c.push(-acc / k as f64);
    }
    MonicRealPoly::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{coeffs_from_roots, direct_power_sums, ComplexValue};
    use proptest::prelude::*;

    fn poly(c: &[f64]) -> MonicRealPoly {
        MonicRealPoly::new(c.to_vec()).unwrap()
    }

    #[test]
    fn single_root_one() {
        let t = power_sums_from_coeffs(&poly(&[-1.0]), 5).unwrap();
        assert_eq!(t.values, vec![1.0; 5]);
    }

    #[test]
    fn roots_two_and_minus_one() {
        let t = power_sums_from_coeffs(&poly(&[-1.0, -2.0]), 3).unwrap();
        assert_eq!(t.values, vec![1.0, 5.0, 7.0]);
    }

    #[test]
    fn disk_example_ninth_power_sum() {
        // 1.1^9 + 2cos(9pi/10), mpmath: 0.455834658410...
        let t = std::f64::consts::PI / 10.0;
        let p = coeffs_from_roots(&[
            ComplexValue::new(1.1, 0.0),
            ComplexValue::from_polar(1.0, t),
            ComplexValue::from_polar(1.0, -t),
        ])
        .unwrap();
        let s = power_sums_from_coeffs(&p, 9).unwrap();
        assert!((s.get(9) - 0.455_834_658_410).abs() < 1e-10);
        assert!((s.get(9) - 0.455833).abs() < 2e-6);
    }

    #[test]
    fn inverse_examples() {
        let p = coeffs_from_power_sums(&PowerSumSeq::new(vec![1.0, 1.0], 2).unwrap(), 2).unwrap();
        assert_eq!(p.coeffs(), &[-1.0, 0.0]);
        let p = coeffs_from_power_sums(&PowerSumSeq::new(vec![0.0, 2.0], 2).unwrap(), 2).unwrap();
        assert_eq!(p.coeffs(), &[0.0, -1.0]);
        let p =
            coeffs_from_power_sums(&PowerSumSeq::new(vec![1.0, 5.0, 7.0], 3).unwrap(), 3).unwrap();
        assert_eq!(p.coeffs(), &[-1.0, -2.0, 0.0]);
        // round trip
        let t = power_sums_from_coeffs(&p, 3).unwrap();
        assert_eq!(t.values, vec![1.0, 5.0, 7.0]);
    }

    #[test]
    fn inverse_needs_enough_terms() {
        let t = PowerSumSeq::new(vec![1.0], 1).unwrap();
        assert!(matches!(
            coeffs_from_power_sums(&t, 2),
            Err(Error::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn overflow_is_reported_with_index() {
        let p = poly(&[-1e200]);
        let err = power_sums_from_coeffs(&p, 5).unwrap_err();
        assert_eq!(err, Error::OverflowAtIndex(2));
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1.0)
    }

    fn conj_closed_roots() -> impl Strategy<Value = Vec<ComplexValue>> {
        prop::collection::vec(
            (any::<bool>(), -2.0f64..2.0, 0.05f64..2.0),
            1..=4,
        )
        .prop_map(|parts| {
            let mut v = Vec::new();
            for (real, a, b) in parts {
                if real {
                    v.push(ComplexValue::new(a, 0.0));
                } else {
                    v.push(ComplexValue::new(a, b));
                    v.push(ComplexValue::new(a, -b));
                }
            }
            v.truncate(8);
            // keep closure after truncation
            if v.last().map(|z| z.im > 0.0).unwrap_or(false) {
                v.pop();
            }
            v
        })
        .prop_filter("nonempty", |v| !v.is_empty())
    }

    proptest! {
        #[test]
        fn round_trip_coefficients(c in prop::collection::vec(-3.0f64..3.0, 1..=12)) {
            let p = poly(&c);
            let t = power_sums_from_coeffs(&p, p.degree()).unwrap();
            let q = coeffs_from_power_sums(&t, p.degree()).unwrap();
            for (a, b) in q.coeffs().iter().zip(p.coeffs()) {
                prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{} vs {}", a, b);
            }
        }

        #[test]
        fn newton_matches_direct_summation(roots in conj_closed_roots(), k in 1usize..30) {
            let p = coeffs_from_roots(&roots).unwrap();
            let t = power_sums_from_coeffs(&p, k).unwrap();
            let d = direct_power_sums::<f64>(&roots, k, 53);
            let mass: f64 = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for j in 0..k {
                let scale = (roots.len() as f64) * mass.powi(j as i32 + 1);
                prop_assert!((t.values[j] - d[j]).abs() <= 1e-9 * scale.max(d[j].abs()),
                    "k={} newton {} direct {}", j + 1, t.values[j], d[j]);
            }
        }

        #[test]
        fn scaling_roots_scales_coefficients(roots in conj_closed_roots(), c in 0.25f64..4.0) {
            let p = coeffs_from_roots(&roots).unwrap();
            let scaled: Vec<_> = roots.iter().map(|z| z * c).collect();
            let q = coeffs_from_roots(&scaled).unwrap();
            for k in 1..=p.degree() {
                let want = p.coeff(k) * c.powi(k as i32);
                let scale = c.powi(k as i32) * p.coeff_scale();
                prop_assert!(rel(q.coeff(k), want) <= 1e-10 * scale.max(1.0));
            }
            let k = 6;
            let t = power_sums_from_coeffs(&p, k).unwrap();
            let u = power_sums_from_coeffs(&q, k).unwrap();
            for j in 1..=k {
                let want = t.get(j) * c.powi(j as i32);
                let scale = roots.len() as f64 * (c * 2.9f64).powi(j as i32);
                prop_assert!((u.get(j) - want).abs() <= 1e-10 * scale);
            }
        }
    }
}
