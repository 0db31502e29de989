//! Root perturbation bounds and the optimal matching distance between root
//! sets.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{ComplexValue, MonicRealPoly};

/// Largest size accepted by [`MatchingMode::Exhaustive`].
pub const EXHAUSTIVE_MAX: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbBound {
    /// `2 max |c_k|^{1/k}` over both coefficient lists, without a floor.
    pub gamma_pair: f64,
    pub bound_bek: f64,
    pub bound_ostrowski: f64,
    /// `|a_k - b_k|`, `k = 1..n`.
    pub coefficient_gap: Vec<f64>,
}

/// `16 / (3 √3)`.
pub fn bek_constant() -> f64 {
    16.0 / (3.0 * 3f64.sqrt())
}

/// Upper bound on the optimal matching distance between the roots of `f`
/// and `g`, with the `(2n - 1)` variant alongside.
pub fn bek_bound(f: &MonicRealPoly, g: &MonicRealPoly) -> Result<PerturbBound> {
    let n = f.degree();
    if g.degree() != n {
        return Err(Error::DegreeMismatch(n, g.degree()));
    }
    let root_k = |c: &f64, k: usize| c.abs().powf(1.0 / k as f64);
    let gamma_pair = 2.0
        * f.coeffs()
            .iter()
            .zip(g.coeffs())
            .enumerate()
            .map(|(i, (a, b))| root_k(a, i + 1).max(root_k(b, i + 1)))
            .fold(0.0, f64::max);
    let coefficient_gap: Vec<f64> = f
        .coeffs()
        .iter()
        .zip(g.coeffs())
        .map(|(a, b)| (a - b).abs())
        .collect();
    let sum: f64 = coefficient_gap
        .iter()
        .enumerate()
        .map(|(i, d)| if *d == 0.0 { 0.0 } else { d * gamma_pair.powi((n - i - 1) as i32) })
        .sum();
    let root = sum.powf(1.0 / n as f64);
    Ok(PerturbBound {
        gamma_pair,
        bound_bek: bek_constant() * root,
        bound_ostrowski: (2 * n - 1) as f64 * root,
        coefficient_gap,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchingMode {
    /// All `n!` permutations; `n <= 10`.
    Exhaustive,
    /// Threshold search over the pairwise distances with a bipartite
    /// matching test.
    Bottleneck,
}

/// `min_π max_i |a_i - b_{π(i)}|`.
pub fn matching_distance(a: &[ComplexValue], b: &[ComplexValue], mode: MatchingMode) -> Result<f64> {
    optimal_matching(a, b, mode).map(|(d, _)| d)
}

/// The optimal distance together with one permutation attaining it
/// (`a[i]` is paired with `b[perm[i]]`).
pub fn optimal_matching(
    a: &[ComplexValue],
    b: &[ComplexValue],
    mode: MatchingMode,
) -> Result<(f64, Vec<usize>)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n == 0 {
        return Ok((0.0, Vec::new()));
    }
    let dist: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    match mode {
        MatchingMode::Exhaustive => {
            if n > EXHAUSTIVE_MAX {
                return Err(Error::TooLargeForExhaustive(n));
            }
            Ok(exhaustive(&dist))
        }
        MatchingMode::Bottleneck => Ok(bottleneck(&dist)),
    }
}

fn cost(dist: &[Vec<f64>], perm: &[usize]) -> f64 {
    perm.iter()
        .enumerate()
        .map(|(i, &j)| dist[i][j])
        .fold(0.0, f64::max)
}

/// Heap's algorithm over the tail `1..n`, fanned out over the image of 0.
fn exhaustive(dist: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = dist.len();
    (0..n)
        .into_par_iter()
        .map(|first| {
            let mut rest: Vec<usize> = (0..n).filter(|&j| j != first).collect();
            let mut best = (f64::INFINITY, Vec::new());
            let mut consider = |rest: &[usize]| {
                let mut perm = Vec::with_capacity(n);
                perm.push(first);
                perm.extend_from_slice(rest);
                let c = cost(dist, &perm);
                if c < best.0 {
                    best = (c, perm);
                }
            };
            let m = rest.len();
            let mut counters = vec![0usize; m];
            consider(&rest);
            let mut i = 0;
            while i < m {
                if counters[i] < i {
                    if i % 2 == 0 {
                        rest.swap(0, i);
                    } else {
                        rest.swap(counters[i], i);
                    }
                    consider(&rest);
                    counters[i] += 1;
                    i = 0;
                } else {
                    counters[i] = 0;
                    i += 1;
                }
            }
            best
        })
        .reduce_with(|x, y| if y.0 < x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x })
        .expect("n >= 1")
}

/// Perfect matching using only edges with `dist <= t`, if one exists.
fn perfect_matching(dist: &[Vec<f64>], t: f64) -> Option<Vec<usize>> {
    let n = dist.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(
        i: usize,
        dist: &[Vec<f64>],
        t: f64,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for j in 0..dist.len() {
            if dist[i][j] <= t && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, dist, t, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, dist, t, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (j, o) in owner.iter().enumerate() {
        perm[o.expect("perfect")] = j;
    }
    Some(perm)
}

fn bottleneck(dist: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let mut cands: Vec<f64> = dist.iter().flatten().copied().collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let (mut lo, mut hi) = (0, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(dist, cands[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let perm = perfect_matching(dist, cands[lo]).expect("the largest distance admits a matching");
    (cands[lo], perm)
}

/// `16 γ 2^{1/n} / (√3 N^{1/n})`, the root displacement between `f` and
/// `J_N(f)` once `N > n²`.
pub fn theorem3_gap_bound(f: &MonicRealPoly, big_n: u64, gamma: f64) -> Result<f64> {
    let n = f.degree();
    if big_n <= (n * n) as u64 {
        return Err(Error::DimensionTooSmall {
            dim: big_n as usize,
            needed: n * n + 1,
        });
    }
    let nf = n as f64;
    Ok(16.0 * gamma * 2f64.powf(1.0 / nf) / (3f64.sqrt() * (big_n as f64).powf(1.0 / nf)))
}

/// Where the optimal matching sends the Perron root `sigma[0]`, and whether
/// that image strictly dominates every other root of `moved` in modulus.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronImage {
    pub distance: f64,
    pub image: ComplexValue,
    pub dominant: bool,
}

pub fn perron_image(sigma: &[ComplexValue], moved: &[ComplexValue]) -> Result<PerronImage> {
    let (distance, perm) = optimal_matching(sigma, moved, MatchingMode::Bottleneck)?;
    let img = perm.first().copied().ok_or(Error::InvalidArgument("empty root list".into()))?;
    let image = moved[img];
    let dominant = moved
        .iter()
        .enumerate()
        .all(|(j, z)| j == img || z.norm() < image.norm());
    Ok(PerronImage {
        distance,
        image,
        dominant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{coeffs_from_roots, find_roots};
    use crate::realize::jn_transform;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    fn poly(c: &[f64]) -> MonicRealPoly {
        MonicRealPoly::new(c.to_vec()).unwrap()
    }

    #[test]
    fn bek_examples() {
        let f = poly(&[0.3, -0.2]);
        let b = bek_bound(&f, &f).unwrap();
        assert_eq!(b.bound_bek, 0.0);

        let b = bek_bound(&poly(&[0.0, -1.0]), &poly(&[0.0, 0.0])).unwrap();
        assert_eq!(b.gamma_pair, 2.0);
        assert_eq!(b.coefficient_gap, vec![0.0, 1.0]);
        assert!((b.bound_bek - 3.079_201_435_68).abs() < 1e-10);
        assert!((b.bound_ostrowski - 3.0).abs() < 1e-15);

        assert_eq!(
            bek_bound(&poly(&[1.0]), &poly(&[1.0, 2.0])).unwrap_err(),
            Error::DegreeMismatch(1, 2)
        );
    }

    #[test]
    fn monomials_have_zero_gamma() {
        let b = bek_bound(&poly(&[0.0; 3]), &poly(&[0.0; 3])).unwrap();
        assert_eq!(b.gamma_pair, 0.0);
        assert_eq!(b.bound_bek, 0.0);
        assert_eq!(b.bound_ostrowski, 0.0);
    }

    #[test]
    fn matching_examples() {
        let a = [c(1.0, 0.0), c(-1.0, 0.0)];
        for mode in [MatchingMode::Exhaustive, MatchingMode::Bottleneck] {
            assert_eq!(matching_distance(&a, &a, mode).unwrap(), 0.0);
            assert_eq!(
                matching_distance(&a, &[c(0.0, 0.0), c(0.0, 0.0)], mode).unwrap(),
                1.0
            );
            // roots of x^2 - x are 0 and 1: pairings give max(0, 1) and max(1, 2)
            assert_eq!(
                matching_distance(&a, &[c(0.0, 0.0), c(1.0, 0.0)], mode).unwrap(),
                1.0
            );
        }
        assert_eq!(
            matching_distance(&a, &a[..1], MatchingMode::Bottleneck).unwrap_err(),
            Error::LengthMismatch(2, 1)
        );
        let big = vec![c(0.0, 0.0); 11];
        assert_eq!(
            matching_distance(&big, &big, MatchingMode::Exhaustive).unwrap_err(),
            Error::TooLargeForExhaustive(11)
        );
        assert_eq!(
            matching_distance(&big, &big, MatchingMode::Bottleneck).unwrap(),
            0.0
        );
    }

    #[test]
    fn gap_bound_examples() {
        let f3 = poly(&[0.0; 3]);
        let v = theorem3_gap_bound(&f3, 1_000_000_000, 6.004226).unwrap();
        assert!((v - 0.069_881_097_646).abs() < 1e-10);
        let d = theorem3_gap_bound(&f3, 2_000_000_000, 6.004226).unwrap();
        assert!((d / v - 2f64.powf(-1.0 / 3.0)).abs() < 1e-14);

        let f1 = poly(&[-1.0]);
        let a = theorem3_gap_bound(&f1, 10, 2.0).unwrap();
        assert!((a - 16.0 * 2.0 * 2.0 / (3f64.sqrt() * 10.0)).abs() < 1e-14);
        assert!(theorem3_gap_bound(&f1, 11, 2.0).unwrap() < a);
        assert!(matches!(
            theorem3_gap_bound(&f3, 9, 1.0),
            Err(Error::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn perron_image_of_transform() {
        let t = std::f64::consts::PI / 10.0;
        let sigma = [c(1.1, 0.0), c(t.cos(), t.sin()), c(t.cos(), -t.sin())];
        let f = coeffs_from_roots(&sigma).unwrap();
        let g = jn_transform(&f, 1000).unwrap();
        // roots of J_N(f) are N times the roots of q; compare at the scale of f
        let moved = find_roots(&g).unwrap();
        let img = perron_image(&sigma, &moved).unwrap();
        assert!(img.image.im == 0.0 && img.image.re > 1.0);
        assert!(img.dominant);
        assert!(img.distance <= bek_bound(&f, &g).unwrap().bound_bek);
    }

    #[test]
    fn gap_bound_meets_delta_at_the_bound() {
        use crate::bound::compute_constants;
        use crate::spectrum::validate;
        for list in [
            vec![c(1.0, 0.0), c(-0.01, 0.0)],
            vec![c(2.0, 0.0), c(0.1, 0.1), c(0.1, -0.1)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ] {
            let s = validate(&list).unwrap();
            let f = coeffs_from_roots(s.entries()).unwrap();
            let k = compute_constants(&s, &f).unwrap();
            let big_n = k.n_bound.unwrap();
            assert!(big_n > (k.n * k.n) as u64);
            assert!(theorem3_gap_bound(&f, big_n, k.gamma).unwrap() <= k.delta);
        }
    }

    fn conj_roots(n: usize) -> impl Strategy<Value = Vec<ComplexValue>> {
        prop::collection::vec((-2.0f64..2.0, 0.0f64..2.0, any::<bool>()), n).prop_map(move |v| {
            let mut out = Vec::new();
            for (a, b, real) in v {
                if out.len() + 2 <= n && !real {
                    out.push(c(a, b));
                    out.push(c(a, -b));
                } else if out.len() < n {
                    out.push(c(a, 0.0));
                }
            }
            out
        })
    }

    fn points(n: usize) -> impl Strategy<Value = Vec<ComplexValue>> {
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), n)
            .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
    }

    proptest! {
        #[test]
        fn ratio_to_ostrowski(f in prop::collection::vec(-3.0f64..3.0, 1..=6),
                              d in prop::collection::vec(-0.5f64..0.5, 6)) {
            let n = f.len();
            let g: Vec<f64> = f.iter().zip(&d).map(|(a, b)| a + b).collect();
            let b = bek_bound(&poly(&f), &poly(&g)).unwrap();
            prop_assume!(b.bound_bek > 0.0);
            let want = (2 * n - 1) as f64 * 3.0 * 3f64.sqrt() / 16.0;
            prop_assert!((b.bound_ostrowski / b.bound_bek - want).abs() <= 1e-12 * want);
        }

        #[test]
        fn modes_agree((a, b) in (1usize..=8).prop_flat_map(|n| (points(n), points(n)))) {
            let e = matching_distance(&a, &b, MatchingMode::Exhaustive).unwrap();
            let m = matching_distance(&a, &b, MatchingMode::Bottleneck).unwrap();
            prop_assert_eq!(e, m);
        }

        #[test]
        fn bek_is_sound((ra, rb) in (1usize..=6).prop_flat_map(|n| (conj_roots(n), conj_roots(n)))) {
            let f = coeffs_from_roots(&ra).unwrap();
            let g = coeffs_from_roots(&rb).unwrap();
            let d = matching_distance(&ra, &rb, MatchingMode::Bottleneck).unwrap();
            prop_assert!(d <= bek_bound(&f, &g).unwrap().bound_bek + 1e-9);
        }
    }
}
