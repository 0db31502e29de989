//! Aberth–Ehrlich simultaneous iteration.

use super::{ComplexValue, MonicRealPoly, DEFAULT_TAU_ROOT};
use crate::error::{Error, Result};

const MAX_ITER: usize = 200;
const PAIR_TOL: f64 = 1e-6;

/// All roots of `p`, conjugate-symmetric and sorted by descending real part.
pub fn find_roots(p: &MonicRealPoly) -> Result<Vec<ComplexValue>> {
    find_roots_with(p, DEFAULT_TAU_ROOT)
}

pub fn find_roots_with(p: &MonicRealPoly, tau_root: f64) -> Result<Vec<ComplexValue>> {
    let c = p.coeffs();
    // Exact zero roots are split off so the iteration only sees p_n != 0.
    let zeros = c.iter().rev().take_while(|&&x| x == 0.0).count();
    let core = &c[..c.len() - zeros];
    let mut roots = vec![ComplexValue::new(0.0, 0.0); zeros];
    if !core.is_empty() {
        roots.extend(aberth(core, tau_root)?);
    }
    symmetrize(&mut roots);
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));

    let scale = tau_root * p.coeff_scale();
    let worst = roots
        .iter()
        .filter(|z| !within_rounding(c, **z))
        .map(|z| p.eval(*z).norm())
        .fold(0.0f64, f64::max);
    if worst > scale {
        return Err(Error::NoConvergence {
            iterations: MAX_ITER,
            residual: worst,
        });
    }
    Ok(roots)
}

fn horner(c: &[f64], z: ComplexValue) -> (ComplexValue, ComplexValue) {
    let mut v = ComplexValue::new(1.0, 0.0);
    let mut d = ComplexValue::new(0.0, 0.0);
    for &a in c {
        d = d * z + v;
        v = v * z + a;
    }
    (v, d)
}

/// `sum_k |p_k| |z|^{n-k}` with `p_0 = 1`.
fn eval_mass(c: &[f64], z: ComplexValue) -> f64 {
    let r = z.norm();
    c.iter().fold(1.0, |acc, a| acc * r + a.abs())
}

/// The residual at `z` is at the level of rounding in the evaluation itself.
fn within_rounding(c: &[f64], z: ComplexValue) -> bool {
    let (v, _) = horner(c, z);
    v.norm() <= 8.0 * (c.len() as f64 + 1.0) * f64::EPSILON * eval_mass(c, z)
}

fn aberth(c: &[f64], tau_root: f64) -> Result<Vec<ComplexValue>> {
    let n = c.len();
    if n == 1 {
        return Ok(vec![ComplexValue::new(-c[0], 0.0)]);
    }
    let radius = 1.0
        + c.iter()
            .enumerate()
            .map(|(k, a)| a.abs().powf(1.0 / (k as f64 + 1.0)))
            .fold(0.0f64, f64::max);
    let mut z: Vec<ComplexValue> = (0..n)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64 + 0.4;
            ComplexValue::from_polar(radius, theta)
        })
        .collect();

    let coeff_scale = c.iter().fold(1.0f64, |m, a| m.max(a.abs()));
    let mut settled = false;
    for _ in 0..MAX_ITER {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (v, d) = horner(c, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let mut repulsion = ComplexValue::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        repulsion += diff.inv();
                    }
                }
            }
            let denom = ComplexValue::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() > 0.0 && denom.is_finite() {
                ratio / denom
            } else {
                ratio
            };
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            } else {
                // p'(z) vanished; nudge off the critical point.
                let nudge = ComplexValue::new(1e-8, 1e-8) * z[i].norm().max(1.0);
                z[i] += nudge;
                max_step = f64::INFINITY;
            }
        }
        let done = z.iter().all(|&w| {
            within_rounding(c, w) || horner(c, w).0.norm() <= 1e-3 * tau_root * coeff_scale
        });
        if settled && (done || max_step <= 4.0 * f64::EPSILON) {
            break;
        }
        // one extra sweep after the criterion first holds
        settled = done || max_step <= 4.0 * f64::EPSILON;
    }
    Ok(z)
}

/// Pairs each upper-half-plane root with its nearest lower partner (when that
/// partner is within `PAIR_TOL` of the conjugate) and replaces both with an
/// exact conjugate pair; unpaired roots become real.
fn symmetrize(roots: &mut [ComplexValue]) {
    let mut upper: Vec<usize> = (0..roots.len()).filter(|&i| roots[i].im > 0.0).collect();
    let mut lower: Vec<usize> = (0..roots.len()).filter(|&i| roots[i].im < 0.0).collect();
    upper.sort_by(|&a, &b| roots[b].im.total_cmp(&roots[a].im));
    let mut paired = vec![false; roots.len()];
    for u in upper {
        let target = roots[u].conj();
        let best = lower
            .iter()
            .enumerate()
            .map(|(pos, &l)| (pos, (roots[l] - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let limit = PAIR_TOL * roots[u].norm().max(1.0);
        if let Some((pos, _)) = best.filter(|(_, d)| *d <= limit) {
            let l = lower.swap_remove(pos);
            let re = 0.5 * (roots[u].re + roots[l].re);
            let im = 0.5 * (roots[u].im - roots[l].im);
            roots[u] = ComplexValue::new(re, im);
            roots[l] = ComplexValue::new(re, -im);
            paired[u] = true;
            paired[l] = true;
        }
    }
    for (z, p) in roots.iter_mut().zip(paired) {
        if !p {
            z.im = 0.0;
        }
    }
}
