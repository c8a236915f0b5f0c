use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MAX_ITERATIONS: usize = 1000;
/// Roots closer than this (relative to `max(1, |z|)`) are one cluster.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Residual bound `|p(z)| / Σ|a_i||z|^i` every returned root satisfies.
pub const RESIDUAL_TOL: f64 = 1e-12;
// wider clusters are accepted only when their polished center is a root of
// the matching multiplicity to this backward accuracy
const WIDE_CLUSTER: f64 = 1e-3;
const MULTIPLICITY_TOL: f64 = 1e-13;

/// A root and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootCluster {
    pub value: Complex64,
    pub multiplicity: usize,
}

fn horner(a: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for c in a.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `|p(z)| / Σ|a_i||z|^i`.
pub fn backward_error(a: &[Complex64], z: Complex64) -> f64 {
    let (p, _) = horner(a, z);
    let r = z.norm();
    let scale = a.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

fn derivative(a: &[Complex64]) -> Vec<Complex64> {
    a.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

/// Roots of `Σ a_i z^i` (ascending coefficients) by Aberth iteration, grouped
/// into clusters with multiplicities that add up to the degree.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<RootCluster>> {
    let Some(deg) = coeffs.iter().rposition(|c| *c != ZERO) else {
        return Err(Error::Invalid("zero polynomial has no root set".into()));
    };
    if deg == 0 {
        return Err(Error::Invalid("constant polynomial has no roots".into()));
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs[..=deg].iter().map(|c| c / lead).collect();
    let zeros = monic.iter().position(|c| *c != ZERO).unwrap();
    let reduced = &monic[zeros..];
    let mut roots = vec![ZERO; zeros];
    roots.extend(aberth(reduced)?);
    Ok(cluster(&monic, roots))
}

fn aberth(a: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = a.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    if d == 1 {
        return Ok(vec![-a[0]]);
    }
    let radius = (0..d).map(|i| a[i].norm().powf(1.0 / (d - i) as f64)).fold(0.0, f64::max).max(1e-3);
    let mut z: Vec<Complex64> =
        (0..d).map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / d as f64 + 0.4)).collect();
    for _ in 0..MAX_ITERATIONS {
        let mut done = true;
        for k in 0..d {
            let (p, dp) = horner(a, z[k]);
            if p == ZERO || backward_error(a, z[k]) < 4.0 * f64::EPSILON {
                continue;
            }
            done = false;
            let w = p / dp;
            let s: Complex64 = (0..d).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = w / (1.0 - w * s);
            if step.is_finite() {
                z[k] -= step;
            } else {
                let bump = Complex64::new(1e-3, 1e-3) * (1.0 + z[k].norm());
                z[k] += bump;
            }
        }
        if done {
            return Ok(z);
        }
    }
    if z.iter().all(|&r| backward_error(a, r) < RESIDUAL_TOL) {
        Ok(z)
    } else {
        Err(Error::NoConvergence { iterations: MAX_ITERATIONS })
    }
}

/// Connected components of the graph linking roots closer than `tol·scale`.
fn components(roots: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() < tol * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut label = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[label[r]].push(i);
    }
    groups
}

fn mean(roots: &[Complex64], idx: &[usize]) -> Complex64 {
    idx.iter().map(|&i| roots[i]).sum::<Complex64>() / idx.len() as f64
}

/// Center of a `mult`-fold root near `z`, refined by Newton on `p^{(mult−1)}`,
/// if `p^{(j)}` vanishes there for every `j < mult`.
fn multiple_root(a: &[Complex64], mut z: Complex64, mult: usize) -> Option<Complex64> {
    let mut ders = vec![a.to_vec()];
    for _ in 0..mult {
        let next = derivative(ders.last().unwrap());
        ders.push(next);
    }
    for _ in 0..8 {
        let (q, dq) = horner(&ders[mult - 1], z);
        let step = q / dq;
        if !step.is_finite() {
            break;
        }
        z -= step;
    }
    ders[..mult].iter().all(|p| p.len() <= 1 || backward_error(p, z) < MULTIPLICITY_TOL).then_some(z)
}

fn cluster(a: &[Complex64], roots: Vec<Complex64>) -> Vec<RootCluster> {
    let mut out = Vec::new();
    for wide in components(&roots, WIDE_CLUSTER) {
        if wide.len() > 1 {
            if let Some(m) = multiple_root(a, mean(&roots, &wide), wide.len()) {
                out.push(RootCluster { value: m, multiplicity: wide.len() });
                continue;
            }
        }
        let sub: Vec<Complex64> = wide.iter().map(|&i| roots[i]).collect();
        for g in components(&sub, CLUSTER_TOL) {
            out.push(RootCluster { value: mean(&sub, &g), multiplicity: g.len() });
        }
    }
    out.sort_by(|x, y| x.value.re.total_cmp(&y.value.re).then(x.value.im.total_cmp(&y.value.im)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn has(roots: &[RootCluster], z: Complex64, mult: usize) -> bool {
        roots.iter().any(|r| (r.value - z).norm() < 1e-10 && r.multiplicity == mult)
    }

    #[test]
    fn simple_cases() {
        let r = poly_roots(&[c(1.0, 0.0), ZERO, c(1.0, 0.0)]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(has(&r, c(0.0, 1.0), 1) && has(&r, c(0.0, -1.0), 1));
        let r = poly_roots(&[c(-1.0, 0.0), ZERO, ZERO, c(1.0, 0.0)]).unwrap();
        for k in 0..3 {
            assert!(has(&r, Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 3.0), 1));
        }
    }

    #[test]
    fn double_root_cluster() {
        // (z−2)²(z+1) = z³ − 3z² + 4
        let r = poly_roots(&[c(4.0, 0.0), ZERO, c(-3.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(has(&r, c(2.0, 0.0), 2) && has(&r, c(-1.0, 0.0), 1));
    }

    #[test]
    fn triple_and_zero_roots() {
        // z²(z−i)³
        let i = c(0.0, 1.0);
        let mut p = vec![ZERO, ZERO, c(1.0, 0.0)];
        for _ in 0..3 {
            let mut q = vec![ZERO; p.len() + 1];
            for (k, a) in p.iter().enumerate() {
                q[k + 1] += a;
                q[k] -= a * i;
            }
            p = q;
        }
        let r = poly_roots(&p).unwrap();
        assert!(has(&r, ZERO, 2) && has(&r, i, 3));
        assert_eq!(r.iter().map(|x| x.multiplicity).sum::<usize>(), 5);
    }

    #[test]
    fn close_but_distinct_roots_stay_apart() {
        // (z−1)(z−1−1e-5)
        let e = 1e-5;
        let r = poly_roots(&[c(1.0 + e, 0.0), c(-2.0 - e, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn residuals() {
        let p = [c(0.3, 0.1), c(-1.0, 2.0), c(0.5, 0.0), c(2.0, -1.0), c(1.0, 1.0)];
        for r in poly_roots(&p).unwrap() {
            assert!(backward_error(&p, r.value) < RESIDUAL_TOL);
        }
        assert!(poly_roots(&[c(1.0, 0.0)]).is_err());
    }
}
