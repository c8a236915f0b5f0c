use num_complex::Complex64;
use serde::Serialize;

use super::closed::{gz_flow_closed, minor_flow_closed, ClosedFlow};
use super::numeric::{numeric_flow, NumericOptions, Trajectory};
use crate::error::Result;
use crate::gz::{GzSystem, SingularLocus};
use crate::poisson::MinorSpec;
use crate::polyalg::{Func, MatrixPoint, Shape};
use crate::quasiexp::QEFun;

/// Agreement threshold for flow comparisons.
pub const PASS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CrossValidation {
    pub samples: usize,
    pub max_deviation: f64,
    pub worst_time: Complex64,
    pub pass: bool,
}

/// Compares a closed flow with a numeric trajectory at every accepted step.
pub fn cross_validate(flow: &ClosedFlow, oracle: &Trajectory) -> CrossValidation {
    let mut max_deviation = 0.0;
    let mut worst_time = Complex64::new(0.0, 0.0);
    for (t, x) in &oracle.samples {
        let d = flow.eval(*t).relative_deviation(x);
        if d > max_deviation || d.is_nan() {
            max_deviation = d;
            worst_time = *t;
        }
    }
    CrossValidation { samples: oracle.samples.len(), max_deviation, worst_time, pass: max_deviation < PASS_TOL }
}

/// Time-`t` map of a Hamiltonian flow.
pub trait Flow: Sync {
    fn shape(&self) -> Shape;
    fn flow(&self, x0: &MatrixPoint, t: Complex64) -> Result<MatrixPoint>;
}

/// Closed-form flow of a minor.
pub struct MinorFlow(pub MinorSpec);

impl Flow for MinorFlow {
    fn shape(&self) -> Shape {
        Shape::new(*self.0.rows.last().unwrap(), *self.0.cols.last().unwrap())
    }

    fn flow(&self, x0: &MatrixPoint, t: Complex64) -> Result<MatrixPoint> {
        Ok(minor_flow_closed(&self.0, x0)?.eval(t))
    }
}

/// Closed-form flow of a member of a Gelfand–Zeitlin type family.
pub struct GzFlow<'a> {
    pub system: &'a GzSystem,
    pub index: usize,
}

impl Flow for GzFlow<'_> {
    fn shape(&self) -> Shape {
        self.system.shape()
    }

    fn flow(&self, x0: &MatrixPoint, t: Complex64) -> Result<MatrixPoint> {
        Ok(gz_flow_closed(self.system, self.index, x0)?.eval(t))
    }
}

/// Numeric flow along the straight segment from 0 to `t`.
pub struct NumericFlow {
    pub h: Func,
    pub tol: f64,
    pub locus: Option<SingularLocus>,
}

impl Flow for NumericFlow {
    fn shape(&self) -> Shape {
        self.h.shape()
    }

    fn flow(&self, x0: &MatrixPoint, t: Complex64) -> Result<MatrixPoint> {
        let mut opts = NumericOptions::to_time(t).with_tol(self.tol);
        opts.locus = self.locus.clone();
        Ok(numeric_flow(&self.h, x0, &opts)?.last().clone())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutationCheck {
    pub deviation: f64,
    pub pass: bool,
}

/// Deviation between `Φ^s_1 Φ^t_2 (X0)` and `Φ^t_2 Φ^s_1 (X0)`.
pub fn flow_commutation(
    f1: &dyn Flow,
    f2: &dyn Flow,
    x0: &MatrixPoint,
    s: Complex64,
    t: Complex64,
) -> Result<CommutationCheck> {
    let a = f1.flow(&f2.flow(x0, t)?, s)?;
    let b = f2.flow(&f1.flow(x0, s)?, t)?;
    let deviation = a.relative_deviation(&b);
    Ok(CommutationCheck { deviation, pass: deviation < PASS_TOL })
}

/// `max |f(X) − f(X0)| / (1 + |f(X0)|)` over the given points and functions.
pub fn conservation_error(fs: &[Func], x0: &MatrixPoint, points: &[MatrixPoint]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for f in fs {
        let v0 = f.evaluate(x0)?;
        for x in points {
            worst = worst.max((f.evaluate(x)? - v0).norm() / (1.0 + v0.norm()));
        }
    }
    Ok(worst)
}

/// Zeros of one denominator along a closed flow.
#[derive(Debug, Clone, Serialize)]
pub struct DenominatorZeros {
    pub label: String,
    pub identically_zero: bool,
    /// `|Δ'∘γ(0) − Δ'(X0)|`.
    pub initial_mismatch: f64,
    pub value_at_zero: Complex64,
    pub zeros: Vec<Complex64>,
    /// Smallest pairwise distance between zeros (infinite when fewer than two).
    pub min_separation: f64,
}

impl DenominatorZeros {
    /// Not identically zero, nonzero at `t = 0`, and zeros pairwise apart.
    pub fn isolated(&self) -> bool {
        !self.identically_zero && self.value_at_zero.norm() > 0.0 && self.min_separation > 1e-3
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub radius: f64,
    pub denominators: Vec<DenominatorZeros>,
}

impl ProbeReport {
    pub fn pass(&self) -> bool {
        self.denominators.iter().all(|d| d.isolated() && d.initial_mismatch < 1e-12 * (1.0 + d.value_at_zero.norm()))
    }
}

/// Locates zeros of each denominator composed with the flow in `|t| ≤ R`:
/// local minima of the modulus on a square grid of spacing `R/grid`, refined
/// by Newton's method and deduplicated.
pub fn discreteness_probe(flow: &ClosedFlow, locus: &SingularLocus, radius: f64, grid: usize) -> ProbeReport {
    let denominators = locus
        .entries
        .iter()
        .map(|e| {
            let g = flow.compose(&e.den);
            let value_at_zero = g.eval(Complex64::new(0.0, 0.0));
            let initial_mismatch = (value_at_zero - e.den.eval_complex(flow.x0.entries())).norm();
            let zeros = if g.is_constant() { Vec::new() } else { scan_zeros(&g, radius, grid) };
            let mut min_separation = f64::INFINITY;
            for i in 0..zeros.len() {
                for j in i + 1..zeros.len() {
                    min_separation = min_separation.min((zeros[i] - zeros[j]).norm());
                }
            }
            DenominatorZeros {
                label: e.label.clone(),
                identically_zero: g.is_zero(),
                initial_mismatch,
                value_at_zero,
                zeros,
                min_separation,
            }
        })
        .collect();
    ProbeReport { radius, denominators }
}

fn scan_zeros(g: &QEFun, radius: f64, grid: usize) -> Vec<Complex64> {
    let dg = g.derivative();
    let h = radius / grid as f64;
    let m = 2 * grid + 1;
    let at = |i: usize, j: usize| Complex64::new(-radius + i as f64 * h, -radius + j as f64 * h);
    let vals: Vec<f64> = (0..m * m).map(|k| g.eval(at(k / m, k % m)).norm()).collect();
    let mut zeros: Vec<Complex64> = Vec::new();
    for i in 1..m - 1 {
        for j in 1..m - 1 {
            let v = vals[i * m + j];
            let is_min = (-1i64..=1)
                .all(|di| (-1i64..=1).all(|dj| vals[(i as i64 + di) as usize * m + (j as i64 + dj) as usize] >= v));
            if !is_min || at(i, j).norm() > radius + h {
                continue;
            }
            let mut z = at(i, j);
            let mut converged = false;
            for _ in 0..60 {
                let step = g.eval(z) / dg.eval(z);
                if !step.is_finite() {
                    break;
                }
                z -= step;
                if step.norm() < 1e-13 * (1.0 + z.norm()) {
                    converged = true;
                    break;
                }
            }
            if converged && z.norm() <= radius && zeros.iter().all(|w| (w - z).norm() > 1e-8 * (1.0 + z.norm())) {
                zeros.push(z);
            }
        }
    }
    zeros.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    zeros
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gz::gz_system;
    use crate::polyalg::parse_expr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn minor_cross_validation_and_negative_control() {
        let s = Shape::square(3);
        let x0 = MatrixPoint::random(s, &mut ChaCha8Rng::seed_from_u64(20));
        let spec = MinorSpec::new(vec![3], vec![1]).unwrap();
        let closed = minor_flow_closed(&spec, &x0).unwrap();
        let h = Func::Poly(crate::poisson::minor(&spec, s).unwrap());
        let tr = numeric_flow(&h, &x0, &NumericOptions::new(0.0, 2.0)).unwrap();
        assert!(cross_validate(&closed, &tr).pass);
        let mut flipped = NumericOptions::new(0.0, 2.0);
        flipped.field_sign = -1.0;
        let bad = numeric_flow(&h, &x0, &flipped).unwrap();
        assert!(!cross_validate(&closed, &bad).pass);
    }

    #[test]
    fn gz_cross_validation() {
        let sys = gz_system(3, None).unwrap();
        let x0 = MatrixPoint::random(Shape::square(3), &mut ChaCha8Rng::seed_from_u64(21));
        let idx = 2;
        let closed = gz_flow_closed(&sys, idx, &x0).unwrap();
        let opts = NumericOptions::new(0.4, 0.5).with_locus(sys.singular_locus());
        let tr = numeric_flow(&sys.hams[idx], &x0, &opts).unwrap();
        let cv = cross_validate(&closed, &tr);
        assert!(cv.pass, "{cv:?}");
    }

    #[test]
    fn commuting_minor_flows() {
        let s = Shape::square(3);
        let x0 = MatrixPoint::random(s, &mut ChaCha8Rng::seed_from_u64(22));
        let a = MinorFlow(MinorSpec::new(vec![3], vec![1]).unwrap());
        let b = MinorFlow(MinorSpec::new(vec![2], vec![2]).unwrap());
        let (s_, t_) = (c(0.7, 0.0), c(-0.3, 0.4));
        assert!(flow_commutation(&a, &b, &x0, s_, t_).unwrap().pass);
        assert!(flow_commutation(&a, &a, &x0, s_, t_).unwrap().pass);
        let noncommuting = MinorFlow(MinorSpec::new(vec![1], vec![1]).unwrap());
        assert!(!flow_commutation(&a, &noncommuting, &x0, s_, t_).unwrap().pass);
    }

    #[test]
    fn numeric_gz_commutation() {
        let sys = gz_system(3, None).unwrap();
        let x0 = MatrixPoint::random(Shape::square(3), &mut ChaCha8Rng::seed_from_u64(23));
        let f = |i: usize| NumericFlow { h: sys.hams[i].clone(), tol: 1e-11, locus: Some(sys.singular_locus()) };
        let r = flow_commutation(&f(1), &f(2), &x0, c(0.3, 0.0), c(0.0, 0.2)).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn probe() {
        let sys2 = gz_system(2, None).unwrap();
        let x2 = MatrixPoint::random(Shape::square(2), &mut ChaCha8Rng::seed_from_u64(24));
        let p2 = discreteness_probe(&gz_flow_closed(&sys2, 0, &x2).unwrap(), &sys2.singular_locus(), 5.0, 50);
        assert!(p2.pass());
        assert!(p2.denominators[0].zeros.is_empty());

        let sys = gz_system(3, None).unwrap();
        let x0 = MatrixPoint::random(Shape::square(3), &mut ChaCha8Rng::seed_from_u64(25));
        for i in 0..sys.hams.len() {
            let flow = gz_flow_closed(&sys, i, &x0).unwrap();
            let rep = discreteness_probe(&flow, &sys.singular_locus(), 5.0, 100);
            assert!(rep.pass(), "{rep:?}");
            for d in &rep.denominators {
                let g = flow.compose(&sys.singular_locus().entries.iter().find(|e| e.label == d.label).unwrap().den);
                assert!(d.zeros.iter().all(|z| g.eval(*z).norm() < 1e-9));
            }
        }
    }

    #[test]
    fn conservation() {
        let s = Shape::square(3);
        let x0 = MatrixPoint::random(s, &mut ChaCha8Rng::seed_from_u64(26));
        let spec = MinorSpec::new(vec![1, 2], vec![2, 3]).unwrap();
        let f = minor_flow_closed(&spec, &x0).unwrap();
        let pts: Vec<MatrixPoint> = [c(1.0, 0.0), c(0.0, 2.0), c(-1.5, -0.5)].iter().map(|&t| f.eval(t)).collect();
        let h = parse_expr("det(1,2;2,3)", s).unwrap();
        assert!(conservation_error(&[h], &x0, &pts).unwrap() < 1e-8);
    }
}
