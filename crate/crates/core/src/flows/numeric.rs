use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gz::SingularLocus;
use crate::poisson::HamiltonianField;
use crate::polyalg::{Func, MatrixPoint, Shape};

/// Guard factor: abort once a denominator falls below `GUARD · (1 + ‖X‖)`.
pub const SINGULARITY_GUARD: f64 = 1e-8;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Settings for integration along the ray `t = s·e^{iθ}`, `s ∈ [0, S]`.
#[derive(Debug, Clone)]
pub struct NumericOptions {
    pub theta: f64,
    pub arclength: f64,
    pub tol: f64,
    /// Extra denominators to watch besides the Hamiltonian's own.
    pub locus: Option<SingularLocus>,
    /// Perturbs the field for negative controls: `ẋ = sign · {x, h}`.
    pub field_sign: f64,
}

impl NumericOptions {
    pub fn new(theta: f64, arclength: f64) -> Self {
        NumericOptions { theta, arclength, tol: DEFAULT_TOL, locus: None, field_sign: 1.0 }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_locus(mut self, locus: SingularLocus) -> Self {
        self.locus = Some(locus);
        self
    }

    /// Options reaching the complex time `t` in a straight line.
    pub fn to_time(t: Complex64) -> Self {
        Self::new(t.arg(), t.norm())
    }
}

/// Accepted steps of a numeric flow with the Hamiltonian value at each.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub shape: Shape,
    pub tol: f64,
    pub samples: Vec<(Complex64, MatrixPoint)>,
    pub h_values: Vec<Complex64>,
}

impl Trajectory {
    pub fn last(&self) -> &MatrixPoint {
        &self.samples.last().expect("nonempty").1
    }

    /// `max |h(X(t)) − h(X0)| / (1 + |h(X0)|)`.
    pub fn conservation_error(&self) -> f64 {
        let h0 = self.h_values[0];
        self.h_values.iter().map(|h| (h - h0).norm()).fold(0.0, f64::max) / (1.0 + h0.norm())
    }

    /// Columns `t_re, t_im`, then each entry's real and imaginary part in
    /// row-major order, then `h_value_re, h_value_im`.
    pub fn to_csv(&self) -> String {
        let mut head = vec!["t_re".to_string(), "t_im".to_string()];
        for (i, j) in self.shape.coords() {
            head.push(format!("x{i}{j}_re"));
            head.push(format!("x{i}{j}_im"));
        }
        head.push("h_value_re".into());
        head.push("h_value_im".into());
        let mut s = head.join(",");
        s.push('\n');
        for ((t, x), h) in self.samples.iter().zip(&self.h_values) {
            let mut row = vec![t.re.to_string(), t.im.to_string()];
            for z in x.entries() {
                row.push(z.re.to_string());
                row.push(z.im.to_string());
            }
            row.push(h.re.to_string());
            row.push(h.im.to_string());
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

// Dormand–Prince 5(4) tableau; the field is autonomous so the nodes are unused
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

struct Rhs<'a> {
    field: &'a HamiltonianField,
    dir: Complex64,
    grad: Vec<Complex64>,
}

impl Rhs<'_> {
    fn eval(&mut self, x: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        self.field.eval_into(x, &mut self.grad, out)?;
        for o in out.iter_mut() {
            *o *= self.dir;
        }
        Ok(())
    }
}

fn max_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrates `ẋ_kl = {x_kl, h}` from `X0` along `t = s·e^{iθ}` with an
/// adaptive Dormand–Prince 5(4) pair (absolute and relative tolerance `tol`,
/// PI step control, steps at most `S/50`).
pub fn numeric_flow(h: &Func, x0: &MatrixPoint, opts: &NumericOptions) -> Result<Trajectory> {
    h.shape().same(&x0.shape())?;
    let shape = x0.shape();
    let field = HamiltonianField::new(h);
    let hc = field.hamiltonian();
    let h0 = hc.value(x0.entries())?;
    let dir = Complex64::from_polar(opts.field_sign, opts.theta);
    let dim = shape.len();
    let mut rhs = Rhs { field: &field, dir, grad: vec![Complex64::new(0.0, 0.0); dim] };
    let guard_hit = |x: &[Complex64]| -> bool {
        let bound = SINGULARITY_GUARD * (1.0 + max_norm(x));
        hc.has_denominator() && hc.denominator_value(x).norm() < bound
            || opts.locus.as_ref().is_some_and(|l| l.entries.iter().any(|e| e.den.eval_complex(x).norm() < bound))
    };
    if guard_hit(x0.entries()) {
        return Err(Error::SingularityApproached { last_good: Complex64::new(0.0, 0.0) });
    }

    let total = opts.arclength;
    let t_of = |s: f64| Complex64::from_polar(s, opts.theta);
    let mut samples = vec![(Complex64::new(0.0, 0.0), x0.clone())];
    let mut h_values = vec![h0];
    if total <= 0.0 {
        return Ok(Trajectory { shape, tol: opts.tol, samples, h_values });
    }
    let h_max = total / 50.0;
    let mut x = x0.entries().to_vec();
    let mut s = 0.0;
    let mut step = (total / 1000.0).min(h_max);
    let mut err_prev = 1.0_f64;
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); dim]; 7];
    let mut y = vec![Complex64::new(0.0, 0.0); dim];
    let singular = |s: f64| Error::SingularityApproached { last_good: t_of(s) };
    rhs.eval(&x, &mut k[0]).map_err(|_| singular(0.0))?;
    while s < total {
        step = step.min(total - s);
        if step < 1e-14 * total {
            return Err(Error::StepUnderflow { t: t_of(s) });
        }
        for st in 1..7 {
            for v in 0..dim {
                let mut acc = x[v];
                for (j, kj) in k.iter().enumerate().take(st) {
                    if A[st][j] != 0.0 {
                        acc += kj[v] * (step * A[st][j]);
                    }
                }
                y[v] = acc;
            }
            rhs.eval(&y, &mut k[st]).map_err(|_| singular(s))?;
        }
        let mut err = 0.0_f64;
        let mut x_new = vec![Complex64::new(0.0, 0.0); dim];
        for v in 0..dim {
            let mut hi = x[v];
            let mut e = Complex64::new(0.0, 0.0);
            for st in 0..7 {
                hi += k[st][v] * (step * B5[st]);
                e += k[st][v] * (step * (B5[st] - B4[st]));
            }
            x_new[v] = hi;
            let sc = opts.tol + opts.tol * x[v].norm().max(hi.norm());
            err = err.max(e.norm() / sc);
        }
        if !err.is_finite() {
            step *= 0.2;
            continue;
        }
        if err <= 1.0 {
            s += step;
            x = x_new;
            if guard_hit(&x) {
                return Err(singular(s - step));
            }
            // first-same-as-last
            k.swap(0, 6);
            let value = hc.value(&x).map_err(|_| singular(s - step))?;
            samples.push((t_of(s), MatrixPoint::new(shape, x.clone())?));
            h_values.push(value);
            let factor = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0) };
            step = (step * factor.clamp(0.2, 5.0)).min(h_max);
            err_prev = err.max(1e-4);
        } else {
            step *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    Ok(Trajectory { shape, tol: opts.tol, samples, h_values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_expr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn determinant_flow_is_constant() {
        let s = Shape::square(3);
        let h = parse_expr("det(1,2,3;1,2,3)", s).unwrap();
        let x0 = MatrixPoint::random(s, &mut ChaCha8Rng::seed_from_u64(1));
        let tr = numeric_flow(&h, &x0, &NumericOptions::new(0.3, 2.0)).unwrap();
        assert!(tr.samples.iter().all(|(_, x)| x.relative_deviation(&x0) < 1e-14));
    }

    #[test]
    fn corner_flow_matches_scalar_solution() {
        let s = Shape::square(3);
        let h = parse_expr("x[3][1]", s).unwrap();
        let x0 = MatrixPoint::random(s, &mut ChaCha8Rng::seed_from_u64(2));
        for theta in [0.0, 1.0, -2.5] {
            let tr = numeric_flow(&h, &x0, &NumericOptions::new(theta, 2.0)).unwrap();
            for (t, x) in &tr.samples {
                let want = x0.at(1, 1) * (x0.at(3, 1) * t).exp();
                assert!((x.at(1, 1) - want).norm() < 1e-8 * want.norm().max(1.0));
            }
            assert!(tr.conservation_error() < 1e-8);
            assert!((tr.samples.last().unwrap().0.norm() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rational_flow_guard() {
        let s = Shape::square(2);
        let h = parse_expr("x[1][1]/x[2][1]", s).unwrap();
        let x0 = MatrixPoint::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(numeric_flow(&h, &x0, &NumericOptions::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn csv_layout() {
        let s = Shape::square(2);
        let h = parse_expr("x[2][1]", s).unwrap();
        let tr = numeric_flow(&h, &MatrixPoint::identity(2), &NumericOptions::new(0.0, 0.5)).unwrap();
        let csv = tr.to_csv();
        let head = csv.lines().next().unwrap();
        assert_eq!(head.split(',').count(), 2 + 8 + 2);
        assert!(head.starts_with("t_re,t_im,x11_re,x11_im"));
        assert_eq!(csv.lines().count(), tr.samples.len() + 1);
    }
}
