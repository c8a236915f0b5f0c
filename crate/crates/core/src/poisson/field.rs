use nalgebra::DMatrix;
use num_complex::Complex64;

use super::bracket::{bracket, GeneratorBrackets, MatrixPoisson};
use crate::error::Result;
use crate::par::Exec;
use crate::polyalg::{CompiledFunc, Func, MatrixPoint, Poly, Shape};

/// Relative singular-value cutoff for numeric rank.
pub const RANK_TOL: f64 = 1e-9;

#[inline]
fn generator_value(shape: Shape, x: &[Complex64], a: usize, b: usize) -> Complex64 {
    let q = MatrixPoisson.generator_bracket(shape, a, b);
    if q.coeff == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        x[q.u] * x[q.v] * q.coeff as f64
    }
}

/// Compiled Hamiltonian vector field `ẋ_kl = {x_kl, h}`.
#[derive(Clone, Debug)]
pub struct HamiltonianField {
    shape: Shape,
    h: CompiledFunc,
    // (a, b) pairs with a nonzero generator bracket and b in the support of h
    support: Vec<usize>,
}

impl HamiltonianField {
    pub fn new(h: &Func) -> Self {
        HamiltonianField { shape: h.shape(), h: CompiledFunc::new(h), support: h.variables().into_iter().collect() }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn hamiltonian(&self) -> &CompiledFunc {
        &self.h
    }

    /// Field at the flat point `x` into `out`.
    pub fn eval_into(&self, x: &[Complex64], grad: &mut [Complex64], out: &mut [Complex64]) -> Result<()> {
        self.h.gradient_into(x, grad)?;
        for (a, o) in out.iter_mut().enumerate() {
            *o = self.support.iter().map(|&b| generator_value(self.shape, x, a, b) * grad[b]).sum();
        }
        Ok(())
    }

    pub fn eval(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut grad = vec![Complex64::new(0.0, 0.0); x.len()];
        let mut out = grad.clone();
        self.eval_into(x, &mut grad, &mut out)?;
        Ok(out)
    }
}

/// `Ẋ` with `Ẋ_kl = Σ_ij {x_kl, x_ij}(X) ∂h/∂x_ij(X)`.
pub fn hamiltonian_field(h: &Func, x: &MatrixPoint) -> Result<MatrixPoint> {
    h.shape().same(&x.shape())?;
    let v = HamiltonianField::new(h).eval(x.entries())?;
    MatrixPoint::new(x.shape(), v)
}

/// Value of `{f, g}` at `x` together with the scale
/// `Σ |{x_a,x_b}(x)| |∂_a f| |∂_b g|` against which it is judged zero.
pub fn numeric_bracket(f: &CompiledFunc, g: &CompiledFunc, shape: Shape, x: &[Complex64]) -> Result<(Complex64, f64)> {
    let df = f.gradient(x)?;
    let dg = g.gradient(x)?;
    let mut val = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for (a, fa) in df.iter().enumerate().filter(|(_, v)| v.norm() != 0.0) {
        for (b, gb) in dg.iter().enumerate().filter(|(_, v)| v.norm() != 0.0) {
            let p = generator_value(shape, x, a, b);
            val += p * fa * gb;
            scale += p.norm() * fa.norm() * gb.norm();
        }
    }
    Ok((val, scale))
}

/// The bracket `{f, g}(x)` vanishes relative to its term scale at 1e-10.
pub fn numerically_commute(f: &CompiledFunc, g: &CompiledFunc, shape: Shape, x: &[Complex64]) -> Result<bool> {
    let (v, s) = numeric_bracket(f, g, shape, x)?;
    Ok(v.norm() <= 1e-10 * s.max(f64::MIN_POSITIVE))
}

/// `π` evaluated at a point: entry `[a, b] = {x_a, x_b}(X)`.
#[derive(Clone, Debug)]
pub struct BivectorMatrix {
    pub point: MatrixPoint,
    pub entries: DMatrix<Complex64>,
}

impl BivectorMatrix {
    pub fn rank(&self) -> usize {
        numeric_rank(&self.entries)
    }

    /// Row-major CSV with `re+imj` complex entries, coordinate order `(i−1)n+j`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for r in 0..self.entries.nrows() {
            let row: Vec<String> = (0..self.entries.ncols())
                .map(|c| {
                    let z = self.entries[(r, c)];
                    format!("{}{:+}j", z.re, z.im)
                })
                .collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn bivector_matrix(x: &MatrixPoint) -> BivectorMatrix {
    let shape = x.shape();
    let n = shape.len();
    let v = x.entries();
    let entries = DMatrix::from_fn(n, n, |a, b| generator_value(shape, v, a, b));
    BivectorMatrix { point: x.clone(), entries }
}

/// Number of singular values above `RANK_TOL · σ_max`.
pub fn numeric_rank(m: &DMatrix<Complex64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * max).count()
}

pub fn bivector_rank(x: &MatrixPoint) -> usize {
    bivector_matrix(x).rank()
}

/// Outcome of a Casimir test; `witness` is the first coordinate (row-major)
/// with `{x_ij, h} ≠ 0` and that bracket.
#[derive(Clone, Debug, PartialEq)]
pub struct CasimirCheck {
    pub witness: Option<((usize, usize), Func)>,
}

impl CasimirCheck {
    pub fn is_casimir(&self) -> bool {
        self.witness.is_none()
    }
}

/// Exact test of `{x_ij, h} = 0` for every coordinate.
pub fn is_casimir(h: &Func) -> Result<CasimirCheck> {
    is_casimir_with(Exec::default(), h)
}

pub fn is_casimir_with(exec: Exec, h: &Func) -> Result<CasimirCheck> {
    let shape = h.shape();
    let coords: Vec<(usize, usize)> = shape.coords().collect();
    let brs = exec.try_map(&coords, |&(i, j)| bracket(&Func::Poly(Poly::var(shape, i, j)?), h))?;
    let witness = coords.into_iter().zip(brs).find(|(_, b)| !b.is_zero());
    Ok(CasimirCheck { witness })
}
