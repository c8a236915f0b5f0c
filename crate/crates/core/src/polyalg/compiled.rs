//! Floating-point evaluation of functions and their gradients, compiled once
//! from the exact representation for the numeric hot loops.

use num_complex::Complex64;

use super::func::Func;
use super::poly::Poly;
use super::rational::denominator_vanishes;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(Complex64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    pub fn new(p: &Poly) -> Self {
        CompiledPoly { terms: p.terms().map(|(m, c)| (c.to_complex(), m.iter().collect())).collect() }
    }

    #[inline]
    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, vars) in &self.terms {
            let mut t = *c;
            for &(v, e) in vars {
                t *= if e == 1 { x[v] } else { x[v].powu(e) };
            }
            acc += t;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Value and gradient of a [`Func`] at numeric points.
#[derive(Clone, Debug)]
pub struct CompiledFunc {
    num: CompiledPoly,
    den: Option<CompiledPoly>,
    dnum: Vec<CompiledPoly>,
    dden: Vec<CompiledPoly>,
}

impl CompiledFunc {
    pub fn new(f: &Func) -> Self {
        let dim = f.shape().len();
        let num = f.numerator();
        let dnum = (0..dim).map(|v| CompiledPoly::new(&num.derivative(v))).collect();
        let (den, dden) = match f.denominator() {
            Some(d) => (Some(CompiledPoly::new(d)), (0..dim).map(|v| CompiledPoly::new(&d.derivative(v))).collect()),
            None => (None, Vec::new()),
        };
        CompiledFunc { num: CompiledPoly::new(num), den, dnum, dden }
    }

    pub fn dim(&self) -> usize {
        self.dnum.len()
    }

    fn num_den(&self, x: &[Complex64]) -> Result<(Complex64, Complex64)> {
        let n = self.num.eval(x);
        let d = match &self.den {
            Some(d) => d.eval(x),
            None => Complex64::new(1.0, 0.0),
        };
        if self.den.is_some() && denominator_vanishes(n, d) {
            return Err(Error::DenominatorVanishes { magnitude: d.norm() });
        }
        Ok((n, d))
    }

    pub fn value(&self, x: &[Complex64]) -> Result<Complex64> {
        let (n, d) = self.num_den(x)?;
        Ok(n / d)
    }

    /// Denominator value (1 for polynomials).
    pub fn denominator_value(&self, x: &[Complex64]) -> Complex64 {
        self.den.as_ref().map_or(Complex64::new(1.0, 0.0), |d| d.eval(x))
    }

    pub fn has_denominator(&self) -> bool {
        self.den.is_some()
    }

    /// Writes `∂f/∂x_v` into `out` via the quotient rule.
    pub fn gradient_into(&self, x: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let (n, d) = self.num_den(x)?;
        match &self.den {
            None => {
                for (o, p) in out.iter_mut().zip(&self.dnum) {
                    *o = p.eval(x);
                }
            }
            Some(_) => {
                let d2 = d * d;
                for ((o, pn), pd) in out.iter_mut().zip(&self.dnum).zip(&self.dden) {
                    *o = (pn.eval(x) * d - n * pd.eval(x)) / d2;
                }
            }
        }
        Ok(())
    }

    pub fn gradient(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut g = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.gradient_into(x, &mut g)?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{parse_expr, Shape};

    #[test]
    fn gradient_matches_finite_differences() {
        let s = Shape::square(2);
        let f = parse_expr("x[1][1]*x[2][2]^2/(x[2][1]+2)", s).unwrap();
        let c = CompiledFunc::new(&f);
        let x: Vec<Complex64> = (0..4).map(|k| Complex64::new(0.3 + k as f64, 0.1 * k as f64)).collect();
        let g = c.gradient(&x).unwrap();
        for v in 0..4 {
            let h = 1e-6;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[v] += h;
            xm[v] -= h;
            let fd = (c.value(&xp).unwrap() - c.value(&xm).unwrap()) / (2.0 * h);
            assert!((fd - g[v]).norm() < 1e-7, "var {v}: {fd} vs {}", g[v]);
        }
    }
}
