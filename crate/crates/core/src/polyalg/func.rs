use std::fmt;

use num_complex::Complex64;

use super::gaussrat::GaussRat;
use super::point::MatrixPoint;
use super::poly::Poly;
use super::rational::RationalFn;
use super::shape::Shape;
use crate::error::Result;

/// A regular or rational function on `M_{m,n}`: the common currency of
/// brackets, Hamiltonians and the parser.
#[derive(Clone, Debug)]
pub enum Func {
    Poly(Poly),
    Rational(RationalFn),
}

impl Func {
    /// Collapses a rational function with constant denominator to a polynomial.
    pub fn from_rational(r: RationalFn) -> Func {
        match r.as_poly() {
            Some(p) => Func::Poly(p),
            None => Func::Rational(r),
        }
    }

    pub fn shape(&self) -> Shape {
        match self {
            Func::Poly(p) => p.shape(),
            Func::Rational(r) => r.shape(),
        }
    }

    pub fn to_rational(&self) -> RationalFn {
        match self {
            Func::Poly(p) => RationalFn::from_poly(p.clone()),
            Func::Rational(r) => r.clone(),
        }
    }

    pub fn numerator(&self) -> &Poly {
        match self {
            Func::Poly(p) => p,
            Func::Rational(r) => r.num(),
        }
    }

    /// Denominator, or `None` for polynomials.
    pub fn denominator(&self) -> Option<&Poly> {
        match self {
            Func::Poly(_) => None,
            Func::Rational(r) => Some(r.den()),
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            Func::Poly(p) => Some(p),
            Func::Rational(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator().is_zero()
    }

    pub fn evaluate(&self, x: &MatrixPoint) -> Result<Complex64> {
        x.shape().same(&self.shape())?;
        self.eval_flat(x.entries())
    }

    pub(crate) fn eval_flat(&self, vars: &[Complex64]) -> Result<Complex64> {
        match self {
            Func::Poly(p) => Ok(p.eval_complex(vars)),
            Func::Rational(r) => r.eval_complex(vars),
        }
    }

    /// Exact value at a point carrying exact entries.
    pub fn evaluate_exact(&self, x: &MatrixPoint) -> Result<Option<GaussRat>> {
        x.shape().same(&self.shape())?;
        let Some(ex) = x.exact() else { return Ok(None) };
        Ok(Some(match self {
            Func::Poly(p) => p.eval_exact(ex),
            Func::Rational(r) => r.eval_exact(ex)?,
        }))
    }

    pub fn derivative(&self, var: usize) -> Func {
        match self {
            Func::Poly(p) => Func::Poly(p.derivative(var)),
            Func::Rational(r) => Func::from_rational(r.derivative(var)),
        }
    }

    pub fn variables(&self) -> std::collections::BTreeSet<usize> {
        let mut v = self.numerator().variables();
        if let Some(d) = self.denominator() {
            v.extend(d.variables());
        }
        v
    }
}

impl From<Poly> for Func {
    fn from(p: Poly) -> Self {
        Func::Poly(p)
    }
}

impl From<RationalFn> for Func {
    fn from(r: RationalFn) -> Self {
        Func::from_rational(r)
    }
}

/// Mathematical equality (cross-multiplication for rational functions).
impl PartialEq for Func {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Func::Poly(a), Func::Poly(b)) => a == b,
            _ => self.to_rational() == other.to_rational(),
        }
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Func::Poly(p) => write!(f, "{p}"),
            Func::Rational(r) => write!(f, "{r}"),
        }
    }
}
