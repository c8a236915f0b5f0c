use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use super::gaussrat::GaussRat;
use super::poly::{same_shape, Poly};
use super::shape::Shape;
use crate::error::{Error, Result};

/// Relative threshold below which a denominator value counts as vanishing:
/// `|den(X)| < DENOMINATOR_TOL · (1 + |num(X)|)`.
pub const DENOMINATOR_TOL: f64 = 1e-12;

/// Scale-aware denominator guard shared by evaluation and singular-locus tests.
pub fn denominator_vanishes(num: Complex64, den: Complex64) -> bool {
    den.norm() < DENOMINATOR_TOL * (1.0 + num.norm())
}

/// Quotient of two polynomials on the same space.
///
/// Only cheap normalizations are applied: a constant denominator is folded
/// into the numerator, the common monomial factor is cancelled, and the
/// denominator is scaled so its leading coefficient is 1. No multivariate
/// gcd is attempted, so equality is decided by cross-multiplication.
#[derive(Clone, Debug)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        same_shape(&num, &den)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero { pos: 0 });
        }
        Ok(RationalFn::normalized(num, den))
    }

    pub fn from_poly(p: Poly) -> Self {
        let den = Poly::one(p.shape());
        RationalFn { num: p, den }
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            let shape = num.shape();
            return RationalFn { num, den: Poly::one(shape) };
        }
        let g = num.monomial_content().gcd(&den.monomial_content());
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_monomial(&g).expect("gcd divides"), den.div_monomial(&g).expect("gcd divides"))
        };
        let lead = den.leading().expect("nonzero denominator").1.clone();
        let inv = lead.inv().expect("nonzero leading coefficient");
        RationalFn { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn shape(&self) -> Shape {
        self.num.shape()
    }

    /// The polynomial this equals, when the denominator is constant.
    pub fn as_poly(&self) -> Option<Poly> {
        self.den.constant_value().map(|c| self.num.scale(&c.inv().expect("nonzero")))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        if self.den == o.den {
            return RationalFn::normalized(&self.num + &o.num, self.den.clone());
        }
        RationalFn::normalized(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn sub(&self, o: &RationalFn) -> RationalFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        RationalFn::normalized(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }

    pub fn div(&self, o: &RationalFn) -> Result<RationalFn> {
        if o.is_zero() {
            return Err(Error::DivisionByZero { pos: 0 });
        }
        Ok(RationalFn::normalized(&self.num * &o.den, &self.den * &o.num))
    }

    pub fn scale(&self, c: &GaussRat) -> RationalFn {
        RationalFn::normalized(self.num.scale(c), self.den.clone())
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, e: i32) -> Result<RationalFn> {
        let base = if e < 0 { RationalFn::from_poly(Poly::one(self.shape())).div(self)? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RationalFn::normalized(base.num.pow(k), base.den.pow(k)))
    }

    /// Quotient rule for `∂/∂x_v`; the result has denominator `den²`.
    pub fn derivative(&self, var: usize) -> RationalFn {
        let n = &(&self.num.derivative(var) * &self.den) - &(&self.num * &self.den.derivative(var));
        RationalFn::normalized(n, &self.den * &self.den)
    }

    /// Numeric evaluation with the scale-aware denominator guard.
    pub fn eval_complex(&self, vars: &[Complex64]) -> Result<Complex64> {
        let n = self.num.eval_complex(vars);
        let d = self.den.eval_complex(vars);
        if denominator_vanishes(n, d) {
            return Err(Error::DenominatorVanishes { magnitude: d.norm() });
        }
        Ok(n / d)
    }

    pub fn eval_exact(&self, vars: &[GaussRat]) -> Result<GaussRat> {
        let d = self.den.eval_exact(vars);
        if d.is_zero() {
            return Err(Error::DenominatorVanishes { magnitude: 0.0 });
        }
        Ok(self.num.eval_exact(vars).checked_div(&d).expect("nonzero"))
    }
}

/// Equality by cross-multiplication, `n₁·d₂ = n₂·d₁`.
impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        self.shape() == other.shape() && &self.num * &other.den == &other.num * &self.den
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.as_poly() {
            return write!(f, "{p}");
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: Shape, i: usize, j: usize) -> Poly {
        Poly::var(s, i, j).unwrap()
    }

    #[test]
    fn cross_multiplied_equality() {
        let s = Shape::square(2);
        let a = RationalFn::new(x(s, 1, 2), x(s, 2, 1)).unwrap();
        let b = RationalFn::new(&x(s, 1, 2) * &x(s, 1, 1), &x(s, 2, 1) * &x(s, 1, 1)).unwrap();
        assert_eq!(a, b);
        // the common monomial factor is cancelled outright
        assert_eq!(b.num(), &x(s, 1, 2));
    }

    #[test]
    fn zero_denominator_rejected() {
        let s = Shape::square(2);
        assert!(RationalFn::new(x(s, 1, 1), Poly::zero(s)).is_err());
    }

    #[test]
    fn evaluation_guard() {
        let s = Shape::square(2);
        let r = RationalFn::new(x(s, 1, 2), x(s, 2, 1)).unwrap();
        let v =
            [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(4.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!((r.eval_complex(&v).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let bad =
            [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(1e-15, 0.0), Complex64::new(0.0, 0.0)];
        assert!(matches!(r.eval_complex(&bad), Err(Error::DenominatorVanishes { .. })));
    }

    #[test]
    fn derivative_quotient_rule() {
        let s = Shape::square(2);
        let r = RationalFn::new(x(s, 1, 2), x(s, 2, 1)).unwrap();
        let d = r.derivative(s.idx(2, 1));
        let expected = RationalFn::new(-&x(s, 1, 2), &x(s, 2, 1) * &x(s, 2, 1)).unwrap();
        assert_eq!(d, expected);
    }
}
