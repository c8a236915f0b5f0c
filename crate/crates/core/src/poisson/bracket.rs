use std::collections::BTreeMap;

use crate::error::Result;
use crate::polyalg::{Func, GaussRat, Monomial, Poly, RationalFn, Shape};

/// A quadratic generator bracket `{x_a, x_b} = coeff · x_u · x_v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticTerm {
    pub coeff: i64,
    pub u: usize,
    pub v: usize,
}

/// A table of brackets between coordinate functions, extended to all
/// functions as a biderivation.
pub trait GeneratorBrackets: Sync {
    /// `{x_a, x_b}` for flat indices `a`, `b` on `shape`.
    fn generator_bracket(&self, shape: Shape, a: usize, b: usize) -> QuadraticTerm;
}

#[inline]
pub(crate) fn sign(d: i64) -> i64 {
    d.signum()
}

/// The quadratic bracket of the matrix affine Poisson space:
/// `{x_kl, x_ij} = (sign(i−k) + sign(j−l)) · x_il · x_kj`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MatrixPoisson;

impl GeneratorBrackets for MatrixPoisson {
    #[inline]
    fn generator_bracket(&self, shape: Shape, a: usize, b: usize) -> QuadraticTerm {
        let (k, l) = shape.coord(a);
        let (i, j) = shape.coord(b);
        let coeff = sign(i as i64 - k as i64) + sign(j as i64 - l as i64);
        QuadraticTerm { coeff, u: shape.idx(i, l), v: shape.idx(k, j) }
    }
}

/// `{x_kl, x_ij}` as a polynomial (1-based coordinates).
pub fn bracket_generators(shape: Shape, (k, l): (usize, usize), (i, j): (usize, usize)) -> Result<Poly> {
    let a = shape.index(k, l)?;
    let b = shape.index(i, j)?;
    Ok(quadratic_poly(shape, MatrixPoisson.generator_bracket(shape, a, b)))
}

pub(crate) fn quadratic_poly(shape: Shape, q: QuadraticTerm) -> Poly {
    if q.coeff == 0 {
        return Poly::zero(shape);
    }
    Poly::monomial(shape, Monomial::var(q.u).mul(&Monomial::var(q.v)), GaussRat::from_int(q.coeff))
}

/// `{f, g} = Σ {x_a, x_b} ∂_a f ∂_b g` for polynomials under `rule`.
pub fn bracket_polys_with(rule: &dyn GeneratorBrackets, f: &Poly, g: &Poly) -> Poly {
    let shape = f.shape();
    assert_eq!(shape, g.shape(), "polynomial shape mismatch");
    let dg: BTreeMap<usize, Poly> = g.variables().into_iter().map(|b| (b, g.derivative(b))).collect();
    let mut acc = Poly::zero(shape);
    for a in f.variables() {
        let da = f.derivative(a);
        let mut inner = Poly::zero(shape);
        for (&b, gb) in &dg {
            let q = rule.generator_bracket(shape, a, b);
            if q.coeff != 0 {
                let m = Monomial::var(q.u).mul(&Monomial::var(q.v));
                inner = &inner + &gb.mul_monomial(&m, &GaussRat::from_int(q.coeff));
            }
        }
        if !inner.is_zero() {
            acc = &acc + &(&da * &inner);
        }
    }
    acc
}

pub fn bracket_polys(f: &Poly, g: &Poly) -> Poly {
    bracket_polys_with(&MatrixPoisson, f, g)
}

/// Bracket of polynomials or rational functions.
///
/// Rational inputs use the double quotient rule
/// `{a/b, c/d} = [({a,c}d − c{a,d})b − a({b,c}d − c{b,d})] / (b²d²)`
/// without any gcd reduction.
pub fn bracket_with(rule: &dyn GeneratorBrackets, f: &Func, g: &Func) -> Result<Func> {
    f.shape().same(&g.shape())?;
    if let (Func::Poly(a), Func::Poly(c)) = (f, g) {
        return Ok(Func::Poly(bracket_polys_with(rule, a, c)));
    }
    let shape = f.shape();
    let one = Poly::one(shape);
    let (a, b) = (f.numerator(), f.denominator().unwrap_or(&one));
    let (c, d) = (g.numerator(), g.denominator().unwrap_or(&one));
    let br = |x: &Poly, y: &Poly| bracket_polys_with(rule, x, y);
    // {a, c/d}·d² and {b, c/d}·d²
    let a_cd = &(&br(a, c) * d) - &(c * &br(a, d));
    let num = if b.is_constant() {
        a_cd.scale(&b.constant_value().and_then(|v| v.inv()).expect("nonzero"))
    } else {
        let b_cd = &(&br(b, c) * d) - &(c * &br(b, d));
        &(&a_cd * b) - &(a * &b_cd)
    };
    let den = if b.is_constant() { d * d } else { &(b * b) * &(d * d) };
    Ok(Func::from_rational(RationalFn::new(num, den)?))
}

/// The Poisson bracket `{f, g}` of the matrix affine Poisson space.
pub fn bracket(f: &Func, g: &Func) -> Result<Func> {
    bracket_with(&MatrixPoisson, f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_expr;

    fn p(src: &str, s: Shape) -> Func {
        parse_expr(src, s).unwrap()
    }

    #[test]
    fn generator_rule_examples() {
        let s = Shape::square(2);
        let b = |k, l, i, j| bracket_generators(s, (k, l), (i, j)).unwrap();
        assert_eq!(Func::Poly(b(1, 1, 2, 1)), p("x[1][1]*x[2][1]", s));
        assert!(b(1, 2, 2, 1).is_zero());
        assert_eq!(Func::Poly(b(1, 1, 2, 2)), p("2*x[1][2]*x[2][1]", s));
        assert!(bracket_generators(s, (3, 1), (1, 1)).is_err());
    }

    #[test]
    fn generator_rule_agrees_with_leibniz_on_determinant() {
        // {x_11, Δ_2} = 0 expands through the generator table
        let s = Shape::square(2);
        let det = p("det(1,2;1,2)", s);
        assert!(bracket(&p("x[1][1]", s), &det).unwrap().is_zero());
    }

    #[test]
    fn self_bracket_vanishes() {
        let s = Shape::square(3);
        for src in ["x[1][1]*x[2][3] + 5*x[3][1]^2", "det(1,2;2,3)/x[3][1]"] {
            assert!(bracket(&p(src, s), &p(src, s)).unwrap().is_zero());
        }
    }

    #[test]
    fn ratio_commutes_with_corner() {
        let s = Shape::square(2);
        assert!(bracket(&p("x[1][1]", s), &p("x[1][2]/x[2][1]", s)).unwrap().is_zero());
    }

    #[test]
    fn rational_bracket_matches_quotient_rule_by_hand() {
        // {x_11, x_12/x_22} = ({x11,x12}x22 − x12{x11,x22})/x22² = (x11x12x22 − 2x12²x21)/x22²
        let s = Shape::square(2);
        let got = bracket(&p("x[1][1]", s), &p("x[1][2]/x[2][2]", s)).unwrap();
        let want = p("(x[1][1]*x[1][2]*x[2][2] - 2*x[1][2]^2*x[2][1])/x[2][2]^2", s);
        assert_eq!(got, want);
    }

    #[test]
    fn shape_mismatch() {
        assert!(bracket(&p("x[1][1]", Shape::square(2)), &p("x[1][1]", Shape::square(3))).is_err());
    }
}
