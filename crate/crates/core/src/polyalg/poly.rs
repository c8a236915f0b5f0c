use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::gaussrat::GaussRat;
use super::shape::{Monomial, Shape};
use crate::error::{Error, Result};

/// Exact polynomial in the coordinates `x_{ij}` of `M_{m,n}` with Gaussian
/// rational coefficients.
///
/// Terms live in a `BTreeMap` keyed by [`Monomial`] with zero coefficients
/// never stored, so the representation is canonical and derived equality is
/// mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    shape: Shape,
    terms: BTreeMap<Monomial, GaussRat>,
}

/// Binary ring operation selector for [`poly_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Shape-checked ring operation.
pub fn poly_arith(a: &Poly, b: &Poly, op: ArithOp) -> Result<Poly> {
    a.shape.same(&b.shape)?;
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
    })
}

impl Poly {
    pub fn zero(shape: Shape) -> Self {
        Poly { shape, terms: BTreeMap::new() }
    }

    pub fn one(shape: Shape) -> Self {
        Poly::constant(shape, GaussRat::one())
    }

    pub fn constant(shape: Shape, c: GaussRat) -> Self {
        Poly::monomial(shape, Monomial::one(), c)
    }

    pub fn monomial(shape: Shape, m: Monomial, c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { shape, terms }
    }

    /// The coordinate function `x_{ij}` (1-based).
    pub fn var(shape: Shape, row: usize, col: usize) -> Result<Self> {
        let v = shape.index(row, col)?;
        Ok(Poly::var_idx(shape, v))
    }

    pub(crate) fn var_idx(shape: Shape, v: usize) -> Self {
        Poly::monomial(shape, Monomial::var(v), GaussRat::one())
    }

    pub fn from_terms(shape: Shape, terms: impl IntoIterator<Item = (Monomial, GaussRat)>) -> Self {
        let mut p = Poly::zero(shape);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussRat)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The constant value, if the polynomial is constant.
    pub fn constant_value(&self) -> Option<GaussRat> {
        if self.is_zero() {
            return Some(GaussRat::zero());
        }
        if !self.is_constant() {
            return None;
        }
        self.terms.get(&Monomial::one()).cloned()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &GaussRat)> {
        self.terms.iter().next_back()
    }

    /// Flat indices of the variables that occur.
    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| v)).collect()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: &GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.shape);
        }
        Poly { shape: self.shape, terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.shape);
        }
        Poly { shape: self.shape, terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.shape);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact partial derivative `∂/∂x_{ij}` (1-based coordinate).
    pub fn differentiate(&self, row: usize, col: usize) -> Result<Poly> {
        let v = self.shape.index(row, col)?;
        Ok(self.derivative(v))
    }

    /// Partial derivative by flat variable index.
    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.shape);
        for (m, c) in &self.terms {
            if let Some((e, q)) = m.derive(var) {
                out.add_term(q, &c.mul(&GaussRat::from_int(e as i64)));
            }
        }
        out
    }

    /// Generic evaluation into any commutative ring. `vars[v]` is the value of
    /// flat variable `v`.
    pub fn eval_with<T, C>(&self, vars: &[T], coeff: C, zero: T) -> T
    where
        T: Clone + for<'a> Add<&'a T, Output = T> + for<'a> Mul<&'a T, Output = T>,
        C: Fn(&GaussRat) -> T,
    {
        let mut acc = zero;
        for (m, c) in &self.terms {
            let mut term = coeff(c);
            for (v, e) in m.iter() {
                for _ in 0..e {
                    term = term * &vars[v];
                }
            }
            acc = acc + &term;
        }
        acc
    }

    /// Floating-point evaluation on flat complex coordinates.
    pub fn eval_complex(&self, vars: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(m, c)| m.iter().fold(c.to_complex(), |acc, (v, e)| acc * vars[v].powu(e))).sum()
    }

    /// Exact evaluation on flat Gaussian-rational coordinates.
    pub fn eval_exact(&self, vars: &[GaussRat]) -> GaussRat {
        let mut acc = GaussRat::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, e) in m.iter() {
                term = &term * &vars[v].pow(e);
            }
            acc += &term;
        }
        acc
    }

    /// Substitutes each variable `v` by `subs[v]` (polynomials in a possibly
    /// different space `target`).
    pub fn compose(&self, target: Shape, subs: &[Poly]) -> Poly {
        let mut acc = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (v, e) in m.iter() {
                term = &term * &subs[v].pow(e);
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Renames variables into `target`; variables mapped to `None` are set to 0.
    pub fn remap(&self, target: Shape, f: impl Fn(usize) -> Option<usize>) -> Poly {
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            if let Some(m2) = m.remap(&f) {
                out.add_term(m2, c);
            }
        }
        out
    }

    /// Greatest common monomial divisor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return Monomial::one(),
        };
        it.fold(first, |g, m| g.gcd(m))
    }

    /// Exact division by a monomial that divides every term.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            terms.insert(k.div(m)?, c.clone());
        }
        Some(Poly { shape: self.shape, terms })
    }

    /// Writes a monomial in the expression grammar, e.g. `x[1][2]^2*x[3][1]`.
    pub(crate) fn fmt_monomial(&self, m: &Monomial) -> String {
        m.iter()
            .map(|(v, e)| {
                let (i, j) = self.shape.coord(v);
                if e == 1 {
                    format!("x[{i}][{j}]")
                } else {
                    format!("x[{i}][{j}]^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Canonical rendering, highest monomial first, reparseable by
/// [`crate::polyalg::parse_expr`].
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let one = GaussRat::one();
            let coeff = if c.is_real() || m.is_one() { c.to_string() } else { format!("({c})") };
            let body = if m.is_one() {
                coeff
            } else if c == &one {
                self.fmt_monomial(m)
            } else if c == &-&one {
                format!("-{}", self.fmt_monomial(m))
            } else {
                format!("{coeff}*{}", self.fmt_monomial(m))
            };
            let needs_parens = m.is_one() && !c.is_real() && k > 0;
            let body = if needs_parens { format!("({body})") } else { body };
            if k == 0 {
                write!(f, "{body}")?;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.shape, rhs.shape, "polynomial shape mismatch");
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.shape, rhs.shape, "polynomial shape mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.shape, rhs.shape, "polynomial shape mismatch");
        let mut out = Poly::zero(self.shape);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { shape: self.shape, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Checks that two polynomials share a shape.
pub(crate) fn same_shape(a: &Poly, b: &Poly) -> Result<()> {
    a.shape
        .same(&b.shape)
        .map_err(|_| Error::ShapeMismatch { left: (a.shape.rows, a.shape.cols), right: (b.shape.rows, b.shape.cols) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: Shape, i: usize, j: usize) -> Poly {
        Poly::var(s, i, j).unwrap()
    }

    #[test]
    fn cancellation_and_difference_of_squares() {
        let s = Shape::square(2);
        let (a, b) = (x(s, 1, 1), x(s, 1, 2));
        assert!(poly_arith(&a, &a, ArithOp::Sub).unwrap().is_zero());
        let prod = poly_arith(&(&a + &b), &(&a - &b), ArithOp::Mul).unwrap();
        assert_eq!(prod, &(&a * &a) - &(&b * &b));
        assert_eq!(prod.num_terms(), 2);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = x(Shape::square(2), 1, 1);
        let b = x(Shape::square(3), 1, 1);
        assert!(matches!(poly_arith(&a, &b, ArithOp::Add), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn derivatives() {
        let s = Shape::square(2);
        let det = &(&x(s, 1, 1) * &x(s, 2, 2)) - &(&x(s, 1, 2) * &x(s, 2, 1));
        assert_eq!(det.differentiate(2, 2).unwrap(), x(s, 1, 1));
        let cube = x(s, 1, 1).pow(3);
        assert_eq!(cube.differentiate(1, 1).unwrap(), x(s, 1, 1).pow(2).scale(&GaussRat::from_int(3)));
        assert!(det.differentiate(3, 1).is_err());
    }

    #[test]
    fn rendering() {
        let s = Shape::square(2);
        let det = &(&x(s, 1, 1) * &x(s, 2, 2)) - &(&x(s, 1, 2) * &x(s, 2, 1));
        assert_eq!(det.to_string(), "x[1][1]*x[2][2] - x[1][2]*x[2][1]");
        let p =
            &x(s, 1, 1).scale(&GaussRat::from_parts((1, 2), (3, 4))) + &Poly::constant(s, GaussRat::from_ratio(-3, 2));
        assert_eq!(p.to_string(), "(1/2+3i/4)*x[1][1] - 3/2");
        assert_eq!(Poly::zero(s).to_string(), "0");
    }

    #[test]
    fn exact_and_float_evaluation_agree() {
        let s = Shape::square(2);
        let p = &(&x(s, 1, 1) * &x(s, 2, 2)).scale(&GaussRat::from_ratio(3, 7)) - &x(s, 1, 2).pow(3);
        let exact: Vec<GaussRat> = (0..4).map(|k| GaussRat::from_parts((k + 1, 3), (1 - k, 2))).collect();
        let float: Vec<Complex64> = exact.iter().map(GaussRat::to_complex).collect();
        let e = p.eval_exact(&exact).to_complex();
        let f = p.eval_complex(&float);
        assert!((e - f).norm() < 1e-14);
    }
}
