//! Exact polynomial and rational-function arithmetic in the coordinates
//! `x_{ij}` of `M_{m,n}`, numeric points, the expression parser and the
//! canonical JSON form.

mod compiled;
mod func;
mod gaussrat;
mod json;
mod parse;
mod point;
mod poly;
mod rational;
mod shape;

pub use compiled::{CompiledFunc, CompiledPoly};
pub use func::Func;
pub use gaussrat::GaussRat;
pub use json::{func_from_json, func_to_json, poly_from_json, poly_to_json};
pub use parse::{parse_constant, parse_expr};
pub use point::MatrixPoint;
pub use poly::{poly_arith, ArithOp, Poly};
pub use rational::{denominator_vanishes, RationalFn, DENOMINATOR_TOL};
pub use shape::{Monomial, Shape};

use num_complex::Complex64;

use crate::error::Result;

/// Evaluates a polynomial or rational function at `X`.
pub fn evaluate(f: &Func, x: &MatrixPoint) -> Result<Complex64> {
    f.evaluate(x)
}
