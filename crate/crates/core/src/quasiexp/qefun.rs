use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Exponents closer than this are merged.
pub const EXPONENT_MERGE_TOL: f64 = 1e-9;
/// Coefficients below this fraction of the largest one are dropped.
pub const COEFF_DROP_REL: f64 = 1e-13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `p(t) e^{αt}` with `coeffs` the ascending coefficients of `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct QETerm {
    pub alpha: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl QETerm {
    /// Degree of the polynomial factor (`None` when zero).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != ZERO)
    }

    pub fn is_polynomial(&self) -> bool {
        self.alpha == ZERO
    }

    fn poly_at(&self, t: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * t + c)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.poly_at(t) * (self.alpha * t).exp()
    }
}

/// A finite sum of [`QETerm`]s with pairwise distinct exponents, sorted by
/// exponent (real part, then imaginary part).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QEFun {
    terms: Vec<QETerm>,
}

fn cmp_alpha(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_into(acc: &mut Vec<Complex64>, b: &[Complex64]) {
    if acc.len() < b.len() {
        acc.resize(b.len(), ZERO);
    }
    for (a, y) in acc.iter_mut().zip(b) {
        *a += y;
    }
}

fn poly_derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

impl QEFun {
    pub fn zero() -> Self {
        QEFun { terms: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::term(ZERO, vec![c])
    }

    /// `e^{αt}`.
    pub fn exp(alpha: Complex64) -> Self {
        Self::term(alpha, vec![ONE])
    }

    /// The polynomial with ascending coefficients `coeffs`.
    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self::term(ZERO, coeffs)
    }

    pub fn term(alpha: Complex64, coeffs: Vec<Complex64>) -> Self {
        Self::from_terms(vec![QETerm { alpha, coeffs }])
    }

    pub fn from_terms(terms: Vec<QETerm>) -> Self {
        let mut f = QEFun { terms };
        f.simplify();
        f
    }

    pub fn terms(&self) -> &[QETerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant value when the function is constant in `t`.
    pub fn as_constant(&self) -> Option<Complex64> {
        match self.terms.as_slice() {
            [] => Some(ZERO),
            [t] if t.is_polynomial() && t.coeffs.len() == 1 => Some(t.coeffs[0]),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Degree of the purely polynomial part (`None` when absent).
    pub fn polynomial_degree(&self) -> Option<usize> {
        self.terms.iter().find(|t| t.is_polynomial()).and_then(QETerm::degree)
    }

    /// Largest coefficient degree among terms with nonzero exponent.
    pub fn exponential_degree(&self) -> Option<usize> {
        self.terms.iter().filter(|t| !t.is_polynomial()).filter_map(QETerm::degree).max()
    }

    /// Canonical form: exponents within [`EXPONENT_MERGE_TOL`] merged (near-zero
    /// ones snapped to 0), negligible coefficients dropped, empty terms removed.
    pub fn simplify(&mut self) {
        let mut terms = std::mem::take(&mut self.terms);
        for t in &mut terms {
            if t.alpha.norm() < EXPONENT_MERGE_TOL {
                t.alpha = ZERO;
            }
        }
        terms.sort_by(|a, b| cmp_alpha(&a.alpha, &b.alpha));
        let mut merged: Vec<QETerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.iter_mut().find(|m| (m.alpha - t.alpha).norm() < EXPONENT_MERGE_TOL) {
                Some(m) => poly_add_into(&mut m.coeffs, &t.coeffs),
                None => merged.push(t),
            }
        }
        let max = merged.iter().flat_map(|t| &t.coeffs).map(|c| c.norm()).fold(0.0, f64::max);
        let cut = COEFF_DROP_REL * max;
        for t in &mut merged {
            for c in &mut t.coeffs {
                if c.norm() <= cut {
                    *c = ZERO;
                }
            }
            let len = t.degree().map_or(0, |d| d + 1);
            t.coeffs.truncate(len);
        }
        merged.retain(|t| !t.coeffs.is_empty());
        merged.sort_by(|a, b| cmp_alpha(&a.alpha, &b.alpha));
        self.terms = merged;
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }

    /// Term-by-term evaluation with explicit powers, as a reference.
    pub fn eval_naive(&self, t: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for term in &self.terms {
            let e = (term.alpha * t).exp();
            for (k, c) in term.coeffs.iter().enumerate() {
                acc += c * t.powu(k as u32) * e;
            }
        }
        acc
    }

    pub fn scale(&self, c: Complex64) -> QEFun {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| QETerm { alpha: t.alpha, coeffs: t.coeffs.iter().map(|x| x * c).collect() })
                .collect(),
        )
    }

    /// `(p e^{αt})' = (p' + αp) e^{αt}`.
    pub fn derivative(&self) -> QEFun {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| {
                    let mut d = poly_derivative(&t.coeffs);
                    let ap: Vec<Complex64> = t.coeffs.iter().map(|c| c * t.alpha).collect();
                    poly_add_into(&mut d, &ap);
                    QETerm { alpha: t.alpha, coeffs: d }
                })
                .collect(),
        )
    }

    /// `F(t) = ∫_0^t f`. For `α ≠ 0`, `∫ p e^{αs} = q e^{αs}` with
    /// `q = Σ_k (−1)^k p^{(k)} / α^{k+1}`.
    pub fn antiderivative(&self) -> QEFun {
        let mut out = Vec::with_capacity(self.terms.len() + 1);
        let mut constant = ZERO;
        for t in &self.terms {
            if t.is_polynomial() {
                let mut c = vec![ZERO];
                c.extend(t.coeffs.iter().enumerate().map(|(k, x)| x / (k + 1) as f64));
                out.push(QETerm { alpha: ZERO, coeffs: c });
            } else {
                let mut q = vec![ZERO; t.coeffs.len()];
                let mut deriv = t.coeffs.clone();
                let mut factor = ONE / t.alpha;
                while !deriv.is_empty() {
                    poly_add_into(&mut q, &deriv.iter().map(|c| c * factor).collect::<Vec<_>>());
                    deriv = poly_derivative(&deriv);
                    factor = -factor / t.alpha;
                }
                constant -= q[0];
                out.push(QETerm { alpha: t.alpha, coeffs: q });
            }
        }
        out.push(QETerm { alpha: ZERO, coeffs: vec![constant] });
        Self::from_terms(out)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|t| {
                    json!({
                        "alpha": [t.alpha.re, t.alpha.im],
                        "poly": t.coeffs.iter().map(|c| json!([c.re, c.im])).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad =
            || Error::Invalid("quasi-exponential JSON must be [{\"alpha\":[re,im],\"poly\":[[re,im],...]}]".into());
        let pair = |v: &Value| -> Result<Complex64> {
            match v.as_array().map(|a| a.as_slice()) {
                Some([re, im]) => Ok(Complex64::new(re.as_f64().ok_or_else(bad)?, im.as_f64().ok_or_else(bad)?)),
                _ => Err(bad()),
            }
        };
        let terms = v
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|t| {
                let alpha = pair(t.get("alpha").ok_or_else(bad)?)?;
                let coeffs =
                    t.get("poly").and_then(Value::as_array).ok_or_else(bad)?.iter().map(pair).collect::<Result<_>>()?;
                Ok(QETerm { alpha, coeffs })
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_terms(terms))
    }
}

impl std::fmt::Display for QEFun {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let p: Vec<String> = t
                    .coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != ZERO)
                    .map(|(k, c)| match k {
                        0 => format!("({c})"),
                        1 => format!("({c})t"),
                        _ => format!("({c})t^{k}"),
                    })
                    .collect();
                if t.is_polynomial() {
                    p.join(" + ")
                } else {
                    format!("[{}]exp(({})t)", p.join(" + "), t.alpha)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add<&QEFun> for &QEFun {
    type Output = QEFun;
    fn add(self, o: &QEFun) -> QEFun {
        QEFun::from_terms(self.terms.iter().chain(&o.terms).cloned().collect())
    }
}

impl Add<&QEFun> for QEFun {
    type Output = QEFun;
    fn add(mut self, o: &QEFun) -> QEFun {
        self.terms.extend(o.terms.iter().cloned());
        self.simplify();
        self
    }
}

impl Neg for &QEFun {
    type Output = QEFun;
    fn neg(self) -> QEFun {
        self.scale(-ONE)
    }
}

impl Sub<&QEFun> for &QEFun {
    type Output = QEFun;
    fn sub(self, o: &QEFun) -> QEFun {
        self + &(-o)
    }
}

impl Mul<&QEFun> for &QEFun {
    type Output = QEFun;
    fn mul(self, o: &QEFun) -> QEFun {
        let mut out = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                out.push(QETerm { alpha: a.alpha + b.alpha, coeffs: poly_mul(&a.coeffs, &b.coeffs) });
            }
        }
        QEFun::from_terms(out)
    }
}

impl Mul<&QEFun> for QEFun {
    type Output = QEFun;
    fn mul(self, o: &QEFun) -> QEFun {
        &self * o
    }
}

/// Sum or product of two quasi-exponential functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QeOp {
    Add,
    Mul,
}

pub fn qe_arith(a: &QEFun, b: &QEFun, op: QeOp) -> QEFun {
    match op {
        QeOp::Add => a + b,
        QeOp::Mul => a * b,
    }
}

pub fn qe_antiderivative(f: &QEFun) -> QEFun {
    f.antiderivative()
}
