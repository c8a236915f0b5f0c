use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gz::GzSystem;
use crate::poisson::{bracket_polys, minor, minor_bracket, MinorSpec};
use crate::polyalg::{Func, MatrixPoint, Poly, Shape};
use crate::quasiexp::{putzer_exp, QEFun};

/// A flow written entrywise as quasi-exponential functions of complex time.
#[derive(Debug, Clone)]
pub struct ClosedFlow {
    pub shape: Shape,
    pub hamiltonian: String,
    pub h: Func,
    pub x0: MatrixPoint,
    pub entries: Vec<QEFun>,
}

impl ClosedFlow {
    pub fn entry(&self, i: usize, j: usize) -> &QEFun {
        &self.entries[(i - 1) * self.shape.cols + (j - 1)]
    }

    pub fn eval(&self, t: Complex64) -> MatrixPoint {
        MatrixPoint::new(self.shape, self.entries.iter().map(|e| e.eval(t)).collect()).expect("matching length")
    }

    /// Entrywise time derivative at `t`.
    pub fn velocity(&self, t: Complex64) -> MatrixPoint {
        MatrixPoint::new(self.shape, self.entries.iter().map(|e| e.derivative().eval(t)).collect())
            .expect("matching length")
    }

    /// Largest polynomial-part degree and largest exponential-coefficient
    /// degree over all entries.
    pub fn degrees(&self) -> (Option<usize>, Option<usize>) {
        let p = self.entries.iter().filter_map(QEFun::polynomial_degree).max();
        let e = self.entries.iter().filter_map(QEFun::exponential_degree).max();
        (p, e)
    }

    /// Composes `f` with the flow.
    pub fn compose(&self, f: &Poly) -> QEFun {
        substitute(f, &self.entries)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shape": [self.shape.rows, self.shape.cols],
            "hamiltonian": self.hamiltonian,
            "x0": self.x0.to_json(),
            "entries": self.shape.coords().zip(&self.entries).map(|((i, j), e)| json!({
                "row": i,
                "col": j,
                "qe": e.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn substitute(p: &Poly, vals: &[QEFun]) -> QEFun {
    p.eval_with(vals, |c| QEFun::constant(c.to_complex()), QEFun::zero())
}

fn closed_err(msg: String) -> Error {
    Error::ClosedForm(msg)
}

/// Closed-form flow of the minor `Δ_{I,J}` from `X0`.
///
/// Entries in `I × J` are constant. For a row `k ∉ I` the vector
/// `(x_kj)_{j∈J}` solves a linear system with constant matrix, and likewise
/// for a column `l ∉ J`. The remaining entries have a right-hand side built
/// from those and are integrated termwise.
pub fn minor_flow_closed(spec: &MinorSpec, x0: &MatrixPoint) -> Result<ClosedFlow> {
    let shape = x0.shape();
    let d = minor(spec, shape)?;
    let field: Vec<Poly> = shape.coords().map(|(k, l)| minor_bracket(shape, (k, l), spec)).collect::<Result<_>>()?;
    let in_rows = |k: usize| spec.rows.contains(&k);
    let in_cols = |l: usize| spec.cols.contains(&l);
    let constant: BTreeSet<usize> =
        shape.coords().filter(|&(k, l)| in_rows(k) && in_cols(l)).map(|(k, l)| shape.idx(k, l)).collect();
    let mut entries: Vec<Option<QEFun>> = vec![None; shape.len()];
    for &v in &constant {
        entries[v] = Some(QEFun::constant(x0.entries()[v]));
    }

    // linear groups: rows outside I over J, columns outside J over I
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in (1..=shape.rows).filter(|&k| !in_rows(k)) {
        groups.push(spec.cols.iter().map(|&j| shape.idx(k, j)).collect());
    }
    for l in (1..=shape.cols).filter(|&l| !in_cols(l)) {
        groups.push(spec.rows.iter().map(|&i| shape.idx(i, l)).collect());
    }
    for g in &groups {
        let sol = solve_linear_group(g, &field, &constant, x0)?;
        for (&v, e) in g.iter().zip(sol) {
            entries[v] = Some(e);
        }
    }

    let resolved: Vec<QEFun> = entries.iter().map(|e| e.clone().unwrap_or_default()).collect();
    for (k, l) in shape.coords().filter(|&(k, l)| !in_rows(k) && !in_cols(l)) {
        let v = shape.idx(k, l);
        if let Some(bad) = field[v].variables().into_iter().find(|&u| entries[u].is_none()) {
            return Err(closed_err(format!("entry {:?} depends on unresolved {:?}", (k, l), shape.coord(bad))));
        }
        let rhs = substitute(&field[v], &resolved);
        entries[v] = Some(&rhs.antiderivative() + &QEFun::constant(x0.entries()[v]));
    }
    Ok(ClosedFlow {
        shape,
        hamiltonian: spec.to_string(),
        h: Func::Poly(d),
        x0: x0.clone(),
        entries: entries.into_iter().map(|e| e.expect("all entries resolved")).collect(),
    })
}

/// Solves `ẏ = C y` for the group `g` after checking that each right-hand
/// side is linear in the group with coefficients in constant entries only.
fn solve_linear_group(g: &[usize], field: &[Poly], constant: &BTreeSet<usize>, x0: &MatrixPoint) -> Result<Vec<QEFun>> {
    let r = g.len();
    let x = x0.entries();
    let mut c = DMatrix::<Complex64>::zeros(r, r);
    for (a, &va) in g.iter().enumerate() {
        for (m, _) in field[va].terms() {
            let in_group: Vec<(usize, u32)> = m.iter().filter(|(v, _)| g.contains(v)).collect();
            let outside_ok = m.iter().all(|(v, _)| g.contains(&v) || constant.contains(&v));
            if in_group.len() != 1 || in_group[0].1 != 1 || !outside_ok {
                return Err(closed_err(format!(
                    "right-hand side of group {g:?} is not linear with constant coefficients"
                )));
            }
        }
        for (b, &vb) in g.iter().enumerate() {
            c[(a, b)] = field[va].derivative(vb).eval_complex(x);
        }
    }
    let e = putzer_exp(&c)?;
    let init: Vec<QEFun> = g.iter().map(|&v| QEFun::constant(x[v])).collect();
    Ok(e.apply(&init))
}

/// Closed-form flow of family member `idx` of a Gelfand–Zeitlin type system.
///
/// Writing `h = N/D`, each entry obeys `ẋ = P/D²` with
/// `P = {x, N}D − N{x, D}`. Entries are resolved in passes: an entry is
/// solvable once `P = a·x + b` where `a` and `D` are constant along the flow
/// and `b` involves only resolved entries; then
/// `x(t) = e^{λt}(x(0) + ∫_0^t e^{−λs} b(s)/D² ds)` with `λ = a/D²`.
pub fn gz_flow_closed(sys: &GzSystem, idx: usize, x0: &MatrixPoint) -> Result<ClosedFlow> {
    let shape = sys.shape();
    shape.same(&x0.shape())?;
    let h = sys.hams.get(idx).ok_or_else(|| Error::Invalid(format!("no family member {idx}")))?;
    if let Some((label, value)) = sys.singular_locus().violation(x0.entries()) {
        return Err(Error::OnSingularLocus { label, value });
    }
    let flow = scalar_resolution_flow(h, x0)?;
    Ok(ClosedFlow { hamiltonian: sys.label(idx), ..flow })
}

/// Entry-by-entry resolution of the flow of `h` (see [`gz_flow_closed`]).
pub fn scalar_resolution_flow(h: &Func, x0: &MatrixPoint) -> Result<ClosedFlow> {
    let shape = x0.shape();
    let one = Poly::one(shape);
    let (n, d) = (h.numerator(), h.denominator().unwrap_or(&one));
    let x = x0.entries();
    let d_val = d.eval_complex(x);
    let d2 = d_val * d_val;
    let field: Vec<Poly> = (0..shape.len())
        .map(|v| {
            let xv = Poly::var(shape, shape.coord(v).0, shape.coord(v).1).expect("in range");
            if h.denominator().is_none() {
                bracket_polys(&xv, n)
            } else {
                &(&bracket_polys(&xv, n) * d) - &(n * &bracket_polys(&xv, d))
            }
        })
        .collect();
    let mut entries: Vec<Option<QEFun>> = vec![None; shape.len()];
    let mut progress = true;
    while progress && entries.iter().any(Option::is_none) {
        progress = false;
        for v in 0..shape.len() {
            if entries[v].is_some() {
                continue;
            }
            let p = &field[v];
            if p.is_zero() {
                entries[v] = Some(QEFun::constant(x[v]));
                progress = true;
                continue;
            }
            if p.degree_in(v) > 1 {
                return Err(closed_err(format!("entry {:?} enters its own field nonlinearly", shape.coord(v))));
            }
            let a = p.derivative(v);
            let b = p - &(&a * &Poly::var_idx(shape, v));
            let ready = |q: &Poly| q.variables().iter().all(|&u| entries[u].as_ref().is_some_and(QEFun::is_constant));
            let resolved = |q: &Poly| q.variables().iter().all(|&u| u != v && entries[u].is_some());
            if !(ready(&a) && ready(d) && resolved(&b)) {
                continue;
            }
            let vals: Vec<QEFun> = entries.iter().map(|e| e.clone().unwrap_or_default()).collect();
            let lambda = a.eval_complex(x) / d2;
            let beta = substitute(&b, &vals).scale(1.0 / d2);
            let inner = &QEFun::constant(x[v]) + &(&QEFun::exp(-lambda) * &beta).antiderivative();
            entries[v] = Some(&QEFun::exp(lambda) * &inner);
            progress = true;
        }
    }
    if let Some(v) = entries.iter().position(Option::is_none) {
        return Err(closed_err(format!("entry {:?} could not be resolved", shape.coord(v))));
    }
    Ok(ClosedFlow {
        shape,
        hamiltonian: h.to_string(),
        h: h.clone(),
        x0: x0.clone(),
        entries: entries.into_iter().map(Option::unwrap).collect(),
    })
}
