use serde::{Deserialize, Serialize};

use super::bracket::{quadratic_poly, sign, GeneratorBrackets, MatrixPoisson};
use crate::error::{Error, Result};
use crate::polyalg::{GaussRat, Monomial, Poly, Shape};

/// Row and column index sets `(I, J)` of a minor `Δ_{I,J}`, strictly
/// increasing, 1-based, of equal size `r ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MinorSpec {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl MinorSpec {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        let spec = MinorSpec { rows, cols };
        spec.validate()?;
        Ok(spec)
    }

    /// Contiguous index ranges `[r0, r0+r) × [c0, c0+r)`.
    pub fn block(r0: usize, c0: usize, size: usize) -> Self {
        MinorSpec { rows: (r0..r0 + size).collect(), cols: (c0..c0 + size).collect() }
    }

    fn validate(&self) -> Result<()> {
        if self.rows.is_empty() || self.rows.len() != self.cols.len() {
            return Err(Error::InvalidMinor(format!("{} rows vs {} columns", self.rows.len(), self.cols.len())));
        }
        let increasing = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]) && v[0] >= 1;
        if !increasing(&self.rows) || !increasing(&self.cols) {
            return Err(Error::InvalidMinor("indices must be strictly increasing and 1-based".into()));
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn check(&self, shape: Shape) -> Result<()> {
        self.validate()?;
        let (r, c) = (*self.rows.last().unwrap(), *self.cols.last().unwrap());
        if r > shape.rows || c > shape.cols {
            return Err(Error::CoordOutOfRange { row: r, col: c, rows: shape.rows, cols: shape.cols });
        }
        Ok(())
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.rows.contains(&row) && self.cols.contains(&col)
    }

    /// All minors of a shape with size in `sizes`.
    pub fn all(shape: Shape, sizes: impl IntoIterator<Item = usize>) -> Vec<MinorSpec> {
        let mut out = Vec::new();
        for r in sizes {
            for rows in subsets(shape.rows, r) {
                for cols in subsets(shape.cols, r) {
                    out.push(MinorSpec { rows: rows.clone(), cols });
                }
            }
        }
        out
    }
}

/// Human-readable `Δ_{I|J}` notation.
impl std::fmt::Display for MinorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        write!(f, "Δ_{{{}|{}}}", join(&self.rows), join(&self.cols))
    }
}

/// Increasing `r`-subsets of `[1, n]` in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            if n - v + 1 < r - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r <= n {
        rec(1, n, r, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

/// Determinant of the submatrix on `rows × cols` by cofactor expansion along
/// the first listed row. Rows and columns are taken in the given order.
fn det_expand(shape: Shape, rows: &[usize], cols: &[usize]) -> Poly {
    if rows.is_empty() {
        return Poly::one(shape);
    }
    let r0 = rows[0];
    let mut acc = Poly::zero(shape);
    for (c, &col) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, &v)| v).collect();
        let sub = det_expand(shape, &rows[1..], &rest);
        let s = if c % 2 == 0 { 1 } else { -1 };
        acc = &acc + &sub.mul_monomial(&Monomial::var(shape.idx(r0, col)), &GaussRat::from_int(s));
    }
    acc
}

/// The minor `Δ_{I,J}` as an exact polynomial.
pub fn minor(spec: &MinorSpec, shape: Shape) -> Result<Poly> {
    spec.check(shape)?;
    Ok(det_expand(shape, &spec.rows, &spec.cols))
}

/// Determinant of the submatrix with rows and columns in the listed order.
/// Repeated indices give 0; unsorted lists pick up the sign of the sorting
/// permutation.
pub fn ordered_minor(shape: Shape, rows: &[usize], cols: &[usize]) -> Result<Poly> {
    if rows.len() != cols.len() {
        return Err(Error::InvalidMinor("row and column lists differ in length".into()));
    }
    for &i in rows {
        shape.check(i, 1)?;
    }
    for &j in cols {
        shape.check(1, j)?;
    }
    let (rs, sr) = sort_with_sign(rows);
    let (cs, sc) = sort_with_sign(cols);
    if sr == 0 || sc == 0 {
        return Ok(Poly::zero(shape));
    }
    let p = det_expand(shape, &rs, &cs);
    Ok(if sr * sc < 0 { -&p } else { p })
}

/// Sorted copy and the sign of the sorting permutation (0 on repeats).
pub(crate) fn sort_with_sign(v: &[usize]) -> (Vec<usize>, i64) {
    let mut s = v.to_vec();
    let mut sign = 1;
    for i in 0..s.len() {
        for j in 0..s.len() - 1 - i {
            if s[j] > s[j + 1] {
                s.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if s.windows(2).any(|w| w[0] == w[1]) {
        sign = 0;
    }
    (s, sign)
}

/// `{x_kl, Δ_{I,J}}` by the closed minor-bracket formula
/// `Σ_q sign(i_q−k) x_{i_q l} Δ_{I(i_q→k),J} + Σ_q sign(j_q−l) x_{k j_q} Δ_{I,J(j_q→l)}`,
/// where the replaced index keeps its position.
pub fn minor_bracket(shape: Shape, (k, l): (usize, usize), spec: &MinorSpec) -> Result<Poly> {
    shape.check(k, l)?;
    spec.check(shape)?;
    let mut acc = Poly::zero(shape);
    for (q, &iq) in spec.rows.iter().enumerate() {
        let s = sign(iq as i64 - k as i64);
        if s == 0 {
            continue;
        }
        let mut rows = spec.rows.clone();
        rows[q] = k;
        let d = ordered_minor(shape, &rows, &spec.cols)?;
        acc = &acc + &d.mul_monomial(&Monomial::var(shape.idx(iq, l)), &GaussRat::from_int(s));
    }
    for (q, &jq) in spec.cols.iter().enumerate() {
        let s = sign(jq as i64 - l as i64);
        if s == 0 {
            continue;
        }
        let mut cols = spec.cols.clone();
        cols[q] = l;
        let d = ordered_minor(shape, &spec.rows, &cols)?;
        acc = &acc + &d.mul_monomial(&Monomial::var(shape.idx(k, jq)), &GaussRat::from_int(s));
    }
    Ok(acc)
}

/// `sign(I − k)`: 0 if `k ∈ I`, +1 if `k` is below all of `I`, −1 if above;
/// undefined when `k` falls strictly between elements of `I`.
pub fn set_sign(set: &[usize], k: usize) -> Option<i64> {
    if set.contains(&k) {
        Some(0)
    } else if k < set[0] {
        Some(1)
    } else if k > *set.last().unwrap() {
        Some(-1)
    } else {
        None
    }
}

/// Closed form `(sign(I−k) + sign(J−l)) x_kl Δ_{I,J}` of `{x_kl, Δ_{I,J}}`
/// when both signs are defined and their sum has modulus at most 1;
/// `Ok(None)` when not applicable.
pub fn sign_form_bracket(shape: Shape, (k, l): (usize, usize), spec: &MinorSpec) -> Result<Option<Poly>> {
    shape.check(k, l)?;
    let d = minor(spec, shape)?;
    let (Some(a), Some(b)) = (set_sign(&spec.rows, k), set_sign(&spec.cols, l)) else {
        return Ok(None);
    };
    if (a + b).abs() > 1 {
        return Ok(None);
    }
    Ok(Some(d.mul_monomial(&Monomial::var(shape.idx(k, l)), &GaussRat::from_int(a + b))))
}

/// Exact generic bracket `{x_kl, Δ_{I,J}}` computed through the generator
/// table, for cross-checking [`minor_bracket`].
pub fn generic_minor_bracket(shape: Shape, (k, l): (usize, usize), spec: &MinorSpec) -> Result<Poly> {
    let a = shape.index(k, l)?;
    let d = minor(spec, shape)?;
    let mut acc = Poly::zero(shape);
    for b in d.variables() {
        let q = MatrixPoisson.generator_bracket(shape, a, b);
        if q.coeff != 0 {
            acc = &acc + &(&quadratic_poly(shape, q) * &d.derivative(b));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::bracket_polys;
    use crate::polyalg::{parse_expr, Func};

    #[test]
    fn small_minors() {
        let s = Shape::square(3);
        assert_eq!(minor(&MinorSpec::new(vec![1], vec![1]).unwrap(), s).unwrap(), Poly::var(s, 1, 1).unwrap());
        let d2 = minor(&MinorSpec::block(1, 1, 2), s).unwrap();
        assert_eq!(Func::Poly(d2), parse_expr("x[1][1]*x[2][2] - x[1][2]*x[2][1]", s).unwrap());
        let d3 = minor(&MinorSpec::block(1, 1, 3), s).unwrap();
        assert_eq!(d3.num_terms(), 6);
        assert!(d3.terms().all(|(_, c)| c == &GaussRat::from_int(1) || c == &GaussRat::from_int(-1)));
    }

    #[test]
    fn invalid_specs() {
        assert!(MinorSpec::new(vec![2, 1], vec![1, 2]).is_err());
        assert!(MinorSpec::new(vec![1], vec![1, 2]).is_err());
        assert!(MinorSpec::new(vec![], vec![]).is_err());
        assert!(minor(&MinorSpec::new(vec![4], vec![1]).unwrap(), Shape::square(3)).is_err());
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(3, 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(subsets(4, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
        assert_eq!(MinorSpec::all(Shape::new(3, 3), 1..=3).len(), 19);
    }

    #[test]
    fn formula_example_row_three_col_one() {
        let s = Shape::square(3);
        let spec = MinorSpec::new(vec![1], vec![2]).unwrap();
        let got = minor_bracket(s, (3, 1), &spec).unwrap();
        let want = bracket_polys(&Poly::var(s, 3, 1).unwrap(), &Poly::var(s, 1, 2).unwrap());
        assert_eq!(got, want);
        assert!(got.is_zero());
    }

    #[test]
    fn formula_matches_generic_on_rectangular_two_minors() {
        let s = Shape::new(3, 4);
        let spec = MinorSpec::new(vec![1, 3], vec![2, 4]).unwrap();
        for (k, l) in s.coords().collect::<Vec<_>>() {
            assert_eq!(
                minor_bracket(s, (k, l), &spec).unwrap(),
                generic_minor_bracket(s, (k, l), &spec).unwrap(),
                "({k},{l})"
            );
        }
    }

    #[test]
    fn sign_form_cases() {
        let s = Shape::square(3);
        let spec = MinorSpec::new(vec![1, 2], vec![1, 2]).unwrap();
        assert!(sign_form_bracket(s, (1, 2), &spec).unwrap().unwrap().is_zero());
        let d = minor(&spec, s).unwrap();
        let below = sign_form_bracket(s, (3, 1), &spec).unwrap().unwrap();
        assert_eq!(below, -&(&Poly::var(s, 3, 1).unwrap() * &d));
        let gap = MinorSpec::new(vec![1, 3], vec![1, 2]).unwrap();
        assert!(sign_form_bracket(s, (2, 1), &gap).unwrap().is_none());
        // both signs −1: sum −2, not covered
        assert!(sign_form_bracket(s, (3, 3), &spec).unwrap().is_none());
    }

    #[test]
    fn sort_sign() {
        assert_eq!(sort_with_sign(&[3, 1, 2]), (vec![1, 2, 3], 1));
        assert_eq!(sort_with_sign(&[2, 1]), (vec![1, 2], -1));
        assert_eq!(sort_with_sign(&[2, 2]).1, 0);
    }
}
