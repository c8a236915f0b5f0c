use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensions `(m, n)` of the ambient matrix space `M_{m,n}`.
///
/// Coordinates are 1-based `(i, j)`; the flat variable index is row-major,
/// `(i-1)·n + (j-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
}

impl Shape {
    pub const fn new(rows: usize, cols: usize) -> Self {
        Shape { rows, cols }
    }

    pub const fn square(n: usize) -> Self {
        Shape { rows: n, cols: n }
    }

    pub const fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check(&self, row: usize, col: usize) -> Result<()> {
        if row == 0 || col == 0 || row > self.rows || col > self.cols {
            return Err(Error::CoordOutOfRange { row, col, rows: self.rows, cols: self.cols });
        }
        Ok(())
    }

    pub fn index(&self, row: usize, col: usize) -> Result<usize> {
        self.check(row, col)?;
        Ok(self.idx(row, col))
    }

    /// Unchecked flat index.
    #[inline]
    pub(crate) fn idx(&self, row: usize, col: usize) -> usize {
        (row - 1) * self.cols + (col - 1)
    }

    /// 1-based coordinate of a flat index.
    #[inline]
    pub fn coord(&self, idx: usize) -> (usize, usize) {
        (idx / self.cols + 1, idx % self.cols + 1)
    }

    pub fn same(&self, other: &Shape) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch { left: (self.rows, self.cols), right: (other.rows, other.cols) });
        }
        Ok(())
    }

    pub fn coords(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).map(|k| self.coord(k))
    }
}

impl From<(usize, usize)> for Shape {
    fn from((rows, cols): (usize, usize)) -> Self {
        Shape { rows, cols }
    }
}

/// A monomial `Π x_v^{e_v}` stored sparsely as `(variable, exponent)` pairs
/// sorted by variable, with no zero exponents.
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// of the earliest (row-major) variable where the two monomials differ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(u16, u16)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: usize) -> Self {
        Monomial(vec![(v as u16, 1)])
    }

    /// Builds from arbitrary `(variable, exponent)` pairs, merging repeats and
    /// dropping zero exponents.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut v: Vec<(u16, u16)> = Vec::new();
        for (var, e) in pairs {
            if e == 0 {
                continue;
            }
            match v.iter_mut().find(|(x, _)| *x as usize == var) {
                Some(slot) => slot.1 += e as u16,
                None => v.push((var as u16, e as u16)),
            }
        }
        v.sort_unstable();
        Monomial(v)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e as u32).sum()
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0.iter().find(|(v, _)| *v as usize == var).map_or(0, |&(_, e)| e as u32)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|&(v, e)| (v as usize, e as u32))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Divides out one power of `var`; returns the former exponent and the
    /// quotient, or `None` if `var` is absent.
    pub fn derive(&self, var: usize) -> Option<(u32, Monomial)> {
        let pos = self.0.iter().position(|(v, _)| *v as usize == var)?;
        let e = self.0[pos].1;
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(pos);
        } else {
            out[pos].1 -= 1;
        }
        Some((e as u32, Monomial(out)))
    }

    /// Exponent-wise minimum (monomial gcd).
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial::from_pairs(self.iter().filter_map(|(v, e)| {
            let f = other.exponent(v);
            (f > 0).then_some((v, e.min(f)))
        }))
    }

    /// Exact quotient; `None` if `other` does not divide `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut pairs = Vec::new();
        for (v, e) in self.iter() {
            let f = other.exponent(v);
            if f > e {
                return None;
            }
            pairs.push((v, e - f));
        }
        if other.iter().any(|(v, _)| self.exponent(v) == 0) {
            return None;
        }
        Some(Monomial::from_pairs(pairs))
    }

    /// Re-indexes variables; `None` from `f` means the variable is sent to 0,
    /// which kills the monomial.
    pub fn remap(&self, f: impl Fn(usize) -> Option<usize>) -> Option<Monomial> {
        let mut pairs = Vec::with_capacity(self.0.len());
        for (v, e) in self.iter() {
            pairs.push((f(v)?, e));
        }
        Some(Monomial::from_pairs(pairs))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            // Earliest variable with differing exponent decides; a variable
            // present only in one monomial counts as exponent 0 in the other.
            let (a, b) = (&self.0, &other.0);
            let (mut i, mut j) = (0, 0);
            loop {
                match (a.get(i), b.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => {
                            if ea != eb {
                                return ea.cmp(&eb);
                            }
                            i += 1;
                            j += 1;
                        }
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_indexing_round_trips() {
        let s = Shape::new(3, 4);
        for k in 0..s.len() {
            let (i, j) = s.coord(k);
            assert_eq!(s.index(i, j).unwrap(), k);
        }
        assert!(s.index(0, 1).is_err());
        assert!(s.index(3, 5).is_err());
    }

    #[test]
    fn graded_lex_order() {
        let x11 = Monomial::var(0);
        let x12 = Monomial::var(1);
        assert!(x11 > x12);
        assert!(x11.mul(&x11) > x11);
        assert!(x12.mul(&x12) > x11);
        assert!(x11.mul(&x12) < x11.mul(&x11));
        assert_eq!(
            Monomial::from_pairs([(1, 1), (0, 2), (1, 1)]),
            Monomial::var(0).mul(&Monomial::var(0)).mul(&x12).mul(&x12)
        );
    }

    #[test]
    fn division_and_gcd() {
        let a = Monomial::from_pairs([(0, 2), (3, 1)]);
        let b = Monomial::from_pairs([(0, 1), (2, 4)]);
        assert_eq!(a.gcd(&b), Monomial::var(0));
        assert_eq!(a.div(&Monomial::var(0)), Some(Monomial::from_pairs([(0, 1), (3, 1)])));
        assert_eq!(a.div(&b), None);
    }
}
