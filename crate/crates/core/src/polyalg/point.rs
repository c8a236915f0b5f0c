use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde_json::Value;

use super::gaussrat::GaussRat;
use super::shape::Shape;
use crate::error::{Error, Result};

/// A point `X ∈ M_{m,n}`: complex entries in row-major order, optionally
/// shadowed by exact Gaussian-rational entries.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoint {
    shape: Shape,
    entries: Vec<Complex64>,
    exact: Option<Vec<GaussRat>>,
}

impl MatrixPoint {
    pub fn new(shape: Shape, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != shape.len() {
            return Err(Error::Invalid(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                shape.rows,
                shape.cols
            )));
        }
        Ok(MatrixPoint { shape, entries, exact: None })
    }

    pub fn from_exact(shape: Shape, exact: Vec<GaussRat>) -> Result<Self> {
        let entries = exact.iter().map(GaussRat::to_complex).collect();
        let mut p = MatrixPoint::new(shape, entries)?;
        p.exact = Some(exact);
        Ok(p)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("ragged matrix rows".into()));
        }
        MatrixPoint::new(Shape::new(m, n), rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)).collect()).collect();
        MatrixPoint::from_rows(&rows)
    }

    pub fn zeros(shape: Shape) -> Self {
        MatrixPoint { shape, entries: vec![Complex64::new(0.0, 0.0); shape.len()], exact: None }
    }

    pub fn identity(n: usize) -> Self {
        let ex = (0..n * n).map(|k| GaussRat::from_int((k / n == k % n) as i64)).collect();
        MatrixPoint::from_exact(Shape::square(n), ex).expect("square shape")
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn exact(&self) -> Option<&[GaussRat]> {
        self.exact.as_deref()
    }

    /// Entry `x_{ij}` (1-based).
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.entries[self.shape.idx(row, col)]
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise deviation relative to the scale of `reference`:
    /// `max_ij |a_ij − b_ij| / max(1, max_ij |b_ij|)`.
    pub fn relative_deviation(&self, reference: &MatrixPoint) -> f64 {
        let scale = reference.max_abs().max(1.0);
        self.entries.iter().zip(&reference.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale
    }

    /// Uniform sample from the complex unit square `[0,1) + i[0,1)`.
    pub fn random(shape: Shape, rng: &mut impl Rng) -> Self {
        let entries = (0..shape.len()).map(|_| Complex64::new(rng.random::<f64>(), rng.random::<f64>())).collect();
        MatrixPoint { shape, entries, exact: None }
    }

    /// Random exact point with small Gaussian-rational entries.
    pub fn random_exact(shape: Shape, rng: &mut impl Rng) -> Self {
        let ex = (0..shape.len())
            .map(|_| {
                GaussRat::from_parts(
                    (rng.random_range(-9..=9), rng.random_range(1..=5)),
                    (rng.random_range(-9..=9), rng.random_range(1..=5)),
                )
            })
            .collect();
        MatrixPoint::from_exact(shape, ex).expect("matching length")
    }

    /// JSON: array of rows; entries are `[re, im]` pairs, or exact strings
    /// such as `"1/2+3i/4"` when the point carries exact entries.
    pub fn to_json(&self) -> Value {
        let rows = (1..=self.shape.rows)
            .map(|i| {
                Value::Array(
                    (1..=self.shape.cols)
                        .map(|j| {
                            let k = self.shape.idx(i, j);
                            match &self.exact {
                                Some(ex) => Value::String(ex[k].to_string()),
                                None => serde_json::json!([self.entries[k].re, self.entries[k].im]),
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        Value::Array(rows)
    }

    /// Parses the [`MatrixPoint::to_json`] form. Entries may also be plain
    /// numbers. The point is exact iff every entry is an exact string or an
    /// integer.
    pub fn from_json(v: &Value) -> Result<Self> {
        let rows = v.as_array().ok_or_else(|| Error::Invalid("matrix must be a JSON array of rows".into()))?;
        let m = rows.len();
        let mut n = None;
        let mut floats = Vec::new();
        let mut exact: Option<Vec<GaussRat>> = Some(Vec::new());
        for row in rows {
            let row = row.as_array().ok_or_else(|| Error::Invalid("row must be an array".into()))?;
            if *n.get_or_insert(row.len()) != row.len() {
                return Err(Error::Invalid("ragged matrix rows".into()));
            }
            for e in row {
                let (z, ex) = parse_entry(e)?;
                floats.push(z);
                match (ex, exact.as_mut()) {
                    (Some(q), Some(list)) => list.push(q),
                    _ => exact = None,
                }
            }
        }
        let shape = Shape::new(m, n.unwrap_or(0));
        match exact {
            Some(ex) if !ex.is_empty() => MatrixPoint::from_exact(shape, ex),
            _ => MatrixPoint::new(shape, floats),
        }
    }
}

fn parse_entry(e: &Value) -> Result<(Complex64, Option<GaussRat>)> {
    match e {
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                return Ok((Complex64::new(i as f64, 0.0), Some(GaussRat::from_int(i))));
            }
            let f = num.as_f64().ok_or_else(|| Error::Invalid("bad number".into()))?;
            Ok((Complex64::new(f, 0.0), None))
        }
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or_else(|| Error::Invalid("bad real part".into()))?;
            let im = pair[1].as_f64().ok_or_else(|| Error::Invalid("bad imaginary part".into()))?;
            Ok((Complex64::new(re, im), None))
        }
        Value::String(s) => {
            let q = super::parse::parse_constant(s)?;
            Ok((q.to_complex(), Some(q)))
        }
        _ => Err(Error::Invalid(format!("unsupported matrix entry {e}"))),
    }
}

impl fmt::Display for MatrixPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.shape.rows {
            let row: Vec<String> = (1..=self.shape.cols)
                .map(|j| {
                    let z = self.at(i, j);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
