//! Projections and embeddings between matrix spaces, the Poisson center of
//! `M_n`, and the Gelfand–Zeitlin type family obtained by pulling center
//! generators back along a chain of projections.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::poisson::{
    bracket, bracket_polys, bracket_polys_with, minor, numeric_rank, numerically_commute, GeneratorBrackets,
    MatrixPoisson, MinorSpec,
};
use crate::polyalg::{denominator_vanishes, func_to_json, CompiledFunc, Func, MatrixPoint, Poly, RationalFn, Shape};

/// Largest `n` whose family is certified exactly.
pub const EXACT_CHECK_LIMIT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Project,
    Embed,
}

/// Projection `M_{m,n} → M_{|I|,|J|}` onto the `I × J` submatrix, or the
/// zero-padded embedding back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmatrixMap {
    pub ambient: Shape,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub direction: Direction,
}

impl SubmatrixMap {
    pub fn new(ambient: Shape, rows: Vec<usize>, cols: Vec<usize>, direction: Direction) -> Result<Self> {
        let ok = |v: &[usize], bound: usize| {
            !v.is_empty() && v[0] >= 1 && v.windows(2).all(|w| w[0] < w[1]) && *v.last().unwrap() <= bound
        };
        if !ok(&rows, ambient.rows) || !ok(&cols, ambient.cols) {
            return Err(Error::Invalid(format!("bad index sets {rows:?} × {cols:?} for {ambient:?}")));
        }
        Ok(SubmatrixMap { ambient, rows, cols, direction })
    }

    pub fn small(&self) -> Shape {
        Shape::new(self.rows.len(), self.cols.len())
    }

    pub fn domain(&self) -> Shape {
        match self.direction {
            Direction::Project => self.ambient,
            Direction::Embed => self.small(),
        }
    }

    pub fn codomain(&self) -> Shape {
        match self.direction {
            Direction::Project => self.small(),
            Direction::Embed => self.ambient,
        }
    }

    /// Ambient flat index of small coordinate `v`.
    fn lift(&self, v: usize) -> usize {
        let (p, q) = self.small().coord(v);
        self.ambient.idx(self.rows[p - 1], self.cols[q - 1])
    }

    /// Small flat index of ambient coordinate `v`, if it lies in `I × J`.
    fn lower(&self, v: usize) -> Option<usize> {
        let (i, j) = self.ambient.coord(v);
        let p = self.rows.iter().position(|&r| r == i)?;
        let q = self.cols.iter().position(|&c| c == j)?;
        Some(self.small().idx(p + 1, q + 1))
    }

    /// `f ↦ f ∘ map` for `f` on the codomain.
    pub fn pullback(&self, f: &Poly) -> Poly {
        match self.direction {
            Direction::Project => f.remap(self.ambient, |v| Some(self.lift(v))),
            Direction::Embed => f.remap(self.small(), |v| self.lower(v)),
        }
    }

    pub fn pullback_func(&self, f: &Func) -> Result<Func> {
        Ok(match f {
            Func::Poly(p) => Func::Poly(self.pullback(p)),
            Func::Rational(r) => Func::from_rational(RationalFn::new(self.pullback(r.num()), self.pullback(r.den()))?),
        })
    }
}

pub fn apply_map(map: &SubmatrixMap, x: &MatrixPoint) -> Result<MatrixPoint> {
    map.domain().same(&x.shape())?;
    let target = map.codomain();
    let v = x.entries();
    let entries = match map.direction {
        Direction::Project => (0..target.len()).map(|t| v[map.lift(t)]).collect(),
        Direction::Embed => {
            (0..target.len()).map(|t| map.lower(t).map_or(Complex64::new(0.0, 0.0), |s| v[s])).collect()
        }
    };
    MatrixPoint::new(target, entries)
}

/// First generator pair `(a, b)` of the codomain (flat indices) where
/// pullback fails to intertwine the brackets, with both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct MapWitness {
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub pulled_bracket: Poly,
    pub bracket_of_pullbacks: Poly,
}

/// Checks `{φ*y_a, φ*y_b} = φ*{y_a, y_b}` on all generator pairs.
pub fn verify_poisson_map(map: &SubmatrixMap) -> Option<MapWitness> {
    verify_poisson_map_with(&MatrixPoisson, map)
}

/// As [`verify_poisson_map`], with `rule` as the bracket on the domain.
pub fn verify_poisson_map_with(rule: &dyn GeneratorBrackets, map: &SubmatrixMap) -> Option<MapWitness> {
    let (dom, cod) = (map.domain(), map.codomain());
    let pairs: Vec<(usize, usize)> = (0..cod.len()).flat_map(|a| (0..cod.len()).map(move |b| (a, b))).collect();
    let results = Exec::default().map(&pairs, |&(a, b)| {
        let (ya, yb) = (Poly::var_idx(cod, a), Poly::var_idx(cod, b));
        let lhs = bracket_polys_with(rule, &map.pullback(&ya), &map.pullback(&yb));
        let rhs = map.pullback(&bracket_polys(&ya, &yb));
        debug_assert_eq!(lhs.shape(), dom);
        (lhs != rhs).then(|| MapWitness {
            a: cod.coord(a),
            b: cod.coord(b),
            pulled_bracket: rhs,
            bracket_of_pullbacks: lhs,
        })
    });
    results.into_iter().flatten().next()
}

fn upper_right(n: usize, k: usize) -> MinorSpec {
    MinorSpec::new((1..=k).collect(), (n - k + 1..=n).collect()).expect("valid block")
}

fn lower_left(n: usize, k: usize) -> MinorSpec {
    MinorSpec::new((n - k + 1..=n).collect(), (1..=k).collect()).expect("valid block")
}

/// Upper-right `k × k` minor of `M_n`.
pub fn upper_right_minor(n: usize, k: usize) -> Poly {
    minor(&upper_right(n, k), Shape::square(n)).expect("in range")
}

/// Lower-left `k × k` minor of `M_n`.
pub fn lower_left_minor(n: usize, k: usize) -> Poly {
    minor(&lower_left(n, k), Shape::square(n)).expect("in range")
}

/// The generators of the Poisson center of `M_n`: the ratios of the upper-right
/// `k`-minor to the lower-left `(n−k)`-minor for `k = 1 … n−1`, then `det`.
pub fn center_generators(n: usize) -> Vec<Func> {
    let mut out: Vec<Func> = (1..n)
        .map(|k| {
            Func::from_rational(
                RationalFn::new(upper_right_minor(n, k), lower_left_minor(n, n - k)).expect("nonzero denominator"),
            )
        })
        .collect();
    out.push(Func::Poly(upper_right_minor(n, n)));
    out
}

/// Checks that the center generators are affine in the first row with the
/// triangular pattern: generator `k` involves only `x_{1,n+1−d}` for `d ≤ k`,
/// with a nonzero coefficient on `x_{1,n+1−k}` at a random point.
pub fn center_triangularity(n: usize, seed: u64) -> Result<bool> {
    let s = Shape::square(n);
    let x = MatrixPoint::random(s, &mut ChaCha8Rng::seed_from_u64(seed));
    for (k0, g) in center_generators(n).iter().enumerate() {
        let k = k0 + 1;
        if g.denominator().is_some_and(|d| d.variables().iter().any(|&v| s.coord(v).0 == 1)) {
            return Ok(false);
        }
        let num = g.numerator();
        for v in num.variables() {
            let (i, j) = s.coord(v);
            if i == 1 && (num.degree_in(v) > 1 || n + 1 - j > k) {
                return Ok(false);
            }
        }
        let pivot = g.derivative(s.idx(1, n + 1 - k));
        if pivot.is_zero() || pivot.evaluate(&x)?.norm() < 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One chain step: delete a row and a column of the current square matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub drop_row: usize,
    pub drop_col: usize,
}

/// The principal chain dropping the last row and column at each step.
pub fn principal_chain(n: usize) -> Vec<ChainStep> {
    (2..=n).rev().map(|k| ChainStep { drop_row: k, drop_col: k }).collect()
}

pub fn chain_from_json(v: &Value) -> Result<Vec<ChainStep>> {
    serde_json::from_value(v.clone()).map_err(|e| Error::InvalidChain(e.to_string()))
}

/// How a family member arises: a level-`l` ratio with upper minor size `k`,
/// or the level-`l` determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GzRole {
    Ratio { level: usize, k: usize },
    Det { level: usize },
}

/// Pullbacks of the center generators of every level along a chain.
#[derive(Debug, Clone)]
pub struct GzSystem {
    pub n: usize,
    pub chain: Vec<ChainStep>,
    /// Original row and column indices kept at level `l` (index `l − 1`).
    pub levels: Vec<(Vec<usize>, Vec<usize>)>,
    pub roles: Vec<GzRole>,
    pub hams: Vec<Func>,
}

/// The family for `chain` (principal chain when `None`), ordered as the
/// ratios by level then `k`, followed by the determinants of levels `1 … n`.
pub fn gz_system(n: usize, chain: Option<&[ChainStep]>) -> Result<GzSystem> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let chain = chain.map_or_else(|| principal_chain(n), <[ChainStep]>::to_vec);
    if chain.len() != n - 1 {
        return Err(Error::InvalidChain(format!("{} steps for n = {n}, expected {}", chain.len(), n - 1)));
    }
    let mut levels = vec![((1..=n).collect::<Vec<_>>(), (1..=n).collect::<Vec<_>>())];
    for (s, step) in chain.iter().enumerate() {
        let k = n - s;
        if !(1..=k).contains(&step.drop_row) || !(1..=k).contains(&step.drop_col) {
            return Err(Error::InvalidChain(format!(
                "step {} drops ({}, {}) from a {k}×{k} matrix",
                s + 1,
                step.drop_row,
                step.drop_col
            )));
        }
        let (mut r, mut c) = levels.last().unwrap().clone();
        r.remove(step.drop_row - 1);
        c.remove(step.drop_col - 1);
        levels.push((r, c));
    }
    levels.reverse();
    let shape = Shape::square(n);
    let maps: Vec<SubmatrixMap> = levels
        .iter()
        .map(|(r, c)| SubmatrixMap::new(shape, r.clone(), c.clone(), Direction::Project))
        .collect::<Result<_>>()?;
    let mut roles = Vec::new();
    let mut hams = Vec::new();
    for l in 2..=n {
        let center = center_generators(l);
        for k in 1..l {
            roles.push(GzRole::Ratio { level: l, k });
            hams.push(maps[l - 1].pullback_func(&center[k - 1])?);
        }
    }
    for l in 1..=n {
        roles.push(GzRole::Det { level: l });
        hams.push(Func::Poly(maps[l - 1].pullback(&upper_right_minor(l, l))));
    }
    Ok(GzSystem { n, chain, levels, roles, hams })
}

impl GzSystem {
    pub fn shape(&self) -> Shape {
        Shape::square(self.n)
    }

    pub fn label(&self, idx: usize) -> String {
        match self.roles[idx] {
            GzRole::Ratio { level, k } => format!("Δ_{{{level};{k}}}/Δ'_{{{level};{}}}", level - k),
            GzRole::Det { level } => format!("Δ_{level}"),
        }
    }

    /// Index of the family member with the given role.
    pub fn index_of(&self, role: GzRole) -> Option<usize> {
        self.roles.iter().position(|&r| r == role)
    }

    /// Denominators of the family with their paired numerators.
    pub fn singular_locus(&self) -> SingularLocus {
        let mut entries = Vec::new();
        for (i, h) in self.hams.iter().enumerate() {
            if let Some(d) = h.denominator() {
                let GzRole::Ratio { level, k } = self.roles[i] else { continue };
                entries.push(LocusEntry {
                    label: format!("Δ'_{{{level};{}}}", level - k),
                    den: d.clone(),
                    num: h.numerator().clone(),
                });
            }
        }
        SingularLocus { n: self.n, entries }
    }

    /// Pairwise commutativity: exact for `n ≤ 3`, otherwise relative 1e-10
    /// at `points` seeded random points.
    pub fn check_commutativity(&self, exec: Exec, points: usize, seed: u64) -> Result<()> {
        let m = self.hams.len();
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
        let bad: Vec<bool> = if self.n <= EXACT_CHECK_LIMIT {
            exec.try_map(&pairs, |&(a, b)| bracket(&self.hams[a], &self.hams[b]).map(|br| !br.is_zero()))?
        } else {
            let shape = self.shape();
            let compiled: Vec<CompiledFunc> = self.hams.iter().map(CompiledFunc::new).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<MatrixPoint> = (0..points).map(|_| MatrixPoint::random(shape, &mut rng)).collect();
            exec.try_map(&pairs, |&(a, b)| {
                for x in &pts {
                    if !numerically_commute(&compiled[a], &compiled[b], shape, x.entries())? {
                        return Ok(true);
                    }
                }
                Ok(false)
            })?
        };
        match pairs.iter().zip(bad).find(|(_, b)| *b) {
            Some((&(a, b), _)) => Err(Error::CommutativityFailure { a: a + 1, b: b + 1 }),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "chain": self.chain,
            "hamiltonians": self.hams.iter().enumerate().map(|(i, h)| json!({
                "label": self.label(i),
                "role": self.roles[i],
                "func": func_to_json(h),
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct LocusEntry {
    pub label: String,
    pub den: Poly,
    pub num: Poly,
}

/// Zero set of the family's denominators.
#[derive(Debug, Clone)]
pub struct SingularLocus {
    pub n: usize,
    pub entries: Vec<LocusEntry>,
}

/// The locus of the principal family: all lower-left minors of the leading
/// `l × l` blocks, `1 ≤ k < l ≤ n`.
pub fn singular_locus(n: usize) -> SingularLocus {
    gz_system(n, None).expect("principal chain").singular_locus()
}

impl SingularLocus {
    /// `min |Δ'(X)|` over the denominators, with its label.
    pub fn distance(&self, x: &MatrixPoint) -> Option<(String, f64)> {
        self.entries
            .iter()
            .map(|e| (e.label.clone(), e.den.eval_complex(x.entries()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// First denominator that the scale-aware guard flags at `X`.
    pub fn violation(&self, x: &[Complex64]) -> Option<(String, f64)> {
        self.entries.iter().find_map(|e| {
            let d = e.den.eval_complex(x);
            denominator_vanishes(e.num.eval_complex(x), d).then(|| (e.label.clone(), d.norm()))
        })
    }

    pub fn contains(&self, x: &MatrixPoint) -> bool {
        self.violation(x.entries()).is_some()
    }
}

/// `min |Δ'(X)|` for the principal family (infinite when `n = 1`).
pub fn locus_distance(x: &MatrixPoint) -> f64 {
    singular_locus(x.shape().rows).distance(x).map_or(f64::INFINITY, |(_, d)| d)
}

/// All upper-right and lower-left corner minors of the square point `X` are
/// nonzero (guarded as in [`denominator_vanishes`] against the entry scale).
pub fn in_double_bruhat_cell(x: &MatrixPoint) -> bool {
    let n = x.shape().rows;
    let scale = Complex64::new(1.0 + x.max_abs().powi(n as i32), 0.0);
    (1..=n).all(|k| {
        [upper_right_minor(n, k), lower_left_minor(n, k)]
            .iter()
            .all(|m| !denominator_vanishes(scale, m.eval_complex(x.entries())))
    })
}

/// Numeric rank of the gradient matrix of `hams` at `X`.
pub fn jacobian_rank(hams: &[Func], x: &MatrixPoint) -> Result<usize> {
    if hams.is_empty() {
        return Ok(0);
    }
    let dim = x.shape().len();
    let rows = hams
        .iter()
        .map(|h| {
            h.shape().same(&x.shape())?;
            CompiledFunc::new(h).gradient(x.entries())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(numeric_rank(&DMatrix::from_fn(hams.len(), dim, |r, c| rows[r][c])))
}
