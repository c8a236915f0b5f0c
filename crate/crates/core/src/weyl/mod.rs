//! Symmetric groups, reduced words of the longest element, and the commuting
//! minor families they define.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::poisson::{bracket_polys, minor, numerically_commute, MinorSpec};
use crate::polyalg::{poly_to_json, CompiledFunc, Func, MatrixPoint, Poly, Shape};

/// Largest `n` for exhaustive reduced-word enumeration.
pub const ENUMERATION_LIMIT: usize = 5;
/// Largest `n` whose commutativity is certified exactly.
pub const EXACT_CHECK_LIMIT: usize = 4;

/// A permutation of `[1, n]`; `images[i-1] = w(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            if v == 0 || v > n || seen[v] {
                return Err(Error::Invalid(format!("{images:?} is not a permutation")));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (1..=n).collect() }
    }

    /// The simple transposition `s_j = (j, j+1)`.
    pub fn simple(n: usize, j: usize) -> Result<Self> {
        if j == 0 || j >= n {
            return Err(Error::Invalid(format!("s_{j} is not a simple reflection of S_{n}")));
        }
        let mut p = Self::identity(n);
        p.images.swap(j - 1, j);
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n());
        Permutation { images: other.images.iter().map(|&i| self.apply(i)).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { images: inv }
    }

    /// Coxeter length: the number of inversions.
    pub fn length(&self) -> usize {
        let w = &self.images;
        (0..w.len()).map(|i| (i + 1..w.len()).filter(|&j| w[i] > w[j]).count()).sum()
    }

    /// `w · s_j`: swaps the images at positions `j`, `j+1`.
    fn times_simple(&self, j: usize) -> Permutation {
        let mut p = self.clone();
        p.images.swap(j - 1, j);
        p
    }

    /// Image of the window `[1, j]`, sorted ascending.
    pub fn window_image(&self, j: usize) -> Vec<usize> {
        let mut v = self.images[..j].to_vec();
        v.sort_unstable();
        v
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

/// `w°(i) = n + 1 − i`.
pub fn longest_element(n: usize) -> Permutation {
    Permutation { images: (1..=n).rev().collect() }
}

/// A word `s_{j_1} … s_{j_L}` in the simple reflections of `S_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    n: usize,
    letters: Vec<usize>,
}

impl ReducedWord {
    /// A word of `S_n`; fails unless it is reduced.
    pub fn new(n: usize, letters: Vec<usize>) -> Result<Self> {
        let w = ReducedWord { n, letters };
        let p = w.product().map_err(|_| Error::NotReducedWord { word: w.letters.clone(), n })?;
        if p.length() != w.letters.len() {
            return Err(Error::NotReducedWord { word: w.letters, n });
        }
        Ok(w)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn product(&self) -> Result<Permutation> {
        self.prefix(self.letters.len())
    }

    /// Product of the first `k` letters.
    pub fn prefix(&self, k: usize) -> Result<Permutation> {
        let mut p = Permutation::identity(self.n);
        for &j in &self.letters[..k] {
            if j == 0 || j >= self.n {
                return Err(Error::Invalid(format!("letter {j} out of range for S_{}", self.n)));
            }
            p = p.times_simple(j);
        }
        Ok(p)
    }

    pub fn to_json(&self) -> Value {
        json!(self.letters)
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.letters.iter().map(usize::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Every reduced word of `w`, lexicographically sorted.
pub fn all_reduced_words(w: &Permutation) -> Result<Vec<ReducedWord>> {
    all_reduced_words_with(Exec::default(), w)
}

pub fn all_reduced_words_with(exec: Exec, w: &Permutation) -> Result<Vec<ReducedWord>> {
    let n = w.n();
    if n > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard { n, limit: ENUMERATION_LIMIT });
    }
    // w = (w s_j) s_j for each right descent j
    fn rec(w: &Permutation) -> Vec<Vec<usize>> {
        let descents: Vec<usize> = (1..w.n()).filter(|&j| w.apply(j) > w.apply(j + 1)).collect();
        if descents.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for j in descents {
            for mut word in rec(&w.times_simple(j)) {
                word.push(j);
                out.push(word);
            }
        }
        out
    }
    let descents: Vec<usize> = (1..n).filter(|&j| w.apply(j) > w.apply(j + 1)).collect();
    let mut words: Vec<Vec<usize>> = if descents.is_empty() {
        vec![Vec::new()]
    } else {
        exec.map(&descents, |&j| {
            rec(&w.times_simple(j))
                .into_iter()
                .map(|mut word| {
                    word.push(j);
                    word
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect()
    };
    words.sort();
    Ok(words.into_iter().map(|letters| ReducedWord { n, letters }).collect())
}

/// Commuting minors attached to a reduced word of the longest element.
#[derive(Debug, Clone)]
pub struct KzSystem {
    pub n: usize,
    pub word: ReducedWord,
    pub minors: Vec<MinorSpec>,
    pub hams: Vec<Poly>,
}

impl KzSystem {
    pub fn shape(&self) -> Shape {
        Shape::square(self.n)
    }

    pub fn funcs(&self) -> Vec<Func> {
        self.hams.iter().cloned().map(Func::Poly).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "word": self.word.to_json(),
            "hamiltonians": self.minors.iter().zip(&self.hams).map(|(m, h)| json!({
                "minor": m.to_string(),
                "rows": m.rows,
                "cols": m.cols,
                "poly": poly_to_json(h),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Row and column sets of the `k`-th minor (1-based): the windows
/// `[1, j_k]` under `u_k = (w°)⁻¹ v_k` and `v_k = s_{j_1} … s_{j_{k−1}}`.
pub fn kz_minor(word: &ReducedWord, k: usize) -> Result<MinorSpec> {
    let n = word.n();
    let v = word.prefix(k - 1)?;
    let u = longest_element(n).inverse().compose(&v);
    let j = word.letters()[k - 1];
    MinorSpec::new(u.window_image(j), v.window_image(j))
}

/// The minor family of `word` with its pairwise commutativity certified.
pub fn kz_hamiltonians(word: &ReducedWord) -> Result<KzSystem> {
    let sys = kz_hamiltonians_unchecked(word)?;
    check_commutativity(Exec::default(), &sys)?;
    Ok(sys)
}

/// The minor family of `word` without the commutativity certificate.
pub fn kz_hamiltonians_unchecked(word: &ReducedWord) -> Result<KzSystem> {
    let n = word.n();
    if word.product()? != longest_element(n) {
        return Err(Error::NotReducedWord { word: word.letters().to_vec(), n });
    }
    let shape = Shape::square(n);
    let minors = (1..=word.len()).map(|k| kz_minor(word, k)).collect::<Result<Vec<_>>>()?;
    let hams = minors.iter().map(|m| minor(m, shape)).collect::<Result<Vec<_>>>()?;
    Ok(KzSystem { n, word: word.clone(), minors, hams })
}

/// Exact pairwise brackets for `n ≤ 4`; relative 1e-10 at a seeded random
/// point otherwise.
pub fn check_commutativity(exec: Exec, sys: &KzSystem) -> Result<()> {
    let pairs: Vec<(usize, usize)> =
        (0..sys.hams.len()).flat_map(|a| (a + 1..sys.hams.len()).map(move |b| (a, b))).collect();
    let failures: Vec<bool> = if sys.n <= EXACT_CHECK_LIMIT {
        exec.map(&pairs, |&(a, b)| !bracket_polys(&sys.hams[a], &sys.hams[b]).is_zero())
    } else {
        let shape = sys.shape();
        let x = MatrixPoint::random(shape, &mut ChaCha8Rng::seed_from_u64(0x6b7a));
        let compiled: Vec<CompiledFunc> = sys.funcs().iter().map(CompiledFunc::new).collect();
        exec.try_map(&pairs, |&(a, b)| {
            numerically_commute(&compiled[a], &compiled[b], shape, x.entries()).map(|ok| !ok)
        })?
    };
    match pairs.iter().zip(failures).find(|(_, f)| *f) {
        Some((&(a, b), _)) => Err(Error::CommutativityFailure { a: a + 1, b: b + 1 }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(n: usize, l: &[usize]) -> ReducedWord {
        ReducedWord::new(n, l.to_vec()).unwrap()
    }

    #[test]
    fn longest() {
        assert_eq!(longest_element(2).images(), &[2, 1]);
        assert_eq!(longest_element(3).images(), &[3, 2, 1]);
        for n in 1..=6 {
            assert_eq!(longest_element(n).length(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn composition_convention() {
        let w = Permutation::new(vec![2, 3, 1]).unwrap();
        let v = Permutation::new(vec![1, 3, 2]).unwrap();
        // (w∘v)(2) = w(3) = 1
        assert_eq!(w.compose(&v).apply(2), 1);
        assert_eq!(w.compose(&w.inverse()), Permutation::identity(3));
        assert!(Permutation::new(vec![1, 1]).is_err());
    }

    #[test]
    fn word_counts() {
        let w3 = all_reduced_words(&longest_element(3)).unwrap();
        assert_eq!(w3, vec![word(3, &[1, 2, 1]), word(3, &[2, 1, 2])]);
        assert_eq!(all_reduced_words(&longest_element(4)).unwrap().len(), 16);
        assert_eq!(all_reduced_words(&Permutation::identity(3)).unwrap(), vec![word(3, &[])]);
        assert!(matches!(all_reduced_words(&longest_element(6)), Err(Error::SizeGuard { n: 6, .. })));
    }

    #[test]
    fn brute_force_s3() {
        let w0 = longest_element(3);
        let mut brute = Vec::new();
        for a in 1..3 {
            for b in 1..3 {
                for c in 1..3 {
                    let w = ReducedWord { n: 3, letters: vec![a, b, c] };
                    if w.product().unwrap() == w0 {
                        brute.push(w);
                    }
                }
            }
        }
        assert_eq!(brute, all_reduced_words(&w0).unwrap());
    }

    #[test]
    fn not_reduced() {
        assert!(matches!(ReducedWord::new(3, vec![1, 1]), Err(Error::NotReducedWord { .. })));
        let short = word(3, &[1, 2]);
        assert!(matches!(kz_hamiltonians(&short), Err(Error::NotReducedWord { .. })));
    }

    #[test]
    fn s3_families() {
        let sys = kz_hamiltonians(&word(3, &[1, 2, 1])).unwrap();
        let got: Vec<String> = sys.minors.iter().map(|m| m.to_string()).collect();
        assert_eq!(got, ["Δ_{3|1}", "Δ_{2,3|1,2}", "Δ_{2|2}"]);
        let other = kz_hamiltonians(&word(3, &[2, 1, 2])).unwrap();
        let got: Vec<String> = other.minors.iter().map(|m| m.to_string()).collect();
        assert_eq!(got, ["Δ_{2,3|1,2}", "Δ_{3|1}", "Δ_{1,3|1,3}"]);
        let n2 = kz_hamiltonians(&word(2, &[1])).unwrap();
        assert_eq!(n2.minors[0].to_string(), "Δ_{2|1}");
    }

    #[test]
    fn every_s4_family_commutes() {
        for w in all_reduced_words(&longest_element(4)).unwrap() {
            let sys = kz_hamiltonians(&w).unwrap();
            assert_eq!(sys.hams.len(), 6);
        }
    }

    #[test]
    fn json_export() {
        let v = kz_hamiltonians(&word(3, &[1, 2, 1])).unwrap().to_json();
        assert_eq!(v["word"], json!([1, 2, 1]));
        assert_eq!(v["hamiltonians"][0]["minor"], "Δ_{3|1}");
    }
}
