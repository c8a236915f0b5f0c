//! Seeded random inputs: generic points and random polynomials.

use rand::Rng;

use crate::gz::SingularLocus;
use crate::polyalg::{GaussRat, MatrixPoint, Monomial, Poly, Shape};

/// Uniform point of the complex unit square, resampled while the guard of
/// `locus` flags it.
pub fn generic_point(shape: Shape, rng: &mut impl Rng, locus: Option<&SingularLocus>) -> MatrixPoint {
    loop {
        let x = MatrixPoint::random(shape, rng);
        if locus.is_none_or(|l| !l.contains(&x)) {
            return x;
        }
    }
}

/// Random polynomial with up to `terms` terms of degree at most `max_degree`
/// and small Gaussian-integer coefficients.
pub fn random_poly(shape: Shape, rng: &mut impl Rng, terms: usize, max_degree: u32) -> Poly {
    let dim = shape.len();
    Poly::from_terms(
        shape,
        (0..terms).map(|_| {
            let deg = rng.random_range(0..=max_degree);
            let m = Monomial::from_pairs((0..deg).map(|_| (rng.random_range(0..dim), 1)));
            let c = GaussRat::from_parts((rng.random_range(-5..=5), 1), (rng.random_range(-2..=2), 1));
            (m, c)
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reproducible() {
        let s = Shape::square(3);
        let a = random_poly(s, &mut ChaCha8Rng::seed_from_u64(1), 5, 3);
        let b = random_poly(s, &mut ChaCha8Rng::seed_from_u64(1), 5, 3);
        assert_eq!(a, b);
        assert!(a.degree().unwrap_or(0) <= 3);
        let locus = crate::gz::singular_locus(3);
        let x = generic_point(s, &mut ChaCha8Rng::seed_from_u64(2), Some(&locus));
        assert!(!locus.contains(&x));
    }
}
