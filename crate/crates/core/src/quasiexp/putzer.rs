use nalgebra::DMatrix;
use num_complex::Complex64;

use super::qefun::QEFun;
use super::roots::poly_roots;
use crate::error::Result;

/// Characteristic polynomial `det(zI − C)`, ascending and monic, by the
/// Faddeev–LeVerrier recursion.
pub fn char_poly(c: &DMatrix<Complex64>) -> Vec<Complex64> {
    let r = c.nrows();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); r + 1];
    coeffs[r] = Complex64::new(1.0, 0.0);
    let id = DMatrix::<Complex64>::identity(r, r);
    let mut m = DMatrix::<Complex64>::zeros(r, r);
    for k in 1..=r {
        m = c * &m + &id * coeffs[r - k + 1];
        coeffs[r - k] = -(c * &m).trace() / k as f64;
    }
    coeffs
}

/// Eigenvalues of `C` with multiplicity, equal eigenvalues adjacent.
pub fn eigenvalues(c: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if c.nrows() == 0 {
        return Ok(Vec::new());
    }
    Ok(poly_roots(&char_poly(c))?.into_iter().flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity)).collect())
}

/// `exp(tC)` as a matrix of quasi-exponential functions of `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct QEMatrix {
    pub size: usize,
    pub entries: Vec<QEFun>,
}

impl QEMatrix {
    pub fn at(&self, i: usize, j: usize) -> &QEFun {
        &self.entries[i * self.size + j]
    }

    pub fn eval(&self, t: Complex64) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.size, self.size, |i, j| self.at(i, j).eval(t))
    }

    pub fn derivative(&self) -> QEMatrix {
        QEMatrix { size: self.size, entries: self.entries.iter().map(QEFun::derivative).collect() }
    }

    /// `self · v` for a vector of quasi-exponential functions.
    pub fn apply(&self, v: &[QEFun]) -> Vec<QEFun> {
        (0..self.size).map(|i| (0..self.size).fold(QEFun::zero(), |acc, j| acc + &(self.at(i, j) * &v[j]))).collect()
    }
}

/// Putzer's recursion: with eigenvalues `λ_1 … λ_r`, `r_1 = e^{λ_1 t}`,
/// `r_k(t) = e^{λ_k t} ∫_0^t e^{−λ_k s} r_{k−1}(s) ds`, `P_0 = I`,
/// `P_k = P_{k−1}(C − λ_k I)` and `exp(tC) = Σ_k r_{k+1}(t) P_k`.
pub fn putzer_exp(c: &DMatrix<Complex64>) -> Result<QEMatrix> {
    let r = c.nrows();
    let lambdas = eigenvalues(c)?;
    let mut entries = vec![QEFun::zero(); r * r];
    let mut p = DMatrix::<Complex64>::identity(r, r);
    let mut rk = QEFun::zero();
    for (k, &l) in lambdas.iter().enumerate() {
        rk = if k == 0 { QEFun::exp(l) } else { &(&QEFun::exp(-l) * &rk).antiderivative() * &QEFun::exp(l) };
        for i in 0..r {
            for j in 0..r {
                if p[(i, j)] != Complex64::new(0.0, 0.0) {
                    entries[i * r + j] = &entries[i * r + j] + &rk.scale(p[(i, j)]);
                }
            }
        }
        p = &p * (c - DMatrix::<Complex64>::identity(r, r) * l);
    }
    Ok(QEMatrix { size: r, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
        let scale = b.iter().map(|z| z.norm()).fold(1.0, f64::max);
        (a - b).iter().all(|z| z.norm() <= tol * scale)
    }

    fn series_exp(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let r = m.nrows();
        let mut term = DMatrix::identity(r, r);
        let mut sum = term.clone();
        for k in 1..40 {
            term = &term * m / c(k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    #[test]
    fn char_poly_of_small_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        // z² − 5z − 2
        assert_eq!(char_poly(&m), vec![c(-2.0, 0.0), c(-5.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn zero_and_diagonal() {
        let z = putzer_exp(&DMatrix::zeros(3, 3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(z.at(i, j).as_constant(), Some(c(if i == j { 1.0 } else { 0.0 }, 0.0)));
            }
        }
        let (a, b) = (c(0.5, 1.0), c(-2.0, 0.3));
        let d = putzer_exp(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b]))).unwrap();
        let t = c(0.8, -0.2);
        let v = d.eval(t);
        assert!((v[(0, 0)] - (a * t).exp()).norm() < 1e-13);
        assert!((v[(1, 1)] - (b * t).exp()).norm() < 1e-13);
        assert!(v[(0, 1)].norm() < 1e-13 && v[(1, 0)].norm() < 1e-13);
    }

    #[test]
    fn jordan_block() {
        let l = c(0.4, -0.7);
        let m = DMatrix::from_row_slice(2, 2, &[l, c(1.0, 0.0), c(0.0, 0.0), l]);
        let e = putzer_exp(&m).unwrap();
        assert_eq!(e.at(0, 1).terms().len(), 1);
        assert_eq!(e.at(0, 1).exponential_degree(), Some(1));
        for t in [c(0.1, 0.0), c(0.0, 0.3), c(-0.2, 0.2)] {
            assert!(close(&e.eval(t), &series_exp(&(&m * t)), 1e-12));
        }
    }

    #[test]
    fn group_law_and_ode() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.2, 0.1),
                c(1.0, 0.0),
                c(-0.5, 0.3),
                c(0.0, 0.7),
                c(-0.4, 0.0),
                c(0.3, 0.0),
                c(0.6, -0.2),
                c(0.1, 0.1),
                c(0.5, 0.5),
            ],
        );
        let e = putzer_exp(&m).unwrap();
        let de = e.derivative();
        let (s, t) = (c(0.7, -0.3), c(-0.4, 0.9));
        assert!(close(&(e.eval(s) * e.eval(t)), &e.eval(s + t), 1e-9));
        for t in [c(1.0, 0.0), c(-0.5, 1.5), c(2.0, -1.0)] {
            assert!(close(&de.eval(t), &(&m * e.eval(t)), 1e-9));
        }
        assert!(close(&e.eval(c(0.5, 0.5)), &series_exp(&(&m * c(0.5, 0.5))), 1e-11));
    }
}
