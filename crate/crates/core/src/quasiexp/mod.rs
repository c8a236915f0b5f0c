//! Quasi-exponential functions `Σ p_a(t) e^{α_a t}`, polynomial roots with
//! multiplicities, and matrix exponentials in that function class.

mod putzer;
mod qefun;
mod roots;

pub use putzer::{char_poly, eigenvalues, putzer_exp, QEMatrix};
pub use qefun::{qe_antiderivative, qe_arith, QEFun, QETerm, QeOp, COEFF_DROP_REL, EXPONENT_MERGE_TOL};
pub use roots::{backward_error, poly_roots, RootCluster, CLUSTER_TOL, RESIDUAL_TOL};
