//! The quadratic Poisson structure on rectangular matrices: brackets of
//! polynomials and rational functions, minors, Hamiltonian fields, rank.

mod bracket;
mod field;
mod minor;

pub use bracket::{
    bracket, bracket_generators, bracket_polys, bracket_polys_with, bracket_with, GeneratorBrackets, MatrixPoisson,
    QuadraticTerm,
};
pub use field::{
    bivector_matrix, bivector_rank, hamiltonian_field, is_casimir, is_casimir_with, numeric_bracket, numeric_rank,
    numerically_commute, BivectorMatrix, CasimirCheck, HamiltonianField, RANK_TOL,
};
pub use minor::{
    generic_minor_bracket, minor, minor_bracket, ordered_minor, set_sign, sign_form_bracket, subsets, MinorSpec,
};
