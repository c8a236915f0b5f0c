//! Hamiltonian flows: closed forms in quasi-exponential functions and an
//! adaptive numeric integrator in complex time used to cross-check them.

mod closed;
mod numeric;
mod validate;

pub use closed::{gz_flow_closed, minor_flow_closed, scalar_resolution_flow, ClosedFlow};
pub use numeric::{numeric_flow, NumericOptions, Trajectory, DEFAULT_TOL, SINGULARITY_GUARD};
pub use validate::{
    conservation_error, cross_validate, discreteness_probe, flow_commutation, CommutationCheck, CrossValidation,
    DenominatorZeros, Flow, GzFlow, MinorFlow, NumericFlow, ProbeReport, PASS_TOL,
};
