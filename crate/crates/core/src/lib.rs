//! One-dimensional Navier-Stokes-Poisson simulation laboratory.
//!
//! The crate builds smooth approximate rarefaction waves of the quasineutral
//! Euler system from the inviscid Burgers equation, integrates the one-fluid
//! (Boltzmann-relation) and two-fluid NSP systems on a truncated domain with
//! a self-consistent potential, and evaluates the energy functionals,
//! dissipation integrals and convergence metrics that quantify the stability
//! of the wave. A Fourier-side module covers the linearized system around a
//! constant state: per-mode eigenvalues, projections, Green's matrix and the
//! mode energy identity, cross-checked against the nonlinear solver on a
//! periodic domain.

pub mod checks;
pub mod diagnostics;
pub mod field;
pub mod grid;
pub mod linear;
pub mod params;
pub mod poisson;
pub mod rarewave;
pub mod sim;

pub use field::Field;
pub use grid::Grid1D;
pub use params::{PhysParamsOne, PhysParamsTwo};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("characteristic root-finder failed after {iterations} iterations at (t, x) = ({t}, {x})")]
    RootFind { iterations: usize, t: f64, x: f64 },

    #[error("elliptic Newton iteration stagnated after {iterations} iterations, residual {residual:.3e}")]
    NewtonStagnation { iterations: usize, residual: f64 },

    #[error("zero pivot in tridiagonal elimination at row {row}")]
    ZeroPivot { row: usize },

    #[error("density positivity lost at t = {time}, node {node} (n = {value:.3e})")]
    PositivityLoss { time: f64, node: usize, value: f64 },

    #[error("configuration rejected: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
