//! Spectral solvers and Hamiltonian spectral theory for 2D flows on periodic
//! domains: Kolmogorov (bar) states, dipoles and general shear profiles.
//!
//! The crate is organised around a small set of building blocks:
//!
//! * [`grid`] / [`fft`] / [`field`] — Fourier representation of real scalar
//!   fields on the torus `{0 < y < 2π, 0 < x < 2π/α}`, with spectral calculus
//!   (Poisson inversion, gradients, velocity recovery) in [`spectral`].
//! * [`flow`] — background flow descriptors (bar state, dipole, general shear
//!   profiles with their kernels) and profile analysis.
//! * [`op`] — the advection operator `J` and energy operator `L` of the
//!   linearized Euler equation written in the Hamiltonian form `JL`.
//! * [`dynamics`] — integrating-factor RK4 time stepping for the viscous and
//!   inviscid evolution equations.
//! * [`stability`] — 1D discretizations of the per-wavenumber operators, the
//!   unstable-mode count and index bookkeeping, and center-space extraction.
//! * [`diagnostics`] — dissipation residuals, time-averaged decay metrics,
//!   component decompositions and norm fits along simulation runs.
//! * [`randfield`] — deterministic synthesis of random initial data.
//!
//! Everything is `no_std + alloc`; IO, configuration and the CLI live in the
//! companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diagnostics;
pub mod dynamics;
pub mod fft;
pub mod field;
pub mod flow;
pub mod grid;
pub mod linalg;
pub mod op;
pub mod project;
pub mod randfield;
pub mod spectral;
pub mod stability;

mod fmath;

pub use field::{SpectralField, VelocityField};
pub use flow::BaseFlow;
pub use grid::TorusGrid;
pub use project::ProjectionTag;

use alloc::string::String;

/// Errors shared across the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("field mean is not zero (|c00| = {mean:e}, tolerance {tol:e})")]
    MeanNotZero { mean: f64, tol: f64 },
    #[error("grids do not match")]
    GridMismatch,
    #[error("flow kernel must be strictly positive and bounded: {0}")]
    KernelNotPositive(String),
    #[error("profile classification failed: {0}")]
    Classification(String),
    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),
    #[error("projection onto {requested} modes exceeds the {available} retained modes")]
    ProjectionOutOfRange { requested: usize, available: usize },
    #[error("CFL violation: dt = {dt:e} exceeds the advective bound {bound:e}")]
    CflViolation { dt: f64, bound: f64 },
    #[error("solution lost finiteness at t = {time}")]
    NanAbort { time: f64 },
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("linear solve failed: {0}")]
    Singular(String),
    #[error("diagnostic input invalid: {0}")]
    Diagnostic(String),
}

pub type Result<T> = core::result::Result<T, Error>;
