//! Spectral analysis of the model operators `-X^2 - Y^2 + i a(x) [X, Y]`,
//! `X = d/dx`, `Y = d/dy + x^k d/dt`: exact Hermite perturbation algebra,
//! finite-difference spectra of the reduced ODE families, parameter-plane
//! sweeps, a solvability classifier and numerical nonsolvability witnesses.

pub mod config;
pub mod error;
pub mod hermite;
pub mod operators;
pub mod perturbation;
pub mod quadrature;
pub mod regions;
pub mod solvability;
pub mod spectral;

pub use config::ModelConfig;
pub use error::{Error, Result};
pub use operators::{CoefficientSpec, CutoffSpec, Family, OperatorInstance, Region, RegionConstants};
pub use spectral::{Discretization, SolverOptions, Spectrum};
