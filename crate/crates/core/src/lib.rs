//! Quasi-exact bound states of the Klein-Gordon oscillator with a
//! Coulomb-type coupling and an optional linear scalar potential.
//!
//! The radial equation reduces to a biconfluent Heun equation whose
//! Frobenius series terminates only at discrete oscillator frequencies.
//! [`quantize`] finds those frequencies, [`spectrum`] turns them into energy
//! levels and wavefunctions, and [`oracle`] checks the spectral parameter
//! against a finite-difference discretization of the radial operator.

// negated comparisons deliberately route NaN to the error branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cubic;
pub mod error;
pub mod oracle;
pub mod params;
pub mod poly;
pub mod quantize;
pub mod series;
pub mod spectrum;
pub mod tridiag;

pub use error::{Error, Result};
pub use oracle::{cross_validate, eigen_lowest, CrossValidationReport, OracleSpectrum, RadialOperatorSpec};
pub use params::{derive_params, truncation_params, Case, HeunParams, PhysicalConfig, SignConvention};
pub use quantize::{permitted_frequencies, FrequencyQuery, PermittedFrequency, QuantizationResult, RootProvenance, ScanGrid};
pub use series::{frobenius_coeffs, SeriesSolution};
pub use spectrum::{build_wavefunction, energy_case_a, energy_case_b, EnergyLevel, GridSpec, RadialWavefunction};
