//! Spectral fields on periodic boxes with sparseness certificates,
//! Littlewood-Paley frequency diagnostics, heat-semigroup decay
//! experiments, a pseudo-spectral incompressible Navier-Stokes solver, and
//! the exponent calculus for backward self-similar scaling scenarios.
//!
//! Everything operates on immutable [`Field`] values over a [`Grid`]; all
//! operations are pure functions, so fields can be processed concurrently.
//! FFT plans are cached behind a lock and shared read-only.

pub mod error;
pub mod field;
pub mod frequency;
pub mod grid;
pub mod io;
pub mod registry;
pub mod semigroup;
pub mod sparseness;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{Field, SpectralField};
pub use grid::{Exponent, Grid};
pub use sparseness::{SparsenessCertificate, SparsenessParams};
