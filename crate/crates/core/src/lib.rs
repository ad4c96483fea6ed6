//! Finite-n Coulomb gas kernels near hard, soft and soft/hard edges, their
//! scaling limits, and the trial kernels used to bound them from below.
//!
//! Conventions used throughout: `dA = dx dy / π`, `Δ = ∂∂̄` (a quarter of the
//! usual Laplacian), `ds` is arc length divided by `2π`, and
//! `U^μ(z) = ∫ log(1/|z − w|) dμ(w)`.

pub mod error;
pub mod finitekernel;
pub mod geometry;
pub mod limitkernels;
pub mod potential;
pub mod sampler;
pub mod specfun;
pub mod transforms;
pub mod trialkernel;

pub use error::{Error, Result};
pub use num_complex::Complex64;
