//! Sparse recovery with generalized error function (GERF) penalties.
//!
//! The penalty family evaluated here is built from the integral
//! `Phi(x) = ∫₀ˣ exp(-(t/σ)^p) dt`, summed over coordinate magnitudes. It
//! interpolates between the l1 norm (large σ) and a scaled l0 count
//! (small σ), with the shape parameter `p` controlling how fast the
//! integrand decays.
//!
//! The crate provides:
//!
//! * [`penalty`] — evaluation of the penalty, its reweighting and
//!   difference-of-convex linearizations, and limit diagnostics;
//! * [`prox`] — soft/hard thresholding and the exact scalar proximal
//!   operator of the penalty (closed-form Lambert-W path at `p = 1`);
//! * [`solvers`] — reweighted-l1 and difference-of-convex solvers for
//!   `min ½‖y − Ax‖² + λ·J(x)`, with ADMM inner loops, plus an
//!   ADMM lasso baseline;
//! * [`imaging`] — the same penalty applied to image gradients for
//!   Fourier-sampled reconstruction (split-Bregman inner solver),
//!   with phantom/mask generators and TV / L1-L2 / zero-fill baselines;
//! * [`harness`] — seeded instance generators, success-rate and MSE
//!   experiment drivers, a null-space-property falsifier, CSV output,
//!   and the command line interface.
//!
//! See the `examples/` directory for one runnable program per major
//! capability, and the `gerf` binary for the batch experiment CLI.

pub mod core;
pub mod harness;
pub mod imaging;
pub mod penalty;
pub mod prox;
pub mod solvers;
pub mod special;

mod error;

pub use error::{Error, Result};
