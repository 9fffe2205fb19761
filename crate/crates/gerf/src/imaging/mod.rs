//! Gradient-domain reconstruction for Fourier-sampled images: operators,
//! phantom and mask generation, the split-Bregman DC solver, and the
//! TV / l1−l2 / zero-fill baselines.

mod fft;
mod mask;
mod ops;
mod pgm;
mod phantom;
mod recon;

pub use fft::Fft2;
pub use mask::{is_point_symmetric, radial_mask, random_symmetric_mask};
pub use ops::{div, fourier_adjoint, fourier_sample, grad, sample_real, GradientField, ImagingProblem};
pub use pgm::{read_pgm, write_mask_pgm, write_pgm16, write_pgm8};
pub use phantom::{shepp_logan, SHEPP_LOGAN_ELLIPSES};
pub use recon::{
    gerf_grad_recon, gerf_grad_recon_report, l1l2_grad_recon, l1l2_grad_recon_report, tv_recon,
    tv_recon_report, zero_fill_recon, ReconParams, ReconReport,
};
