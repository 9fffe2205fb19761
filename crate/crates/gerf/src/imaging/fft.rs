//! Unitary 2-D discrete Fourier transforms on square complex grids.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

/// Planned forward/inverse pair for one grid side. Both directions carry
/// the 1/n unitary scaling, so `ifft2(fft2(u)) = u` and norms are
/// preserved.
pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            fwd: planner.plan_fft(n, FftDirection::Forward),
            inv: planner.plan_fft(n, FftDirection::Inverse),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn forward(&self, grid: &mut [Complex64]) {
        self.transform(grid, true);
    }

    pub fn inverse(&self, grid: &mut [Complex64]) {
        self.transform(grid, false);
    }

    fn transform(&self, grid: &mut [Complex64], forward: bool) {
        let n = self.n;
        assert_eq!(grid.len(), n * n, "grid side mismatch");
        let fft = if forward { &self.fwd } else { &self.inv };
        // rows in place
        for row in grid.chunks_exact_mut(n) {
            fft.process(row);
        }
        // columns via transpose, rows, transpose back
        transpose(grid, n);
        for row in grid.chunks_exact_mut(n) {
            fft.process(row);
        }
        transpose(grid, n);
        let scale = 1.0 / n as f64;
        for v in grid.iter_mut() {
            *v *= scale;
        }
    }
}

fn transpose(grid: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            grid.swap(i * n + j, j * n + i);
        }
    }
}
