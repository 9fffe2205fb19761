//! Discrete gradient/divergence and the masked Fourier sampling operator.
//!
//! Differences use forward steps with periodic wraparound, so the
//! gradient's normal operator is diagonalized by the discrete Fourier
//! transform and `div` is the exact negative adjoint of `grad`.

use num_complex::Complex64;

use crate::imaging::fft::Fft2;
use crate::{Error, Result};

/// Forward-difference gradient pair of an `n × n` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub n: usize,
}

impl GradientField {
    pub fn zeros(n: usize) -> Self {
        GradientField { gx: vec![0.0; n * n], gy: vec![0.0; n * n], n }
    }
}

/// `gx[i][j] = u[i][j+1] − u[i][j]`, `gy[i][j] = u[i+1][j] − u[i][j]`,
/// indices wrapping periodically.
pub fn grad(u: &[f64], n: usize) -> GradientField {
    assert_eq!(u.len(), n * n, "grad grid size");
    let mut g = GradientField::zeros(n);
    for i in 0..n {
        let row = i * n;
        let next_row = ((i + 1) % n) * n;
        for j in 0..n {
            let jn = (j + 1) % n;
            g.gx[row + j] = u[row + jn] - u[row + j];
            g.gy[row + j] = u[next_row + j] - u[row + j];
        }
    }
    g
}

/// Negative adjoint of [`grad`]: `⟨grad u, g⟩ = ⟨u, −div g⟩` exactly.
pub fn div(g: &GradientField) -> Vec<f64> {
    let n = g.n;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        let row = i * n;
        let prev_row = ((i + n - 1) % n) * n;
        for j in 0..n {
            let jp = (j + n - 1) % n;
            out[row + j] =
                g.gx[row + j] - g.gx[row + jp] + g.gy[row + j] - g.gy[prev_row + j];
        }
    }
    out
}

/// A Fourier-domain sampling problem: an `n × n` boolean mask over
/// k-space (row-major, DC at index 0) and the sampled coefficients in
/// row-major mask order. Gradients use the fixed periodic boundary rule.
#[derive(Clone, Debug)]
pub struct ImagingProblem {
    pub n: usize,
    pub mask: Vec<bool>,
    pub f: Vec<Complex64>,
}

impl ImagingProblem {
    pub fn new(n: usize, mask: Vec<bool>, f: Vec<Complex64>) -> Result<Self> {
        if mask.len() != n * n {
            return Err(Error::Dimension { context: "mask grid", expected: n * n, got: mask.len() });
        }
        let count = mask.iter().filter(|b| **b).count();
        if f.len() != count {
            return Err(Error::Dimension { context: "sample vector", expected: count, got: f.len() });
        }
        if !mask[0] {
            return Err(Error::domain("sampling mask must include the DC coefficient".to_string()));
        }
        Ok(ImagingProblem { n, mask, f })
    }

    pub fn sample_count(&self) -> usize {
        self.f.len()
    }

    /// Fraction of k-space retained.
    pub fn sampling_fraction(&self) -> f64 {
        self.f.len() as f64 / (self.n * self.n) as f64
    }
}

/// Apply the measurement operator: unitary 2-D transform followed by mask
/// gathering (row-major order over the mask grid).
pub fn fourier_sample(u: &[Complex64], mask: &[bool], n: usize) -> Vec<Complex64> {
    assert_eq!(u.len(), n * n);
    assert_eq!(mask.len(), n * n);
    let fft = Fft2::new(n);
    let mut grid = u.to_vec();
    fft.forward(&mut grid);
    grid.iter()
        .zip(mask)
        .filter_map(|(v, keep)| keep.then_some(*v))
        .collect()
}

/// Adjoint of [`fourier_sample`]: scatter the samples back onto the grid
/// and apply the unitary inverse transform.
pub fn fourier_adjoint(f: &[Complex64], mask: &[bool], n: usize) -> Result<Vec<Complex64>> {
    let count = mask.iter().filter(|b| **b).count();
    if f.len() != count {
        return Err(Error::Dimension { context: "adjoint samples", expected: count, got: f.len() });
    }
    let fft = Fft2::new(n);
    let mut grid = vec![Complex64::new(0.0, 0.0); n * n];
    let mut it = f.iter();
    for (g, keep) in grid.iter_mut().zip(mask) {
        if *keep {
            *g = *it.next().expect("sample count checked");
        }
    }
    fft.inverse(&mut grid);
    Ok(grid)
}

/// Sample a real image.
pub fn sample_real(u: &[f64], mask: &[bool], n: usize) -> Vec<Complex64> {
    let cu: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fourier_sample(&cu, mask, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::stream_rng;
    use rand::Rng;

    fn rand_grid(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream_rng(seed, &[]);
        (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn grad_of_constant_vanishes() {
        let g = grad(&vec![2.5; 36], 6);
        assert!(g.gx.iter().chain(&g.gy).all(|v| *v == 0.0));
    }

    #[test]
    fn grad_of_delta_row_structure() {
        let n = 4;
        let mut u = vec![0.0; 16];
        u[1 * n + 2] = 1.0;
        let g = grad(&u, n);
        // row 1 of gx: −1 at the pixel, +1 one step to the left
        let row: Vec<f64> = g.gx[n..2 * n].to_vec();
        assert_eq!(row, vec![0.0, 1.0, -1.0, 0.0]);
        assert_eq!(g.gx.iter().filter(|v| **v != 0.0).count(), 2);
    }

    #[test]
    fn div_is_exact_negative_adjoint() {
        let n = 12;
        for seed in 0..5 {
            let u = rand_grid(n, 100 + seed);
            let g = GradientField {
                gx: rand_grid(n, 200 + seed),
                gy: rand_grid(n, 300 + seed),
                n,
            };
            let gu = grad(&u, n);
            let lhs: f64 = gu.gx.iter().zip(&g.gx).map(|(a, b)| a * b).sum::<f64>()
                + gu.gy.iter().zip(&g.gy).map(|(a, b)| a * b).sum::<f64>();
            let dg = div(&g);
            let rhs: f64 = u.iter().zip(&dg).map(|(a, b)| -a * b).sum();
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn full_mask_round_trip() {
        let n = 16;
        let u = rand_grid(n, 9);
        let mask = vec![true; n * n];
        let f = sample_real(&u, &mask, n);
        let back = fourier_adjoint(&f, &mask, n).unwrap();
        for (b, orig) in back.iter().zip(&u) {
            assert!((b.re - orig).abs() < 1e-10 && b.im.abs() < 1e-10);
        }
    }

    #[test]
    fn sampling_operator_adjoint_identity() {
        let n = 16;
        let mut rng = stream_rng(31, &[1]);
        let mut mask = vec![false; n * n];
        mask[0] = true;
        for m in mask.iter_mut() {
            if rng.gen_bool(0.3) {
                *m = true;
            }
        }
        let count = mask.iter().filter(|b| **b).count();
        let u: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let f: Vec<Complex64> = (0..count)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let au = fourier_sample(&u, &mask, n);
        let ahf = fourier_adjoint(&f, &mask, n).unwrap();
        let lhs: Complex64 = au.iter().zip(&f).map(|(a, b)| a * b.conj()).sum();
        let rhs: Complex64 = u.iter().zip(&ahf).map(|(a, b)| a * b.conj()).sum();
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn dc_only_mask_reconstructs_mean() {
        let n = 8;
        let u = rand_grid(n, 5);
        let mean = u.iter().sum::<f64>() / (n * n) as f64;
        let mut mask = vec![false; n * n];
        mask[0] = true;
        let f = sample_real(&u, &mask, n);
        let back = fourier_adjoint(&f, &mask, n).unwrap();
        for b in &back {
            assert!((b.re - mean).abs() < 1e-12 && b.im.abs() < 1e-12);
        }
    }

    #[test]
    fn problem_requires_dc_and_matching_counts() {
        let n = 4;
        let mut mask = vec![false; 16];
        mask[1] = true;
        assert!(ImagingProblem::new(n, mask.clone(), vec![Complex64::default()]).is_err());
        mask[0] = true;
        assert!(ImagingProblem::new(n, mask.clone(), vec![Complex64::default()]).is_err());
        assert!(ImagingProblem::new(n, mask, vec![Complex64::default(); 2]).is_ok());
    }
}
