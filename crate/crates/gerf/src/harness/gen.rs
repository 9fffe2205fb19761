//! Seeded instance generators for the experiment drivers.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::core::{stream_rng, DenseMatrix};
use crate::{Error, Result};

/// `m × n` matrix of i.i.d. standard normal entries, filled row-major.
/// Deterministic per seed.
pub fn gen_gaussian_matrix(m: usize, n: usize, seed: u64) -> DenseMatrix {
    let mut rng = stream_rng(seed, &[]);
    let data: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    DenseMatrix::new(m, n, data).expect("gaussian entries are finite")
}

/// Oversampled-DCT dictionary: column `j` (1-based in the construction)
/// is `cos(2π w (j−1)/f) / √m` for a single shared uniform vector
/// `w ∈ [0,1]^m`. Larger `f` yields a more coherent matrix.
pub fn gen_oversampled_dct(m: usize, n: usize, f: f64, seed: u64) -> DenseMatrix {
    let mut rng = stream_rng(seed, &[]);
    let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
    let scale = 1.0 / (m as f64).sqrt();
    let tau = 2.0 * std::f64::consts::PI;
    let mut data = vec![0.0; m * n];
    for (i, wi) in w.iter().enumerate() {
        let row = &mut data[i * n..(i + 1) * n];
        for (j, dst) in row.iter_mut().enumerate() {
            *dst = scale * (tau * wi * j as f64 / f).cos();
        }
    }
    DenseMatrix::new(m, n, data).expect("dct entries are finite")
}

/// Exactly `k` nonzeros at uniformly drawn distinct indices, values
/// standard normal.
pub fn gen_sparse_signal(n: usize, k: usize, seed: u64) -> Result<Vec<f64>> {
    if k > n {
        return Err(Error::Dimension { context: "sparse signal support", expected: n, got: k });
    }
    let mut rng = stream_rng(seed, &[]);
    let mut x = vec![0.0; n];
    if k == 0 {
        return Ok(x);
    }
    let idx = sample(&mut rng, n, k);
    for i in idx {
        x[i] = rng.sample(StandardNormal);
    }
    Ok(x)
}

/// Additive Gaussian noise with the given standard deviation.
pub fn gen_noise(m: usize, sd: f64, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, &[]);
    (0..m).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Mutual coherence: the largest absolute inner product between distinct
/// normalized columns.
pub fn mutual_coherence(a: &DenseMatrix) -> f64 {
    let n = a.cols();
    let m = a.rows();
    let mut cols = vec![vec![0.0; m]; n];
    for i in 0..m {
        let row = a.row(i);
        for j in 0..n {
            cols[j][i] = row[j];
        }
    }
    let norms: Vec<f64> = cols.iter().map(|c| crate::core::norm2(c)).collect();
    let mut best = 0.0_f64;
    for j in 0..n {
        for k in j + 1..n {
            let d = crate::core::dot(&cols[j], &cols[k]).abs() / (norms[j] * norms[k]);
            if d > best {
                best = d;
            }
        }
    }
    best
}
