//! Sampled falsifier for the generalized null space property.
//!
//! The property demands `J(v_S) < J(v_{S^c})` for every kernel vector
//! `v ≠ 0` and every support `|S| ≤ s`. Infinitely many kernel directions
//! make verification impossible; this tool only falsifies, by sampling
//! unit vectors in an orthonormal kernel basis and enumerating all small
//! supports. Any reported counterexample is re-verified by direct penalty
//! evaluation before being returned.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::core::{norm2, stream_rng, DenseMatrix, PenaltySpec};
use crate::penalty::penalty_value;
use crate::{Error, Result};

/// Exhaustive support enumeration caps the ambient dimension.
pub const GNSP_MAX_DIM: usize = 16;

/// A kernel vector and support violating the strict inequality.
#[derive(Clone, Debug)]
pub struct GnspCounterexample {
    pub v: Vec<f64>,
    pub support: Vec<usize>,
    pub j_support: f64,
    pub j_complement: f64,
}

/// Orthonormal basis of `Ker(A)` via row-reduction followed by
/// Gram-Schmidt. Returns an empty list for a trivial kernel.
pub fn kernel_basis(a: &DenseMatrix) -> Vec<Vec<f64>> {
    let (m, n) = (a.rows(), a.cols());
    let mut r: Vec<Vec<f64>> = (0..m).map(|i| a.row(i).to_vec()).collect();
    let scale = a.data().iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(1.0);
    let tol = 1e-12 * scale * (n as f64);

    // reduced row echelon form with partial pivoting
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row >= m {
            break;
        }
        let piv = (row..m)
            .max_by(|&i, &j| r[i][col].abs().partial_cmp(&r[j][col].abs()).unwrap())
            .unwrap();
        if r[piv][col].abs() <= tol {
            continue;
        }
        r.swap(row, piv);
        let inv = 1.0 / r[row][col];
        for v in r[row].iter_mut() {
            *v *= inv;
        }
        for i in 0..m {
            if i != row && r[i][col].abs() > 0.0 {
                let f = r[i][col];
                for c in 0..n {
                    let v = r[row][c];
                    r[i][c] -= f * v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }

    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![0.0; n];
        v[fc] = 1.0;
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -r[ri][fc];
        }
        basis.push(v);
    }

    // Gram-Schmidt
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for mut v in basis {
        for q in &ortho {
            let c = crate::core::dot(&v, q);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
        let nv = norm2(&v);
        if nv > 1e-12 {
            for vi in v.iter_mut() {
                *vi /= nv;
            }
            ortho.push(v);
        }
    }
    ortho
}

/// Search for a kernel direction and support violating
/// `J(v_S) < J(v_{S^c})`. Returns the first confirmed violation, or `None`
/// if all sampled directions satisfy the strict inequality over every
/// support of size at most `s`. A `None` is not a certificate.
pub fn check_gnsp_sampled(
    a: &DenseMatrix,
    s: usize,
    p: f64,
    sigma: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Option<GnspCounterexample>> {
    let n = a.cols();
    if n > GNSP_MAX_DIM {
        return Err(Error::Dimension { context: "gnsp ambient dimension", expected: GNSP_MAX_DIM, got: n });
    }
    if s == 0 || 2 * s >= n {
        return Err(Error::domain(format!("gnsp order must satisfy 0 < s < N/2, got s={s}, N={n}")));
    }
    let spec = PenaltySpec::gerf(p, sigma)?;
    let basis = kernel_basis(a);
    if basis.is_empty() {
        return Err(Error::domain("matrix has a trivial kernel".to_string()));
    }

    // all supports with 1 ≤ |S| ≤ s, as bitmasks
    let masks: Vec<u32> = (1u32..(1 << n))
        .filter(|m| (m.count_ones() as usize) <= s)
        .collect();

    let mut rng = stream_rng(seed, &[]);
    let mut phi_abs = vec![0.0; n];
    for _ in 0..n_samples {
        // random unit vector in the kernel
        let mut v = vec![0.0; n];
        let mut g_norm2 = 0.0;
        for b in &basis {
            let g: f64 = rng.sample(StandardNormal);
            g_norm2 += g * g;
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += g * bi;
            }
        }
        if g_norm2 < 1e-24 {
            continue;
        }
        let nv = norm2(&v);
        if nv < 1e-12 {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= nv;
        }

        let mut total = 0.0;
        for (slot, vi) in phi_abs.iter_mut().zip(&v) {
            *slot = penalty_value(&[*vi], &spec)?;
            total += *slot;
        }
        for &mask in &masks {
            let mut j_s = 0.0;
            let mut bits = mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                j_s += phi_abs[i];
                bits &= bits - 1;
            }
            if j_s >= total - j_s {
                let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                // re-verify by direct evaluation on the masked vectors
                let mut v_s = vec![0.0; n];
                let mut v_sc = vec![0.0; n];
                for i in 0..n {
                    if mask >> i & 1 == 1 {
                        v_s[i] = v[i];
                    } else {
                        v_sc[i] = v[i];
                    }
                }
                let j_support = penalty_value(&v_s, &spec)?;
                let j_complement = penalty_value(&v_sc, &spec)?;
                if j_support >= j_complement {
                    return Ok(Some(GnspCounterexample { v, support, j_support, j_complement }));
                }
            }
        }
    }
    Ok(None)
}
