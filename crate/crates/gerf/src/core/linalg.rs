use crate::{Error, Result};

/// Row-major dense matrix of doubles. Entries are validated finite at
/// construction; problem sizes in this crate never warrant sparse storage.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                context: "DenseMatrix entry count",
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("DenseMatrix entries"));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Dimension {
                    context: "DenseMatrix ragged row",
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        DenseMatrix::new(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        let mut out = vec![0.0; self.rows];
        for (oi, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *oi = dot(row, x);
        }
        out
    }

    /// `Aᵀ y`, accumulated row by row to stay cache friendly.
    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "matvec_t dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (yi, row) in y.iter().zip(self.data.chunks_exact(self.cols)) {
            if *yi != 0.0 {
                for (o, a) in out.iter_mut().zip(row) {
                    *o += yi * a;
                }
            }
        }
        out
    }

    /// `AᵀA + ridge·I` (symmetric, size cols × cols).
    pub fn gram_plus_ridge(&self, ridge: f64) -> DenseMatrix {
        let n = self.cols;
        let mut g = vec![0.0; n * n];
        for row in self.data.chunks_exact(n) {
            for j in 0..n {
                let aj = row[j];
                if aj != 0.0 {
                    let dst = &mut g[j * n..j * n + n];
                    for (d, &ak) in dst[j..].iter_mut().zip(&row[j..]) {
                        *d += aj * ak;
                    }
                }
            }
        }
        // mirror upper triangle written above
        for j in 0..n {
            for k in 0..j {
                g[j * n + k] = g[k * n + j];
            }
            g[j * n + j] += ridge;
        }
        DenseMatrix { rows: n, cols: n, data: g }
    }

    /// `A Aᵀ + ridge·I` (symmetric, size rows × rows).
    pub fn outer_gram_plus_ridge(&self, ridge: f64) -> DenseMatrix {
        let m = self.rows;
        let mut g = vec![0.0; m * m];
        for i in 0..m {
            let ri = self.row(i);
            for j in i..m {
                g[i * m + j] = dot(ri, self.row(j));
            }
        }
        for i in 0..m {
            for j in 0..i {
                g[i * m + j] = g[j * m + i];
            }
            g[i * m + i] += ridge;
        }
        DenseMatrix { rows: m, cols: m, data: g }
    }

    /// Submatrix with the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(cols.iter().map(|&j| row[j]));
        }
        DenseMatrix { rows: self.rows, cols: cols.len(), data }
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite
/// matrix. Factor once, reuse across repeated solves with the same matrix.
#[derive(Clone, Debug)]
pub struct CholeskyFactor {
    n: usize,
    l: Vec<f64>,
}

impl CholeskyFactor {
    pub fn new(g: &DenseMatrix) -> Result<Self> {
        if g.rows() != g.cols() {
            return Err(Error::Dimension {
                context: "Cholesky of non-square matrix",
                expected: g.rows(),
                got: g.cols(),
            });
        }
        let n = g.rows();
        let mut l = g.data().to_vec();
        for j in 0..n {
            for k in 0..j {
                let ljk = l[j * n + k];
                if ljk != 0.0 {
                    for i in j..n {
                        l[i * n + j] -= l[i * n + k] * ljk;
                    }
                }
            }
            let pivot = l[j * n + j];
            if !(pivot > 0.0) || !pivot.is_finite() {
                return Err(Error::NotPositiveDefinite { index: j, pivot });
            }
            let inv = 1.0 / pivot.sqrt();
            for i in j..n {
                l[i * n + j] *= inv;
            }
        }
        // zero the (stale) upper triangle so the factor is self-describing
        for i in 0..n {
            for j in i + 1..n {
                l[i * n + j] = 0.0;
            }
        }
        Ok(CholeskyFactor { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `G v = b` via the two triangular systems.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n, "cholesky solve dimension mismatch");
        let n = self.n;
        let mut v = b.to_vec();
        // L z = b
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s = dot(row, &v[..i]);
            v[i] = (v[i] - s) / self.l[i * n + i];
        }
        // Lᵀ v = z
        for i in (0..n).rev() {
            let mut s = v[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * v[k];
            }
            v[i] = s / self.l[i * n + i];
        }
        v
    }

    /// Forward substitution only: solve `L z = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut z = b.to_vec();
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s = dot(row, &z[..i]);
            z[i] = (z[i] - s) / self.l[i * n + i];
        }
        z
    }
}

/// One-shot factor-and-solve of an SPD system.
pub fn cholesky_solve(g: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != g.rows() {
        return Err(Error::Dimension {
            context: "cholesky_solve right-hand side",
            expected: g.rows(),
            got: b.len(),
        });
    }
    Ok(CholeskyFactor::new(g)?.solve(b))
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a += c * b` in place.
pub fn add_scaled(a: &mut [f64], c: f64, b: &[f64]) {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter_mut().zip(b) {
        *x += c * y;
    }
}

/// `‖x̂ − x‖₂ / ‖x‖₂`; the Frobenius version for matrices is the same
/// expression on the flattened entries.
pub fn relative_error(x_hat: &[f64], x: &[f64]) -> Result<f64> {
    if x_hat.len() != x.len() {
        return Err(Error::Dimension {
            context: "relative_error operands",
            expected: x.len(),
            got: x_hat.len(),
        });
    }
    let denom = norm2(x);
    if denom == 0.0 {
        return Err(Error::domain("relative_error against zero ground truth"));
    }
    let num = x_hat.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    Ok(num / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::stream_rng;
    use rand::Rng;

    /// Naive Gaussian elimination with partial pivoting; the independent
    /// oracle for the Cholesky path.
    fn gauss_solve(g: &DenseMatrix, b: &[f64]) -> Vec<f64> {
        let n = g.rows();
        let mut aug: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row = g.row(i).to_vec();
                row.push(b[i]);
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap())
                .unwrap();
            aug.swap(col, piv);
            let pivot = aug[col][col];
            for row in col + 1..n {
                let f = aug[row][col] / pivot;
                if f != 0.0 {
                    for k in col..=n {
                        let v = aug[col][k];
                        aug[row][k] -= f * v;
                    }
                }
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = aug[i][n];
            for k in i + 1..n {
                s -= aug[i][k] * x[k];
            }
            x[i] = s / aug[i][i];
        }
        x
    }

    fn random_spd(n: usize, rng: &mut impl Rng) -> DenseMatrix {
        let m = DenseMatrix::new(n, n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .unwrap();
        m.gram_plus_ridge(1.0)
    }

    #[test]
    fn cholesky_identity_passthrough() {
        let g = DenseMatrix::identity(3);
        let v = cholesky_solve(&g, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn cholesky_diagonal_solve() {
        let g = DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 4.0]]).unwrap();
        let v = cholesky_solve(&g, &[2.0, 4.0]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cholesky_matches_gaussian_elimination_oracle() {
        let mut rng = stream_rng(07_2023, &[1]);
        for trial in 0..100 {
            let n = 2 + (trial % 19);
            let g = random_spd(n, &mut rng);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let v = cholesky_solve(&g, &b).unwrap();
            let oracle = gauss_solve(&g, &b);
            let rel = relative_error(&v, &oracle).unwrap();
            assert!(rel < 1e-10, "trial {trial}: rel {rel:.3e}");
            // residual contract
            let r = sub(&g.matvec(&v), &b);
            assert!(norm2(&r) <= 1e-10 * norm2(&b).max(1e-300));
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let g = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        assert!(matches!(
            CholeskyFactor::new(&g),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn matrix_rejects_non_finite() {
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((relative_error(&[1.0, 1.0], &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((relative_error(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(relative_error(&[1.0], &[0.0]).is_err());
        assert!(relative_error(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn relative_error_scale_invariant() {
        let mut rng = stream_rng(42, &[7]);
        for _ in 0..200 {
            let n = rng.gen_range(1..12);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            if norm2(&x) == 0.0 {
                continue;
            }
            let xh: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let c: f64 = rng.gen_range(0.1..10.0) * if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            let sx: Vec<f64> = x.iter().map(|v| c * v).collect();
            let sxh: Vec<f64> = xh.iter().map(|v| c * v).collect();
            let a = relative_error(&xh, &x).unwrap();
            let b = relative_error(&sxh, &sx).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }
}
