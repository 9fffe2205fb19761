//! Shepp-Logan head phantom rasterization.

use crate::{Error, Result};

/// The canonical ten-ellipse table (modified contrast variant):
/// intensity, semi-axis a, semi-axis b, center x, center y, rotation in
/// degrees. Coordinates live in [−1, 1]².
pub const SHEPP_LOGAN_ELLIPSES: [[f64; 6]; 10] = [
    [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
    [-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0],
    [-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0],
    [-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0],
    [0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0],
    [0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0],
    [0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0],
    [0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0],
    [0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0],
    [0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0],
];

/// Rasterize the phantom on an `n × n` grid with values clipped to [0, 1].
/// Pixel centers sit at `(2j + 1 − n)/n`; row 0 is the top of the image.
pub fn shepp_logan(n: usize) -> Result<Vec<f64>> {
    if n < 16 {
        return Err(Error::domain(format!("phantom grid must be at least 16, got {n}")));
    }
    let mut img = vec![0.0; n * n];
    for e in &SHEPP_LOGAN_ELLIPSES {
        let [value, a, b, x0, y0, deg] = *e;
        let (sin_t, cos_t) = deg.to_radians().sin_cos();
        let (inv_a2, inv_b2) = (1.0 / (a * a), 1.0 / (b * b));
        for i in 0..n {
            let y = (n as f64 - 1.0 - 2.0 * i as f64) / n as f64 - y0;
            for j in 0..n {
                let x = (2.0 * j as f64 + 1.0 - n as f64) / n as f64 - x0;
                let xr = x * cos_t + y * sin_t;
                let yr = -x * sin_t + y * cos_t;
                if xr * xr * inv_a2 + yr * yr * inv_b2 <= 1.0 {
                    img[i * n + j] += value;
                }
            }
        }
    }
    for v in img.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(img)
}
