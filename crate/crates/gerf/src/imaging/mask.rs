//! K-space sampling masks.

use crate::core::stream_rng;
use crate::{Error, Result};
use rand::Rng;

/// `L` radial lines through the DC coefficient at angles `iπ/L`,
/// rasterized by nearest-grid-point sampling at unit-radius steps.
/// The DC entry is always on and the mask is symmetric under point
/// reflection modulo `n`, so real images keep conjugate-symmetric samples.
pub fn radial_mask(n: usize, lines: usize) -> Result<Vec<bool>> {
    if lines == 0 {
        return Err(Error::domain("radial mask needs at least one line".to_string()));
    }
    if n < 2 {
        return Err(Error::domain(format!("mask grid side must be at least 2, got {n}")));
    }
    let half = n as i64 / 2;
    let in_range = |s: i64| -> bool { (-half..half).contains(&s) };
    let mut mask = vec![false; n * n];
    let set = |sx: i64, sy: i64, mask: &mut Vec<bool>| {
        let kx = sx.rem_euclid(n as i64) as usize;
        let ky = sy.rem_euclid(n as i64) as usize;
        mask[ky * n + kx] = true;
    };

    for i in 0..lines {
        let angle = i as f64 * std::f64::consts::PI / lines as f64;
        let (dy, dx) = angle.sin_cos();
        for dir in [1.0, -1.0] {
            let mut t = 0.0_f64;
            loop {
                let sx = (dir * t * dx).round() as i64;
                let sy = (dir * t * dy).round() as i64;
                if !in_range(sx) || !in_range(sy) {
                    break;
                }
                set(sx, sy, &mut mask);
                t += 1.0;
            }
        }
    }

    mask[0] = true;
    enforce_point_symmetry(&mut mask, n);
    Ok(mask)
}

/// Bernoulli mask with the given keep probability, symmetrized and with
/// DC forced on. Deterministic per seed.
pub fn random_symmetric_mask(n: usize, keep: f64, seed: u64) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&keep) {
        return Err(Error::domain(format!("keep fraction must lie in [0,1], got {keep}")));
    }
    let mut rng = stream_rng(seed, &[]);
    let mut mask = vec![false; n * n];
    for ky in 0..n {
        for kx in 0..n {
            // decide each conjugate pair once, from its lexicographically
            // smaller member
            let rky = (n - ky) % n;
            let rkx = (n - kx) % n;
            if (ky, kx) <= (rky, rkx) {
                let on = rng.gen_bool(keep);
                mask[ky * n + kx] = on;
                mask[rky * n + rkx] = on;
            }
        }
    }
    mask[0] = true;
    Ok(mask)
}

fn enforce_point_symmetry(mask: &mut [bool], n: usize) {
    for ky in 0..n {
        for kx in 0..n {
            if mask[ky * n + kx] {
                let rky = (n - ky) % n;
                let rkx = (n - kx) % n;
                mask[rky * n + rkx] = true;
            }
        }
    }
}

/// True when `mask(k) = mask(−k mod n)` for every frequency pair.
pub fn is_point_symmetric(mask: &[bool], n: usize) -> bool {
    for ky in 0..n {
        for kx in 0..n {
            let r = ((n - ky) % n) * n + (n - kx) % n;
            if mask[ky * n + kx] != mask[r] {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line_is_one_full_row() {
        let n = 16;
        let mask = radial_mask(n, 1).unwrap();
        let count = mask.iter().filter(|b| **b).count();
        assert_eq!(count, n, "angle 0 covers the kx axis");
        for kx in 0..n {
            assert!(mask[kx], "row ky=0 fully sampled");
        }
    }

    #[test]
    fn seven_lines_at_256_stay_under_six_percent() {
        let n = 256;
        let mask = radial_mask(n, 7).unwrap();
        let frac = mask.iter().filter(|b| **b).count() as f64 / (n * n) as f64;
        assert!(frac < 0.06, "sampling fraction {frac}");
        assert!(frac > 0.01, "mask suspiciously empty: {frac}");
    }

    #[test]
    fn masks_are_point_symmetric_with_dc() {
        for &(n, l) in &[(16usize, 3usize), (64, 7), (33, 5)] {
            let mask = radial_mask(n, l).unwrap();
            assert!(mask[0], "DC on");
            assert!(is_point_symmetric(&mask, n), "n={n} l={l}");
        }
        let mask = random_symmetric_mask(32, 0.5, 11).unwrap();
        assert!(mask[0]);
        assert!(is_point_symmetric(&mask, 32));
    }
}
