//! Thresholding operators: soft, hard, and the exact scalar proximal
//! operator of the GERF penalty.
//!
//! The prox objective `(1/2μ)(u−x)² + Phi(|u|)` is nonconvex, so the
//! stationarity equation `u + μ·exp(−(u/σ)^p) = |x|` can admit several
//! roots. All roots located by sign-change scanning are compared by
//! objective value together with the `u = 0` candidate; the smallest
//! objective wins, with ties broken toward smaller `|u|`.

use crate::penalty::phi;
use crate::special::lambert_w0;
use crate::{Error, Result};

/// Scalar prox query for the GERF penalty.
#[derive(Clone, Copy, Debug)]
pub struct ProxQuery {
    pub x: f64,
    /// Step / threshold parameter μ > 0.
    pub mu: f64,
    pub p: f64,
    pub sigma: f64,
}

impl ProxQuery {
    pub fn new(x: f64, mu: f64, p: f64, sigma: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::domain(format!("prox step mu must be positive, got {mu}")));
        }
        if !(p > 0.0) || !(sigma > 0.0) {
            return Err(Error::domain(format!("prox shape/scale must be positive: p={p}, sigma={sigma}")));
        }
        if !x.is_finite() {
            return Err(Error::NonFinite("prox input"));
        }
        Ok(ProxQuery { x, mu, p, sigma })
    }
}

/// Componentwise `sign(x)·max(|x| − t, 0)`.
pub fn soft_threshold(x: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("soft threshold must be nonnegative, got {t}")));
    }
    Ok(x.iter().map(|&v| soft_threshold_scalar(v, t)).collect())
}

/// Per-coordinate thresholds.
pub fn soft_threshold_vec(x: &[f64], t: &[f64]) -> Result<Vec<f64>> {
    if x.len() != t.len() {
        return Err(Error::Dimension {
            context: "soft_threshold_vec thresholds",
            expected: x.len(),
            got: t.len(),
        });
    }
    if t.iter().any(|v| *v < 0.0) {
        return Err(Error::domain("negative entry in threshold vector".to_string()));
    }
    Ok(x.iter().zip(t).map(|(&v, &ti)| soft_threshold_scalar(v, ti)).collect())
}

#[inline]
pub fn soft_threshold_scalar(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Componentwise `x·1{|x| > t}`; the boundary `|x| = t` maps to zero
/// (strict inequality, matching the indicator convention).
pub fn hard_threshold(x: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("hard threshold must be nonnegative, got {t}")));
    }
    Ok(x.iter().map(|&v| if v.abs() > t { v } else { 0.0 }).collect())
}

/// Number of scan subintervals when bracketing stationary points.
const SCAN_CELLS: usize = 64;
const NEWTON_BUDGET: usize = 200;

/// Global minimizer of `(1/2μ)(u − x)² + Phi_{p,σ}(|u|)`.
///
/// Odd in `x`, with `|prox(x)| ≤ |x|` and the sign of `x` (or zero).
/// When `|x| ≤ μ` and no interior stationary point exists, zero is
/// returned directly (the objective is then nondecreasing on `[0, |x|]`).
pub fn prox_gerf(q: &ProxQuery) -> Result<f64> {
    let ProxQuery { x, mu, p, sigma } = *q;
    let a = x.abs();
    if a == 0.0 {
        return Ok(0.0);
    }
    let sign = x.signum();

    // g(u) = u + μ·exp(−(u/σ)^p) − a vanishes at interior stationary points.
    let g = |u: f64| u + mu * (-(u / sigma).powf(p)).exp() - a;

    let mut roots: Vec<f64> = Vec::new();
    let mut prev_u = 0.0;
    let mut prev_g = g(0.0); // = μ − a
    for i in 1..=SCAN_CELLS {
        let u = a * i as f64 / SCAN_CELLS as f64;
        let gu = g(u);
        if prev_g == 0.0 {
            roots.push(prev_u);
        } else if prev_g * gu < 0.0 {
            roots.push(refine_root(&g, prev_u, u, prev_g, gu)?);
        }
        prev_u = u;
        prev_g = gu;
    }

    if roots.is_empty() && a <= mu {
        // stationarity never bites and the derivative at 0⁺ is μ − a ≥ 0
        return Ok(0.0);
    }

    let objective = |u: f64| -> Result<f64> {
        Ok((u - a) * (u - a) / (2.0 * mu) + phi(u, p, sigma)?)
    };

    // candidates: u = 0 plus every stationary point; ties within 1e-12
    // break toward the smaller magnitude (roots come in increasing order)
    let mut best_u = 0.0;
    let mut best_f = objective(0.0)?;
    for r in roots {
        let f = objective(r)?;
        if f < best_f - 1e-12 {
            best_u = r;
            best_f = f;
        }
    }

    Ok(sign * best_u)
}

/// Closed-form path for `p = 1` via the principal Lambert W branch.
///
/// The candidate nonzero stationary point is
/// `u = |x| + σ·W₀(−(μ/σ)·e^{−|x|/σ})` whenever the W argument lies in
/// `[−1/e, 0)`; it is compared against `u = 0` by objective value.
pub fn prox_gerf_p1(x: f64, mu: f64, sigma: f64) -> Result<f64> {
    if !(mu > 0.0) || !(sigma > 0.0) {
        return Err(Error::domain(format!("prox parameters must be positive: mu={mu}, sigma={sigma}")));
    }
    let a = x.abs();
    if a == 0.0 {
        return Ok(0.0);
    }
    let sign = x.signum();
    let z = -(mu / sigma) * (-a / sigma).exp();
    if z < -1.0 / std::f64::consts::E {
        // no real nonzero root; the objective is minimized at the origin
        return Ok(0.0);
    }
    let u = a + sigma * lambert_w0(z)?;
    if u <= 0.0 {
        return Ok(0.0);
    }
    // Phi_{1,σ}(u) = σ(1 − e^{−u/σ})
    let obj_u = (u - a) * (u - a) / (2.0 * mu) + sigma * (-(-u / sigma).exp_m1());
    let obj_0 = a * a / (2.0 * mu);
    if obj_u < obj_0 - 1e-12 {
        Ok(sign * u)
    } else if obj_u > obj_0 + 1e-12 {
        Ok(0.0)
    } else {
        // tie: prefer the sparser candidate
        Ok(0.0)
    }
}

/// Safeguarded Newton within a sign-change bracket; falls back to
/// bisection whenever the Newton step leaves the bracket.
fn refine_root(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut glo: f64, mut ghi: f64) -> Result<f64> {
    debug_assert!(glo * ghi <= 0.0);
    let scale = hi.abs().max(1.0);
    let mut u = 0.5 * (lo + hi);
    for _ in 0..NEWTON_BUDGET {
        let gu = g(u);
        if gu == 0.0 || (hi - lo) <= 1e-15 * scale {
            return Ok(u);
        }
        if glo * gu < 0.0 {
            hi = u;
            ghi = gu;
        } else {
            lo = u;
            glo = gu;
        }
        // secant/Newton-like proposal from the bracket endpoints
        let denom = ghi - glo;
        let proposal = if denom != 0.0 {
            lo - glo * (hi - lo) / denom
        } else {
            0.5 * (lo + hi)
        };
        u = if proposal > lo && proposal < hi {
            proposal
        } else {
            0.5 * (lo + hi)
        };
    }
    let residual = g(u).abs();
    if residual <= 1e-9 * scale {
        Ok(u)
    } else {
        Err(Error::NoConvergence {
            what: "prox stationarity root refinement",
            iterations: NEWTON_BUDGET,
            residual,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::stream_rng;
    use rand::Rng;

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(&[2.0, -2.0], 1.0).unwrap(), vec![1.0, -1.0]);
        assert_eq!(soft_threshold(&[0.7, -0.2], 0.0).unwrap(), vec![0.7, -0.2]);
        assert_eq!(soft_threshold(&[0.5], 1.0).unwrap(), vec![0.0]);
        assert!(soft_threshold(&[1.0], -0.1).is_err());
    }

    #[test]
    fn hard_threshold_examples() {
        assert_eq!(hard_threshold(&[2.0, -0.5], 1.0).unwrap(), vec![2.0, 0.0]);
        assert_eq!(hard_threshold(&[0.3, -0.4], 0.0).unwrap(), vec![0.3, -0.4]);
        // boundary |x| = t zeroes out: strict inequality
        assert_eq!(hard_threshold(&[1.0, -1.0], 1.0).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn prox_zero_region() {
        // no interior stationary point at these moderate scales
        for &(p, sigma) in &[(1.0, 1.0), (2.0, 1.0), (0.5, 1.0), (2.0, 100.0)] {
            let q = ProxQuery::new(0.8, 1.0, p, sigma).unwrap();
            assert_eq!(prox_gerf(&q).unwrap(), 0.0, "p={p} sigma={sigma}");
        }
    }

    #[test]
    fn prox_near_soft_regime() {
        let q = ProxQuery::new(2.0, 1.0, 2.0, 100.0).unwrap();
        let u = prox_gerf(&q).unwrap();
        assert!((u - 1.0).abs() < 1e-3, "got {u}");
    }

    #[test]
    fn prox_near_hard_regime() {
        let q = ProxQuery::new(1.5, 1.0, 2.0, 0.1).unwrap();
        let u = prox_gerf(&q).unwrap();
        assert!((u - 1.5).abs() < 1e-2, "got {u}");
    }

    #[test]
    fn prox_odd_and_contractive() {
        let mut rng = stream_rng(9, &[1]);
        for _ in 0..500 {
            let x: f64 = rng.gen_range(-4.0..4.0);
            let mu = rng.gen_range(0.05..3.0);
            let p = rng.gen_range(0.3..4.0);
            let sigma = 10f64.powf(rng.gen_range(-1.3..2.0));
            let q = ProxQuery::new(x, mu, p, sigma).unwrap();
            let u = prox_gerf(&q).unwrap();
            let qn = ProxQuery::new(-x, mu, p, sigma).unwrap();
            assert_eq!(prox_gerf(&qn).unwrap(), -u, "odd symmetry");
            assert!(u.abs() <= x.abs() + 1e-15, "contraction");
            assert!(u == 0.0 || u.signum() == x.signum(), "sign");
        }
    }

    #[test]
    fn prox_p1_matches_general_path() {
        let mut rng = stream_rng(9, &[2]);
        for _ in 0..500 {
            let x: f64 = rng.gen_range(-5.0..5.0);
            let mu = rng.gen_range(0.05..3.0);
            let sigma = 10f64.powf(rng.gen_range(-1.0..2.0));
            let a = prox_gerf_p1(x, mu, sigma).unwrap();
            let b = prox_gerf(&ProxQuery::new(x, mu, 1.0, sigma).unwrap()).unwrap();
            assert!((a - b).abs() <= 1e-10 * x.abs().max(1.0), "x={x} mu={mu} s={sigma}: {a} vs {b}");
        }
    }

    #[test]
    fn prox_p1_examples() {
        assert_eq!(prox_gerf_p1(0.5, 1.0, 1.0).unwrap(), 0.0);
        // vanishing step: identity within 1e-6
        let u = prox_gerf_p1(1.3, 1e-8, 1.0).unwrap();
        assert!((u - 1.3).abs() < 1e-6);
        // x = 3, μ = 1, σ = 1 against the Newton/objective path
        let a = prox_gerf_p1(3.0, 1.0, 1.0).unwrap();
        let b = prox_gerf(&ProxQuery::new(3.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-10);
        assert!(a > 2.0 && a < 3.0);
    }

    #[test]
    fn prox_sigma_limits_bridge_soft_and_hard() {
        // σ large: pointwise close to soft thresholding
        for i in 0..40 {
            let x = -4.0 + 0.2 * i as f64;
            let q = ProxQuery::new(x, 1.0, 2.0, 100.0).unwrap();
            let u = prox_gerf(&q).unwrap();
            let s = soft_threshold_scalar(x, 1.0);
            assert!((u - s).abs() < 2e-3, "soft limit at {x}: {u} vs {s}");
        }
        // σ small: identity away from the jump, matching hard-threshold behavior
        for i in 0..30 {
            let x = 1.2 + 0.1 * i as f64;
            let q = ProxQuery::new(x, 1.0, 2.0, 0.1).unwrap();
            let u = prox_gerf(&q).unwrap();
            assert!((u - x).abs() < 1e-2, "hard limit at {x}: {u}");
        }
    }

    #[test]
    fn prox_rejects_bad_queries() {
        assert!(ProxQuery::new(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(ProxQuery::new(1.0, 1.0, -1.0, 1.0).is_err());
        assert!(ProxQuery::new(f64::NAN, 1.0, 1.0, 1.0).is_err());
    }
}
