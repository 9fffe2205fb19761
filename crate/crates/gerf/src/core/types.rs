use crate::core::linalg::DenseMatrix;
use crate::{Error, Result};

/// Default regularization weight for noise-free recovery problems.
pub const DEFAULT_LAMBDA_NOISE_FREE: f64 = 1e-5;
/// Default regularization weight when the measurements carry noise.
pub const DEFAULT_LAMBDA_NOISY: f64 = 1e-2;

/// One member of the penalty family, or one of the baseline penalties
/// that run through the same reweighted-l1 machinery.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PenaltySpec {
    /// Generalized-error-function penalty with shape `p` and scale `sigma`.
    Gerf { p: f64, sigma: f64 },
    /// Plain l1 norm (uniform unit weights).
    L1,
    /// `Σ |x_j|^p` with `p ∈ (0,1)`; `epsilon` smooths the weight at zero.
    Lp { p: f64, epsilon: f64 },
    /// Transformed l1: `Σ (a+1)|x_j| / (a+|x_j|)`.
    Tl1 { a: f64 },
}

impl PenaltySpec {
    /// GERF spec with validated parameters.
    pub fn gerf(p: f64, sigma: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::domain(format!("GERF shape p must be positive, got {p}")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain(format!(
                "GERF scale sigma must be positive, got {sigma}"
            )));
        }
        Ok(PenaltySpec::Gerf { p, sigma })
    }

    /// Smoothed lp spec, `p ∈ (0,1)`, with the conventional 1e-6 smoothing.
    pub fn lp(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("lp exponent must lie in (0,1), got {p}")));
        }
        Ok(PenaltySpec::Lp { p, epsilon: 1e-6 })
    }

    /// Transformed-l1 spec with `a > 0`.
    pub fn tl1(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!("TL1 parameter a must be positive, got {a}")));
        }
        Ok(PenaltySpec::Tl1 { a })
    }

    /// Short label used in experiment output.
    pub fn label(&self) -> String {
        match self {
            PenaltySpec::Gerf { .. } => "gerf".to_string(),
            PenaltySpec::L1 => "lasso".to_string(),
            PenaltySpec::Lp { .. } => "lp".to_string(),
            PenaltySpec::Tl1 { .. } => "tl1".to_string(),
        }
    }

    /// (param1, param2) columns for CSV rows.
    pub fn params(&self) -> (Option<f64>, Option<f64>) {
        match *self {
            PenaltySpec::Gerf { p, sigma } => (Some(p), Some(sigma)),
            PenaltySpec::L1 => (None, None),
            PenaltySpec::Lp { p, .. } => (Some(p), None),
            PenaltySpec::Tl1 { a } => (Some(a), None),
        }
    }
}

/// A sparse-recovery instance: measurements `y = A x + ε`.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub y: Vec<f64>,
    /// Ground truth, when known (synthetic experiments).
    pub truth: Option<Vec<f64>>,
    /// Noise standard deviation, when known.
    pub noise_sd: Option<f64>,
}

impl ProblemInstance {
    pub fn new(
        a: DenseMatrix,
        y: Vec<f64>,
        truth: Option<Vec<f64>>,
        noise_sd: Option<f64>,
    ) -> Result<Self> {
        if y.len() != a.rows() {
            return Err(Error::Dimension {
                context: "ProblemInstance observation length",
                expected: a.rows(),
                got: y.len(),
            });
        }
        if let Some(t) = &truth {
            if t.len() != a.cols() {
                return Err(Error::Dimension {
                    context: "ProblemInstance truth length",
                    expected: a.cols(),
                    got: t.len(),
                });
            }
        }
        if let Some(sd) = noise_sd {
            if !(sd >= 0.0) || !sd.is_finite() {
                return Err(Error::domain(format!("noise_sd must be nonnegative, got {sd}")));
            }
        }
        Ok(ProblemInstance { a, y, truth, noise_sd })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a.rows(), self.a.cols())
    }
}

/// Which outer algorithm solves the penalized least-squares problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// Difference-of-convex iterations (default: faster in practice).
    Dca,
    /// Iteratively reweighted l1.
    Irl1,
}

/// Solver parameters shared by the reweighted and DC solvers.
#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Regularization weight λ.
    pub lambda: f64,
    /// ADMM coupling weight ρ.
    pub rho: f64,
    /// Outer iteration cap.
    pub outer_max: usize,
    /// Inner (ADMM) iteration cap per outer step.
    pub inner_max: usize,
    /// Outer relative-change stopping tolerance.
    pub outer_tol: f64,
    /// Algorithm selector for penalties that support both routes.
    pub algorithm: Algorithm,
    /// Base seed recorded with results; derived streams hang off it.
    pub seed: u64,
}

impl SolverConfig {
    /// Defaults sized to a signal length `n`: inner cap `2n`, ten outer
    /// iterations, relative-change tolerance 1e-6, ρ = 1.
    pub fn for_signal_len(n: usize, lambda: f64) -> Self {
        SolverConfig {
            lambda,
            rho: 1.0,
            outer_max: 10,
            inner_max: 2 * n,
            outer_tol: 1e-6,
            algorithm: Algorithm::Dca,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::domain(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.rho > 0.0) {
            return Err(Error::domain(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.outer_tol > 0.0) {
            return Err(Error::domain(format!(
                "outer_tol must be positive, got {}",
                self.outer_tol
            )));
        }
        if self.outer_max == 0 || self.inner_max == 0 {
            return Err(Error::domain("iteration caps must be positive".to_string()));
        }
        Ok(())
    }
}

/// Outcome of one solver run.
#[derive(Clone, Debug)]
pub struct RecoveryResult {
    pub estimate: Vec<f64>,
    pub outer_iters: usize,
    /// Objective value after each outer iteration; length equals `outer_iters`.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    /// Wall-clock seconds. Measurement metadata, not part of the
    /// mathematical output.
    pub wall_time: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gerf_spec_rejects_nonpositive_parameters() {
        assert!(PenaltySpec::gerf(0.0, 1.0).is_err());
        assert!(PenaltySpec::gerf(2.0, -1.0).is_err());
        assert!(PenaltySpec::gerf(2.0, 0.5).is_ok());
    }

    #[test]
    fn problem_instance_checks_shapes() {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert!(ProblemInstance::new(a.clone(), vec![1.0; 2], None, None).is_err());
        assert!(ProblemInstance::new(a.clone(), vec![1.0; 3], Some(vec![0.0; 3]), None).is_err());
        assert!(ProblemInstance::new(a, vec![1.0; 3], Some(vec![0.0; 2]), Some(0.1)).is_ok());
    }

    #[test]
    fn solver_config_validation() {
        let mut cfg = SolverConfig::for_signal_len(8, 1e-3);
        assert!(cfg.validate().is_ok());
        cfg.lambda = 0.0;
        assert!(cfg.validate().is_err());
    }
}
