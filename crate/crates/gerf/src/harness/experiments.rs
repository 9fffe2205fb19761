//! Phase-transition, MSE, solver-comparison and imaging experiment drivers.
//!
//! Every trial derives its own random stream from the base seed plus a tag
//! path, so results are reproducible row by row and independent of the
//! execution schedule. Trials run in parallel (capped by `GERF_THREADS`);
//! aggregation sorts by key before emission.

use rayon::prelude::*;

use crate::core::{
    derive_seed, norm2, relative_error, sub, CholeskyFactor, DenseMatrix, PenaltySpec,
    ProblemInstance, SolverConfig,
};
use crate::harness::csvout::ExperimentRow;
use crate::harness::gen::{gen_gaussian_matrix, gen_noise, gen_oversampled_dct, gen_sparse_signal};
use crate::harness::thread_pool;
use crate::imaging::{
    gerf_grad_recon_report, l1l2_grad_recon_report, radial_mask, sample_real, shepp_logan,
    tv_recon_report, zero_fill_recon, ImagingProblem, ReconParams, ReconReport,
};
use crate::solvers::{dca_solve, irl1_solve, solve, SolverReport};
use crate::{Error, Result};

/// Relative error at or below this level counts as a successful recovery.
pub const SUCCESS_RE: f64 = 1e-3;

/// Measurement-matrix ensembles used by the experiments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixKind {
    Gaussian { m: usize, n: usize },
    OversampledDct { m: usize, n: usize, f: f64 },
}

impl MatrixKind {
    pub fn generate(&self, seed: u64) -> DenseMatrix {
        match *self {
            MatrixKind::Gaussian { m, n } => gen_gaussian_matrix(m, n, seed),
            MatrixKind::OversampledDct { m, n, f } => gen_oversampled_dct(m, n, f, seed),
        }
    }

    pub fn rows(&self) -> usize {
        match *self {
            MatrixKind::Gaussian { m, .. } | MatrixKind::OversampledDct { m, .. } => m,
        }
    }

    pub fn cols(&self) -> usize {
        match *self {
            MatrixKind::Gaussian { n, .. } | MatrixKind::OversampledDct { n, .. } => n,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            MatrixKind::Gaussian { m, n } => format!("gaussian(m={m},N={n})"),
            MatrixKind::OversampledDct { m, n, f } => format!("dct(m={m},N={n},F={f})"),
        }
    }

    fn with_rows(&self, m: usize) -> MatrixKind {
        match *self {
            MatrixKind::Gaussian { n, .. } => MatrixKind::Gaussian { m, n },
            MatrixKind::OversampledDct { n, f, .. } => MatrixKind::OversampledDct { m, n, f },
        }
    }
}

/// A penalty routed through a solver; `Lasso` is the unit-weight baseline.
pub type MethodSpec = PenaltySpec;

/// Experiment description shared by the batch drivers.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub matrix: MatrixKind,
    /// Sparsity grid for success-rate sweeps; strictly increasing.
    pub sparsity_grid: Vec<usize>,
    pub trials: usize,
    pub solver: SolverConfig,
    pub penalties: Vec<MethodSpec>,
    pub base_seed: u64,
}

impl ExperimentSpec {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1".to_string()));
        }
        if self.penalties.is_empty() {
            return Err(Error::domain("at least one penalty is required".to_string()));
        }
        if self.sparsity_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("sparsity grid must be strictly increasing".to_string()));
        }
        self.solver.validate()
    }
}

// tag namespaces for seed derivation
const TAG_PHASE: u64 = 1;
const TAG_MSE: u64 = 2;
const TAG_COMPARE: u64 = 3;

fn run_method(
    instance: &ProblemInstance,
    spec: &MethodSpec,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    solve(instance, spec, cfg)
}

/// Success-rate sweep over the sparsity grid: fresh matrix and signal per
/// `(k, trial)` stream, noise-free observations, success when the relative
/// error is at most 1e-3. Solver failures count as non-success.
pub fn run_phase_transition(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>> {
    spec.validate()?;
    if spec.sparsity_grid.is_empty() {
        return Err(Error::domain("phase transition needs a sparsity grid".to_string()));
    }
    let n = spec.matrix.cols();
    let jobs: Vec<(usize, usize)> = spec
        .sparsity_grid
        .iter()
        .enumerate()
        .flat_map(|(ki, _)| (0..spec.trials).map(move |t| (ki, t)))
        .collect();

    let pool = thread_pool();
    let outcomes: Vec<(usize, Vec<bool>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(ki, t)| {
                let k = spec.sparsity_grid[ki] as u64;
                let a_seed = derive_seed(spec.base_seed, &[TAG_PHASE, k, t as u64, 0]);
                let x_seed = derive_seed(spec.base_seed, &[TAG_PHASE, k, t as u64, 1]);
                let a = spec.matrix.generate(a_seed);
                let x = gen_sparse_signal(n, k as usize, x_seed).expect("k <= n by grid check");
                let y = a.matvec(&x);
                let instance = ProblemInstance::new(a, y, Some(x), None)
                    .expect("generated instance is consistent");
                let successes = spec
                    .penalties
                    .iter()
                    .map(|pen| match run_method(&instance, pen, &spec.solver) {
                        Ok(rep) => relative_error(
                            &rep.result.estimate,
                            instance.truth.as_ref().expect("truth attached"),
                        )
                        .map(|re| re <= SUCCESS_RE)
                        .unwrap_or(false),
                        Err(e) => {
                            eprintln!("solver failure at k={k}, trial {t}: {e}");
                            false
                        }
                    })
                    .collect();
                (ki, successes)
            })
            .collect()
    });

    let mut counts = vec![vec![0usize; spec.penalties.len()]; spec.sparsity_grid.len()];
    for (ki, successes) in outcomes {
        for (pi, ok) in successes.iter().enumerate() {
            if *ok {
                counts[ki][pi] += 1;
            }
        }
    }

    let mut rows = Vec::new();
    for (ki, &k) in spec.sparsity_grid.iter().enumerate() {
        for (pi, pen) in spec.penalties.iter().enumerate() {
            let rate = counts[ki][pi] as f64 / spec.trials as f64;
            debug_assert!((0.0..=1.0).contains(&rate));
            let (param1, param2) = pen.params();
            rows.push(ExperimentRow {
                method: pen.label(),
                param1,
                param2,
                k_or_m: k,
                value: rate,
                n_trials: spec.trials,
                seed: spec.base_seed,
            });
        }
    }
    Ok(rows)
}

/// Benchmark MSE of the support-restricted least-squares oracle:
/// `σ̃²·tr((A_Sᵀ A_S)⁻¹)`.
pub fn oracle_mse(a: &DenseMatrix, support: &[usize], noise_sd: f64) -> Result<f64> {
    if !(noise_sd >= 0.0) {
        return Err(Error::domain(format!("noise_sd must be nonnegative, got {noise_sd}")));
    }
    if support.iter().any(|&j| j >= a.cols()) {
        return Err(Error::domain("support index out of range".to_string()));
    }
    if support.is_empty() {
        return Ok(0.0);
    }
    let a_s = a.select_columns(support);
    let gram = a_s.gram_plus_ridge(0.0);
    let factor = CholeskyFactor::new(&gram).map_err(|_| {
        Error::Singular("restricted Gram matrix is not positive definite".to_string())
    })?;
    // tr(G⁻¹) = ‖L⁻¹‖_F², accumulated column by column
    let k = support.len();
    let mut trace = 0.0;
    let mut e = vec![0.0; k];
    for j in 0..k {
        e[j] = 1.0;
        let z = factor.solve_lower(&e);
        trace += crate::core::dot(&z[j..], &z[j..]);
        e[j] = 0.0;
    }
    Ok(noise_sd * noise_sd * trace)
}

/// Noisy MSE study over a grid of measurement counts. Emits one row per
/// `(method, m)` with the mean squared l2 error across trials, plus an
/// `oracle` row per `m`.
pub fn run_mse_study(
    spec: &ExperimentSpec,
    m_grid: &[usize],
    k: usize,
    noise_sd: f64,
) -> Result<Vec<ExperimentRow>> {
    spec.validate()?;
    if m_grid.is_empty() {
        return Err(Error::domain("mse study needs a measurement grid".to_string()));
    }
    if !(noise_sd >= 0.0) {
        return Err(Error::domain(format!("noise_sd must be nonnegative, got {noise_sd}")));
    }
    let n = spec.matrix.cols();
    if k > n {
        return Err(Error::Dimension { context: "mse sparsity", expected: n, got: k });
    }

    let jobs: Vec<(usize, usize)> = m_grid
        .iter()
        .enumerate()
        .flat_map(|(mi, _)| (0..spec.trials).map(move |t| (mi, t)))
        .collect();

    let pool = thread_pool();
    // per job: squared errors per method, plus the oracle value
    let outcomes: Vec<(usize, Vec<f64>, f64)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(mi, t)| {
                let m = m_grid[mi];
                let a_seed = derive_seed(spec.base_seed, &[TAG_MSE, m as u64, t as u64, 0]);
                let x_seed = derive_seed(spec.base_seed, &[TAG_MSE, m as u64, t as u64, 1]);
                let e_seed = derive_seed(spec.base_seed, &[TAG_MSE, m as u64, t as u64, 2]);
                let a = spec.matrix.with_rows(m).generate(a_seed);
                let x = gen_sparse_signal(n, k, x_seed).expect("k <= n checked");
                let mut y = a.matvec(&x);
                if noise_sd > 0.0 {
                    let eps = gen_noise(m, noise_sd, e_seed);
                    for (yi, ei) in y.iter_mut().zip(&eps) {
                        *yi += ei;
                    }
                }
                let support: Vec<usize> =
                    x.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, _)| i).collect();
                let oracle = oracle_mse(&a, &support, noise_sd).unwrap_or(f64::NAN);
                let instance =
                    ProblemInstance::new(a, y, Some(x), Some(noise_sd)).expect("consistent");
                let sqerrs = spec
                    .penalties
                    .iter()
                    .map(|pen| match run_method(&instance, pen, &spec.solver) {
                        Ok(rep) => {
                            let d = sub(&rep.result.estimate, instance.truth.as_ref().unwrap());
                            let e = norm2(&d);
                            e * e
                        }
                        Err(e) => {
                            eprintln!("solver failure at m={m}, trial {t}: {e}");
                            f64::NAN
                        }
                    })
                    .collect();
                (mi, sqerrs, oracle)
            })
            .collect()
    });

    let n_methods = spec.penalties.len();
    let mut sums = vec![vec![0.0; n_methods + 1]; m_grid.len()];
    let mut ordered = outcomes;
    ordered.sort_by_key(|(mi, _, _)| *mi);
    for (mi, sqerrs, oracle) in &ordered {
        for (pi, s) in sqerrs.iter().enumerate() {
            sums[*mi][pi] += s;
        }
        sums[*mi][n_methods] += oracle;
    }

    let mut rows = Vec::new();
    for (mi, &m) in m_grid.iter().enumerate() {
        for (pi, pen) in spec.penalties.iter().enumerate() {
            let (param1, param2) = pen.params();
            rows.push(ExperimentRow {
                method: pen.label(),
                param1,
                param2,
                k_or_m: m,
                value: sums[mi][pi] / spec.trials as f64,
                n_trials: spec.trials,
                seed: spec.base_seed,
            });
        }
        rows.push(ExperimentRow {
            method: "oracle".to_string(),
            param1: None,
            param2: None,
            k_or_m: m,
            value: sums[mi][n_methods] / spec.trials as f64,
            n_trials: spec.trials,
            seed: spec.base_seed,
        });
    }
    Ok(rows)
}

/// Outcome of the two-solver comparison on a single instance.
#[derive(Clone, Debug)]
pub struct Irl1VsDcaOutcome {
    pub rows: Vec<ExperimentRow>,
    pub re_irl1: f64,
    pub re_dca: f64,
    /// Relative difference between the two estimates.
    pub agreement: f64,
    pub irl1_mean_s: f64,
    pub irl1_sd_s: f64,
    pub dca_mean_s: f64,
    pub dca_sd_s: f64,
}

/// Solve one seeded instance with both outer algorithms, timing each over
/// `reps` repetitions.
pub fn run_irl1_vs_dca(
    matrix: MatrixKind,
    k: usize,
    noise_sd: Option<f64>,
    p: f64,
    sigma: f64,
    cfg: &SolverConfig,
    reps: usize,
    base_seed: u64,
) -> Result<Irl1VsDcaOutcome> {
    cfg.validate()?;
    if reps == 0 {
        return Err(Error::domain("reps must be at least 1".to_string()));
    }
    let n = matrix.cols();
    let a = matrix.generate(derive_seed(base_seed, &[TAG_COMPARE, 0]));
    let x = gen_sparse_signal(n, k, derive_seed(base_seed, &[TAG_COMPARE, 1]))?;
    let mut y = a.matvec(&x);
    if let Some(sd) = noise_sd {
        let eps = gen_noise(y.len(), sd, derive_seed(base_seed, &[TAG_COMPARE, 2]));
        for (yi, ei) in y.iter_mut().zip(&eps) {
            *yi += ei;
        }
    }
    let instance = ProblemInstance::new(a, y, Some(x), noise_sd)?;
    let spec = PenaltySpec::gerf(p, sigma)?;

    let mut irl1_times = Vec::with_capacity(reps);
    let mut dca_times = Vec::with_capacity(reps);
    let mut irl1_est = Vec::new();
    let mut dca_est = Vec::new();
    for _ in 0..reps {
        let r1 = irl1_solve(&instance, &spec, cfg)?;
        irl1_times.push(r1.result.wall_time);
        irl1_est = r1.result.estimate;
        let r2 = dca_solve(&instance, p, sigma, cfg)?;
        dca_times.push(r2.result.wall_time);
        dca_est = r2.result.estimate;
    }

    let truth = instance.truth.as_ref().unwrap();
    let re_irl1 = relative_error(&irl1_est, truth)?;
    let re_dca = relative_error(&dca_est, truth)?;
    let agreement = relative_error(&irl1_est, &dca_est)?;
    let (irl1_mean_s, irl1_sd_s) = mean_sd(&irl1_times);
    let (dca_mean_s, dca_sd_s) = mean_sd(&dca_times);

    let rows = vec![
        ExperimentRow {
            method: "irl1".to_string(),
            param1: Some(p),
            param2: Some(sigma),
            k_or_m: k,
            value: re_irl1,
            n_trials: reps,
            seed: base_seed,
        },
        ExperimentRow {
            method: "dca".to_string(),
            param1: Some(p),
            param2: Some(sigma),
            k_or_m: k,
            value: re_dca,
            n_trials: reps,
            seed: base_seed,
        },
    ];
    Ok(Irl1VsDcaOutcome {
        rows,
        re_irl1,
        re_dca,
        agreement,
        irl1_mean_s,
        irl1_sd_s,
        dca_mean_s,
        dca_sd_s,
    })
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Reconstruction methods for the imaging demo.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MriMethod {
    Gerf { p: f64, sigma: f64 },
    Tv,
    L1L2,
    ZeroFill,
}

impl MriMethod {
    pub fn label(&self) -> String {
        match self {
            MriMethod::Gerf { .. } => "gerf".to_string(),
            MriMethod::Tv => "tv".to_string(),
            MriMethod::L1L2 => "l1l2".to_string(),
            MriMethod::ZeroFill => "zerofill".to_string(),
        }
    }

    pub fn params(&self) -> (Option<f64>, Option<f64>) {
        match *self {
            MriMethod::Gerf { p, sigma } => (Some(p), Some(sigma)),
            _ => (None, None),
        }
    }
}

/// Result of one phantom reconstruction.
#[derive(Clone, Debug)]
pub struct MriOutcome {
    pub method: MriMethod,
    pub image: Vec<f64>,
    pub relative_error: f64,
    pub report: Option<ReconReport>,
    pub row: ExperimentRow,
}

/// Reconstruct the Shepp-Logan phantom from radial Fourier samples.
pub fn run_mri(
    n: usize,
    lines: usize,
    method: MriMethod,
    params: &ReconParams,
    seed: u64,
) -> Result<MriOutcome> {
    let phantom = shepp_logan(n)?;
    let mask = radial_mask(n, lines)?;
    let f = sample_real(&phantom, &mask, n);
    let prob = ImagingProblem::new(n, mask, f)?;

    let (image, report) = match method {
        MriMethod::Gerf { p, sigma } => {
            let r = gerf_grad_recon_report(&prob, p, sigma, params)?;
            (r.image.clone(), Some(r))
        }
        MriMethod::Tv => {
            let r = tv_recon_report(&prob, params)?;
            (r.image.clone(), Some(r))
        }
        MriMethod::L1L2 => {
            let r = l1l2_grad_recon_report(&prob, params)?;
            (r.image.clone(), Some(r))
        }
        MriMethod::ZeroFill => (zero_fill_recon(&prob), None),
    };

    let re = relative_error(&image, &phantom)?;
    let (param1, param2) = method.params();
    let row = ExperimentRow {
        method: method.label(),
        param1,
        param2,
        k_or_m: lines,
        value: re,
        n_trials: 1,
        seed,
    };
    Ok(MriOutcome { method, image, relative_error: re, report, row })
}
