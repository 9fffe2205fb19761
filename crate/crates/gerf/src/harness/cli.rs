//! Command-line interface: batch experiments, single-instance recovery,
//! data generation. Every experiment writes a CSV body plus a `.meta`
//! sidecar recording all parameters and seeds.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::core::{
    read_matrix, read_vector, relative_error, write_matrix, write_vector, Algorithm, PenaltySpec,
    ProblemInstance, SolverConfig, DEFAULT_LAMBDA_NOISE_FREE, DEFAULT_LAMBDA_NOISY,
};
use crate::harness::experiments::{
    run_irl1_vs_dca, run_mri, run_mse_study, run_phase_transition, ExperimentSpec, MatrixKind,
    MriMethod, SUCCESS_RE,
};
use crate::harness::gen::{gen_gaussian_matrix, gen_oversampled_dct, gen_sparse_signal};
use crate::harness::gnsp::check_gnsp_sampled;
use crate::harness::{thread_count, write_experiment, ExperimentRow};
use crate::imaging::{radial_mask, shepp_logan, write_mask_pgm, write_pgm8, ReconParams};
use crate::solvers::solve;
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "gerf",
    version,
    about = "Sparse recovery and Fourier-domain image reconstruction with generalized error function penalties"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover a single instance from matrix/vector files.
    Recover(RecoverArgs),
    /// Success-rate sweep over sparsity levels (noise-free).
    Phase(PhaseArgs),
    /// Noisy mean-squared-error study with the oracle benchmark.
    Mse(MseArgs),
    /// Compare the reweighted and DC solvers on one seeded instance.
    #[command(name = "irl1-vs-dca")]
    Irl1VsDca(CompareArgs),
    /// Phantom reconstruction from radial Fourier samples.
    Mri(MriArgs),
    /// Sampled falsifier for the generalized null space property.
    #[command(name = "gnsp-check")]
    GnspCheck(GnspArgs),
    /// Generate matrices, signals, masks and phantoms.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Args)]
struct RecoverArgs {
    /// GERFMAT1 measurement matrix.
    #[arg(long)]
    matrix_file: PathBuf,
    /// GERFMAT1 observation vector.
    #[arg(long)]
    obs_file: PathBuf,
    /// Optional ground truth for error reporting.
    #[arg(long)]
    truth_file: Option<PathBuf>,
    /// Penalty, e.g. gerf:p=2,sigma=0.5 | lasso | lp:p=0.5 | tl1:a=1.
    #[arg(long, default_value = "gerf:p=2,sigma=1")]
    penalty: String,
    #[arg(long, value_parser = parse_algorithm, default_value = "dca")]
    algo: Algorithm,
    #[arg(long, default_value_t = DEFAULT_LAMBDA_NOISE_FREE)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 10)]
    outer_max: usize,
    /// Inner iteration cap; defaults to twice the signal length.
    #[arg(long)]
    inner_max: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output estimate (GERFMAT1 vector).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long, default_value = "gaussian")]
    matrix: String,
    #[arg(long, default_value_t = 64)]
    m: usize,
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Oversampling factor for the DCT ensemble.
    #[arg(long, default_value_t = 5.0)]
    dct_f: f64,
    /// Repeatable penalty flags.
    #[arg(long = "penalty", required = true)]
    penalties: Vec<String>,
    /// Sparsity grid, start:step:end or a comma list.
    #[arg(long, default_value = "2:2:32")]
    k: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_parser = parse_algorithm, default_value = "dca")]
    algo: Algorithm,
    #[arg(long, default_value_t = DEFAULT_LAMBDA_NOISE_FREE)]
    lambda: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MseArgs {
    #[arg(long, default_value_t = 512)]
    n: usize,
    #[arg(long, default_value_t = 130)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    noise_sd: f64,
    /// Measurement grid, start:step:end or a comma list.
    #[arg(long, default_value = "240:40:400")]
    m_grid: String,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Repeatable penalty flags; default compares both GERF variants with
    /// the lasso.
    #[arg(long = "penalty")]
    penalties: Vec<String>,
    #[arg(long, value_parser = parse_algorithm, default_value = "dca")]
    algo: Algorithm,
    #[arg(long, default_value_t = DEFAULT_LAMBDA_NOISY)]
    lambda: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Noisy variant: 15-sparse signal, noise sd 0.1, lambda 1e-2.
    #[arg(long)]
    noisy: bool,
    #[arg(long, default_value_t = 64)]
    m: usize,
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Sparsity level; defaults to 30 noise-free, 15 noisy.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long)]
    lambda: Option<f64>,
    /// Timing repetitions.
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MriArgs {
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    lines: usize,
    /// Repeatable: gerf:p=1,sigma=1 | tv | l1l2 | zerofill. Defaults to
    /// all four.
    #[arg(long = "method")]
    methods: Vec<String>,
    #[arg(long, default_value_t = 10.0)]
    split_weight: f64,
    #[arg(long, default_value_t = 10.0)]
    constraint_weight: f64,
    #[arg(long, default_value_t = 5)]
    inner: usize,
    #[arg(long, default_value_t = 300)]
    outer_max: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory for PGM/GERFMAT1 outputs and the CSV report.
    #[arg(long, default_value = "mri_out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GnspArgs {
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Support order to falsify (0 < s < N/2).
    #[arg(long, default_value_t = 2)]
    s: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Check a stored matrix instead of a seeded Gaussian draw.
    #[arg(long)]
    matrix_file: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Gaussian measurement matrix (GERFMAT1).
    Gaussian {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Oversampled-DCT dictionary (GERFMAT1).
    Dct {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 5.0)]
        f: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sparse signal with standard-normal nonzeros (GERFMAT1 vector).
    Signal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Radial sampling mask (PGM, 0/255).
    Mask {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lines: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shepp-Logan phantom (PGM).
    Phantom {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Entry point; returns the process exit code.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Dimension { .. } | Error::Domain(_) | Error::Format(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::Recover(a) => cmd_recover(a),
        Command::Phase(a) => cmd_phase(a),
        Command::Mse(a) => cmd_mse(a),
        Command::Irl1VsDca(a) => cmd_compare(a),
        Command::Mri(a) => cmd_mri(a),
        Command::GnspCheck(a) => cmd_gnsp(a),
        Command::Gen(g) => cmd_gen(g),
    }
}

fn cmd_recover(a: RecoverArgs) -> Result<()> {
    let matrix = read_matrix(&a.matrix_file)?;
    let y = read_vector(&a.obs_file)?;
    let truth = a.truth_file.as_deref().map(read_vector).transpose()?;
    let n = matrix.cols();
    let instance = ProblemInstance::new(matrix, y, truth, None)?;
    let spec = parse_penalty(&a.penalty)?;
    let cfg = SolverConfig {
        lambda: a.lambda,
        rho: a.rho,
        outer_max: a.outer_max,
        inner_max: a.inner_max.unwrap_or(2 * n),
        outer_tol: a.tol,
        algorithm: a.algo,
        seed: a.seed,
    };
    let report = solve(&instance, &spec, &cfg)?;
    write_vector(&a.out, &report.result.estimate)?;
    println!(
        "method={} outer_iters={} converged={} objective={:.6e} wall_time_s={:.3}",
        spec.label(),
        report.result.outer_iters,
        report.result.converged,
        report.result.objective_trace.last().copied().unwrap_or(f64::NAN),
        report.result.wall_time
    );
    if let Some(truth) = &instance.truth {
        println!("relative_error={:.6e}", relative_error(&report.result.estimate, truth)?);
    }
    println!("estimate written to {}", a.out.display());
    Ok(())
}

fn cmd_phase(a: PhaseArgs) -> Result<()> {
    let matrix = parse_matrix_kind(&a.matrix, a.m, a.n, a.dct_f)?;
    let penalties = a.penalties.iter().map(|s| parse_penalty(s)).collect::<Result<Vec<_>>>()?;
    let grid = parse_grid(&a.k)?;
    let mut solver = SolverConfig::for_signal_len(a.n, a.lambda);
    solver.algorithm = a.algo;
    solver.seed = a.seed;
    let spec = ExperimentSpec {
        matrix,
        sparsity_grid: grid,
        trials: a.trials,
        solver,
        penalties,
        base_seed: a.seed,
    };
    let rows = run_phase_transition(&spec)?;
    let mut meta = solver_metadata(&spec.solver);
    meta.push(("experiment".into(), "phase_transition".into()));
    meta.push(("matrix".into(), spec.matrix.label()));
    meta.push(("trials".into(), a.trials.to_string()));
    meta.push(("success_threshold".into(), format!("{SUCCESS_RE:e}")));
    finish_experiment(&a.out, &rows, meta)
}

fn cmd_mse(a: MseArgs) -> Result<()> {
    let penalties = if a.penalties.is_empty() {
        vec![
            PenaltySpec::gerf(1.0, 1.0)?,
            PenaltySpec::gerf(2.0, 1.0)?,
            PenaltySpec::L1,
        ]
    } else {
        a.penalties.iter().map(|s| parse_penalty(s)).collect::<Result<Vec<_>>>()?
    };
    let m_grid = parse_grid(&a.m_grid)?;
    let mut solver = SolverConfig::for_signal_len(a.n, a.lambda);
    solver.algorithm = a.algo;
    solver.seed = a.seed;
    let spec = ExperimentSpec {
        matrix: MatrixKind::Gaussian { m: m_grid[0], n: a.n },
        sparsity_grid: vec![a.k],
        trials: a.trials,
        solver,
        penalties,
        base_seed: a.seed,
    };
    let rows = run_mse_study(&spec, &m_grid, a.k, a.noise_sd)?;
    let mut meta = solver_metadata(&spec.solver);
    meta.push(("experiment".into(), "mse_study".into()));
    meta.push(("matrix".into(), format!("gaussian(m=grid,N={})", a.n)));
    meta.push(("m_grid".into(), format_grid(&m_grid)));
    meta.push(("k".into(), a.k.to_string()));
    meta.push(("noise_sd".into(), format!("{:e}", a.noise_sd)));
    meta.push(("trials".into(), a.trials.to_string()));
    meta.push((
        "note".into(),
        "l1-l2 vector baseline omitted: its solver is external to this artifact".into(),
    ));
    finish_experiment(&a.out, &rows, meta)
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    let k = a.k.unwrap_or(if a.noisy { 15 } else { 30 });
    let lambda = a.lambda.unwrap_or(if a.noisy {
        DEFAULT_LAMBDA_NOISY
    } else {
        DEFAULT_LAMBDA_NOISE_FREE
    });
    let noise_sd = a.noisy.then_some(0.1);
    let mut cfg = SolverConfig::for_signal_len(a.n, lambda);
    cfg.seed = a.seed;
    let matrix = MatrixKind::Gaussian { m: a.m, n: a.n };
    let outcome = run_irl1_vs_dca(matrix, k, noise_sd, a.p, a.sigma, &cfg, a.reps, a.seed)?;
    println!(
        "irl1: RE={:.6e}  mean_time={:.4}s (sd {:.4});  dca: RE={:.6e}  mean_time={:.4}s (sd {:.4})",
        outcome.re_irl1,
        outcome.irl1_mean_s,
        outcome.irl1_sd_s,
        outcome.re_dca,
        outcome.dca_mean_s,
        outcome.dca_sd_s
    );
    println!("estimate agreement (relative difference): {:.6e}", outcome.agreement);
    let mut meta = solver_metadata(&cfg);
    meta.push(("experiment".into(), "irl1_vs_dca".into()));
    meta.push(("matrix".into(), matrix.label()));
    meta.push(("k".into(), k.to_string()));
    meta.push(("noise_sd".into(), noise_sd.map(|s| format!("{s:e}")).unwrap_or_else(|| "0".into())));
    meta.push(("reps".into(), a.reps.to_string()));
    meta.push(("irl1_mean_time_s".into(), format!("{:.6}", outcome.irl1_mean_s)));
    meta.push(("irl1_sd_time_s".into(), format!("{:.6}", outcome.irl1_sd_s)));
    meta.push(("dca_mean_time_s".into(), format!("{:.6}", outcome.dca_mean_s)));
    meta.push(("dca_sd_time_s".into(), format!("{:.6}", outcome.dca_sd_s)));
    meta.push(("agreement".into(), format!("{:.6e}", outcome.agreement)));
    finish_experiment(&a.out, &outcome.rows, meta)
}

fn cmd_mri(a: MriArgs) -> Result<()> {
    let methods: Vec<MriMethod> = if a.methods.is_empty() {
        vec![
            MriMethod::Gerf { p: 1.0, sigma: 1.0 },
            MriMethod::L1L2,
            MriMethod::Tv,
            MriMethod::ZeroFill,
        ]
    } else {
        a.methods.iter().map(|s| parse_mri_method(s)).collect::<Result<Vec<_>>>()?
    };
    let params = ReconParams {
        split_weight: a.split_weight,
        constraint_weight: a.constraint_weight,
        inner_iters: a.inner,
        outer_max: a.outer_max,
        outer_tol: 1e-6,
    };
    std::fs::create_dir_all(&a.out_dir)?;

    let phantom = shepp_logan(a.n)?;
    let mask = radial_mask(a.n, a.lines)?;
    write_pgm8(&a.out_dir.join("phantom.pgm"), &phantom, a.n, a.n)?;
    write_mask_pgm(&a.out_dir.join("mask.pgm"), &mask, a.n, a.n)?;

    let mut rows = Vec::new();
    for method in methods {
        let outcome = run_mri(a.n, a.lines, method, &params, a.seed)?;
        let stem = format!("recon_{}", method.label());
        write_pgm8(&a.out_dir.join(format!("{stem}.pgm")), &outcome.image, a.n, a.n)?;
        let exact = crate::core::DenseMatrix::new(a.n, a.n, outcome.image.clone())?;
        write_matrix(&a.out_dir.join(format!("{stem}.mat")), &exact)?;
        let feas = outcome
            .report
            .as_ref()
            .map(|r| format!("{:.3e}", r.data_residual))
            .unwrap_or_else(|| "n/a".into());
        println!(
            "{}: relative_error={:.6e}  data_residual={}",
            method.label(),
            outcome.relative_error,
            feas
        );
        rows.push(outcome.row);
    }

    let mut meta = vec![
        ("experiment".into(), "mri".into()),
        ("n".into(), a.n.to_string()),
        ("lines".into(), a.lines.to_string()),
        ("split_weight".into(), format!("{:e}", a.split_weight)),
        ("constraint_weight".into(), format!("{:e}", a.constraint_weight)),
        ("inner_iters".into(), a.inner.to_string()),
        ("outer_max".into(), a.outer_max.to_string()),
        ("seed".into(), a.seed.to_string()),
    ];
    meta.push(("version".into(), env!("CARGO_PKG_VERSION").into()));
    meta.push(("threads".into(), thread_count().to_string()));
    let csv = a.out_dir.join("mri.csv");
    write_experiment(&csv, &rows, &meta)?;
    println!("report written to {}", csv.display());
    Ok(())
}

fn cmd_gnsp(a: GnspArgs) -> Result<()> {
    let matrix = match &a.matrix_file {
        Some(p) => read_matrix(p)?,
        None => gen_gaussian_matrix(a.m, a.n, a.seed),
    };
    let outcome = check_gnsp_sampled(&matrix, a.s, a.p, a.sigma, a.samples, a.seed)?;
    let found = outcome.is_some();
    match &outcome {
        Some(ce) => {
            println!(
                "counterexample found: support {:?}, J(v_S)={:.6e} >= J(v_Sc)={:.6e}",
                ce.support, ce.j_support, ce.j_complement
            );
            println!("v = {:?}", ce.v);
        }
        None => println!(
            "no counterexample in {} sampled kernel directions (not a certificate)",
            a.samples
        ),
    }
    if let Some(out) = &a.out {
        let rows = vec![ExperimentRow {
            method: "gnsp".into(),
            param1: Some(a.p),
            param2: Some(a.sigma),
            k_or_m: a.s,
            value: if found { 1.0 } else { 0.0 },
            n_trials: a.samples,
            seed: a.seed,
        }];
        let meta = vec![
            ("experiment".into(), "gnsp_check".into()),
            ("matrix".into(), format!("gaussian(m={},N={})", matrix.rows(), matrix.cols())),
            ("s".into(), a.s.to_string()),
            ("p".into(), format!("{:e}", a.p)),
            ("sigma".into(), format!("{:e}", a.sigma)),
            ("samples".into(), a.samples.to_string()),
            ("seed".into(), a.seed.to_string()),
            ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ];
        write_experiment(out, &rows, &meta)?;
    }
    Ok(())
}

fn cmd_gen(g: GenCommand) -> Result<()> {
    match g {
        GenCommand::Gaussian { m, n, seed, out } => {
            write_matrix(&out, &gen_gaussian_matrix(m, n, seed))?;
            println!("gaussian {m}x{n} written to {}", out.display());
        }
        GenCommand::Dct { m, n, f, seed, out } => {
            write_matrix(&out, &gen_oversampled_dct(m, n, f, seed))?;
            println!("oversampled DCT {m}x{n} (F={f}) written to {}", out.display());
        }
        GenCommand::Signal { n, k, seed, out } => {
            write_vector(&out, &gen_sparse_signal(n, k, seed)?)?;
            println!("{k}-sparse signal of length {n} written to {}", out.display());
        }
        GenCommand::Mask { n, lines, out } => {
            write_mask_pgm(&out, &radial_mask(n, lines)?, n, n)?;
            println!("radial mask {n}x{n} with {lines} lines written to {}", out.display());
        }
        GenCommand::Phantom { n, out } => {
            write_pgm8(&out, &shepp_logan(n)?, n, n)?;
            println!("phantom {n}x{n} written to {}", out.display());
        }
    }
    Ok(())
}

fn finish_experiment(out: &Path, rows: &[ExperimentRow], mut meta: Vec<(String, String)>) -> Result<()> {
    meta.push(("version".into(), env!("CARGO_PKG_VERSION").into()));
    meta.push(("threads".into(), thread_count().to_string()));
    write_experiment(out, rows, &meta)?;
    println!("{} rows written to {}", rows.len(), out.display());
    Ok(())
}

fn solver_metadata(cfg: &SolverConfig) -> Vec<(String, String)> {
    vec![
        ("lambda".into(), format!("{:e}", cfg.lambda)),
        ("rho".into(), format!("{:e}", cfg.rho)),
        ("outer_max".into(), cfg.outer_max.to_string()),
        ("inner_max".into(), cfg.inner_max.to_string()),
        ("outer_tol".into(), format!("{:e}", cfg.outer_tol)),
        ("algorithm".into(), algorithm_name(cfg.algorithm).into()),
        ("base_seed".into(), cfg.seed.to_string()),
    ]
}

fn algorithm_name(a: Algorithm) -> &'static str {
    match a {
        Algorithm::Dca => "dca",
        Algorithm::Irl1 => "irl1",
    }
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    match s {
        "dca" => Ok(Algorithm::Dca),
        "irl1" => Ok(Algorithm::Irl1),
        other => Err(format!("unknown algorithm {other:?}, expected dca or irl1")),
    }
}

fn parse_matrix_kind(kind: &str, m: usize, n: usize, f: f64) -> Result<MatrixKind> {
    match kind {
        "gaussian" => Ok(MatrixKind::Gaussian { m, n }),
        "dct" => Ok(MatrixKind::OversampledDct { m, n, f }),
        other => Err(Error::domain(format!("unknown matrix kind {other:?}, expected gaussian or dct"))),
    }
}

/// Parse `gerf:p=2,sigma=0.5`, `lasso`, `lp:p=0.5`, or `tl1:a=1`.
pub fn parse_penalty(s: &str) -> Result<PenaltySpec> {
    let (name, args) = s.split_once(':').unwrap_or((s, ""));
    let kv = parse_kv(args)?;
    match name {
        "lasso" | "l1" => Ok(PenaltySpec::L1),
        "gerf" => PenaltySpec::gerf(
            require_kv(&kv, "p", s)?,
            require_kv(&kv, "sigma", s)?,
        ),
        "lp" => PenaltySpec::lp(require_kv(&kv, "p", s)?),
        "tl1" => PenaltySpec::tl1(require_kv(&kv, "a", s)?),
        other => Err(Error::domain(format!("unknown penalty {other:?} in {s:?}"))),
    }
}

/// Parse `gerf:p=1,sigma=1`, `tv`, `l1l2`, or `zerofill`.
pub fn parse_mri_method(s: &str) -> Result<MriMethod> {
    let (name, args) = s.split_once(':').unwrap_or((s, ""));
    let kv = parse_kv(args)?;
    match name {
        "tv" => Ok(MriMethod::Tv),
        "l1l2" => Ok(MriMethod::L1L2),
        "zerofill" | "zero-fill" => Ok(MriMethod::ZeroFill),
        "gerf" => Ok(MriMethod::Gerf {
            p: require_kv(&kv, "p", s)?,
            sigma: require_kv(&kv, "sigma", s)?,
        }),
        other => Err(Error::domain(format!("unknown reconstruction method {other:?} in {s:?}"))),
    }
}

fn parse_kv(args: &str) -> Result<Vec<(String, f64)>> {
    if args.is_empty() {
        return Ok(Vec::new());
    }
    args.split(',')
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::domain(format!("expected key=value, got {pair:?}")))?;
            let val: f64 = v
                .parse()
                .map_err(|_| Error::domain(format!("bad numeric value {v:?} for {k}")))?;
            Ok((k.trim().to_string(), val))
        })
        .collect()
}

fn require_kv(kv: &[(String, f64)], key: &str, ctx: &str) -> Result<f64> {
    kv.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::domain(format!("missing {key}= in {ctx:?}")))
}

/// Parse `start:step:end` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid: Vec<usize> = if parts.len() == 3 {
        let start: usize = parse_usize(parts[0])?;
        let step: usize = parse_usize(parts[1])?;
        let end: usize = parse_usize(parts[2])?;
        if step == 0 {
            return Err(Error::domain("grid step must be positive".to_string()));
        }
        (start..=end).step_by(step).collect()
    } else if parts.len() == 1 {
        s.split(',').map(parse_usize).collect::<Result<Vec<_>>>()?
    } else {
        return Err(Error::domain(format!("bad grid spec {s:?}; use start:step:end or a comma list")));
    };
    if grid.is_empty() {
        return Err(Error::domain(format!("grid {s:?} is empty")));
    }
    Ok(grid)
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::domain(format!("bad integer {s:?} in grid")))
}

fn format_grid(grid: &[usize]) -> String {
    grid.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn penalty_parsing() {
        assert_eq!(parse_penalty("lasso").unwrap(), PenaltySpec::L1);
        assert_eq!(
            parse_penalty("gerf:p=2,sigma=0.5").unwrap(),
            PenaltySpec::Gerf { p: 2.0, sigma: 0.5 }
        );
        assert!(matches!(parse_penalty("lp:p=0.5").unwrap(), PenaltySpec::Lp { .. }));
        assert!(matches!(parse_penalty("tl1:a=1").unwrap(), PenaltySpec::Tl1 { a } if a == 1.0));
        assert!(parse_penalty("gerf:p=2").is_err(), "missing sigma");
        assert!(parse_penalty("scad:a=3").is_err(), "unknown penalty");
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("2:2:8").unwrap(), vec![2, 4, 6, 8]);
        assert_eq!(parse_grid("2:2:32").unwrap().len(), 16);
        assert_eq!(parse_grid("3,9,27").unwrap(), vec![3, 9, 27]);
        assert!(parse_grid("1:0:5").is_err());
        assert!(parse_grid("a:b:c").is_err());
    }

    #[test]
    fn mri_method_parsing() {
        assert_eq!(parse_mri_method("tv").unwrap(), MriMethod::Tv);
        assert_eq!(
            parse_mri_method("gerf:p=1,sigma=1").unwrap(),
            MriMethod::Gerf { p: 1.0, sigma: 1.0 }
        );
        assert_eq!(parse_mri_method("zerofill").unwrap(), MriMethod::ZeroFill);
        assert!(parse_mri_method("fbp").is_err());
    }

    #[test]
    fn bad_flags_exit_nonzero() {
        let code = run_cli(["gerf", "phase", "--bogus-flag"]);
        assert_eq!(code, 2);
        let code = run_cli(["gerf", "no-such-command"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run_cli(["gerf", "--help"]), 0);
    }
}
