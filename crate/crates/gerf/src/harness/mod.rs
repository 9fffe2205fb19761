//! Experiment engine: instance generators, success-rate and MSE studies,
//! the null-space-property falsifier, CSV emission and the CLI.

pub mod cli;
mod csvout;
mod experiments;
mod gen;
mod gnsp;

pub use csvout::{format_rows, write_experiment, ExperimentRow};
pub use experiments::{
    oracle_mse, run_irl1_vs_dca, run_mri, run_mse_study, run_phase_transition, ExperimentSpec,
    Irl1VsDcaOutcome, MatrixKind, MethodSpec, MriMethod, MriOutcome, SUCCESS_RE,
};
pub use gen::{
    gen_gaussian_matrix, gen_noise, gen_oversampled_dct, gen_sparse_signal, mutual_coherence,
};
pub use gnsp::{check_gnsp_sampled, kernel_basis, GnspCounterexample};

/// Thread cap for trial-level parallelism: `GERF_THREADS` when set,
/// otherwise the number of logical cores.
pub fn thread_count() -> usize {
    std::env::var("GERF_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|v| *v > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
}

pub(crate) fn thread_pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .expect("thread pool construction")
}
