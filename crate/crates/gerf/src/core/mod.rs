//! Shared numeric containers, problem descriptions and deterministic seeding.

mod io;
mod linalg;
mod seed;
mod types;

pub use io::{read_matrix, read_vector, write_matrix, write_vector, GERFMAT_MAGIC};
pub use linalg::{
    add_scaled, cholesky_solve, dot, norm2, relative_error, sub, CholeskyFactor, DenseMatrix,
};
pub use seed::{derive_seed, stream_rng};
pub use types::{
    Algorithm, PenaltySpec, ProblemInstance, RecoveryResult, SolverConfig, DEFAULT_LAMBDA_NOISY,
    DEFAULT_LAMBDA_NOISE_FREE,
};
