use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: not a valid matrix file: {message}")]
    Parse { path: String, message: String },

    #[error("{path}: unsupported schema version {found} (this build reads version 1)")]
    SchemaVersion { path: String, found: u64 },

    #[error("{path}: entries are {found} rows for declared dimension {declared}")]
    Shape {
        path: String,
        declared: usize,
        found: usize,
    },

    #[error("{path}: non-finite entry at ({row}, {col})")]
    NonFinite {
        path: String,
        row: usize,
        col: usize,
    },

    #[error(
        "{path}: skew-Hermitian part has norm {skew:.3e}, above the tolerance {tol:.3e}; \
         refusing to symmetrize silently"
    )]
    HermiticityViolation { path: String, skew: f64, tol: f64 },

    #[error(
        "invalid group spec '{spec}' (expected 'dephasing', 'onedesign:DA,DB', or 'file:PATH')"
    )]
    GroupSpec { spec: String },

    #[error("rank {rank} is outside 1..={dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("--weights and --input counts differ: {weights} weights, {inputs} files")]
    WeightCount { weights: usize, inputs: usize },

    #[error("invalid benchmark config: {message}")]
    BenchConfig { message: String },

    #[error(transparent)]
    Core(#[from] bures_core::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
