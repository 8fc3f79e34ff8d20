use thiserror::Error;

/// Coarse classification used by callers (the CLI maps these to exit codes).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad arguments or configuration: out-of-range modulus, non-coprime
    /// residue, malformed request.
    Config,
    /// Inconsistent or unusable data: malformed zero files, horizon too
    /// short, counts that contradict invariants.
    Data,
    /// An iterative method failed to reach its tolerance.
    Convergence,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("modchar: modulus {0} out of supported range (need 3 <= q <= 10^6)")]
    ModulusOutOfRange(u64),

    #[error("modchar: residue {a} is not coprime to modulus {q}")]
    NotCoprime { a: u64, q: u64 },

    #[error("modchar: {0}")]
    Character(String),

    #[error("zerodata: parse error at line {line}: {msg}")]
    ZeroFileParse { line: usize, msg: String },

    #[error("zerodata: {0}")]
    ZeroData(String),

    #[error("zerodata: requested T={requested} exceeds stored horizon {horizon}")]
    HorizonExceeded { requested: f64, horizon: f64 },

    #[error("lfzeros: {0}")]
    LFunction(String),

    #[error("randmodel: {0}")]
    RandModel(String),

    #[error("tailbounds: {0}")]
    TailBounds(String),

    #[error("gaussmodel: {0}")]
    GaussModel(String),

    #[error("empirical: {0}")]
    Empirical(String),

    #[error("quadrature did not reach tolerance {tol} at depth {max_depth}: {context}")]
    QuadratureConvergence {
        tol: f64,
        max_depth: u32,
        context: String,
    },

    #[error("{context}: iteration failed to converge")]
    Convergence { context: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::ModulusOutOfRange(_)
            | Error::NotCoprime { .. }
            | Error::Character(_)
            | Error::RandModel(_)
            | Error::TailBounds(_)
            | Error::GaussModel(_)
            | Error::Empirical(_) => ErrorClass::Config,
            Error::ZeroFileParse { .. }
            | Error::ZeroData(_)
            | Error::HorizonExceeded { .. }
            | Error::LFunction(_)
            | Error::Io(_) => ErrorClass::Data,
            Error::QuadratureConvergence { .. } | Error::Convergence { .. } => {
                ErrorClass::Convergence
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
