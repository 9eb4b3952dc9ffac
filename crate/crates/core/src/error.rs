use faer::c64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("basis label out of range: {0}")]
    LabelOutOfRange(String),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("no dressed manifolds: the space has n_max = 0")]
    NoDressedManifolds,

    #[error("eigensystem is not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("jump channel at zero Bohr frequency (operator weight {0:e})")]
    ZeroFrequencyChannel(f64),

    #[error("negative rate {0} for a dissipative channel")]
    NegativeRate(f64),

    #[error("generator is not diagonalizable near eigenvalue {}{:+}i: {reason}", .eigenvalue.re, .eigenvalue.im)]
    NotDiagonalizable { eigenvalue: c64, reason: String },

    #[error("stationary kernel has dimension {0}, expected 1")]
    KernelMultiplicity(usize),

    #[error("step size {dt} exceeds the stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidParameter(_)
            | Error::LabelOutOfRange(_)
            | Error::NoDressedManifolds
            | Error::Io(_) => 1,
            _ => 2,
        }
    }
}
