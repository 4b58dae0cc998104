use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A coordinate or parameter fell outside the interval where it is defined.
    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("derivative order {order} is not supported (maximum {max})")]
    UnsupportedDerivative { order: usize, max: usize },

    /// Caller violated a precondition (bad counts, mismatched families, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The particular-solution ansatz is resonant with the homogeneous operator.
    #[error("resonant mode {mode}: |k^2 - a^2| = {gap:.3e}; perturb a^2")]
    Resonance { mode: String, gap: f64 },

    #[error("no positive real eigenvalue found ({0})")]
    NoOnset(String),

    #[error("minimum sits at bracket endpoint a2 = {endpoint}; enlarge the bracket")]
    BracketTooSmall { endpoint: f64 },

    #[error("neutral curve is empty: all {0} grid points failed")]
    EmptyCurve(usize),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("assembly inconsistency: {0}")]
    AssemblyBug(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain { .. } | Error::UnsupportedDerivative { .. } | Error::Contract(_) => 2,
            Error::NoOnset(_) | Error::BracketTooSmall { .. } | Error::EmptyCurve(_) => 3,
            Error::Resonance { .. } | Error::Numeric(_) | Error::AssemblyBug(_) | Error::Io(_) => 4,
        }
    }
}
