use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("subspace Δ={delta_total} is one-dimensional for step m={m}")]
    OneDimensionalSubspace { delta_total: u64, m: u32 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("Δ={delta_total} at t={t}: {source}")]
    AtSubspace {
        delta_total: u64,
        t: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, delta_total: u64, t: f64) -> Self {
        match self {
            e @ Error::AtSubspace { .. } => e,
            e => Error::AtSubspace {
                delta_total,
                t,
                source: Box::new(e),
            },
        }
    }
}
