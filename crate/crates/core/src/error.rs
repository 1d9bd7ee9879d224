use thiserror::Error;

/// Errors raised by the solvers, transforms and fitting routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no bound state with n = {n}: requires A_tilde - 2n - 1 > 0, got A_tilde = {a_tilde}")]
    NoSuchState { a_tilde: f64, n: usize },

    #[error(
        "energy bracket [{lo}, {hi}] MeV does not isolate the state with {target} nodes \
         (node counts {lo_nodes} at the lower end, {hi_nodes} at the upper end)"
    )]
    EnergyBracket {
        lo: f64,
        hi: f64,
        target: usize,
        lo_nodes: usize,
        hi_nodes: usize,
    },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("requested {requested} removals but the potential has only {available} bound states")]
    TooManyRemovals { requested: usize, available: usize },

    #[error(
        "beta bracket [{lo}, {hi}] fm^-1 does not bracket target rms {target} fm \
         (rms {lo_rms} fm at lower end, {hi_rms} fm at upper end)"
    )]
    FitBracket {
        lo: f64,
        hi: f64,
        lo_rms: f64,
        hi_rms: f64,
        target: f64,
    },

    #[error("rms radius is not monotone in beta near beta = {beta} fm^-1; refusing to pick a branch")]
    NonMonotone { beta: f64 },

    #[error("matching radius {r_match} fm is not inside the grid (r_max = {r_max} fm); use a larger grid")]
    MatchingRadius { r_match: f64, r_max: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (brackets, convergence, missing states)
    /// as opposed to malformed input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoSuchState { .. }
                | Error::EnergyBracket { .. }
                | Error::NoConvergence { .. }
                | Error::TooManyRemovals { .. }
                | Error::FitBracket { .. }
                | Error::NonMonotone { .. }
                | Error::MatchingRadius { .. }
                | Error::Precondition(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
