use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Parameters outside both admissible regimes. Carries the first violated inequality.
    #[error("RegimeError: {0}")]
    Regime(String),
    #[error("DomainError: {0}")]
    Domain(String),
    /// A finite-difference stencil left the admissible parameter set.
    #[error("StepError: {0}")]
    Step(String),
    /// The slope −∂ω‖φ‖² is too small to fix a sign.
    #[error("DegenerateError: {0}")]
    Degenerate(String),
    #[error("BracketError: {0}")]
    Bracket(String),
    #[error("GridError: {0}")]
    Grid(String),
    #[error("ConvergenceError: {0}")]
    Convergence(String),
    /// A count changed under grid refinement.
    #[error("InstabilityError: {0}")]
    Instability(String),
    #[error("PreconditionError: {0}")]
    Precondition(String),
    #[error("SolveError: {0}")]
    Solve(String),
    #[error("BlowupError: {0}")]
    Blowup(String),
}

impl Error {
    /// Module that raises this kind of error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Regime(_) | Error::Domain(_) => "profile",
            Error::Step(_) | Error::Degenerate(_) | Error::Bracket(_) => "vk",
            Error::Grid(_) | Error::Convergence(_) | Error::Instability(_) => "spectral",
            Error::Precondition(_) => "stability",
            Error::Solve(_) | Error::Blowup(_) => "dynamics",
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Error::Regime(_) => "RegimeError",
            Error::Domain(_) => "DomainError",
            Error::Step(_) => "StepError",
            Error::Degenerate(_) => "DegenerateError",
            Error::Bracket(_) => "BracketError",
            Error::Grid(_) => "GridError",
            Error::Convergence(_) => "ConvergenceError",
            Error::Instability(_) => "InstabilityError",
            Error::Precondition(_) => "PreconditionError",
            Error::Solve(_) => "SolveError",
            Error::Blowup(_) => "BlowupError",
        }
    }

    /// Bad input, as opposed to a numerical failure on valid input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Regime(_) | Error::Domain(_) | Error::Step(_) | Error::Grid(_)
        )
    }
}
