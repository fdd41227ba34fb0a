use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("antennas {first} and {second} are {distance} wavelengths apart (minimum 0.5)")]
    CouplingViolation {
        first: usize,
        second: usize,
        distance: f64,
    },

    #[error("antennas {first} and {second} share a position")]
    DuplicatePosition { first: usize, second: usize },

    #[error("separation {separation} is not a multiple of the grid pitch {pitch}")]
    GridMismatch { separation: f64, pitch: f64 },

    #[error("ruler search exhausted its budget of {budget} nodes")]
    SearchBudget { budget: u64 },

    #[error("no feasible particle after {retries} initialization retries per particle")]
    NoFeasibleParticle { retries: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("objective evaluation failed: {0}")]
    Objective(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
