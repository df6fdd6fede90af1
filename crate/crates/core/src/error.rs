use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A DGRD recipe condition does not hold for the requested target.
    #[error("recipe infeasible: {0}")]
    RecipeInfeasible(String),

    #[error("no simple graph after {attempts} attempts")]
    TooManyAttempts { attempts: usize },

    /// The regenerate parity policy never produced an even degree sum.
    #[error("degree sum still odd after {redraws} redraws")]
    NonConvergence { redraws: usize },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(token: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.to_string(),
            reason: reason.into(),
        }
    }
}
