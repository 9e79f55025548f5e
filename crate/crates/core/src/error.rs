use crate::expr::ParseError;
use crate::jets::JetError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Jet(#[from] JetError),
    /// Bad problem data: malformed file, k out of range, singular point.
    #[error("{0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("frame not a basis at expansion point")]
    DegenerateFrame,
    /// An identity that must hold for every input failed.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    /// Process exit code of the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Consistency(_) => 3,
            _ => 2,
        }
    }
}
