use thiserror::Error;

/// Error taxonomy shared by every module.
///
/// `Usage` marks caller mistakes (wrong representation flag, mismatched
/// grids), `Domain` invalid parameter values, `Config` window/Nyquist
/// violations, `Capability` requests the implementation cannot honour
/// (missing derivative oracles, polynomial degree beyond grid accuracy),
/// and `Precondition` failed mathematical prerequisites (e.g. a kernel
/// that does not satisfy the Tauberian condition).
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("capability error: {0}")]
    Capability(String),
    #[error("precondition error: {0}")]
    Precondition(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
