use alloc::string::String;
use core::fmt;

/// Errors raised anywhere in the library.
///
/// The variants fall in three groups that the CLI maps to distinct exit codes:
/// caller mistakes ([`Error::Usage`]), inputs that are well formed but cannot be
/// processed (syntax, sort, admissibility, divergence, impossible targets), and
/// [`Error::Internal`] for broken invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Bad argument combination, e.g. mismatched truncations.
    Usage(String),
    /// Parse failure at a 1-based line and column.
    Syntax { line: usize, col: usize, msg: String },
    /// Sort rule violated (pointed/unpointed mix-up, unresolved name, ...).
    Sort(String),
    /// A substitution argument admits structures of size 0.
    Inadmissible(String),
    /// Coefficient iteration does not stabilize.
    NotWellFounded(String),
    /// Evaluation point outside the domain of convergence.
    Divergent(String),
    /// Non-finite value encountered in floating point evaluation.
    Numeric(String),
    /// Targeted sampling asked for a size with no structures.
    ImpossibleTarget(String),
    /// Feature not available for this input (e.g. sampling outerplanar graphs).
    Unsupported(String),
    /// Internal consistency failure; signals a bug upstream.
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag used in JSON diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Usage(_) => "usage",
            Error::Syntax { .. } => "syntax",
            Error::Sort(_) => "sort",
            Error::Inadmissible(_) => "inadmissible",
            Error::NotWellFounded(_) => "not-well-founded",
            Error::Divergent(_) => "divergent",
            Error::Numeric(_) => "numeric",
            Error::ImpossibleTarget(_) => "impossible-target",
            Error::Unsupported(_) => "unsupported",
            Error::Internal(_) => "internal",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Syntax { line, col, msg } => write!(f, "syntax error at {}:{}: {}", line, col, msg),
            Error::Usage(m) => write!(f, "usage error: {}", m),
            Error::Sort(m) => write!(f, "sort error: {}", m),
            Error::Inadmissible(m) => write!(f, "inadmissible: {}", m),
            Error::NotWellFounded(m) => write!(f, "not well-founded: {}", m),
            Error::Divergent(m) => write!(f, "divergent: {}", m),
            Error::Numeric(m) => write!(f, "numeric error: {}", m),
            Error::ImpossibleTarget(m) => write!(f, "impossible target: {}", m),
            Error::Unsupported(m) => write!(f, "unsupported: {}", m),
            Error::Internal(m) => write!(f, "internal error: {}", m),
        }
    }
}
