use thiserror::Error;

pub type Result<T, E = ErgmError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ErgmError {
    #[error("node index {index} out of range for a network with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("cannot {direction} dyad ({i}, {j}): dyad is already {state}")]
    ToggleConflict {
        i: usize,
        j: usize,
        direction: &'static str,
        state: &'static str,
    },

    #[error("malformed term `{term}`: {reason}")]
    MalformedTerm { term: String, reason: String },

    #[error("unknown node attribute `{0}`")]
    UnknownAttribute(String),

    #[error("coefficient for `{term}` is not finite ({value})")]
    NonFiniteTheta { term: String, value: f64 },

    #[error("exact enumeration supports at most {max} nodes, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error("null model AIC must be positive, got {0}")]
    NonPositiveNullAic(f64),

    #[error("no models to screen")]
    EmptyModelList,

    #[error("every screened model was discarded")]
    AllModelsDegenerate,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ErgmError {
    pub(crate) fn malformed(term: impl Into<String>, reason: impl Into<String>) -> Self {
        ErgmError::MalformedTerm {
            term: term.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        ErgmError::Parse {
            line,
            message: message.into(),
        }
    }
}
