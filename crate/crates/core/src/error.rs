use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// The innermost error, looking through line context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Line { source, .. } => source.root(),
            e => e,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("label of length {len} exceeds max depth {max}")]
    LabelTooLong { len: usize, max: usize },
    #[error("the root has no parent")]
    RootHasNoParent,
    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),
    #[error("invalid tree space: {0}")]
    InvalidSpace(String),
    #[error("trees or occupancy vectors live in different spaces")]
    SpaceMismatch,
    #[error("empty sample")]
    EmptySample,
    #[error("configuration is not suffix-closed: node {0:?} has no parent")]
    NotSuffixClosed(String),
    #[error("duplicate node {0:?}")]
    DuplicateNode(String),
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("malformed input at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("context {0:?} never occurs followed by a symbol")]
    UndefinedContext(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("enumeration guard exceeded: {size} > {limit}")]
    GuardExceeded { size: usize, limit: usize },
    #[error("ratio mu(w)/mu(f(w)) is degenerate at node {0:?}")]
    DegenerateRatio(String),
    #[error("solver invariant violated: {0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
