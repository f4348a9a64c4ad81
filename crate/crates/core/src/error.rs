use thiserror::Error;

/// Errors raised while reading `.dg` / `.ug` documents.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed line `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: self-loop on `{vertex}`")]
    SelfLoop { line: usize, vertex: String },
    #[error("line {line}: duplicate edge `{from}` -> `{to}`")]
    DuplicateEdge { line: usize, from: String, to: String },
}

/// Errors from graph construction and morphism handling.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge endpoint `{0}` is not a declared vertex")]
    UnknownVertex(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}` -> `{1}`")]
    DuplicateEdge(String, String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("vertex map has {got} entries, source has {expected} vertices")]
    MapLength { expected: usize, got: usize },
    #[error("morphisms do not share source and target")]
    Mismatched,
    #[error("{0}")]
    InvalidMorphism(String),
    #[error("homotopy search limited to {bound} vertices")]
    TooLarge { bound: usize },
}

/// Path-level errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("path `{0}` is not a regular path")]
    Irregular(String),
    #[error("path `{0}` is not allowed in the digraph")]
    NotAllowed(String),
    #[error("path vector is not ∂-invariant")]
    NotInvariant,
    #[error("mixed path lengths {0} and {1}")]
    MixedDegree(usize, usize),
    #[error("coordinate enumeration exceeds {0} candidates")]
    TooLarge(u128),
}

/// Internal consistency failures. These indicate either a bug or a genuine
/// counterexample to one of the structure results the engine relies on, and
/// are never masked.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("degree {degree}: minimal basis has rank {found}, Ω has rank {expected} (block {start}->{end})")]
    RankMismatch { degree: usize, start: String, end: String, found: usize, expected: usize },
    #[error("degree {degree}: minimal basis of block {start}->{end} is not saturated")]
    NotSaturated { degree: usize, start: String, end: String },
    #[error("degree {degree}: minimal path {path} has a coefficient outside {{+1,-1}}")]
    NonUnitCoefficient { degree: usize, path: String },
    #[error("degree {degree}: element lies outside the span of the chosen basis")]
    OutsideSpan { degree: usize },
    #[error("cell {cell}: incidence coefficient {coeff} is not ±1")]
    NonUnitIncidence { cell: String, coeff: String },
    #[error("boundary of boundary is nonzero in degree {0}")]
    BoundarySquared(usize),
    #[error("chain map does not commute with boundaries in degree {0}")]
    NotChainMap(usize),
    #[error("{0}")]
    Other(String),
}

/// Top-level error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("{0}")]
    Domain(String),
}

impl Error {
    /// Internal invariant failures are distinguished from bad input.
    pub fn is_invariant_failure(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
