use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("cycle notation: {0}")]
    CycleSyntax(String),

    #[error("group order exceeds enumeration cap {cap}")]
    CapExceeded { cap: u64 },

    #[error("coset index exceeds cap {cap}")]
    IndexCapExceeded { cap: u64 },

    #[error("group order exceeds exact-mode cap {cap}")]
    ExactCapExceeded { cap: u64 },

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("block list is not invariant under generator {generator}")]
    NotInvariant { generator: usize },

    #[error("element does not belong to the group: {0}")]
    NotInGroup(String),

    #[error("subgroup is not contained in the image of the homomorphism")]
    NotInImage,

    #[error("unsupported group specification: {0}")]
    UnsupportedSpec(String),

    #[error("malformed group file{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    MalformedFile { line: Option<usize>, message: String },

    #[error("word syntax error at offset {offset}: {message}")]
    WordSyntax { offset: usize, message: String },

    #[error("variable x{0} occurs more than once; word is not multilinear")]
    RepeatedVariable(u32),

    #[error("word arity mismatch: weight {weight}, got {got} arguments")]
    ArityMismatch { weight: usize, got: usize },

    /// A minimal normal subgroup turned out to be abelian or p-soluble, so the
    /// radical that was divided out was an underestimate.
    #[error("radical not trivial: found a {reason} minimal normal subgroup of order {order}")]
    RadicalNotTrivial {
        reason: &'static str,
        order: String,
        witness: Box<crate::group::PermGroup>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
