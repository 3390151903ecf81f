use crate::universe::ElementId;

/// Errors surfaced by universe loading, Hasse maintenance and tree
/// operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("element id {0} is out of range for this universe")]
    InvalidElement(ElementId),
    #[error("malformed universe: {0}")]
    InvalidUniverse(String),
    #[error("element {0} is already a member")]
    Duplicate(ElementId),
    #[error("element {0} is not a member")]
    NotFound(ElementId),
    #[error("the minimal element cannot be deleted")]
    RootDeletion,
    #[error("edge query endpoints must be distinct members")]
    InvalidQuery,
    #[error("instance has {n} nodes, above the exact-search budget of {budget}")]
    TooLarge { n: usize, budget: usize },
    #[error("insert would break the round ordering of a linear search tree")]
    OrderViolation,
    #[error("{0} is not an endpoint of this edge record")]
    EndpointMismatch(ElementId),
    #[error("merge operands do not share the junction node")]
    NonAdjacentMerge,
    #[error("structural corruption: {0}")]
    Corrupt(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
