use crate::instance::InstanceError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("vertex set is empty")]
    EmptySet,
    #[error("vertex set does not induce a connected subtree")]
    Disconnected,
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("coloring has {got} entries but the instance has {expected} vertices")]
    SizeMismatch { expected: usize, got: usize },
    #[error("coloring is not convex")]
    NotConvex,
    #[error("coloring is not total")]
    NotTotal,
    #[error("operation requires a string instance")]
    NotAString,
    #[error("more than two colors are present")]
    TooManyColors,
    #[error("vertex set is not a cover")]
    NotACover,
    #[error("invalid case witness: {0}")]
    InvalidWitness(String),
    #[error("instance has {n} vertices, above the oracle cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("cannot generate instance: {0}")]
    Generator(String),
    #[error("{algorithm} cost {cost} exceeds {bound} x OPT {opt} on instance {instance}")]
    BoundExceeded { algorithm: String, bound: u32, cost: String, opt: String, instance: String },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
