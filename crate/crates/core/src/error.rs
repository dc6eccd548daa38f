use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),

    #[error("invalid relation {index}: {reason}")]
    InvalidRelation { index: usize, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("relation {index} violated: entry ({row}, {col}) of the residue is {residue}")]
    RelationViolated {
        index: usize,
        row: usize,
        col: usize,
        residue: String,
    },

    #[error("bad prime {prime}: {reason}")]
    BadPrime { prime: u64, reason: String },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("module mismatch: {0}")]
    ModuleMismatch(String),

    #[error("submodule witness is not arrow-stable at arrow {0}")]
    NotArrowStable(String),

    #[error("prime {prime} too small to decide: Hom space of dimension {hom_dim} is too large to enumerate")]
    PrimeTooSmall { prime: u64, hom_dim: usize },

    #[error("catalog incomplete: no catalog member is isomorphic to the middle term {middle_term}")]
    CatalogIncomplete { middle_term: String },

    #[error("consistency failure for {label}: interpolated polynomial predicts {expected} at q={prime}, observed {observed}")]
    Consistency {
        label: String,
        prime: u64,
        expected: String,
        observed: u64,
    },

    #[error("non-integer Euler characteristic {0}")]
    NonIntegerEuler(String),

    #[error("not enough samples for {label}: have {have}, need {need}")]
    NotEnoughSamples {
        label: String,
        have: usize,
        need: usize,
    },

    #[error("sample count {count} at q={prime} is not divisible by q-1")]
    NotDivisible { prime: u64, count: u64 },

    #[error("ran out of good primes for {0}")]
    PrimesExhausted(String),

    #[error("invalid flag type: {0}")]
    InvalidFlagType(String),

    #[error("module {0} is not in the subcategory generated by the given simples")]
    NotInCategory(String),

    #[error("Ext-symmetry audit failed: {0}")]
    Asymmetric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown name: {0}")]
    UnknownName(String),
}
