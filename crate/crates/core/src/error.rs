use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not column stochastic: {0}")]
    NotStochastic(String),

    #[error("invalid input distribution: {0}")]
    InvalidDistribution(String),

    #[error("utility matrix is not indifferent (columns differ)")]
    NotIndifferent,

    #[error("enumeration of {count} candidates exceeds the configured limit of {limit} ({what})")]
    EnumerationLimit {
        what: &'static str,
        count: u128,
        limit: u128,
    },

    #[error("parameter outside the admissible domain: {0}")]
    Domain(String),

    #[error("utility matrix violates the ordering condition on its first {k} rows")]
    OrderingViolated { k: usize },

    #[error("unknown fixture id `{0}`")]
    UnknownFixture(String),

    #[error("cannot parse rational `{0}`")]
    ParseRational(String),

    /// A certificate produced internally failed exact re-verification.
    #[error("internal certificate check failed: {0}")]
    CertificateCheck(String),
}
