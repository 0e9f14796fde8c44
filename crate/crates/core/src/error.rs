use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(i64),
    #[error("direction ({0},{1}) is not primitive")]
    NotPrimitive(i64, i64),
    #[error("degenerate surface")]
    Degenerate,
    #[error("surface is not degenerate")]
    NotDegenerate,
    #[error("infinite orbit: seed has irrational coordinates")]
    InfiniteOrbit,
    #[error("hit cone point")]
    HitConePoint,
    #[error("{0} does not divide {1}")]
    NotDivisor(u64, u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("unequal cylinder moduli")]
    UnequalModuli,
    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
