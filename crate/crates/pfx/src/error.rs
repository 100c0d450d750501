use thiserror::Error;

/// Errors shared by every layer of the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Argument within the pole guard of a gamma-function pole.
    #[error("argument {z} is within {guard:e} of a gamma pole")]
    Pole { z: num_complex::Complex64, guard: f64 },

    /// |Γ(z)| (or a ratio of gammas) exceeds the double-precision range.
    #[error("gamma overflow at {z}")]
    Overflow { z: num_complex::Complex64 },

    /// A factor of a negative-index Pochhammer product vanishes.
    #[error("division by zero in Pochhammer factor at {z}")]
    DivisionByZero { z: num_complex::Complex64 },

    /// A denominator that the construction requires to be nonzero vanished.
    #[error("degenerate configuration: {what}")]
    Degenerate { what: &'static str },

    /// Integer argument outside the accepted range.
    #[error("argument {n} outside accepted range: {what}")]
    Range { n: i64, what: &'static str },

    /// Point lies outside the convergence half-plane of a series.
    #[error("domain violation: {what}")]
    Domain { what: String },

    /// Trace is unsuitable for a power-law fit.
    #[error("tail fit failed: {what}")]
    Fit { what: String },

    /// Non-finite value at an API boundary.
    #[error("non-finite value {z} at API boundary")]
    NonFinite { z: num_complex::Complex64 },

    /// Malformed CLI input.
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
