use thiserror::Error;

/// Errors raised by the curvature, reduction, quadrature and geodesic layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A caller supplied malformed or inconsistent input.
    #[error("invalid input: {0}")]
    Input(String),

    /// A field or profile was evaluated outside the region where it is defined
    /// (non-positive conformal factor, non-finite value, and so on).
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature failed to converge.
    #[error("quadrature failed: {0}")]
    Quadrature(String),

    /// A requested abscissa lies outside the admissible interval of an
    /// implicit relation.
    #[error("{what} = {value} outside admissible interval [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Root finding did not converge.
    #[error("root finding failed: {0}")]
    Root(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_input(&self) -> bool {
        matches!(self, Error::Input(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
