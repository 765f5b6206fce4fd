use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("bearing of the zero vector is undefined")]
    ZeroVector,
    #[error("gap endpoint lies inside the inflated robot radius")]
    InsideInflation,
    #[error("degenerate gap: endpoints coincide")]
    DegenerateGap,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}
