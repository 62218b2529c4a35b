use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("occupation vector violates conservation: {0}")]
    Conservation(String),

    #[error("enumeration of N={n}, M={m} exceeds the cap N<={max_n}, M<={max_m}")]
    EnumerationCap { n: u64, m: u64, max_n: u64, max_m: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
