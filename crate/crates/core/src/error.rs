use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {field} = {value}: must satisfy {requirement}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("lambert W0 is undefined for x = {0} < -1/e")]
    LambertDomain(f64),

    #[error("target {target} is not bracketed by f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NotBracketed { target: f64, f_lo: f64, f_hi: f64 },

    #[error("stationary equations are singular: {0}")]
    SingularSystem(&'static str),

    #[error("unsupported configuration: {0}")]
    Unsupported(&'static str),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

/// Rejects `value` unless `ok` holds.
pub(crate) fn ensure(ok: bool, field: &'static str, value: f64, requirement: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            value,
            requirement,
        })
    }
}
