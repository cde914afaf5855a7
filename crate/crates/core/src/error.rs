use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid needs at least 3 cells per axis, got {0}")]
    GridTooSmall(usize),

    #[error("invalid parameter `{name}` = {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("only the cubic Spohn energy (p = 3) is supported, got p = {0}")]
    UnsupportedExponent(u32),

    #[error("the exact-H fidelity is only defined on 1D grids")]
    UnsupportedScheme,

    #[error("{what}: expected length {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{0} factorization failed")]
    Factorization(&'static str),

    #[error("no convergence after {sweeps} sweeps (last relative change {rel_change:e})")]
    NotConverged { sweeps: usize, rel_change: f64 },

    #[error("unknown initial-data preset `{0}`")]
    UnknownPreset(String),

    #[error("incompatible runs: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}
