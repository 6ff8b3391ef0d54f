//! Error type shared by every module in the crate.

use thiserror::Error;

/// Anything the model can reject: bad parameters, impossible geometry,
/// mismatched array shapes, or quantities a formula cannot digest.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar parameter is outside its documented domain.
    #[error("invalid parameter {name}: {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
        value: f64,
    },

    /// A structural count (rows, columns, points, iterations) is unusable.
    #[error("invalid count {name}: {reason} (got {value})")]
    InvalidCount {
        name: &'static str,
        reason: &'static str,
        value: usize,
    },

    /// A 1-based cell index fell outside the surface.
    #[error("cell index ({n}, {m}) outside the {rows}x{cols} surface")]
    CellIndexOutOfRange {
        n: usize,
        m: usize,
        rows: usize,
        cols: usize,
    },

    /// A phase map's shape does not match the surface it is applied to.
    #[error("configuration shape {got_rows}x{got_cols} does not match the {want_rows}x{want_cols} surface")]
    ShapeMismatch {
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },

    /// A terminal coincides with a cell or with the other terminal, so a
    /// path length (and with it the field) is undefined.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// dBm conversion was asked for a power that has no logarithm.
    #[error("power {0} W is not positive, dBm is undefined")]
    NonPositivePower(f64),

    /// The exhaustive binary oracle refuses surfaces it cannot enumerate.
    #[error("{cells} cells exceed the exhaustive search cap of {cap}")]
    ExhaustiveCapExceeded { cells: usize, cap: usize },

    /// A sweep or statistic needs more input than it was given.
    #[error("{what} needs at least {need} values, got {got}")]
    NotEnoughValues {
        what: &'static str,
        need: usize,
        got: usize,
    },

    /// A list that must be strictly increasing and positive is not.
    #[error("{what} must be positive and strictly increasing (violated at position {position})")]
    NotIncreasing { what: &'static str, position: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
