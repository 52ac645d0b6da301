//! Crate-wide error type.

use std::fmt;

#[derive(Debug)]
pub enum Error {
    /// Domain specification rejected (dimensions, extents, spacing).
    InvalidDomain(String),
    /// Grid too coarse: no interior node.
    TooCoarse(String),
    /// Point expected on the domain boundary is not.
    NotOnBoundary { dist: f64, tol: f64 },
    /// Operation requires an interior node.
    NotInterior { node: usize },
    /// Non-finite value where a finite one is required.
    NonFinite(String),
    /// Scenario evaluated outside its admissible region.
    ScenarioDomain(String),
    /// Configuration file error with 1-based line number (0 = whole file).
    Config { line: usize, msg: String },
    /// Linear solver failed to meet its residual contract.
    SolverDiverged { achieved: f64, wanted: f64, iters: usize },
    /// A step produced NaN/Inf; carries the first offending node.
    NumericalFailure { node: usize, detail: String },
    /// Snapshot or diagnostics file inconsistent with expectation.
    FileFormat(String),
    /// Snapshot payload does not match its recorded checksum.
    ChecksumMismatch { expected: u64, actual: u64 },
    /// Snapshot lattice incompatible with the requested one.
    LatticeMismatch(String),
    /// Requested diagnostics column does not exist.
    UnknownColumn(String),
    /// Underlying I/O failure, with the path involved.
    Io { path: String, source: std::io::Error },
    /// Empty input where data is required.
    Empty(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDomain(s) => write!(f, "invalid domain: {s}"),
            Error::TooCoarse(s) => write!(f, "resolution too coarse: {s}"),
            Error::NotOnBoundary { dist, tol } => {
                write!(f, "point is not on the boundary (distance {dist:.3e}, tolerance {tol:.3e})")
            }
            Error::NotInterior { node } => write!(f, "node {node} is not interior"),
            Error::NonFinite(s) => write!(f, "non-finite value: {s}"),
            Error::ScenarioDomain(s) => write!(f, "scenario domain error: {s}"),
            Error::Config { line, msg } => {
                if *line == 0 {
                    write!(f, "config error: {msg}")
                } else {
                    write!(f, "config error at line {line}: {msg}")
                }
            }
            Error::SolverDiverged { achieved, wanted, iters } => write!(
                f,
                "linear solver stalled after {iters} iterations: residual {achieved:.3e} > {wanted:.3e}"
            ),
            Error::NumericalFailure { node, detail } => {
                write!(f, "numerical failure at node {node}: {detail}")
            }
            Error::FileFormat(s) => write!(f, "file format error: {s}"),
            Error::ChecksumMismatch { expected, actual } => {
                write!(f, "checksum mismatch: expected {expected:016x}, got {actual:016x}")
            }
            Error::LatticeMismatch(s) => write!(f, "lattice mismatch: {s}"),
            Error::UnknownColumn(s) => write!(f, "unknown diagnostics column: {s}"),
            Error::Io { path, source } => write!(f, "i/o error on {path}: {source}"),
            Error::Empty(s) => write!(f, "empty input: {s}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
