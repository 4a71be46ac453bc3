//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// The generators do not span a rank-2 lattice.
    DegenerateGenerators,
    /// Basis reduction was asked to reduce a singular pair.
    ZeroDeterminant,
    /// `gcd(N, a, b) != 1`, so the point set does not have full order.
    DegenerateLattice { n: i64, a: i64, b: i64 },
    /// A parameter is outside the documented domain.
    InvalidParameter(String),
    /// Cube-root construction asked for a perfect cube; the result would be rational.
    PerfectCube(u64),
    /// The ceil-family construction needs a nonzero fractional part of `sqrt(N)`.
    FractionalPartZero(i64),
    /// The bracketing sign pattern of the margin polynomial fails (N <= 7).
    RootSignPattern(i64),
    /// The `(1,b)` edge is not the shortest edge of its lattice triangle, so the
    /// refined triangle bounds do not apply.
    ShortestEdgeHypothesis { n: i64, b: i64 },
    /// Exact tour solvers are limited to small instances.
    ExactOracleLimit(usize),
    /// Certified digit extraction failed even at the maximum working precision.
    PrecisionCap { bits: u32 },
    /// A divisor interval collapsed onto zero: the inputs are most likely rationally
    /// dependent and the continued-fraction expansion terminates.
    DependentInputs,
    /// An exact result does not fit the supported coordinate range.
    CoordinateOverflow,
    /// A Kronecker set was paired with a lattice of a different convergent.
    LatticeMismatch,
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateGenerators => write!(f, "degenerate generator set"),
            Error::ZeroDeterminant => write!(f, "zero determinant"),
            Error::DegenerateLattice { n, a, b } => {
                write!(f, "degenerate modular lattice: gcd({n}, {a}, {b}) != 1")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::PerfectCube(k) => write!(f, "{k} is a perfect cube; the root is rational"),
            Error::FractionalPartZero(n) => {
                write!(f, "fractional part zero: {n} is a perfect square")
            }
            Error::RootSignPattern(n) => {
                write!(f, "margin polynomial has no sign change on (0, 1/2) for N = {n}")
            }
            Error::ShortestEdgeHypothesis { n, b } => write!(
                f,
                "shortest-edge hypothesis violated: (1,{b}) is not a shortest edge of the \
                 triangle of L_{{{n},1,{b}}}"
            ),
            Error::ExactOracleLimit(n) => write!(f, "exact oracle limit: {n} points"),
            Error::PrecisionCap { bits } => write!(f, "precision cap: {bits} bits"),
            Error::DependentInputs => write!(f, "dependent inputs suspected"),
            Error::CoordinateOverflow => write!(f, "coordinate overflow"),
            Error::LatticeMismatch => write!(f, "mismatched convergent/lattice"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
