use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type. Variants are grouped by the layer that raises them;
/// every variant carries enough context to diagnose the failure without a
/// debugger (offending matrix, point, field path, ...).
#[derive(Debug, Error)]
pub enum Error {
    // ---- points ----
    #[error("projective point has all coordinates zero")]
    ZeroPoint,

    #[error("expected {expected} factor(s), got {got}")]
    FactorCount { expected: usize, got: usize },

    #[error("factor {factor} lives in P^{got}, expected P^{expected}")]
    WrongAmbientDim {
        factor: usize,
        expected: usize,
        got: usize,
    },

    #[error("divisor has {coeffs} coefficient(s) but the point has {factors} factor(s)")]
    CoeffLenMismatch { coeffs: usize, factors: usize },

    #[error("divisor coefficients are all zero")]
    ZeroDivisor,

    // ---- matrix algebra ----
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("generator {index} is {got}x{got} but the set is {expected}x{expected}")]
    DimMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("generator set is empty")]
    EmptyGeneratorSet,

    #[error("word index {index} out of range 1..={k}")]
    WordIndexOutOfRange { index: usize, k: usize },

    #[error("eigenvalue solver did not converge on {dim}x{dim} matrix {entries:?}")]
    EigenSolver { dim: usize, entries: Vec<f64> },

    #[error(
        "no real nonnegative eigenvalue of maximal modulus (candidates {candidates:?}); \
         supply beta and the divisor coefficients manually"
    )]
    NoRealDominantEigenvalue { candidates: Vec<(f64, f64)> },

    #[error("dominant eigenvalue {lambda} appears defective; supply beta and the divisor coefficients manually")]
    DefectiveDominantEigenvalue { lambda: f64 },

    // ---- K3 surfaces ----
    #[error("point does not lie on the surface")]
    NotOnSurface,

    #[error("the linear form B(x,.) vanishes identically; the fiber is not a line")]
    LinearFormZero,

    #[error("the quadratic form vanishes identically on the fiber line")]
    FiberQuadraticZero,

    #[error("input point does not lie on the computed fiber line")]
    NotOnFiberLine,

    #[error("fiber data inconsistent with the input point (known root is not a root)")]
    InconsistentFiber,

    #[error("unknown surface model {0:?}")]
    UnknownModel(String),

    #[error("the {0} form of the surface is identically zero")]
    ZeroForm(&'static str),

    #[error("every coordinate polynomial of the morphism is identically zero")]
    ZeroMorphism,

    #[error("fixture search exhausted {0} draws without a nondegenerate surface")]
    FixtureSearchExhausted(usize),

    // ---- projective-space morphisms ----
    #[error("morphism is undefined at the point (all coordinate polynomials vanish): {point:?}")]
    Indeterminate { point: Vec<BigInt> },

    #[error("polynomial {poly} of morphism is not homogeneous of degree {degree}: monomial {monomial:?}")]
    NotHomogeneous {
        poly: usize,
        degree: u32,
        monomial: Vec<u32>,
    },

    // ---- orbits and degree estimators ----
    #[error("coordinate size {digits} digits exceeds the cap of {cap} digits at level {level}")]
    DigitCapExceeded {
        digits: usize,
        cap: usize,
        level: usize,
    },

    #[error("system has no eigendivisor data (beta, coefficients); required by this operation")]
    EigenDataMissing,

    #[error("divisor coefficients must all be positive for this operation")]
    NotAmple,

    #[error("system kind has no point dynamics; this operation needs maps acting on points")]
    NoPointDynamics,

    #[error("eigendivisor relation requires beta > k; got beta = {beta}, k = {k}")]
    BetaNotAboveK { beta: f64, k: usize },

    // ---- configuration and CLI ----
    #[error("config {path}: {message}")]
    Config { path: String, message: String },

    #[error("unknown command {0:?}")]
    UnknownCommand(String),

    #[error("unknown fixture kind {0:?}")]
    UnknownFixtureKind(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Field-path config error, e.g. `config generators[0]: entry "x" is not a rational`.
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the CLI: config errors 2, check failures 1 (raised
    /// elsewhere), everything computational 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Io(_) | Error::UnknownCommand(_) | Error::UnknownFixtureKind(_) => 2,
            _ => 3,
        }
    }
}
