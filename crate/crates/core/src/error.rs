//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid dimensions must be odd, got M={m}, N={n}")]
    EvenDimension { m: usize, n: usize },
    #[error("grid dimensions must be coprime, gcd({m}, {n}) = {gcd}")]
    NotCoprime { m: usize, n: usize, gcd: usize },
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("signal has zero energy")]
    ZeroSignal,
    #[error("basis index (r={r}, s={s}) out of range for M={m}, N={n}")]
    IndexOutOfRange { r: usize, s: usize, m: usize, n: usize },
    #[error("chirp rate alpha={alpha} is degenerate modulo MN={mn}")]
    InvalidAlpha { alpha: u64, mn: usize },
    #[error("constellation mean energy is {energy}, expected 1")]
    InvalidConstellation { energy: f64 },
    #[error("at least one trial is required")]
    EmptyTrialSet,
    #[error("Gauss sum needs an odd modulus and a unit residue, got a={a}, N={n}")]
    BadModulus { a: i64, n: usize },
    #[error("{value} has no inverse modulo {modulus}")]
    NoInverse { value: i64, modulus: usize },
    #[error("channel delay profile is empty")]
    EmptyProfile,
    #[error("channel spread {k_w}x{l_w} bins exceeds half a period of the {m}x{n} grid")]
    SpreadTooLarge { k_w: i64, l_w: i64, m: usize, n: usize },
    #[error("pilot-to-data ratio must be positive, got {0}")]
    BadPdr(f64),
    #[error("sensing region aliases along the pilot ambiguity support at lag ({k}, {l})")]
    RegionAliased { k: i64, l: i64 },
    #[error("channel operator is numerically singular")]
    SingularChannel,
    #[error("preamble dictionary is empty")]
    EmptyDictionary,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line harness.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SingularChannel | Error::ZeroSignal => 3,
            Error::Io(_) => 3,
            _ => 2,
        }
    }
}
