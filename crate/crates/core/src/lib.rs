//! Capacity analysis for layered Gaussian relay networks.
//!
//! A network has a source `S`, `L` layers of `N` relays, and a destination
//! `D`; signals only flow between adjacent layers. The crate computes the
//! approximate cut-set capacity (the exact minimum over all `2^(L*N)` node
//! cuts of the layer-wise MIMO capacities crossing each cut), selects the
//! best subnetwork with `K` relays per layer, and evaluates the selection /
//! decomposition / cut-bound inequalities that guarantee how much capacity
//! such subnetworks retain. All capacities are in bits (logs base 2).

pub mod capacity_core;
pub mod cut_bounds;
pub mod mimo_bounds;
pub mod network_model;
pub mod simplifier;

/// Errors surfaced by this crate.
///
/// The three variants are deliberately coarse: callers (notably the CLI)
/// map them to distinct exit codes, so what matters is the *kind* of
/// failure, with details carried in the message.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid argument or malformed value (bad dimensions, parity, ranges).
    #[error("invalid input: {0}")]
    Domain(String),
    /// An enumeration would exceed the configured budget.
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    /// A network document failed to parse or validate.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Absolute tolerance, in bits, for inequality checks on computed
/// capacities. Capacities in the tested ranges are O(100) bits, so this is
/// roughly 1e-11 relative.
pub const TOLERANCE_BITS: f64 = 1e-9;

/// Ratio of two positive integers, kept in lowest terms. Used for the exact
/// scale factors and guarantee fractions that multiply capacities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    /// Reduces `num/den`; the denominator must be nonzero.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "fraction denominator must be nonzero");
        let g = num_integer::gcd(num, den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

pub(crate) fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn budget_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Budget(msg.into()))
}
