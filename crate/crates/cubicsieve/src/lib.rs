//! Segmented sieves of Eratosthenes for short intervals, in sublinear space.
//!
//! The crate sieves and factors intervals `[n - Δ, n + Δ]` two ways:
//!
//! * [`classic_sieve`] — the traditional simple and segmented sieves. They
//!   walk every prime `p ≤ √(n + Δ)`, which costs `Ω(√n)` time per interval
//!   no matter how short the interval is.
//! * [`cubic_sieve`] — a sieve that works down to `Δ ~ n^(1/3)`. Small primes
//!   (`p ≤ KΔ`) are handled classically; the remaining divisors
//!   `m ∈ (KΔ, √(n + Δ)]` are *predicted* instead of enumerated: on each block
//!   `[M, M + 2R]` the map `m ↦ n/m` is linearized, its slope is approximated
//!   by a continued-fraction convergent `a/q` ([`diophantine`]), and the `m`
//!   that can have a multiple in the interval are read off from a congruence
//!   `r ≡ -a⁻¹(c + j) (mod q)`. Everything runs in exact integer and rational
//!   arithmetic ([`exactmath`]).
//!
//! The candidate enumeration never misses a divisor with a multiple in the
//! interval; it may propose a few extras ("false alarms"), which are detected
//! and counted but cost only wasted work. The two families therefore agree
//! bit for bit, and the classic family doubles as the test oracle for the
//! cubic one.
//!
//! [`driver`] chains interval runs into full-range streams (all primes up to
//! `N`, all factorizations, Möbius values, Mertens sums) with per-chunk memory
//! independent of `N`.
//!
//! Supported domain: `n + Δ < 2^63`. All interval arithmetic stays in `u64`
//! words with `i128`/`u128` intermediates; no floating point is involved
//! anywhere in the sieving path.

pub mod bitdump;
pub mod classic_sieve;
pub mod cubic_sieve;
pub mod diophantine;
pub mod driver;
pub mod exactmath;
mod stats;

pub use classic_sieve::{
    seg_siev, seg_siev_fac, simple_seg_siev, simple_siev, sub_seg_siev, sub_seg_siev_fac,
    FactorTable, SieveBits,
};
pub use cubic_sieve::{
    block_params, enumerate_candidates, mobius_segment, new_seg_siev, new_seg_siev_fac,
    BlockParams, MuSegment, SieveConfig,
};
pub use diophantine::{dioph_appr, DiophResult};
pub use driver::{
    default_delta, factor_up_to, mertens, mobius_up_to, primes_up_to, ChunkPlan, DriverConfig,
    Engine, MertensAccumulator,
};
pub use exactmath::{floor_scaled, frac_part, Rational, WideInt};
pub use stats::SieveStats;

/// Errors produced by sieve configuration, the exact-arithmetic layer, and
/// streaming sinks.
#[derive(Debug, thiserror::Error)]
pub enum SieveError {
    /// A sieve precondition does not hold (interval shape, parameter bounds,
    /// infeasible chunk plan).
    #[error("configuration error: {0}")]
    Config(String),
    /// An argument lies outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A streaming sink reported failure; the run is abandoned.
    #[error("sink error: {0}")]
    Sink(#[source] Box<dyn std::error::Error + Send + Sync>),
}

/// Result type used by streaming sinks.
pub type SinkResult = Result<(), Box<dyn std::error::Error + Send + Sync>>;
