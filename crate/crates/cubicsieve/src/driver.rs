//! Full-range computations assembled from interval runs: stream all primes,
//! factorizations or Möbius values up to `N`, and Mertens sums, by splitting
//! `[2, N]` into chunks of length about `2Δ` and sieving one chunk at a time.
//!
//! With the default `Δ = ⌈N^(1/3)·(ln N)^(2/3)⌉` the live memory per chunk is
//! independent of how far the stream has progressed. Each chunk runs on the
//! cubic engine when its center satisfies that engine's preconditions
//! (`1 ≤ Δ < n`, `Δ³ ≥ n`, interval low end high enough for the operation)
//! and falls back to the classic segmented sieve otherwise — in practice the
//! first few chunks, where `n ≤ Δ`.

use crate::classic_sieve::{
    seg_siev_fac_with_stats, seg_siev_with_stats, FactorTable, SieveBits,
};
use crate::cubic_sieve::{mobius_segment, new_seg_siev, new_seg_siev_fac, SieveConfig};
use crate::exactmath::{icbrt, Rational};
use crate::stats::SieveStats;
use crate::{SieveError, SinkResult};

/// Which sieve runs each chunk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Classic segmented sieve for every chunk.
    Classic,
    /// Cubic sieve for every chunk; chunks that violate its preconditions
    /// make the run fail with a configuration error.
    Cubic,
    /// Cubic where feasible, classic elsewhere.
    Auto,
}

/// Options for the full-range drivers.
#[derive(Clone, Debug)]
pub struct DriverConfig {
    pub engine: Engine,
    /// Small-prime cutoff factor for cubic chunks.
    pub k: Rational,
    /// Per-chunk half-width; `None` picks [`default_delta`].
    pub delta: Option<u64>,
    /// Chunks computed concurrently (delivery stays in order). 1 = serial.
    pub jobs: usize,
}

impl Default for DriverConfig {
    fn default() -> Self {
        DriverConfig {
            engine: Engine::Auto,
            k: Rational::from_int(3),
            delta: None,
            jobs: 1,
        }
    }
}

/// Half-width used when none is given: `⌈N^(1/3)·(ln N)^(2/3)⌉`, raised to
/// `⌈N^(1/3)⌉` if rounding ever drops below it so that every chunk center
/// stays within the cubic engine's reach.
pub fn default_delta(limit: u64) -> u64 {
    let lf = limit.max(2) as f64;
    let d = (lf.cbrt() * lf.ln().powf(2.0 / 3.0)).ceil() as u64;
    let c = icbrt(limit);
    let ceil_cbrt = if (c as u128).pow(3) == limit as u128 {
        c
    } else {
        c + 1
    };
    d.max(ceil_cbrt).max(1)
}

/// One centered interval `[center - half_width, center + half_width]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Chunk {
    pub center: u64,
    pub half_width: u64,
}

impl Chunk {
    pub fn lo(&self) -> u64 {
        self.center - self.half_width
    }

    pub fn hi(&self) -> u64 {
        self.center + self.half_width
    }
}

/// An ordered list of centered chunks partitioning `[2, limit]` — no gaps,
/// no overlaps. Chunk lengths are `2·delta + 1` except near the top, where
/// the remainder is split into one shorter odd-length chunk and, if needed,
/// a final singleton.
#[derive(Clone, Debug)]
pub struct ChunkPlan {
    pub limit: u64,
    pub delta: u64,
    pub chunks: Vec<Chunk>,
}

impl ChunkPlan {
    pub fn new(limit: u64, delta: u64) -> Result<Self, SieveError> {
        if limit < 2 {
            return Err(SieveError::Config(format!(
                "range limit must be at least 2, got {limit}"
            )));
        }
        if delta == 0 || delta > (1 << 61) {
            return Err(SieveError::Config(format!("unusable chunk Δ = {delta}")));
        }
        let mut chunks = Vec::new();
        let mut lo = 2u64;
        while lo <= limit {
            let remaining = limit - lo + 1;
            let mut len = remaining.min(2 * delta + 1);
            if len % 2 == 0 {
                len -= 1; // keep an integer center; forces a trailing singleton
            }
            let hw = (len - 1) / 2;
            chunks.push(Chunk {
                center: lo + hw,
                half_width: hw,
            });
            lo += len;
        }
        Ok(ChunkPlan {
            limit,
            delta,
            chunks,
        })
    }
}

enum Resolved {
    Classic,
    Cubic(SieveConfig),
}

/// Decide the engine for one chunk. `min_lo` is the smallest interval start
/// the cubic operation accepts (0 for primality, 1 for Möbius, 2 for
/// factoring).
fn resolve_engine(chunk: &Chunk, cfg: &DriverConfig, min_lo: u64) -> Result<Resolved, SieveError> {
    let feasible = || -> Option<SieveConfig> {
        if chunk.half_width == 0 || chunk.lo() < min_lo {
            return None;
        }
        SieveConfig::new(chunk.center, chunk.half_width, cfg.k).ok()
    };
    match cfg.engine {
        Engine::Classic => Ok(Resolved::Classic),
        Engine::Cubic => feasible().map(Resolved::Cubic).ok_or_else(|| {
            SieveError::Config(format!(
                "cubic engine preconditions fail on chunk [{}, {}] (Δ = {})",
                chunk.lo(),
                chunk.hi(),
                chunk.half_width
            ))
        }),
        Engine::Auto => Ok(feasible().map_or(Resolved::Classic, Resolved::Cubic)),
    }
}

/// Compute chunks (possibly `jobs` at a time) and deliver them strictly in
/// plan order. Parallel waves are bounded: at most `jobs` chunk outputs are
/// alive at once.
fn run_plan<T: Send>(
    plan: &ChunkPlan,
    jobs: usize,
    compute: impl Fn(&Chunk) -> Result<(T, SieveStats), SieveError> + Sync,
    mut deliver: impl FnMut(&Chunk, T) -> Result<(), SieveError>,
) -> Result<SieveStats, SieveError> {
    let jobs = jobs.max(1);
    let mut stats = SieveStats::default();
    if jobs == 1 {
        for chunk in &plan.chunks {
            let (out, s) = compute(chunk)?;
            stats.merge(&s);
            deliver(chunk, out)?;
        }
        return Ok(stats);
    }
    let compute = &compute;
    for wave in plan.chunks.chunks(jobs) {
        let results: Vec<Result<(T, SieveStats), SieveError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = wave
                .iter()
                .map(|chunk| scope.spawn(move || compute(chunk)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
                .collect()
        });
        for (chunk, res) in wave.iter().zip(results) {
            let (out, s) = res?;
            stats.merge(&s);
            deliver(chunk, out)?;
        }
    }
    Ok(stats)
}

fn primes_chunk(chunk: &Chunk, cfg: &DriverConfig) -> Result<(SieveBits, SieveStats), SieveError> {
    match resolve_engine(chunk, cfg, 0)? {
        Resolved::Classic => Ok(seg_siev_with_stats(chunk.lo(), chunk.hi() - chunk.lo())),
        Resolved::Cubic(sc) => new_seg_siev(&sc),
    }
}

/// Stream every prime `p ≤ limit` to `sink`, ascending, each exactly once.
pub fn primes_up_to(
    limit: u64,
    cfg: &DriverConfig,
    mut sink: impl FnMut(u64) -> SinkResult,
) -> Result<SieveStats, SieveError> {
    let plan = ChunkPlan::new(limit, cfg.delta.unwrap_or_else(|| default_delta(limit)))?;
    run_plan(
        &plan,
        cfg.jobs,
        |chunk| primes_chunk(chunk, cfg),
        |_, bits| {
            for p in bits.iter_values() {
                sink(p).map_err(SieveError::Sink)?;
            }
            Ok(())
        },
    )
}

fn factor_chunk(chunk: &Chunk, cfg: &DriverConfig) -> Result<(FactorTable, SieveStats), SieveError> {
    match resolve_engine(chunk, cfg, 2)? {
        Resolved::Classic => Ok(seg_siev_fac_with_stats(
            chunk.lo(),
            chunk.hi() - chunk.lo(),
        )),
        Resolved::Cubic(sc) => new_seg_siev_fac(&sc),
    }
}

/// Stream `(n, factors)` for every `2 ≤ n ≤ limit`, ascending; the factor
/// list is complete with primes increasing.
pub fn factor_up_to(
    limit: u64,
    cfg: &DriverConfig,
    mut sink: impl FnMut(u64, &[(u64, u32)]) -> SinkResult,
) -> Result<SieveStats, SieveError> {
    let plan = ChunkPlan::new(limit, cfg.delta.unwrap_or_else(|| default_delta(limit)))?;
    run_plan(
        &plan,
        cfg.jobs,
        |chunk| factor_chunk(chunk, cfg),
        |_, table| {
            for (v, factors) in table.iter() {
                sink(v, factors).map_err(SieveError::Sink)?;
            }
            Ok(())
        },
    )
}

fn mu_of_factors(factors: &[(u64, u32)]) -> i8 {
    if factors.iter().any(|&(_, e)| e >= 2) {
        0
    } else if factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

fn mobius_chunk(chunk: &Chunk, cfg: &DriverConfig) -> Result<(Vec<i8>, SieveStats), SieveError> {
    match resolve_engine(chunk, cfg, 1)? {
        Resolved::Classic => {
            let (table, stats) = seg_siev_fac_with_stats(chunk.lo(), chunk.hi() - chunk.lo());
            let values = (0..table.len())
                .map(|j| mu_of_factors(table.factors(j)))
                .collect();
            Ok((values, stats))
        }
        Resolved::Cubic(sc) => {
            let (seg, stats) = mobius_segment(&sc)?;
            Ok((seg.into_values(), stats))
        }
    }
}

/// Stream `(n, μ(n))` for every `1 ≤ n ≤ limit`, ascending.
pub fn mobius_up_to(
    limit: u64,
    cfg: &DriverConfig,
    mut sink: impl FnMut(u64, i8) -> SinkResult,
) -> Result<SieveStats, SieveError> {
    if limit < 1 {
        return Err(SieveError::Config("μ stream needs limit ≥ 1".into()));
    }
    sink(1, 1).map_err(SieveError::Sink)?;
    if limit < 2 {
        return Ok(SieveStats::default());
    }
    let plan = ChunkPlan::new(limit, cfg.delta.unwrap_or_else(|| default_delta(limit)))?;
    run_plan(
        &plan,
        cfg.jobs,
        |chunk| mobius_chunk(chunk, cfg),
        |chunk, values| {
            for (j, &mu) in values.iter().enumerate() {
                sink(chunk.lo() + j as u64, mu).map_err(SieveError::Sink)?;
            }
            Ok(())
        },
    )
}

/// Running Mertens sum `Σ_{n ≤ x} μ(n)` with `|sum| > √x` checkpoints.
#[derive(Clone, Debug, Default)]
pub struct MertensAccumulator {
    pub x: u64,
    pub sum: i64,
    /// Positions where `|sum| > √x` held (checked exactly as `sum² > x`).
    pub violations: Vec<u64>,
}

impl MertensAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Advance to `x + 1` by adding `μ(x + 1)`.
    pub fn push(&mut self, mu: i8) {
        self.x += 1;
        self.sum += mu as i64;
        if (self.sum as i128) * (self.sum as i128) > self.x as i128 {
            self.violations.push(self.x);
        }
    }
}

/// Exact `Σ_{n ≤ limit} μ(n)` and the list of `x ≤ limit` violating the
/// `|M(x)| ≤ √x` inequality (expected empty far beyond any feasible limit).
pub fn mertens(limit: u64, cfg: &DriverConfig) -> Result<(i64, Vec<u64>), SieveError> {
    if limit < 1 {
        return Err(SieveError::Config("mertens needs limit ≥ 1".into()));
    }
    let mut acc = MertensAccumulator::new();
    mobius_up_to(limit, cfg, |_, mu| {
        acc.push(mu);
        Ok(())
    })?;
    Ok((acc.sum, acc.violations))
}
