//! Sieving and factoring `[n - Δ, n + Δ]` with `Δ` as small as `n^(1/3)`,
//! in `O(Δ)` bits (`O(Δ log n)` for factoring) — without walking every prime
//! up to `√(n + Δ)`.
//!
//! Primes `p ≤ KΔ` are handled by the classic segmented sieve. Beyond that,
//! divisors are found blockwise: on `[M, M + 2R]` with `R = ⌊M·√(Δ/4n)⌋`, the
//! function `m ↦ n/m` is close to linear, so an integer `m = m0 + r` has a
//! multiple in the interval only if the linearized value
//! `α₁·r + α₀ (mod 1)` lands within `η = 5Δ/4M` of zero. Replacing the slope
//! `α₁ = {-n/m0²}` by a continued-fraction approximant `a/q` with `q ≤ 2R`
//! turns that into a congruence: `r ≡ -a⁻¹(c + j) (mod q)` for
//! `j ∈ [-k-1, k+1]`, `c = ⌊α₀q + 1/2⌋`, `k = ⌊ηq⌋`. Enumerating those `r`
//! yields every `m` in the block that can divide something in the interval,
//! plus a few false alarms that are discarded after an explicit check.
//!
//! Every multiple is recomputed as `n' = ⌊(n+Δ)/m⌋·m` and verified against
//! the interval before use; the Diophantine prediction is never trusted.

use crate::classic_sieve::{self, FactorTable, SieveBits, SmoothAccum, MAX_ENDPOINT};
use crate::diophantine::{dioph_appr, DiophResult};
use crate::exactmath::{floor_scaled, frac_part, Rational};
use crate::stats::{MemTracker, SieveStats};
use crate::SieveError;

/// Parameters for one interval run: center `n`, half-width `Δ` with
/// `⌈n^(1/3)⌉ ≤ Δ < n`, and the small-prime cutoff factor `K ≥ 5/2`.
#[derive(Clone, Debug)]
pub struct SieveConfig {
    n: u64,
    delta: u64,
    k: Rational,
    k_delta: u64,
    end: u64,
}

impl SieveConfig {
    pub fn new(n: u64, delta: u64, k: Rational) -> Result<Self, SieveError> {
        if n == 0 {
            return Err(SieveError::Config("center n must be positive".into()));
        }
        if delta == 0 || delta >= n {
            return Err(SieveError::Config(format!(
                "half-width must satisfy 1 ≤ Δ < n, got Δ={delta} n={n}"
            )));
        }
        let cube_ok = delta >= (1 << 42) || (delta as u128).pow(3) >= n as u128;
        if !cube_ok {
            return Err(SieveError::Config(format!(
                "half-width too small: Δ={delta} is below n^(1/3) for n={n}"
            )));
        }
        if k < Rational::new(5, 2)? {
            return Err(SieveError::Config(format!("K must be ≥ 5/2, got {k}")));
        }
        let end = n
            .checked_add(delta)
            .filter(|&e| e < MAX_ENDPOINT)
            .ok_or_else(|| {
                SieveError::Config(format!("n + Δ = {n} + {delta} exceeds the 2^63 range"))
            })?;
        let k_delta = k
            .floor_mul_u64(delta)
            .filter(|&kd| kd < MAX_ENDPOINT)
            .ok_or_else(|| SieveError::Config(format!("⌊KΔ⌋ out of range for K={k} Δ={delta}")))?;
        Ok(SieveConfig {
            n,
            delta,
            k,
            k_delta,
            end,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn k(&self) -> Rational {
        self.k
    }

    /// `⌊KΔ⌋`, the last divisor handled by the classic stage.
    pub fn k_delta(&self) -> u64 {
        self.k_delta
    }

    /// The sieved interval `(n - Δ, n + Δ)` as (low, high), inclusive.
    pub fn interval(&self) -> (u64, u64) {
        (self.n - self.delta, self.end)
    }

    /// Largest block start: `⌊√(n + Δ)⌋`.
    pub fn sqrt_hi(&self) -> u64 {
        self.end.isqrt()
    }
}

/// Everything needed to enumerate candidate divisors on one block
/// `[M, M + 2R]`. Produced by [`block_params`]; the fields are public for
/// inspection and tests.
#[derive(Clone, Debug)]
pub struct BlockParams {
    /// Block start `M`.
    pub m_start: u64,
    /// Half-width control `R = ⌊√(ΔM²/4n)⌋ ≥ 1`.
    pub r: u64,
    /// Expansion point `m0 = M + R`.
    pub m0: u64,
    /// `{n/m0}` — constant term of the linearization.
    pub alpha0: Rational,
    /// `{-n/m0²}` — slope of the linearization.
    pub alpha1: Rational,
    /// Tolerance `5Δ/4M ≤ 1/2`.
    pub eta: Rational,
    /// Approximation `a/q` to `alpha1` with `q ≤ 2R`, plus `a⁻¹ mod q`.
    pub dioph: DiophResult,
    /// `⌊alpha0·q + 1/2⌋`.
    pub c: u64,
    /// `⌊eta·q⌋`.
    pub k: u64,
}

/// Compute the block parameters at block start `m_start ∈ (⌊KΔ⌋, √(n+Δ)]`.
///
/// `alpha0` and `alpha1` are reduced into `[0, 1)` exactly, with double-width
/// numerators `n mod m0` and `n mod m0²`.
pub fn block_params(m_start: u64, cfg: &SieveConfig) -> Result<BlockParams, SieveError> {
    if m_start <= cfg.k_delta() || m_start > cfg.sqrt_hi() {
        return Err(SieveError::Config(format!(
            "block start {m_start} outside (⌊KΔ⌋, √(n+Δ)] = ({}, {}]",
            cfg.k_delta(),
            cfg.sqrt_hi()
        )));
    }
    let r = ((cfg.delta as u128 * m_start as u128 * m_start as u128) / (4 * cfg.n as u128)).isqrt()
        as u64;
    if r == 0 {
        // unreachable once Δ ≥ n^(1/3) and K ≥ 5/2 hold, but kept as a guard
        return Err(SieveError::Config(format!(
            "degenerate block (R = 0) at M={m_start}; Δ ≥ n^(1/3) violated"
        )));
    }
    let m0 = m_start + r;
    let m0_sq = m0 as u128 * m0 as u128;
    let alpha1 = frac_part(-(cfg.n as i128), m0_sq as i128)?;
    let alpha0 = frac_part(cfg.n as i128, m0 as i128)?;
    let eta = Rational::new(5 * cfg.delta as i128, 4 * m_start as i128)?;
    debug_assert!(eta.in_unit_interval(), "η must be < 1 when K ≥ 5/2");
    let dioph = dioph_appr(&alpha1, 2 * r)?;
    let c = floor_scaled(&alpha0, dioph.q, true) as u64;
    let k = floor_scaled(&eta, dioph.q, false) as u64;
    Ok(BlockParams {
        m_start,
        r,
        m0,
        alpha0,
        alpha1,
        eta,
        dioph,
        c,
        k,
    })
}

/// Fill `buf` with every `m = m0 + r`, `r ∈ [-R, R]`, satisfying
/// `r ≡ -a⁻¹(c + j) (mod q)` for some `j ∈ [-k-1, k+1]`.
///
/// When the `j` range covers all residues mod `q` (in particular when
/// `q = 1`), the whole block is emitted once instead of once per `j`.
/// Residues for distinct `j` in the narrow case are distinct, so the buffer
/// never contains duplicates; order is per-residue, not sorted.
pub(crate) fn fill_candidates(bp: &BlockParams, buf: &mut Vec<u64>) {
    buf.clear();
    let q = bp.dioph.q;
    let lo = bp.m_start;
    let hi = bp.m_start + 2 * bp.r;
    if q == 1 || 2 * bp.k + 3 >= q {
        buf.extend(lo..=hi);
        return;
    }
    let a_inv = bp.dioph.a_inv as u128;
    let c = bp.c as i128;
    let k = bp.k as i128;
    for j in -(k + 1)..=(k + 1) {
        let t = (c + j).rem_euclid(q as i128) as u128;
        let r0 = ((q as u128 - (a_inv * t) % q as u128) % q as u128) as u64;
        // smallest m ≥ M with m ≡ m0 + r0 (mod q)
        let mut m = lo + (bp.r + r0) % q;
        while m <= hi {
            buf.push(m);
            m += q;
        }
    }
}

/// The candidate divisors of one block, ascending and deduplicated.
///
/// Contains every `m ∈ [M, M + 2R]` that has a multiple in `[n - Δ, n + Δ]`;
/// may contain extras whose predicted multiple misses the interval.
pub fn enumerate_candidates(bp: &BlockParams) -> Vec<u64> {
    let mut buf = Vec::new();
    fill_candidates(bp, &mut buf);
    buf.sort_unstable();
    buf.dedup();
    buf
}

/// Walk the block starts `M = ⌊KΔ⌋ + 1, …` (advancing by `2R + 1`) while
/// `M ≤ √(n+Δ)`, calling `body` with the parameters and the filled candidate
/// buffer for each block.
fn for_each_block(
    cfg: &SieveConfig,
    t: &MemTracker,
    stats: &mut SieveStats,
    sort_candidates: bool,
    mut body: impl FnMut(&BlockParams, &[u64], &mut SieveStats),
) -> Result<(), SieveError> {
    let sqrt_hi = cfg.sqrt_hi();
    let mut buf: Vec<u64> = Vec::new();
    let mut tracked_cap = 0usize;
    let mut m_start = cfg.k_delta() + 1;
    while m_start <= sqrt_hi {
        let bp = block_params(m_start, cfg)?;
        stats.blocks += 1;
        stats.dioph_calls += 1;
        fill_candidates(&bp, &mut buf);
        if sort_candidates {
            buf.sort_unstable();
        }
        if buf.capacity() > tracked_cap {
            t.alloc(64 * (buf.capacity() - tracked_cap) as u64);
            tracked_cap = buf.capacity();
        }
        stats.candidates += buf.len() as u64;
        body(&bp, &buf, stats);
        m_start += 2 * bp.r + 1;
    }
    Ok(())
}

/// Primality sieve for `[n - Δ, n + Δ]`: bit `j` is set iff `(n - Δ) + j` is
/// prime. Returns the bits together with run statistics.
pub fn new_seg_siev(cfg: &SieveConfig) -> Result<(SieveBits, SieveStats), SieveError> {
    let t = MemTracker::new();
    let mut stats = SieveStats::default();
    let (lo, hi) = cfg.interval();
    let mut bits = classic_sieve::sub_seg_siev_tracked(lo, 2 * cfg.delta(), cfg.k_delta(), &t);
    for_each_block(cfg, &t, &mut stats, false, |_bp, candidates, stats| {
        for &m in candidates {
            let multiple = (hi / m) * m;
            if multiple >= lo {
                stats.hits += 1;
                if multiple > m {
                    bits.clear((multiple - lo) as usize);
                }
            } else {
                stats.false_alarms += 1;
            }
        }
    })?;
    stats.peak_bits = t.peak_bits();
    Ok((bits, stats))
}

/// Complete factorization of every integer in `[n - Δ, n + Δ]` (requires
/// `n - Δ ≥ 2`).
///
/// Stage 2 accepts a candidate `m` only when it divides `n'/Π`, which forces
/// `m` prime: any smaller prime factor of `m` would already sit inside `Π`.
/// Such an `m` enters with exponent 1, or 2 when `m² | n'` (never more, since
/// `m³ > (KΔ)³ > n + Δ`). The closing pass appends the single remaining
/// prime `n'/Π > √(n+Δ)` wherever `Π ≠ n'`.
pub fn new_seg_siev_fac(cfg: &SieveConfig) -> Result<(FactorTable, SieveStats), SieveError> {
    let (lo, hi) = cfg.interval();
    if lo < 2 {
        return Err(SieveError::Config(format!(
            "factoring needs n - Δ ≥ 2, got {lo}"
        )));
    }
    let t = MemTracker::new();
    let mut stats = SieveStats::default();
    let mut table = classic_sieve::sub_seg_siev_fac_tracked(lo, 2 * cfg.delta(), cfg.k_delta(), &t);
    for_each_block(cfg, &t, &mut stats, true, |_bp, candidates, stats| {
        for &m in candidates {
            let multiple = (hi / m) * m;
            if multiple < lo {
                stats.false_alarms += 1;
                continue;
            }
            stats.hits += 1;
            if multiple <= m {
                continue;
            }
            let j = (multiple - lo) as usize;
            let rest = multiple / table.smooth(j);
            if rest % m == 0 {
                // m is a new (necessarily prime) factor of the value at j
                let e = if (multiple as u128) % (m as u128 * m as u128) == 0 {
                    2
                } else {
                    1
                };
                t.alloc(128);
                table.push_prime_power(j, m, e);
            }
        }
    })?;
    for j in 0..table.len() {
        let v = table.value(j);
        let smooth = table.smooth(j);
        if smooth != v {
            t.alloc(128);
            table.push_prime_power(j, v / smooth, 1);
        }
    }
    stats.peak_bits = t.peak_bits();
    Ok((table, stats))
}

/// Möbius values over an interval, offset-indexed from `base = n - Δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuSegment {
    base: u64,
    values: Vec<i8>,
}

impl MuSegment {
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `μ(base + j)`.
    pub fn get(&self, j: usize) -> i8 {
        self.values[j]
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// `(value, μ(value))` pairs, ascending.
    pub fn iter(&self) -> impl Iterator<Item = (u64, i8)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(j, &mu)| (self.base + j as u64, mu))
    }
}

/// Tracks, per offset, the running squarefree sign, a squarefull flag, and
/// the smooth part — the factoring walk with factor lists dropped.
struct MuAccum {
    sign: Vec<i8>,
    squarefull: Vec<bool>,
    smooth: Vec<u64>,
}

impl SmoothAccum for MuAccum {
    fn prime_power_hit(&mut self, j: usize, p: u64, level: u32) {
        match level {
            1 => self.sign[j] = -self.sign[j],
            2 => self.squarefull[j] = true,
            _ => {}
        }
        self.smooth[j] *= p;
    }
}

/// `μ(n + j)` for `j ∈ [-Δ, Δ]`, via the factoring skeleton with per-offset
/// sign/squarefull tracking instead of factor lists. Time and space match the
/// primality sieve up to the smooth-part words.
pub fn mobius_segment(cfg: &SieveConfig) -> Result<(MuSegment, SieveStats), SieveError> {
    let (lo, hi) = cfg.interval();
    debug_assert!(lo >= 1, "Δ < n keeps the interval positive");
    let len = (2 * cfg.delta() + 1) as usize;
    let t = MemTracker::new();
    let mut stats = SieveStats::default();
    let mut acc = MuAccum {
        sign: vec![1; len],
        squarefull: vec![false; len],
        smooth: vec![1; len],
    };
    t.alloc(len as u64 * (8 + 8 + 64));
    classic_sieve::smooth_walk(lo, 2 * cfg.delta(), cfg.k_delta(), &t, &mut acc);
    for_each_block(cfg, &t, &mut stats, false, |_bp, candidates, stats| {
        for &m in candidates {
            let multiple = (hi / m) * m;
            if multiple < lo {
                stats.false_alarms += 1;
                continue;
            }
            stats.hits += 1;
            if multiple <= m {
                continue;
            }
            let j = (multiple - lo) as usize;
            let rest = multiple / acc.smooth[j];
            if rest % m == 0 {
                if (multiple as u128) % (m as u128 * m as u128) == 0 {
                    acc.squarefull[j] = true;
                    acc.smooth[j] *= m * m;
                } else {
                    acc.sign[j] = -acc.sign[j];
                    acc.smooth[j] *= m;
                }
            }
        }
    })?;
    let values: Vec<i8> = (0..len)
        .map(|j| {
            if acc.squarefull[j] {
                0
            } else {
                let v = lo + j as u64;
                // a leftover cofactor is one big prime with exponent 1
                if acc.smooth[j] != v {
                    -acc.sign[j]
                } else {
                    acc.sign[j]
                }
            }
        })
        .collect();
    stats.peak_bits = t.peak_bits();
    Ok((
        MuSegment {
            base: lo,
            values,
        },
        stats,
    ))
}
