//! Traditional sieves of Eratosthenes: the simple full sieve, segmented
//! variants that bound space by generating the sieving primes in sub-blocks
//! of length `⌊√M⌋`, and the factoring sieve that walks prime powers.
//!
//! These serve three roles: the small-prime stage of the cubic sieve, the
//! engine for intervals too short (or too low) for it, and the correctness
//! oracle its outputs are compared against.

use crate::stats::{MemTracker, SieveStats};

/// Maximum supported interval endpoint. Keeping `n + Δ` below `2^63` makes
/// every multiple-walk (`x += d`) overflow-free in `u64`.
pub(crate) const MAX_ENDPOINT: u64 = 1 << 63;

const FACTOR_ENTRY_BITS: u64 = 128; // one (prime, exponent) pair, two words

/// Offset-based bit array over `[base, base + len)`.
///
/// Bit `j` stands for the integer `base + j`; after a primality sieve
/// completes, bit `j` is set iff `base + j` is prime (more generally: iff
/// `base + j` survived the sieving that produced it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveBits {
    base: u64,
    len: usize,
    words: Vec<u64>,
}

impl SieveBits {
    pub fn new_all_set(base: u64, len: usize) -> Self {
        let num_words = len.div_ceil(64);
        let mut words = vec![u64::MAX; num_words];
        let extra = num_words * 64 - len;
        if extra > 0 {
            words[num_words - 1] >>= extra;
        }
        SieveBits { base, len, words }
    }

    pub fn new_all_clear(base: u64, len: usize) -> Self {
        SieveBits {
            base,
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub(crate) fn from_raw(base: u64, len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), len.div_ceil(64));
        SieveBits { base, len, words }
    }

    /// Integer represented by bit 0.
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        debug_assert!(j < self.len);
        self.words[j / 64] & (1u64 << (j % 64)) != 0
    }

    #[inline]
    pub fn set(&mut self, j: usize) {
        debug_assert!(j < self.len);
        self.words[j / 64] |= 1u64 << (j % 64);
    }

    #[inline]
    pub fn clear(&mut self, j: usize) {
        debug_assert!(j < self.len);
        self.words[j / 64] &= !(1u64 << (j % 64));
    }

    /// Bit for the integer `v`; false outside the interval.
    pub fn contains_value(&self, v: u64) -> bool {
        v >= self.base && v - self.base < self.len as u64 && self.get((v - self.base) as usize)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Offsets of set bits, ascending.
    pub fn iter_offsets(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let base = wi * 64;
            std::iter::successors(
                if word == 0 { None } else { Some(word) },
                |w| {
                    let w = w & (w - 1);
                    if w == 0 {
                        None
                    } else {
                        Some(w)
                    }
                },
            )
            .map(move |w| base + w.trailing_zeros() as usize)
        })
    }

    /// Integers whose bit is set, ascending.
    pub fn iter_values(&self) -> impl Iterator<Item = u64> + '_ {
        let base = self.base;
        self.iter_offsets().map(move |j| base + j as u64)
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn storage_bits(&self) -> u64 {
        self.words.len() as u64 * 64
    }
}

/// Per-offset factor lists `F_j` with a running smooth-part accumulator
/// `Π_j = ∏_{(p,e) ∈ F_j} p^e`, which always divides `base + j`.
///
/// Primes inside one list are strictly increasing and exponents exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorTable {
    base: u64,
    factors: Vec<Vec<(u64, u32)>>,
    smooth: Vec<u64>,
}

impl FactorTable {
    pub(crate) fn new(base: u64, len: usize) -> Self {
        FactorTable {
            base,
            factors: vec![Vec::new(); len],
            smooth: vec![1; len],
        }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The integer at offset `j`.
    pub fn value(&self, j: usize) -> u64 {
        self.base + j as u64
    }

    pub fn factors(&self, j: usize) -> &[(u64, u32)] {
        &self.factors[j]
    }

    /// `Π_j`, the product of all recorded prime powers at offset `j`.
    pub fn smooth(&self, j: usize) -> u64 {
        self.smooth[j]
    }

    /// `(value, factor list)` pairs, ascending by value.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &[(u64, u32)])> + '_ {
        self.factors
            .iter()
            .enumerate()
            .map(move |(j, f)| (self.base + j as u64, f.as_slice()))
    }

    /// Append a fully-determined prime power (stage-2 hits and the final
    /// large-prime pass). The caller guarantees `p` exceeds every prime
    /// already listed at `j`.
    pub(crate) fn push_prime_power(&mut self, j: usize, p: u64, e: u32) {
        debug_assert!(self.factors[j].last().is_none_or(|&(q, _)| q < p));
        self.factors[j].push((p, e));
        for _ in 0..e {
            self.smooth[j] *= p;
        }
    }

    /// Record that `p^level` divides the value at `j` during the prime-power
    /// walk. Level 1 appends `(p, 1)`; level `k > 1` bumps the exponent of
    /// the entry appended at level 1, which is necessarily the most recent.
    pub(crate) fn record_level_hit(&mut self, j: usize, p: u64, level: u32) {
        if level == 1 {
            debug_assert!(self.factors[j].last().is_none_or(|&(q, _)| q < p));
            self.factors[j].push((p, 1));
        } else {
            let last = self.factors[j]
                .last_mut()
                .expect("level > 1 hit without the level-1 entry");
            debug_assert_eq!(last.0, p);
            debug_assert_eq!(last.1, level - 1);
            last.1 = level;
        }
        self.smooth[j] *= p;
    }
}

/// Sink for the prime-power walk of the factoring sieve: called once for each
/// `(offset, p, level)` with `p^level` dividing `base + offset`.
pub(crate) trait SmoothAccum {
    fn prime_power_hit(&mut self, j: usize, p: u64, level: u32);
}

struct FacAccum<'a> {
    table: &'a mut FactorTable,
    t: &'a MemTracker,
}

impl SmoothAccum for FacAccum<'_> {
    fn prime_power_hit(&mut self, j: usize, p: u64, level: u32) {
        if level == 1 {
            self.t.alloc(FACTOR_ENTRY_BITS);
        }
        self.table.record_level_hit(j, p, level);
    }
}

fn assert_supported_range(n: u64, delta: u64) -> u64 {
    let end = n
        .checked_add(delta)
        .filter(|&e| e < MAX_ENDPOINT)
        .unwrap_or_else(|| panic!("interval end {n} + {delta} exceeds the supported 2^63 range"));
    end
}

/// Primes up to `n_max` by the plain sieve: bit `v` set iff `v` is prime.
/// Only odd multiples are struck, starting from `m²`.
pub fn simple_siev(n_max: u64) -> SieveBits {
    simple_siev_tracked(n_max, &MemTracker::new())
}

pub(crate) fn simple_siev_tracked(n_max: u64, t: &MemTracker) -> SieveBits {
    assert_supported_range(n_max, 0);
    let len = (n_max + 1) as usize;
    let mut bits = SieveBits::new_all_clear(0, len);
    t.alloc(bits.storage_bits());
    if n_max >= 2 {
        bits.set(2);
    }
    let mut v = 3u64;
    while v <= n_max {
        bits.set(v as usize);
        v += 2;
    }
    let mut m = 3u64;
    while m * m <= n_max {
        if bits.get(m as usize) {
            let mut x = m * m;
            while x <= n_max {
                bits.clear(x as usize);
                x += 2 * m;
            }
        }
        m += 2;
    }
    bits
}

/// Sieve `[n, n + Δ]` by the primes `p ≤ M`, generated by one plain sieve.
///
/// Bit `j` ends up 0 iff `n + j ∈ {0, 1}` or some prime `p ≤ M` divides
/// `n + j` with `n + j ≠ p` — striking starts at `max(p·⌈n/p⌉, 2p)`, so the
/// primes up to `M` themselves survive.
pub fn simple_seg_siev(n: u64, delta: u64, m_bound: u64) -> SieveBits {
    simple_seg_siev_tracked(n, delta, m_bound, &MemTracker::new())
}

pub(crate) fn simple_seg_siev_tracked(
    n: u64,
    delta: u64,
    m_bound: u64,
    t: &MemTracker,
) -> SieveBits {
    let end = assert_supported_range(n, delta);
    let mut bits = SieveBits::new_all_set(n, (delta + 1) as usize);
    t.alloc(bits.storage_bits());
    for v in 0..=1u64 {
        if v >= n && v <= end {
            bits.clear((v - n) as usize);
        }
    }
    if m_bound >= 2 {
        let primes = simple_siev_tracked(m_bound, t);
        for p in primes.iter_values() {
            strike_multiples(&mut bits, n, end, p);
        }
        t.release(primes.storage_bits());
    }
    bits
}

#[inline]
fn strike_multiples(bits: &mut SieveBits, n: u64, end: u64, p: u64) {
    let mut x = (p * n.div_ceil(p)).max(2 * p);
    while x <= end {
        bits.clear((x - n) as usize);
        x += p;
    }
}

/// Generate the primes `p ≤ m_max` in blocks of length `⌊√m_max⌋` (each block
/// sieved by [`simple_seg_siev`]) and feed them to `f` in ascending order.
/// Space stays `O(√m_max)`; every prime is produced exactly once.
pub(crate) fn each_prime_segmented(m_max: u64, t: &MemTracker, mut f: impl FnMut(u64)) {
    if m_max < 2 {
        return;
    }
    let block = m_max.isqrt().max(1);
    let mut lo = 1u64;
    while lo <= m_max {
        let end = lo + block - 1;
        let seg = simple_seg_siev_tracked(lo, block - 1, end.isqrt(), t);
        for j in seg.iter_offsets() {
            let p = lo + j as u64;
            if p > m_max {
                break;
            }
            f(p);
        }
        t.release(seg.storage_bits());
        lo += block;
    }
}

/// Same output contract as [`simple_seg_siev`], but the sieving primes are
/// generated in sub-blocks so the working space is `O(√M + Δ)` bits instead
/// of `O(M + Δ)`.
pub fn sub_seg_siev(n: u64, delta: u64, m_bound: u64) -> SieveBits {
    sub_seg_siev_tracked(n, delta, m_bound, &MemTracker::new())
}

pub(crate) fn sub_seg_siev_tracked(n: u64, delta: u64, m_bound: u64, t: &MemTracker) -> SieveBits {
    let end = assert_supported_range(n, delta);
    let mut bits = SieveBits::new_all_set(n, (delta + 1) as usize);
    t.alloc(bits.storage_bits());
    for v in 0..=1u64 {
        if v >= n && v <= end {
            bits.clear((v - n) as usize);
        }
    }
    each_prime_segmented(m_bound, t, |p| strike_multiples(&mut bits, n, end, p));
    bits
}

/// Primes in `[n, n + Δ]`: bit `j` set iff `n + j` is prime.
pub fn seg_siev(n: u64, delta: u64) -> SieveBits {
    seg_siev_with_stats(n, delta).0
}

/// [`seg_siev`] plus memory instrumentation.
pub fn seg_siev_with_stats(n: u64, delta: u64) -> (SieveBits, SieveStats) {
    let t = MemTracker::new();
    let end = assert_supported_range(n, delta);
    let bits = sub_seg_siev_tracked(n, delta, end.isqrt(), &t);
    let stats = SieveStats {
        peak_bits: t.peak_bits(),
        ..SieveStats::default()
    };
    (bits, stats)
}

/// Run the prime-power walk for all primes `p ≤ m_bound` over `[n, n + Δ]`,
/// reporting each `(offset, p, level)` hit to `acc`. Requires `n ≥ 1`.
pub(crate) fn smooth_walk(
    n: u64,
    delta: u64,
    m_bound: u64,
    t: &MemTracker,
    acc: &mut impl SmoothAccum,
) {
    assert!(n >= 1, "factoring walk needs n ≥ 1");
    let end = assert_supported_range(n, delta);
    each_prime_segmented(m_bound, t, |p| {
        let mut d = p;
        let mut level = 1u32;
        while d <= end {
            let mut x = d * n.div_ceil(d);
            while x <= end {
                acc.prime_power_hit((x - n) as usize, p, level);
                x += d;
            }
            match d.checked_mul(p) {
                Some(next) => d = next,
                None => break,
            }
            level += 1;
        }
    });
}

/// For every `n + j` in `[n, n + Δ]`, the factors with `p ≤ M`:
/// `F_j = {(p, v_p(n+j)) : p ≤ M, p | n+j}` and `Π_j = ∏ p^{v_p(n+j)}`.
pub fn sub_seg_siev_fac(n: u64, delta: u64, m_bound: u64) -> FactorTable {
    sub_seg_siev_fac_tracked(n, delta, m_bound, &MemTracker::new())
}

pub(crate) fn sub_seg_siev_fac_tracked(
    n: u64,
    delta: u64,
    m_bound: u64,
    t: &MemTracker,
) -> FactorTable {
    let mut table = FactorTable::new(n, (delta + 1) as usize);
    t.alloc(table.len() as u64 * 64); // the smooth-part words
    let mut acc = FacAccum {
        table: &mut table,
        t,
    };
    smooth_walk(n, delta, m_bound, t, &mut acc);
    table
}

/// Complete factorization of every integer in `[n, n + Δ]` (requires
/// `n ≥ 2`). After sieving by `p ≤ ⌊√(n+Δ)⌋`, any leftover cofactor
/// `n'/Π ≠ 1` is a single prime above the square root and is appended with
/// exponent 1.
pub fn seg_siev_fac(n: u64, delta: u64) -> FactorTable {
    seg_siev_fac_with_stats(n, delta).0
}

/// [`seg_siev_fac`] plus memory instrumentation.
pub fn seg_siev_fac_with_stats(n: u64, delta: u64) -> (FactorTable, SieveStats) {
    assert!(n >= 2, "seg_siev_fac needs n ≥ 2");
    let t = MemTracker::new();
    let end = assert_supported_range(n, delta);
    let mut table = sub_seg_siev_fac_tracked(n, delta, end.isqrt(), &t);
    for j in 0..table.len() {
        let v = table.value(j);
        let smooth = table.smooth(j);
        if smooth != v {
            t.alloc(FACTOR_ENTRY_BITS);
            table.push_prime_power(j, v / smooth, 1);
        }
    }
    let stats = SieveStats {
        peak_bits: t.peak_bits(),
        ..SieveStats::default()
    };
    (table, stats)
}
