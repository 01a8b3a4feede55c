use std::cell::Cell;

/// Instrumentation counters for one sieve run.
///
/// `candidates` counts every `m` proposed by the congruence enumeration and
/// checked against the interval; `hits` are those whose multiple landed in
/// `[n - Δ, n + Δ]`, `false_alarms` the rest. One Diophantine approximation is
/// computed per block, so `dioph_calls == blocks`.
///
/// `peak_bits` is the high-water mark of live sieve payload: bit arrays,
/// smooth-part words, and factor entries at two words each. Transient scratch
/// (the sub-sieves used to generate small primes) is included; allocator
/// bookkeeping is not.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SieveStats {
    pub blocks: u64,
    pub dioph_calls: u64,
    pub candidates: u64,
    pub hits: u64,
    pub false_alarms: u64,
    pub peak_bits: u64,
}

impl SieveStats {
    /// Combine counters from independent runs. Associative and commutative:
    /// counts add, peaks take the maximum.
    pub fn merge(&mut self, other: &SieveStats) {
        self.blocks += other.blocks;
        self.dioph_calls += other.dioph_calls;
        self.candidates += other.candidates;
        self.hits += other.hits;
        self.false_alarms += other.false_alarms;
        self.peak_bits = self.peak_bits.max(other.peak_bits);
    }
}

/// Live/peak accounting of sieve buffers, in bits. One tracker per run;
/// interior mutability lets nested scratch buffers hold guards while the
/// caller's output buffer stays registered.
pub(crate) struct MemTracker {
    live: Cell<u64>,
    peak: Cell<u64>,
}

impl MemTracker {
    pub(crate) fn new() -> Self {
        MemTracker {
            live: Cell::new(0),
            peak: Cell::new(0),
        }
    }

    pub(crate) fn alloc(&self, bits: u64) {
        let live = self.live.get() + bits;
        self.live.set(live);
        if live > self.peak.get() {
            self.peak.set(live);
        }
    }

    pub(crate) fn release(&self, bits: u64) {
        self.live.set(self.live.get().saturating_sub(bits));
    }

    /// Register `bits` until the guard drops.
    pub(crate) fn scoped(&self, bits: u64) -> MemGuard<'_> {
        self.alloc(bits);
        MemGuard { t: self, bits }
    }

    pub(crate) fn peak_bits(&self) -> u64 {
        self.peak.get()
    }
}

pub(crate) struct MemGuard<'a> {
    t: &'a MemTracker,
    bits: u64,
}

impl Drop for MemGuard<'_> {
    fn drop(&mut self) {
        self.t.release(self.bits);
    }
}
