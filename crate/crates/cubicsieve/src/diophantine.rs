//! Continued-fraction best rational approximation with simultaneous modular
//! inverse.
//!
//! [`dioph_appr`]`(α, Q)` returns a fraction `a/q` with `q ≤ Q`,
//! `gcd(a, q) = 1` and `|α - a/q| ≤ 1/(qQ)`, together with `a⁻¹ mod q`. Both
//! come out of one pass over the convergents of `α`: the last convergent with
//! denominator within the bound is the approximation, and the sign-alternating
//! identity `p_n·q_{n-1} - p_{n-1}·q_n = (-1)^{n-1}` yields the inverse of its
//! numerator for free.
//!
//! `α` is an exact rational in `[0, 1)`, so the usual "take the reciprocal of
//! the fractional part" step is exactly one Euclidean division on
//! `(num, den)`; the whole computation is integer-only and runs in
//! `O(log max(Q, den(α)))` steps.

use crate::exactmath::Rational;
use crate::SieveError;

/// A best rational approximation `a/q` together with `a⁻¹ mod q`.
///
/// Invariants: `q ≤ Q`, `gcd(a, q) = 1`, `|α - a/q| ≤ 1/(qQ)`,
/// `a·a_inv ≡ 1 (mod q)` with `a_inv ∈ [0, q)`; when `q = 1`, `a_inv = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiophResult {
    pub a: u64,
    pub a_inv: u64,
    pub q: u64,
}

/// Best approximation to `α ∈ [0, 1)` with denominator at most `q_max ≥ 1`.
pub fn dioph_appr(alpha: &Rational, q_max: u64) -> Result<DiophResult, SieveError> {
    #[cfg(feature = "dioph-profile")]
    let t0 = std::time::Instant::now();
    let out = dioph_appr_counted(alpha, q_max).map(|(res, _)| res);
    #[cfg(feature = "dioph-profile")]
    profile::add(t0.elapsed());
    out
}

/// Same as [`dioph_appr`] but also reports the number of convergent steps,
/// so tests can pin the termination bound.
pub(crate) fn dioph_appr_counted(
    alpha: &Rational,
    q_max: u64,
) -> Result<(DiophResult, u32), SieveError> {
    if !alpha.in_unit_interval() {
        return Err(SieveError::Domain(format!(
            "dioph_appr requires α in [0,1), got {alpha}"
        )));
    }
    if q_max == 0 {
        return Err(SieveError::Domain("dioph_appr requires Q ≥ 1".into()));
    }

    // Current complete quotient u/v. All convergent numerators and
    // denominators of a rational are bounded by its denominator, so u128
    // arithmetic below is exact.
    let mut u = alpha.num() as u128;
    let mut v = alpha.den() as u128;
    let q_lim = q_max as u128;

    let (mut p_prev, mut q_prev) = (1u128, 0u128);
    let (mut p_cur, mut q_cur) = (u / v, 1u128); // first convergent ⌊α⌋/1 = 0/1
    let mut s_pos = true; // sign (-1)^n attached to the current convergent
    let mut iters = 0u32;

    while q_cur <= q_lim {
        iters += 1;
        if u % v == 0 {
            // α equals the current convergent exactly; its inverse comes from
            // the previous denominator with sign -s.
            return Ok((finish(p_cur, q_cur, q_prev, !s_pos), iters));
        }
        // α ← 1/(α - ⌊α⌋) is a single Euclidean division step on (u, v).
        (u, v) = (v, u % v);
        let b = u / v;
        let p_next = b * p_cur + p_prev;
        let q_next = b * q_cur + q_prev;
        (p_prev, q_prev) = (p_cur, q_cur);
        (p_cur, q_cur) = (p_next, q_next);
        s_pos = !s_pos;
        // p_n·q_{n-1} - p_{n-1}·q_n = (-1)^{n-1}, checked modulo 2^128 so huge
        // operands cannot fault the check itself.
        debug_assert_eq!(
            p_cur
                .wrapping_mul(q_prev)
                .wrapping_sub(p_prev.wrapping_mul(q_cur)),
            if s_pos { 1u128.wrapping_neg() } else { 1 },
            "convergent sign bookkeeping broke at step {iters}"
        );
    }
    // q_cur overshot: the answer is the previous convergent, whose inverse is
    // +s times the first excluded denominator.
    Ok((finish(p_prev, q_prev, q_cur, s_pos), iters))
}

fn finish(a: u128, q: u128, inv_src: u128, inv_positive: bool) -> DiophResult {
    let a_inv = if q == 1 {
        0
    } else {
        let m = inv_src % q;
        if inv_positive {
            m
        } else {
            (q - m) % q
        }
    };
    let res = DiophResult {
        a: a as u64,
        a_inv: a_inv as u64,
        q: q as u64,
    };
    // Cheap self-check of the inverse; a transcription slip here would
    // silently corrupt every sieve block downstream.
    if res.q > 1 {
        assert_eq!(
            (res.a as u128 % res.q as u128) * res.a_inv as u128 % res.q as u128,
            1,
            "modular inverse self-check failed for a={} q={}",
            res.a,
            res.q
        );
    }
    res
}

#[cfg(feature = "dioph-profile")]
pub mod profile {
    //! Thread-local wall-time accounting for `dioph_appr`, compiled in only
    //! with the `dioph-profile` feature.

    use std::cell::Cell;
    use std::time::Duration;

    thread_local! {
        static NANOS: Cell<u64> = const { Cell::new(0) };
    }

    pub(super) fn add(d: Duration) {
        NANOS.with(|c| c.set(c.get().saturating_add(d.as_nanos() as u64)));
    }

    /// Nanoseconds spent in `dioph_appr` on this thread since the last call;
    /// resets the counter.
    pub fn take_nanos() -> u64 {
        NANOS.with(|c| c.replace(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::gcd_u128;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rat(num: i128, den: i128) -> Rational {
        Rational::new(num, den).unwrap()
    }

    /// |α - a/q| ≤ 1/(qQ) checked in exact integer arithmetic:
    /// |num·q - a·den| · Q ≤ den.
    fn within_bound(alpha: &Rational, a: u64, q: u64, q_max: u64) -> bool {
        let lhs = (alpha.num() * q as i128 - a as i128 * alpha.den()).unsigned_abs();
        lhs * q_max as u128 <= alpha.den() as u128
    }

    fn check_invariants(alpha: &Rational, res: &DiophResult, q_max: u64) {
        assert!(res.q >= 1 && res.q <= q_max, "q out of range: {res:?}");
        assert_eq!(
            gcd_u128(res.a as u128, res.q as u128),
            1,
            "a, q not coprime: {res:?}"
        );
        assert!(
            within_bound(alpha, res.a, res.q, q_max),
            "approximation bound violated: α={alpha} {res:?} Q={q_max}"
        );
        if res.q == 1 {
            assert_eq!(res.a_inv, 0);
        } else {
            assert!(res.a_inv < res.q);
            assert_eq!(
                (res.a as u128 * res.a_inv as u128) % res.q as u128,
                1,
                "inverse wrong: {res:?}"
            );
        }
    }

    /// Exhaustive oracle: every fraction a/q with q ≤ Q (a the best numerator
    /// for that q) that satisfies the 1/(qQ) bound, in lowest terms.
    fn exhaustive_valid_set(alpha: &Rational, q_max: u64) -> Vec<(u64, u64)> {
        let mut out = vec![];
        for q in 1..=q_max {
            // candidates ⌊αq⌋ and ⌈αq⌉
            let lo = alpha.num() * q as i128 / alpha.den();
            for a in [lo, lo + 1] {
                if a < 0 {
                    continue;
                }
                if within_bound(alpha, a as u64, q, q_max) {
                    let g = gcd_u128(a as u128, q as u128);
                    let (ar, qr) = ((a as u128 / g) as u64, (q as u128 / g) as u64);
                    if !out.contains(&(ar, qr)) {
                        out.push((ar, qr));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn integer_alpha_gives_trivial_result() {
        let res = dioph_appr(&rat(0, 1), 10).unwrap();
        assert_eq!(res, DiophResult { a: 0, a_inv: 0, q: 1 });
    }

    #[test]
    fn five_sevenths_with_q3() {
        // Derived with the exhaustive scan: 2/3 approximates 5/7 within
        // 1/(3·3), and 2·2 ≡ 1 (mod 3).
        let alpha = rat(5, 7);
        let res = dioph_appr(&alpha, 3).unwrap();
        assert_eq!(res, DiophResult { a: 2, a_inv: 2, q: 3 });
        check_invariants(&alpha, &res, 3);
        assert!(exhaustive_valid_set(&alpha, 3).contains(&(res.a, res.q)));
    }

    #[test]
    fn early_exit_when_alpha_is_a_convergent() {
        // α = 1/3 terminates its continued fraction inside the loop.
        let alpha = rat(1, 3);
        let res = dioph_appr(&alpha, 10).unwrap();
        assert_eq!(res, DiophResult { a: 1, a_inv: 1, q: 3 });
        check_invariants(&alpha, &res, 10);

        // exact hit on a later convergent
        let alpha = rat(5, 7);
        let res = dioph_appr(&alpha, 100).unwrap();
        assert_eq!(res, DiophResult { a: 5, a_inv: 3, q: 7 });
        check_invariants(&alpha, &res, 100);
    }

    #[test]
    fn rejects_alpha_outside_unit_interval() {
        assert!(dioph_appr(&rat(3, 2), 10).is_err());
        assert!(dioph_appr(&rat(-1, 2), 10).is_err());
        assert!(dioph_appr(&rat(1, 2), 0).is_err());
    }

    #[test]
    fn known_alpha_against_exhaustive_scan() {
        let alpha = rat(355, 1_000_000);
        let mut rng = ChaCha8Rng::seed_from_u64(0xD10);
        for _ in 0..50 {
            let q_max = rng.gen_range(1u64..=500);
            let res = dioph_appr(&alpha, q_max).unwrap();
            check_invariants(&alpha, &res, q_max);
            assert!(
                exhaustive_valid_set(&alpha, q_max).contains(&(res.a, res.q)),
                "Q={q_max} {res:?}"
            );
        }
    }

    #[test]
    fn random_rationals_satisfy_all_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
        for _ in 0..10_000 {
            let den = rng.gen_range(1i128..=1_000_000_000);
            let num = rng.gen_range(0..den);
            let alpha = rat(num, den);
            let q_max = rng.gen_range(1u64..=1_000_000);
            let res = dioph_appr(&alpha, q_max).unwrap();
            check_invariants(&alpha, &res, q_max);
            if res.a == 0 {
                assert_eq!(res.q, 1, "a = 0 is only possible with q = 1");
            }
        }
    }

    #[test]
    fn random_rationals_match_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xBEA7);
        for _ in 0..400 {
            let den = rng.gen_range(1i128..=10_000);
            let num = rng.gen_range(0..den);
            let alpha = rat(num, den);
            let q_max = rng.gen_range(1u64..=200);
            let res = dioph_appr(&alpha, q_max).unwrap();
            check_invariants(&alpha, &res, q_max);
            assert!(
                exhaustive_valid_set(&alpha, q_max).contains(&(res.a, res.q)),
                "α={alpha} Q={q_max} {res:?}"
            );
        }
    }

    #[test]
    fn iteration_count_is_logarithmic() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x17E2);
        for _ in 0..20_000 {
            let den = rng.gen_range(1i128..=1_000_000_000_000);
            let num = rng.gen_range(0..den);
            let q_max = rng.gen_range(1u64..=1_000_000);
            let (_, iters) = dioph_appr_counted(&rat(num, den), q_max).unwrap();
            let bound = 2.0 * (q_max.max(den as u64) as f64).log2() + 4.0;
            assert!(
                (iters as f64) <= bound,
                "iters={iters} bound={bound} den={den} Q={q_max}"
            );
        }
    }
}
