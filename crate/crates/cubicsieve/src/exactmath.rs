//! Exact integer and rational arithmetic for the sieve machinery.
//!
//! Everything below is exact. Rationals are stored in lowest terms over
//! 128-bit integers — twice the 64-bit word used for sieve values — which is
//! wide enough that no intermediate in the Diophantine pipeline can overflow:
//! inputs are bounded by `n + Δ < 2^63`, block denominators by `m0² < 2^66`,
//! and convergent denominators by `2R ≤ √(Δ(n+Δ)/n)`, so every product formed
//! here fits in two words.

use std::fmt;
use std::str::FromStr;

use crate::SieveError;

/// Signed integer wide enough to hold any intermediate of the exact pipeline
/// (twice the 64-bit word used for sieve values).
pub type WideInt = i128;

/// An exact fraction `num/den` in lowest terms with `den > 0`.
///
/// Values produced by [`frac_part`] additionally satisfy `0 ≤ num < den`,
/// i.e. they lie in `[0, 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    /// Build `num/den`, normalizing the sign into the numerator and reducing
    /// to lowest terms. `den == 0` is a domain error.
    pub fn new(num: i128, den: i128) -> Result<Self, SieveError> {
        if den == 0 {
            return Err(SieveError::Domain("rational with zero denominator".into()));
        }
        let (num, den) = if den < 0 {
            let num = num
                .checked_neg()
                .ok_or_else(|| SieveError::Domain("rational numerator out of range".into()))?;
            let den = den
                .checked_neg()
                .ok_or_else(|| SieveError::Domain("rational denominator out of range".into()))?;
            (num, den)
        } else {
            (num, den)
        };
        let g = gcd_u128(num.unsigned_abs(), den as u128) as i128;
        Ok(Rational {
            num: num / g,
            den: den / g,
        })
    }

    pub fn from_int(v: i128) -> Self {
        Rational { num: v, den: 1 }
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    /// True when the value lies in `[0, 1)`.
    pub fn in_unit_interval(&self) -> bool {
        self.num >= 0 && self.num < self.den
    }

    /// `⌊self · x⌋` for a non-negative rational; `None` if the product
    /// overflows.
    pub fn floor_mul_u64(&self, x: u64) -> Option<u64> {
        if self.num < 0 {
            return None;
        }
        let prod = self.num.checked_mul(x as i128)?;
        u64::try_from(prod / self.den).ok()
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    // Cross-multiplication; callers keep operands within the WideInt contract
    // so the products cannot overflow.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Parses `"3"`, `"5/2"` and decimal forms like `"2.5"` exactly.
impl FromStr for Rational {
    type Err = SieveError;

    fn from_str(s: &str) -> Result<Self, SieveError> {
        let bad = |_| SieveError::Domain(format!("cannot parse rational from {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let num: i128 = a.trim().parse().map_err(bad)?;
            let den: i128 = b.trim().parse().map_err(bad)?;
            return Rational::new(num, den);
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let neg = int_part.trim_start().starts_with('-');
            let int: i128 = if int_part.trim() == "-" || int_part.trim().is_empty() {
                0
            } else {
                int_part.trim().parse().map_err(bad)?
            };
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(SieveError::Domain(format!(
                    "cannot parse rational from {s:?}"
                )));
            }
            let digits: i128 = frac_part.parse().map_err(bad)?;
            let scale = 10i128
                .checked_pow(frac_part.len() as u32)
                .ok_or_else(|| SieveError::Domain(format!("too many digits in {s:?}")))?;
            let frac = if neg { -digits } else { digits };
            let num = int
                .checked_mul(scale)
                .and_then(|v| v.checked_add(frac))
                .ok_or_else(|| SieveError::Domain(format!("rational {s:?} out of range")))?;
            return Rational::new(num, scale);
        }
        let v: i128 = s.trim().parse().map_err(bad)?;
        Ok(Rational::from_int(v))
    }
}

/// The fractional part `{num/den}` as an exact rational in `[0, 1)`,
/// in lowest terms. `den` must be positive.
pub fn frac_part(num: i128, den: i128) -> Result<Rational, SieveError> {
    if den <= 0 {
        return Err(SieveError::Domain(format!(
            "frac_part requires a positive denominator, got {den}"
        )));
    }
    Rational::new(num.rem_euclid(den), den)
}

/// Exact `⌊αq⌋`, or `⌊αq + 1/2⌋` when `half` is set, for `α ∈ [0, 1)` and
/// `q ≥ 1`. Computed entirely in integer arithmetic: the half case is
/// `⌊(2·num·q + den) / (2·den)⌋`.
pub fn floor_scaled(alpha: &Rational, q: u64, half: bool) -> i128 {
    debug_assert!(alpha.in_unit_interval(), "floor_scaled needs α in [0,1)");
    debug_assert!(q >= 1);
    let q = q as i128;
    if half {
        (2 * alpha.num * q + alpha.den) / (2 * alpha.den)
    } else {
        alpha.num * q / alpha.den
    }
}

/// `⌊n^(1/3)⌋`.
pub fn icbrt(n: u64) -> u64 {
    let cube = |x: u64| (x as u128) * (x as u128) * (x as u128);
    let mut x = (n as f64).cbrt() as u64;
    while x > 0 && cube(x) > n as u128 {
        x -= 1;
    }
    while cube(x + 1) <= n as u128 {
        x += 1;
    }
    x
}

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1) // gcd(0, 0) treated as 1 so division is always safe
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rat(num: i128, den: i128) -> Rational {
        Rational::new(num, den).unwrap()
    }

    #[test]
    fn frac_part_examples() {
        assert_eq!(frac_part(7, 3).unwrap(), rat(1, 3));
        assert_eq!(frac_part(-7, 3).unwrap(), rat(2, 3));
        assert_eq!(frac_part(10, 5).unwrap(), rat(0, 1));
        assert_eq!(frac_part(10, 5).unwrap().den(), 1);
    }

    #[test]
    fn frac_part_rejects_bad_denominator() {
        assert!(frac_part(1, 0).is_err());
        assert!(frac_part(1, -3).is_err());
    }

    #[test]
    fn floor_scaled_examples() {
        // ⌊4/3 + 1/2⌋ = ⌊11/6⌋ = 1
        assert_eq!(floor_scaled(&rat(1, 3), 4, true), 1);
        assert_eq!(floor_scaled(&rat(0, 1), 100, true), 0);
        // exact multiple: ⌊(5/8)·8⌋ = 5
        assert_eq!(floor_scaled(&rat(5, 8), 8, false), 5);
    }

    #[test]
    fn frac_part_reconstructs_quotient() {
        // {a/b} + ⌊a/b⌋ == a/b exactly, for 10^5 random pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(0xEAC7);
        for _ in 0..100_000 {
            let a = rng.gen_range(-1_000_000_000_000i128..=1_000_000_000_000);
            let b = rng.gen_range(1i128..=1_000_000_000);
            let f = frac_part(a, b).unwrap();
            let floor = a.div_euclid(b);
            // (f.num + floor * f.den) / f.den == a / b  <=>  cross products equal
            assert_eq!((f.num() + floor * f.den()) * b, a * f.den());
            assert!(f.in_unit_interval());
        }
    }

    #[test]
    fn results_are_in_lowest_terms() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x10_57);
        for _ in 0..20_000 {
            let a = rng.gen_range(-1_000_000i128..=1_000_000);
            let b = rng.gen_range(1i128..=1_000_000);
            let f = frac_part(a, b).unwrap();
            assert_eq!(gcd_u128(f.num().unsigned_abs(), f.den() as u128), 1);
            assert!(f.den() > 0);
            let r = Rational::new(a, b).unwrap();
            assert_eq!(gcd_u128(r.num().unsigned_abs(), r.den() as u128), 1);
        }
    }

    #[test]
    fn floor_scaled_matches_bigint_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xF10C);
        for _ in 0..10_000 {
            let den = rng.gen_range(1i128..=1_000_000_000_000);
            let num = rng.gen_range(0..den);
            let q = rng.gen_range(1u64..=1_000_000_000);
            let alpha = rat(num, den);
            let half = rng.gen_bool(0.5);
            let got = floor_scaled(&alpha, q, half);
            let (bn, bd, bq) = (
                BigInt::from(alpha.num()),
                BigInt::from(alpha.den()),
                BigInt::from(q),
            );
            let expected = if half {
                (2 * &bn * &bq + &bd) / (2 * &bd)
            } else {
                &bn * &bq / &bd
            };
            assert_eq!(BigInt::from(got), expected, "α={alpha} q={q} half={half}");
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!("3".parse::<Rational>().unwrap(), rat(3, 1));
        assert_eq!("5/2".parse::<Rational>().unwrap(), rat(5, 2));
        assert_eq!("2.5".parse::<Rational>().unwrap(), rat(5, 2));
        assert_eq!("-0.25".parse::<Rational>().unwrap(), rat(-1, 4));
        assert_eq!("10/4".parse::<Rational>().unwrap(), rat(5, 2));
        assert!("".parse::<Rational>().is_err());
        assert!("a/b".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1.2.3".parse::<Rational>().is_err());
    }

    #[test]
    fn rational_ordering() {
        assert!(rat(5, 2) > rat(2, 1));
        assert!(rat(1, 3) < rat(1, 2));
        assert_eq!(rat(2, 4), rat(1, 2));
        assert!(rat(-1, 2) < rat(0, 1));
    }

    #[test]
    fn icbrt_values() {
        assert_eq!(icbrt(0), 0);
        assert_eq!(icbrt(1), 1);
        assert_eq!(icbrt(7), 1);
        assert_eq!(icbrt(8), 2);
        assert_eq!(icbrt(26), 2);
        assert_eq!(icbrt(27), 3);
        assert_eq!(icbrt(1_000_000_000_000), 10_000);
        assert_eq!(icbrt(u64::MAX), 2_642_245);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let n: u64 = rng.gen();
            let c = icbrt(n);
            let cube = |x: u64| (x as u128).pow(3);
            assert!(cube(c) <= n as u128 && cube(c + 1) > n as u128, "n={n}");
        }
    }

    #[test]
    fn floor_mul_u64_for_k_delta() {
        assert_eq!(rat(3, 1).floor_mul_u64(1000), Some(3000));
        assert_eq!(rat(5, 2).floor_mul_u64(1001), Some(2502));
        assert_eq!(rat(-1, 2).floor_mul_u64(10), None);
    }
}
