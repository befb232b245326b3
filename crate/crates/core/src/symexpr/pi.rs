//! Arbitrary-precision rational enclosures of pi and its integer powers.
//!
//! Machin's formula `pi = 16 atan(1/5) - 4 atan(1/239)` evaluated in
//! fixed-point integer arithmetic. Every floor division is charged to an
//! explicit error budget, so the returned interval is a proved enclosure,
//! not a best-effort approximation.

use super::SymError;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Hard cap on requested decimal digits; guards against runaway inputs.
pub const MAX_PI_DIGITS: u32 = 50_000;

/// Extra scale digits absorbing floor-division drift.
const GUARD_DIGITS: u32 = 12;

/// `scale * atan(1/x)` with a bound on the error in scale units.
///
/// Alternating series; `power` carries `scale / x^(2j+1)` with cumulative
/// floor drift of at most 2 units, each term division adds at most 1, and
/// the truncated tail is at most the first omitted term.
fn atan_inv_scaled(x: u64, scale: &BigInt) -> (BigInt, BigInt) {
    let xx = BigInt::from(x) * BigInt::from(x);
    let mut power = scale / BigInt::from(x);
    let mut sum = power.clone();
    let mut terms: u64 = 1;
    let mut j: u64 = 1;
    while !power.is_zero() {
        power /= &xx;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * j + 1);
        if j % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        terms += 1;
        j += 1;
    }
    // 3 units per emitted term plus the alternating-series tail.
    let err = BigInt::from(3 * terms) + power + BigInt::from(4);
    (sum, err)
}

/// Returns `(lo, hi)` with `lo <= pi <= hi` and `hi - lo <= 10^-digits`.
pub fn pi_interval(digits: u32) -> Result<(BigRational, BigRational), SymError> {
    if digits == 0 || digits > MAX_PI_DIGITS {
        return Err(SymError::PiPrecision { digits });
    }
    let scale = BigInt::from(10u32).pow(digits + GUARD_DIGITS);
    let (a5, e5) = atan_inv_scaled(5, &scale);
    let (a239, e239) = atan_inv_scaled(239, &scale);
    let center = BigInt::from(16) * a5 - BigInt::from(4) * a239;
    let err = BigInt::from(16) * e5 + BigInt::from(4) * e239;
    let lo = BigRational::new(&center - &err, scale.clone());
    let hi = BigRational::new(center + err, scale);
    debug_assert!(&hi - &lo <= BigRational::new(BigInt::one(), BigInt::from(10u32).pow(digits)));
    Ok((lo, hi))
}

/// Hard cap on `|exponent|` in [`pi_power_interval`].
pub const MAX_PI_EXPONENT_ABS: i64 = 4_096;

fn rat_pow(base: &BigRational, mut e: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

/// Enclosure of `pi^exponent` with endpoint gap at most `10^-digits` after
/// accounting for the power's widening of the base interval.
pub fn pi_power_interval(
    exponent: i64,
    digits: u32,
) -> Result<(BigRational, BigRational), SymError> {
    if exponent == 0 {
        return Ok((BigRational::one(), BigRational::one()));
    }
    if exponent.unsigned_abs() > MAX_PI_EXPONENT_ABS as u64 {
        return Err(SymError::PiExponentCap { exponent });
    }
    // Widening: |d(pi^k)| ~ |k| pi^(|k|-1) * width, and pi^k < 10^(k/2), so
    // |k| + 8 extra digits dominate the loss for either sign of k.
    let guard = exponent.unsigned_abs() as u32 + 8;
    let digits = digits
        .checked_add(guard)
        .filter(|d| *d <= MAX_PI_DIGITS)
        .ok_or(SymError::PiPrecision { digits })?;
    let (lo, hi) = pi_interval(digits)?;
    let k = exponent.unsigned_abs();
    let (plo, phi) = (rat_pow(&lo, k), rat_pow(&hi, k));
    debug_assert!(plo.is_positive());
    if exponent > 0 {
        Ok((plo, phi))
    } else {
        Ok((phi.recip(), plo.recip()))
    }
}
