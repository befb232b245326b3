//! Exact scalars of the form `f(q)/g(q) * pi^k`.
//!
//! Every value is kept in canonical form: numerator and denominator are
//! coprime, the denominator is monic, and zero has the unique representation
//! `0/1 * pi^0`. Equality of canonical forms therefore decides equality of
//! the underlying quantities, which is what the identity checks in the other
//! modules rely on.
//!
//! Negative powers of `q` live in the denominator (`q^-3` is `1/q^3`), and a
//! scalar carries a single power of pi: sums of terms with different pi
//! exponents are rejected rather than approximated.

mod parse;
mod pi;
mod poly;

pub use parse::{default_variables, parse_expression};
pub use pi::{pi_interval, pi_power_interval, MAX_PI_DIGITS, MAX_PI_EXPONENT_ABS};
pub use poly::QPoly;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use thiserror::Error;

/// Default bound on numerator/denominator degrees; canonicalization refuses
/// to run a gcd past it.
pub const DEFAULT_DEGREE_CAP: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("division by zero scalar")]
    DivisionByZero,
    #[error("cannot add a pi^{left} term to a pi^{right} term")]
    MixedPiPowers { left: i64, right: i64 },
    #[error("polynomial degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("evaluation point is a pole of the denominator")]
    EvaluationPole,
    #[error("pi precision must be between 1 and 50000 decimal digits, got {digits}")]
    PiPrecision { digits: u32 },
    #[error("pi exponent {exponent} exceeds the evaluation cap 4096")]
    PiExponentCap { exponent: i64 },
    #[error("exponent {0} out of the supported range")]
    ExponentRange(i64),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Rational function of `q` times an integer power of pi, always canonical.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymbolicScalar {
    num: QPoly,
    den: QPoly,
    pi_exp: i64,
}

fn canonical_parts(
    num: QPoly,
    den: QPoly,
    pi_exp: i64,
    cap: usize,
) -> Result<(QPoly, QPoly, i64), SymError> {
    if den.is_zero() {
        return Err(SymError::DivisionByZero);
    }
    if num.is_zero() {
        return Ok((QPoly::zero(), QPoly::one(), 0));
    }
    for p in [&num, &den] {
        let degree = p.degree().unwrap_or(0);
        if degree > cap {
            return Err(SymError::DegreeCap { degree, cap });
        }
    }
    let g = num.gcd(&den);
    let (mut num, mut den) = if g.is_one() {
        (num, den)
    } else {
        (num.div_rem(&g).0, den.div_rem(&g).0)
    };
    let lc = den.leading_coeff().expect("nonzero denominator").clone();
    if !lc.is_one() {
        num = num.scale_div(&lc);
        den = den.scale_div(&lc);
    }
    Ok((num, den, pi_exp))
}

/// Puts a raw numerator/denominator/pi-exponent triple in canonical form.
pub fn canonicalize(num: QPoly, den: QPoly, pi_exp: i64) -> Result<SymbolicScalar, SymError> {
    canonicalize_with_cap(num, den, pi_exp, DEFAULT_DEGREE_CAP)
}

/// [`canonicalize`] with an explicit degree cap.
pub fn canonicalize_with_cap(
    num: QPoly,
    den: QPoly,
    pi_exp: i64,
    cap: usize,
) -> Result<SymbolicScalar, SymError> {
    let (num, den, pi_exp) = canonical_parts(num, den, pi_exp, cap)?;
    Ok(SymbolicScalar { num, den, pi_exp })
}

impl SymbolicScalar {
    pub fn new(num: QPoly, den: QPoly, pi_exp: i64) -> Result<Self, SymError> {
        canonicalize(num, den, pi_exp)
    }

    pub fn zero() -> Self {
        SymbolicScalar {
            num: QPoly::zero(),
            den: QPoly::one(),
            pi_exp: 0,
        }
    }

    pub fn one() -> Self {
        SymbolicScalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        SymbolicScalar {
            num: QPoly::from_int(n),
            den: QPoly::one(),
            pi_exp: 0,
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        if r.is_zero() {
            return SymbolicScalar::zero();
        }
        SymbolicScalar {
            num: QPoly::constant(r),
            den: QPoly::one(),
            pi_exp: 0,
        }
    }

    /// `n/d` as a constant scalar. Panics when `d == 0`.
    pub fn rational(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        SymbolicScalar::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// The formal variable `q`.
    pub fn q() -> Self {
        SymbolicScalar {
            num: QPoly::var(),
            den: QPoly::one(),
            pi_exp: 0,
        }
    }

    /// `q^k`; negative `k` puts the monomial in the denominator.
    pub fn q_pow(k: i64) -> Self {
        if k >= 0 {
            SymbolicScalar {
                num: QPoly::monomial(k as usize, BigRational::one()),
                den: QPoly::one(),
                pi_exp: 0,
            }
        } else {
            SymbolicScalar {
                num: QPoly::one(),
                den: QPoly::monomial((-k) as usize, BigRational::one()),
                pi_exp: 0,
            }
        }
    }

    /// `pi^k`.
    pub fn pi_pow(k: i64) -> Self {
        SymbolicScalar {
            num: QPoly::one(),
            den: QPoly::one(),
            pi_exp: k,
        }
    }

    pub fn numerator(&self) -> &QPoly {
        &self.num
    }

    pub fn denominator(&self) -> &QPoly {
        &self.den
    }

    pub fn pi_exponent(&self) -> i64 {
        self.pi_exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one() && self.pi_exp == 0
    }

    /// True when the value does not involve `q` or pi.
    pub fn is_rational_constant(&self) -> bool {
        self.den.is_one() && self.num.degree().unwrap_or(0) == 0 && self.pi_exp == 0
    }

    /// The value as a plain rational, when it is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.is_rational_constant() {
            return None;
        }
        Some(
            self.num
                .coeffs()
                .first()
                .cloned()
                .unwrap_or_else(BigRational::zero),
        )
    }

    /// True when the value does not involve `q` (pi powers allowed).
    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.degree().unwrap_or(0) == 0
    }

    /// Re-runs canonicalization on the held parts; a no-op on (always
    /// canonical) values, kept callable so idempotence is testable.
    pub fn canonicalized(self) -> Result<Self, SymError> {
        canonicalize(self.num, self.den, self.pi_exp)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, SymError> {
        self.add_with_cap(rhs, DEFAULT_DEGREE_CAP)
    }

    pub fn add_with_cap(&self, rhs: &Self, cap: usize) -> Result<Self, SymError> {
        if self.is_zero() {
            return Ok(rhs.clone());
        }
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        if self.pi_exp != rhs.pi_exp {
            return Err(SymError::MixedPiPowers {
                left: self.pi_exp,
                right: rhs.pi_exp,
            });
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        canonicalize_with_cap(num, den, self.pi_exp, cap)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, SymError> {
        self.try_add(&(-rhs))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, SymError> {
        self.mul_with_cap(rhs, DEFAULT_DEGREE_CAP)
    }

    pub fn mul_with_cap(&self, rhs: &Self, cap: usize) -> Result<Self, SymError> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(SymbolicScalar::zero());
        }
        let pi_exp = self
            .pi_exp
            .checked_add(rhs.pi_exp)
            .ok_or(SymError::ExponentRange(self.pi_exp))?;
        canonicalize_with_cap(&self.num * &rhs.num, &self.den * &rhs.den, pi_exp, cap)
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self, SymError> {
        self.try_mul(&rhs.inverse()?)
    }

    pub fn inverse(&self) -> Result<Self, SymError> {
        if self.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        let pi_exp = self
            .pi_exp
            .checked_neg()
            .ok_or(SymError::ExponentRange(self.pi_exp))?;
        // num and den are already coprime; only the monic normalization of
        // the new denominator is needed.
        let lc = self.num.leading_coeff().expect("nonzero").clone();
        Ok(SymbolicScalar {
            num: self.den.scale_div(&lc),
            den: self.num.scale_div(&lc),
            pi_exp,
        })
    }

    /// Integer power with the usual conventions (`x^0 = 1`, `0^k = 0` for
    /// `k > 0`); `0^k` errors for negative `k`.
    pub fn pow(&self, k: i64) -> Result<Self, SymError> {
        if k == 0 {
            return Ok(SymbolicScalar::one());
        }
        if self.is_zero() {
            return if k > 0 {
                Ok(SymbolicScalar::zero())
            } else {
                Err(SymError::DivisionByZero)
            };
        }
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let e: u64 = k.unsigned_abs();
        let e32 = u32::try_from(e).map_err(|_| SymError::ExponentRange(k))?;
        let max_deg = base
            .num
            .degree()
            .unwrap_or(0)
            .max(base.den.degree().unwrap_or(0));
        let target = max_deg.saturating_mul(e32 as usize);
        if target > DEFAULT_DEGREE_CAP {
            return Err(SymError::DegreeCap {
                degree: target,
                cap: DEFAULT_DEGREE_CAP,
            });
        }
        let pi_exp = base
            .pi_exp
            .checked_mul(e as i64)
            .ok_or(SymError::ExponentRange(k))?;
        // Coprimality and monicity survive powering, so no gcd is needed.
        Ok(SymbolicScalar {
            num: base.num.pow(e32),
            den: base.den.pow(e32),
            pi_exp,
        })
    }

    /// Evaluates at a rational `q`, enclosing the pi power in a rational
    /// interval of the requested decimal precision. The reported error bound
    /// covers the pi truncation only; the rational part is exact.
    pub fn evaluate_at(
        &self,
        q_value: &BigRational,
        pi_digits: u32,
    ) -> Result<NumericValue, SymError> {
        if pi_digits == 0 {
            return Err(SymError::PiPrecision { digits: pi_digits });
        }
        let den_val = self.den.eval(q_value);
        if den_val.is_zero() {
            return Err(SymError::EvaluationPole);
        }
        let rat = self.num.eval(q_value) / den_val;
        if self.pi_exp == 0 || rat.is_zero() {
            return Ok(NumericValue::exact(rat));
        }
        let (plo, phi) = pi_power_interval(self.pi_exp, pi_digits)?;
        let (lo, hi) = if rat.is_positive() {
            (&rat * &plo, &rat * &phi)
        } else {
            (&rat * &phi, &rat * &plo)
        };
        let two = BigRational::from_integer(BigInt::from(2));
        let mid = (&lo + &hi) / &two;
        let half = (&hi - &lo) / &two;
        Ok(NumericValue {
            value: mid,
            error_bound: rational_to_f64_upper(&half),
        })
    }

    /// `f64` value of a `q`-free scalar (30 pi digits), when it is one.
    pub fn constant_f64(&self) -> Option<f64> {
        if !self.is_constant() {
            return None;
        }
        self.evaluate_at(&BigRational::zero(), 30)
            .ok()
            .map(|n| n.to_f64())
    }
}

/// Rounds a nonnegative rational up into an `f64` that surely dominates it.
fn rational_to_f64_upper(x: &BigRational) -> f64 {
    debug_assert!(!x.is_negative());
    let f = x.to_f64().unwrap_or(f64::INFINITY);
    if !f.is_finite() {
        return f64::INFINITY;
    }
    (f.max(0.0) * (1.0 + 4.0 * f64::EPSILON)).next_up()
}

/// A numeric result: an exact rational center plus a certified absolute
/// error bound (`0.0` means the value is exact).
#[derive(Clone, Debug, PartialEq)]
pub struct NumericValue {
    pub value: BigRational,
    pub error_bound: f64,
}

impl NumericValue {
    pub fn exact(value: BigRational) -> Self {
        NumericValue {
            value,
            error_bound: 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let value = &self.value * &rhs.value;
        let a = self.value.to_f64().unwrap_or(f64::INFINITY).abs();
        let b = rhs.value.to_f64().unwrap_or(f64::INFINITY).abs();
        let err = a * rhs.error_bound
            + b * self.error_bound
            + self.error_bound * rhs.error_bound;
        NumericValue {
            value,
            error_bound: if err == 0.0 {
                0.0
            } else {
                (err * (1.0 + 8.0 * f64::EPSILON)).next_up()
            },
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        NumericValue {
            value: &self.value + &rhs.value,
            error_bound: self.error_bound + rhs.error_bound,
        }
    }

    /// True when the two enclosures intersect, i.e. the values are equal
    /// within the certified bounds.
    pub fn agrees_with(&self, rhs: &Self) -> bool {
        let gap = (&self.value - &rhs.value).abs();
        let budget = self.error_bound + rhs.error_bound;
        let budget_rat = BigRational::from_float((budget * (1.0 + 4.0 * f64::EPSILON)).next_up())
            .unwrap_or_else(BigRational::zero);
        gap <= budget_rat
    }

    /// Fixed-point decimal rendering with `digits` places, rounded to
    /// nearest (ties away from zero).
    pub fn decimal(&self, digits: usize) -> String {
        let neg = self.value.is_negative();
        let abs = self.value.abs();
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = &abs * BigRational::from_integer(scale.clone());
        // round half away from zero
        let twice = &scaled * BigRational::from_integer(BigInt::from(2))
            + BigRational::from_integer(BigInt::one());
        let n = twice.floor().to_integer() / BigInt::from(2);
        let (int_part, frac_part) = (&n / &scale, &n % &scale);
        let sign = if neg && (!int_part.is_zero() || !frac_part.is_zero()) {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!(
                "{sign}{int_part}.{frac:0>width$}",
                frac = frac_part.to_string(),
                width = digits
            )
        }
    }
}

impl Neg for &SymbolicScalar {
    type Output = SymbolicScalar;
    fn neg(self) -> SymbolicScalar {
        if self.is_zero() {
            return SymbolicScalar::zero();
        }
        SymbolicScalar {
            num: -&self.num,
            den: self.den.clone(),
            pi_exp: self.pi_exp,
        }
    }
}

impl Neg for SymbolicScalar {
    type Output = SymbolicScalar;
    fn neg(self) -> SymbolicScalar {
        -&self
    }
}

macro_rules! forward_scalar_binop {
    ($trait:ident, $method:ident, $try:ident, $what:literal) => {
        impl $trait for &SymbolicScalar {
            type Output = SymbolicScalar;
            fn $method(self, rhs: &SymbolicScalar) -> SymbolicScalar {
                self.$try(rhs)
                    .unwrap_or_else(|e| panic!("scalar {}: {e}", $what))
            }
        }
        impl $trait for SymbolicScalar {
            type Output = SymbolicScalar;
            fn $method(self, rhs: SymbolicScalar) -> SymbolicScalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&SymbolicScalar> for SymbolicScalar {
            type Output = SymbolicScalar;
            fn $method(self, rhs: &SymbolicScalar) -> SymbolicScalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_scalar_binop!(Add, add, try_add, "addition");
forward_scalar_binop!(Sub, sub, try_sub, "subtraction");
forward_scalar_binop!(Mul, mul, try_mul, "multiplication");
forward_scalar_binop!(Div, div, try_div, "division");

impl fmt::Display for SymbolicScalar {
    /// Canonical text form, parseable back by [`parse_expression`]:
    /// numerator and denominator in ascending powers, pi as a trailing
    /// `·pi^k` factor. Examples: `3/4`, `q + 1`... rendered `1 + q`,
    /// `(1)/(q^3)`, `(1/2)·pi^-2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let plain = self.den.is_one() && self.pi_exp == 0;
        if plain {
            return write!(f, "{}", self.num);
        }
        if self.num.is_one() && self.den.is_one() {
            return write!(f, "pi^{}", self.pi_exp);
        }
        write!(f, "({})", self.num)?;
        if !self.den.is_one() {
            write!(f, "/({})", self.den)?;
        }
        if self.pi_exp != 0 {
            write!(f, "\u{b7}pi^{}", self.pi_exp)?;
        }
        Ok(())
    }
}

impl FromStr for SymbolicScalar {
    type Err = SymError;
    fn from_str(s: &str) -> Result<Self, SymError> {
        parse_expression(s, &default_variables())
    }
}

impl Serialize for SymbolicScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SymbolicScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
