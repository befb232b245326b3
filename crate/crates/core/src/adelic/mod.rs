//! Global assembly: restricted-product measures with certified truncation,
//! S-arithmetic covolume expressions, power-index bookkeeping, and the
//! covolume-equality verifier.
//!
//! Tamagawa numbers and parahoric volumes are inputs here, not computed;
//! the operations assemble and compare them exactly where possible and
//! with rigorous interval enclosures where an infinite Euler tail forces
//! numerics.

mod euler;

pub use euler::{primes_up_to, DEFAULT_PRIME_CAP, MAX_PRIME_CAP, MIN_PRIME_CAP};

use crate::jsonutil::{JsonBigUint, JsonRational};
use crate::symexpr::{NumericValue, SymError, SymbolicScalar};
use euler::{euler_product, interval_to_rational, Interval};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum AdelicError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("tail exponent {exponent} violates the q^-2 convergence bound; the product diverges")]
    Divergence { exponent: i64 },
    #[error(
        "tolerance {tolerance:e} not reached by prime cap {cap}; best value {} with bound {bound:e}",
        best.to_f64()
    )]
    Truncation {
        best: Box<NumericValue>,
        tolerance: f64,
        cap: u64,
        bound: f64,
    },
    #[error(transparent)]
    Sym(#[from] SymError),
}

// ---------------------------------------------------------------------------
// tail rules

/// Closed-form description of the factors an Euler tail contributes at each
/// residue cardinality q: products of `(1 - q^exponent)`, optionally
/// inverted. Exponents must be <= -2 so that |factor - 1| = O(q^-2).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TailRule {
    One,
    OneMinusQPow {
        exponent: i64,
        #[serde(default)]
        invert: bool,
    },
    ProductOneMinusQPow {
        exponents: Vec<i64>,
        #[serde(default)]
        invert: bool,
    },
}

/// Exponent magnitudes past this are pointless and risk powi edge cases.
pub const MAX_TAIL_EXPONENT_ABS: i64 = 64;

impl TailRule {
    pub fn exponents(&self) -> &[i64] {
        match self {
            TailRule::One => &[],
            TailRule::OneMinusQPow { exponent, .. } => std::slice::from_ref(exponent),
            TailRule::ProductOneMinusQPow { exponents, .. } => exponents,
        }
    }

    pub fn inverted(&self) -> bool {
        match self {
            TailRule::One => false,
            TailRule::OneMinusQPow { invert, .. }
            | TailRule::ProductOneMinusQPow { invert, .. } => *invert,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents().is_empty()
    }

    pub fn validate(&self) -> Result<(), AdelicError> {
        for &e in self.exponents() {
            if e > -2 {
                return Err(AdelicError::Divergence { exponent: e });
            }
            if e < -MAX_TAIL_EXPONENT_ABS {
                return Err(AdelicError::InvalidInput(format!(
                    "tail exponent {e} below the -{MAX_TAIL_EXPONENT_ABS} floor"
                )));
            }
        }
        Ok(())
    }

    /// Exact factor at a single residue cardinality.
    pub fn factor_rational(&self, q: u64) -> Result<BigRational, AdelicError> {
        if q < 2 {
            return Err(AdelicError::InvalidInput(format!(
                "residue cardinality {q} must be >= 2"
            )));
        }
        self.validate()?;
        let mut acc = BigRational::one();
        for &e in self.exponents() {
            let qe = BigRational::new(
                BigInt::one(),
                BigInt::from(q).pow(e.unsigned_abs() as u32),
            );
            acc *= BigRational::one() - qe;
        }
        if self.inverted() {
            if acc.is_zero() {
                return Err(AdelicError::InvalidInput(
                    "tail factor vanishes; cannot invert".to_owned(),
                ));
            }
            acc = acc.recip();
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// restricted products

/// A restricted-product measure problem: finitely many explicit factors
/// indexed by place labels, a closed-form tail over all remaining primes,
/// and a target absolute tolerance for the reported value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictedProductSpec {
    #[serde(rename = "S_factors", default)]
    pub s_factors: BTreeMap<String, JsonRational>,
    pub tail_factors: TailRule,
    pub tolerance: f64,
    /// Primes whose tail factor is already accounted for in `S_factors`.
    #[serde(default)]
    pub tail_exclude: Vec<u64>,
}

pub fn restricted_product_measure(
    spec: &RestrictedProductSpec,
) -> Result<NumericValue, AdelicError> {
    restricted_product_measure_capped(spec, DEFAULT_PRIME_CAP)
}

pub fn restricted_product_measure_capped(
    spec: &RestrictedProductSpec,
    prime_cap: u64,
) -> Result<NumericValue, AdelicError> {
    spec.tail_factors.validate()?;
    if !spec.tolerance.is_finite() || spec.tolerance <= 0.0 {
        return Err(AdelicError::InvalidInput(
            "tolerance must be a positive finite number".to_owned(),
        ));
    }
    let mut s_part = BigRational::one();
    for (label, value) in &spec.s_factors {
        if value.0.is_negative() {
            return Err(AdelicError::InvalidInput(format!(
                "factor at place {label} is negative"
            )));
        }
        s_part *= &value.0;
    }
    if s_part.is_zero() {
        return Ok(NumericValue::exact(BigRational::zero()));
    }
    if spec.tail_factors.is_trivial() {
        return Ok(NumericValue::exact(s_part));
    }

    let s_abs = s_part.to_f64().unwrap_or(f64::INFINITY).abs();
    let tail_tolerance = spec.tolerance / (s_abs * (1.0 + 1e-9));
    let out = euler_product(
        &spec.tail_factors,
        &spec.tail_exclude,
        tail_tolerance,
        prime_cap,
    )?;
    let total = Interval::from_rational(&s_part).mul(out.value);
    let best = NumericValue {
        value: interval_to_rational(total),
        error_bound: total.half_width(),
    };
    if !out.converged || best.error_bound > spec.tolerance {
        return Err(AdelicError::Truncation {
            bound: best.error_bound,
            best: Box::new(best),
            tolerance: spec.tolerance,
            cap: prime_cap,
        });
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// covolume expressions

/// `base^(half_exponent/2)`; exact whenever the exponent is even or the
/// base is a perfect square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscFactor {
    pub base: u64,
    pub half_exponent: i64,
}

impl DiscFactor {
    pub fn validate(&self) -> Result<(), AdelicError> {
        if self.base == 0 {
            return Err(AdelicError::InvalidInput(
                "discriminant base must be positive".to_owned(),
            ));
        }
        if self.half_exponent.unsigned_abs() > 512 {
            return Err(AdelicError::InvalidInput(
                "discriminant exponent out of range".to_owned(),
            ));
        }
        Ok(())
    }

    fn rational_power(base: &BigRational, e: i64) -> BigRational {
        let p = base.pow(e.unsigned_abs() as i32);
        if e < 0 {
            p.recip()
        } else {
            p
        }
    }

    /// The square of the factor: `base^half_exponent`, always exact.
    pub fn value_squared(&self) -> BigRational {
        Self::rational_power(
            &BigRational::from_integer(BigInt::from(self.base)),
            self.half_exponent,
        )
    }

    /// Exact value when one exists.
    pub fn exact_value(&self) -> Option<BigRational> {
        let b = BigRational::from_integer(BigInt::from(self.base));
        if self.half_exponent % 2 == 0 {
            return Some(Self::rational_power(&b, self.half_exponent / 2));
        }
        let root = crate::numutil::perfect_sqrt(self.base)?;
        Some(Self::rational_power(
            &BigRational::from_integer(BigInt::from(root)),
            self.half_exponent,
        ))
    }

    /// Rigorous enclosure, used when no exact value exists.
    fn interval(&self) -> Interval {
        if let Some(v) = self.exact_value() {
            return Interval::from_rational(&v);
        }
        // sqrt(base) via integer sqrt at 34 guard digits
        let scale = BigUint::from(10u32).pow(17);
        let scaled = BigUint::from(self.base) * &scale * &scale;
        let root = scaled.sqrt();
        let lo = BigRational::new(BigInt::from(root.clone()), BigInt::from(scale.clone()));
        let hi = BigRational::new(
            BigInt::from(root + BigUint::one()),
            BigInt::from(scale),
        );
        let (lo, hi) = (
            Self::rational_power(&lo, self.half_exponent),
            Self::rational_power(&hi, self.half_exponent),
        );
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        Interval {
            lo: Interval::from_rational(&lo).lo,
            hi: Interval::from_rational(&hi).hi,
        }
    }
}

/// Tail rule plus the truncation data needed to evaluate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSpec {
    #[serde(flatten)]
    pub rule: TailRule,
    pub tolerance: f64,
    /// Primes handled explicitly in `finite_factors` (or inside S).
    #[serde(default)]
    pub exclude: Vec<u64>,
}

/// The covolume display `disc * tau * prod(finite factors)^-1 * (tail)^-1`:
/// local volumes enter as stated and the assembly inverts them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovolumeExpr {
    pub disc_factor: DiscFactor,
    pub tamagawa_number: JsonRational,
    #[serde(default)]
    pub finite_factors: BTreeMap<String, SymbolicScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_spec: Option<TailSpec>,
}

/// Default certification target when an expression carries no tail spec but
/// still needs numerics (irrational discriminant factor).
pub const DEFAULT_COVOLUME_TOLERANCE: f64 = 1e-12;

impl CovolumeExpr {
    pub fn validate(&self) -> Result<(), AdelicError> {
        self.disc_factor.validate()?;
        if !self.tamagawa_number.0.is_positive() {
            return Err(AdelicError::InvalidInput(
                "tamagawa number must be positive".to_owned(),
            ));
        }
        for (label, factor) in &self.finite_factors {
            if factor.is_zero() {
                return Err(AdelicError::InvalidInput(format!(
                    "finite factor at place {label} is zero"
                )));
            }
            if let Some(r) = factor.as_rational() {
                if !r.is_positive() {
                    return Err(AdelicError::InvalidInput(format!(
                        "finite factor at place {label} is not positive"
                    )));
                }
            }
        }
        if let Some(tail) = &self.tail_spec {
            tail.rule.validate()?;
            if !tail.tolerance.is_finite() || tail.tolerance <= 0.0 {
                return Err(AdelicError::InvalidInput(
                    "tail tolerance must be a positive finite number".to_owned(),
                ));
            }
        }
        Ok(())
    }

    fn has_active_tail(&self) -> bool {
        self.tail_spec
            .as_ref()
            .is_some_and(|t| !t.rule.is_trivial())
    }

    /// Tail rule and exclude list with `None` and trivial rules unified,
    /// for structural comparison.
    fn effective_tail(&self) -> Option<(&TailRule, Vec<u64>)> {
        let tail = self.tail_spec.as_ref()?;
        if tail.rule.is_trivial() {
            return None;
        }
        let mut excl = tail.exclude.clone();
        excl.sort_unstable();
        excl.dedup();
        Some((&tail.rule, excl))
    }
}

/// Result of [`covolume_S_arithmetic`]: exact and symbolic whenever the
/// expression is finite, a certified numeric enclosure otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum CovolumeValue {
    Symbolic(SymbolicScalar),
    Numeric(NumericValue),
}

impl CovolumeValue {
    pub fn as_symbolic(&self) -> Option<&SymbolicScalar> {
        match self {
            CovolumeValue::Symbolic(s) => Some(s),
            CovolumeValue::Numeric(_) => None,
        }
    }

    pub fn as_numeric(&self) -> Option<&NumericValue> {
        match self {
            CovolumeValue::Symbolic(_) => None,
            CovolumeValue::Numeric(n) => Some(n),
        }
    }
}

pub fn covolume_s_arithmetic(expr: &CovolumeExpr) -> Result<CovolumeValue, AdelicError> {
    covolume_s_arithmetic_capped(expr, DEFAULT_PRIME_CAP)
}

pub fn covolume_s_arithmetic_capped(
    expr: &CovolumeExpr,
    prime_cap: u64,
) -> Result<CovolumeValue, AdelicError> {
    expr.validate()?;
    let disc_exact = expr.disc_factor.exact_value();

    if !expr.has_active_tail() {
        if let Some(disc) = disc_exact {
            let mut value =
                SymbolicScalar::from_rational(disc * &expr.tamagawa_number.0);
            for factor in expr.finite_factors.values() {
                value = value.try_div(factor)?;
            }
            return Ok(CovolumeValue::Symbolic(value));
        }
    }

    // numeric path: rational prefactor times disc enclosure over the tail
    let mut prefactor = expr.tamagawa_number.0.clone();
    for (label, factor) in &expr.finite_factors {
        let r = factor.as_rational().ok_or_else(|| {
            AdelicError::InvalidInput(format!(
                "finite factor at place {label} must be a rational constant \
                 when the expression needs numeric assembly"
            ))
        })?;
        prefactor /= r;
    }
    let tolerance = expr
        .tail_spec
        .as_ref()
        .map_or(DEFAULT_COVOLUME_TOLERANCE, |t| t.tolerance);
    let scale = Interval::from_rational(&prefactor).mul(expr.disc_factor.interval());

    let tail_interval = if expr.has_active_tail() {
        let tail = expr.tail_spec.as_ref().unwrap();
        // coarse pass to size the product, fine pass to the scaled target
        let coarse = euler_product(&tail.rule, &tail.exclude, 1e-3, prime_cap)?;
        let inv_sq = coarse.value.mul(coarse.value).lo.max(1e-6);
        let scale_abs = scale.lo.abs().max(scale.hi.abs()).max(f64::MIN_POSITIVE);
        let target = tolerance * inv_sq / (scale_abs * 1.05);
        let out = euler_product(&tail.rule, &tail.exclude, target, prime_cap)?;
        out.value.recip()?
    } else {
        Interval::point(1.0)
    };

    let total = scale.mul(tail_interval);
    let best = NumericValue {
        value: interval_to_rational(total),
        error_bound: total.half_width(),
    };
    if best.error_bound > tolerance {
        return Err(AdelicError::Truncation {
            bound: best.error_bound,
            best: Box::new(best),
            tolerance,
            cap: prime_cap,
        });
    }
    Ok(CovolumeValue::Numeric(best))
}

// ---------------------------------------------------------------------------
// power indices

/// `[A : A^n]` for `A = Z^rank + sum_j Z/w_j`: `n^rank * prod gcd(n, w_j)`.
pub fn abelian_power_index(
    rank: u32,
    torsion_orders: &[u64],
    n: u64,
) -> Result<BigUint, AdelicError> {
    if n == 0 {
        return Err(AdelicError::InvalidInput("n must be >= 1".to_owned()));
    }
    if torsion_orders.contains(&0) {
        return Err(AdelicError::InvalidInput(
            "torsion orders must be positive".to_owned(),
        ));
    }
    let mut index = BigUint::from(n).pow(rank);
    for &w in torsion_orders {
        index *= BigUint::from(num_integer::gcd(n, w));
    }
    Ok(index)
}

/// Local datum for the multiplicative-group power index at one place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlaceKind {
    Real,
    Complex,
    Padic {
        q: u64,
        residue_char: u64,
        /// #mu_n(F_v), supplied by the caller.
        mu_n_order: u64,
        /// normalized |n|_v^{-1}, supplied by the caller.
        val_n: u64,
    },
}

/// `[F_v^x : (F_v^x)^n]`: 2 or 1 at a real place by parity, 1 at a complex
/// place, and `n * #mu_n(F_v) * |n|_v^{-1}` at a finite place.
pub fn local_power_index(kind: &PlaceKind, n: u64) -> Result<u64, AdelicError> {
    if n == 0 {
        return Err(AdelicError::InvalidInput("n must be >= 1".to_owned()));
    }
    match *kind {
        PlaceKind::Real => Ok(if n.is_multiple_of(2) { 2 } else { 1 }),
        PlaceKind::Complex => Ok(1),
        PlaceKind::Padic {
            q,
            residue_char,
            mu_n_order,
            val_n,
        } => {
            match crate::numutil::prime_power(q) {
                Some((p, _)) if p == residue_char => {}
                _ => {
                    return Err(AdelicError::InvalidInput(format!(
                        "{q} is not a power of the residue characteristic {residue_char}"
                    )))
                }
            }
            if mu_n_order == 0 || !n.is_multiple_of(mu_n_order) {
                return Err(AdelicError::InvalidInput(format!(
                    "mu_n order {mu_n_order} does not divide n = {n}"
                )));
            }
            if !is_power_of(val_n, q) {
                return Err(AdelicError::InvalidInput(format!(
                    "|n|_v^-1 = {val_n} is not a power of q = {q}"
                )));
            }
            n.checked_mul(mu_n_order)
                .and_then(|x| x.checked_mul(val_n))
                .ok_or_else(|| {
                    AdelicError::InvalidInput("power index overflows".to_owned())
                })
        }
    }
}

fn is_power_of(mut x: u64, base: u64) -> bool {
    if x == 1 {
        return true;
    }
    if base < 2 {
        return false;
    }
    while x.is_multiple_of(base) {
        x /= base;
    }
    x == 1
}

// ---------------------------------------------------------------------------
// global setups

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Signature {
    pub r1: u32,
    pub r2: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinitePlace {
    pub label: String,
    pub q: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_disc_norm: Option<u64>,
}

/// Ramification locus: labels of finite places plus indices of ramified
/// real embeddings (complex places never ramify in scope).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamSet {
    #[serde(default)]
    pub finite: Vec<String>,
    #[serde(default)]
    pub arch_real: Vec<u32>,
}

/// Number-field-level data for one verification run. `S` always contains
/// every archimedean place; `S_finite` lists the finite members by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalSetup {
    pub abs_discriminant: u64,
    pub signature: Signature,
    pub torsion_order: u64,
    #[serde(default)]
    pub places: Vec<FinitePlace>,
    #[serde(default)]
    pub ram_set: RamSet,
    #[serde(rename = "S_finite", default)]
    pub s_finite: Vec<String>,
}

impl GlobalSetup {
    pub fn validate(&self) -> Result<(), AdelicError> {
        if self.abs_discriminant == 0 {
            return Err(AdelicError::InvalidInput(
                "absolute discriminant must be positive".to_owned(),
            ));
        }
        if self.torsion_order == 0 {
            return Err(AdelicError::InvalidInput(
                "torsion order must be positive".to_owned(),
            ));
        }
        let mut labels = std::collections::BTreeSet::new();
        for place in &self.places {
            if place.q < 2 || crate::numutil::prime_power(place.q).is_none() {
                return Err(AdelicError::InvalidInput(format!(
                    "place {} has residue cardinality {} which is not a prime power",
                    place.label, place.q
                )));
            }
            if !labels.insert(place.label.as_str()) {
                return Err(AdelicError::InvalidInput(format!(
                    "duplicate place label {}",
                    place.label
                )));
            }
        }
        for label in self.ram_set.finite.iter().chain(&self.s_finite) {
            if !labels.contains(label.as_str()) {
                return Err(AdelicError::InvalidInput(format!(
                    "unknown place label {label}"
                )));
            }
        }
        for &idx in &self.ram_set.arch_real {
            if idx >= self.signature.r1 {
                return Err(AdelicError::InvalidInput(format!(
                    "ramified real place index {idx} exceeds r1 = {}",
                    self.signature.r1
                )));
            }
        }
        Ok(())
    }

    pub fn place(&self, label: &str) -> Option<&FinitePlace> {
        self.places.iter().find(|p| p.label == label)
    }

    /// Archimedean places are always in S, so only finite ramification can
    /// escape it.
    pub fn ram_subset_of_s(&self) -> bool {
        self.ram_set
            .finite
            .iter()
            .all(|label| self.s_finite.contains(label))
    }
}

// ---------------------------------------------------------------------------
// covolume equality

/// The common prefactor of the covolume comparison:
/// `fs_index / os_index * mu_index^-1`, all three supplied as positive
/// integers computed from the power-index operations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexData {
    pub fs_index: JsonBigUint,
    pub os_index: JsonBigUint,
    pub mu_index: JsonBigUint,
}

impl IndexData {
    pub fn validate(&self) -> Result<(), AdelicError> {
        for (name, v) in [
            ("fs_index", &self.fs_index),
            ("os_index", &self.os_index),
            ("mu_index", &self.mu_index),
        ] {
            if v.0.is_zero() {
                return Err(AdelicError::InvalidInput(format!(
                    "index datum {name} must be a positive integer"
                )));
            }
        }
        Ok(())
    }

    /// Cross-multiplied comparison avoiding rationals.
    fn same_prefactor(&self, other: &IndexData) -> bool {
        &self.fs_index.0 * &other.os_index.0 * &other.mu_index.0
            == &other.fs_index.0 * &self.os_index.0 * &self.mu_index.0
    }
}

/// One side of a covolume comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexedCovolume {
    pub expr: CovolumeExpr,
    pub index: IndexData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Equal,
    NotEqual { witness: String },
    Inconclusive { reason: String },
}

/// Decides whether two indexed covolume expressions agree, by cancelling
/// the index prefactors and matching the remaining exact data. When a
/// ramified place lies outside S the underlying comparison theorem does not
/// apply, and any structural difference is reported as inconclusive rather
/// than judged.
pub fn covolume_equality_check(
    left: &IndexedCovolume,
    right: &IndexedCovolume,
    setup: &GlobalSetup,
) -> Result<Verdict, AdelicError> {
    setup.validate()?;
    left.index.validate()?;
    right.index.validate()?;
    left.expr.validate()?;
    right.expr.validate()?;

    if left == right {
        return Ok(Verdict::Equal);
    }
    if !setup.ram_subset_of_s() {
        return Ok(Verdict::Inconclusive {
            reason: "ram \u{2284} S".to_owned(),
        });
    }
    if !left.index.same_prefactor(&right.index) {
        return Ok(Verdict::NotEqual {
            witness: "index_prefactor".to_owned(),
        });
    }
    if left.expr.disc_factor.value_squared() != right.expr.disc_factor.value_squared() {
        return Ok(Verdict::NotEqual {
            witness: "disc_factor".to_owned(),
        });
    }
    if left.expr.tamagawa_number != right.expr.tamagawa_number {
        return Ok(Verdict::NotEqual {
            witness: "tamagawa_number".to_owned(),
        });
    }
    if left.expr.effective_tail() != right.expr.effective_tail() {
        return Ok(Verdict::NotEqual {
            witness: "tail".to_owned(),
        });
    }

    let product = |expr: &CovolumeExpr| -> Result<SymbolicScalar, AdelicError> {
        let mut acc = SymbolicScalar::one();
        for factor in expr.finite_factors.values() {
            acc = acc.try_mul(factor)?;
        }
        Ok(acc)
    };
    if product(&left.expr)? != product(&right.expr)? {
        // name the first differing place when the place sets line up
        let witness = left
            .expr
            .finite_factors
            .keys()
            .chain(right.expr.finite_factors.keys())
            .find(|label| {
                left.expr.finite_factors.get(*label) != right.expr.finite_factors.get(*label)
            })
            .cloned()
            .unwrap_or_else(|| "finite_factors".to_owned());
        return Ok(Verdict::NotEqual { witness });
    }
    Ok(Verdict::Equal)
}
