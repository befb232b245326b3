//! Discriminant norms and maximal-order unit volumes for a central simple
//! algebra over a non-archimedean local field.
//!
//! The algebra is described by residue cardinality `q`, the global shape
//! `(n, d)`, the local shape `(n_v, d_v)` with `n_v * d_v = n * d`, and the
//! norm of the local discriminant supplied as data. All formulas are
//! computed over [`SymbolicScalar`], so `q` may stay formal or be a concrete
//! prime power.

use crate::numutil::{perfect_sqrt, prime_power};
use crate::symexpr::{SymError, SymbolicScalar};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Residue cardinality cap via `n*d`; protects symbolic products, whose
/// polynomial degrees grow quadratically in `n*d`.
pub const MAX_TOTAL_RANK: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalError {
    #[error("shape invariant violated: n_v*d_v = {nv}*{dv} but n*d = {n}*{d}")]
    ShapeMismatch { n: u32, d: u32, nv: u32, dv: u32 },
    #[error("all shape parameters must be positive")]
    NonPositive,
    #[error("residue cardinality {q} is not a prime power >= 2")]
    NotPrimePower { q: u64 },
    #[error("local discriminant norm must be a positive integer")]
    BadDiscNorm,
    #[error("n*d = {nd} exceeds the supported bound {MAX_TOTAL_RANK}")]
    RankCap { nd: u64 },
    #[error("{op} needs a numeric residue cardinality here")]
    NeedsNumericQ { op: &'static str },
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// Residue field cardinality: a concrete prime power or the formal variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QValue {
    Num(u64),
    #[serde(with = "symbolic_tag")]
    Symbolic,
}

mod symbolic_tag {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("symbolic")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let tag = String::deserialize(d)?;
        if tag == "symbolic" {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!(
                "expected \"symbolic\", got {tag:?}"
            )))
        }
    }
}

/// Local description of `M(n_v, D_v)` sitting inside the global shape
/// `(n, d)`, together with the local discriminant norm `d(F_v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalAlgebraSpec {
    pub q: QValue,
    pub local_disc_norm: u64,
    pub n: u32,
    pub d: u32,
    pub n_v: u32,
    pub d_v: u32,
}

impl LocalAlgebraSpec {
    pub fn new(
        q: QValue,
        local_disc_norm: u64,
        n: u32,
        d: u32,
        n_v: u32,
        d_v: u32,
    ) -> Result<Self, LocalError> {
        let spec = LocalAlgebraSpec {
            q,
            local_disc_norm,
            n,
            d,
            n_v,
            d_v,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A split spec (`d_v = 1`) with the same `q`, disc norm and total rank.
    pub fn split_form(&self) -> LocalAlgebraSpec {
        LocalAlgebraSpec {
            q: self.q,
            local_disc_norm: self.local_disc_norm,
            n: self.n,
            d: self.d,
            n_v: self.n * self.d,
            d_v: 1,
        }
    }

    pub fn validate(&self) -> Result<(), LocalError> {
        if self.n == 0 || self.d == 0 || self.n_v == 0 || self.d_v == 0 {
            return Err(LocalError::NonPositive);
        }
        if self.local_disc_norm == 0 {
            return Err(LocalError::BadDiscNorm);
        }
        let nd = u64::from(self.n) * u64::from(self.d);
        if u64::from(self.n_v) * u64::from(self.d_v) != nd {
            return Err(LocalError::ShapeMismatch {
                n: self.n,
                d: self.d,
                nv: self.n_v,
                dv: self.d_v,
            });
        }
        debug_assert_eq!(nd % u64::from(self.d_v), 0);
        if nd > MAX_TOTAL_RANK {
            return Err(LocalError::RankCap { nd });
        }
        if let QValue::Num(q) = self.q {
            if q < 2 || prime_power(q).is_none() {
                return Err(LocalError::NotPrimePower { q });
            }
        }
        Ok(())
    }

    /// `q` as a scalar: the formal variable, or an exact constant.
    pub fn q_scalar(&self) -> SymbolicScalar {
        match self.q {
            QValue::Symbolic => SymbolicScalar::q(),
            QValue::Num(q) => SymbolicScalar::from_rational(BigRational::from_integer(
                BigInt::from(q),
            )),
        }
    }

    pub fn total_rank(&self) -> u32 {
        self.n * self.d
    }
}

/// Haar normalization a volume or degree is stated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Multiplicative,
    Tamagawa,
    MassOne,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Multiplicative => "multiplicative",
            Normalization::Tamagawa => "tamagawa",
            Normalization::MassOne => "mass_one",
        })
    }
}

/// A formal `sqrt(base)^exponent` factor (`exponent` odd); produced when a
/// Tamagawa volume needs a half-integer power of a non-square disc norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqrtFactor {
    pub base: u64,
    pub exponent: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeResult {
    pub value: SymbolicScalar,
    pub normalization: Normalization,
    /// Tagged irrational remainder; `None` whenever the volume is a rational
    /// function of `q`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub formal_sqrt: Option<SqrtFactor>,
}

/// `1 - q^e` as a scalar, for the running products below.
fn one_minus_q_pow(q: &SymbolicScalar, e: i64) -> Result<SymbolicScalar, SymError> {
    SymbolicScalar::one().try_sub(&q.pow(e)?)
}

/// Volume of the units of a maximal order under the multiplicative Haar
/// measure: `(1 - 1/q)^-1 * prod_{i=1}^{n_v} (1 - q^(-d_v i))`.
pub fn volume_max_compact_mult(spec: &LocalAlgebraSpec) -> Result<VolumeResult, LocalError> {
    spec.validate()?;
    let q = spec.q_scalar();
    let mut value = one_minus_q_pow(&q, -1)?.inverse()?;
    for i in 1..=i64::from(spec.n_v) {
        value = value.try_mul(&one_minus_q_pow(&q, -i64::from(spec.d_v) * i)?)?;
    }
    Ok(VolumeResult {
        value,
        normalization: Normalization::Multiplicative,
        formal_sqrt: None,
    })
}

/// `local_disc_norm^(n^2 d^2) * q^(d_v (d_v - 1) n_v^2)` as an exact integer.
pub fn disc_norm(spec: &LocalAlgebraSpec) -> Result<BigUint, LocalError> {
    spec.validate()?;
    let dim = u64::from(spec.n) * u64::from(spec.n) * u64::from(spec.d) * u64::from(spec.d);
    let q_exp = u64::from(spec.d_v) * u64::from(spec.d_v - 1) * u64::from(spec.n_v).pow(2);
    let disc_part = BigUint::from(spec.local_disc_norm).pow(dim as u32);
    if q_exp == 0 {
        return Ok(disc_part);
    }
    let q = match spec.q {
        QValue::Num(q) => q,
        QValue::Symbolic => return Err(LocalError::NeedsNumericQ { op: "disc_norm" }),
    };
    Ok(disc_part * BigUint::from(q).pow(q_exp as u32))
}

/// Exponent `d_v (d_v - 1) n_v^2 / 2`; integral because `d_v (d_v - 1)` is a
/// product of consecutive integers.
fn half_q_exponent(spec: &LocalAlgebraSpec) -> i64 {
    let dv = i64::from(spec.d_v);
    let nv = i64::from(spec.n_v);
    dv * (dv - 1) / 2 * nv * nv
}

/// Unit-group volume under the local Tamagawa measure:
/// `d(F_v)^(-n^2 d^2 / 2) * q^(-d_v (d_v-1) n_v^2 / 2) * volume_max_compact_mult`.
///
/// When `n*d` is odd and the disc norm is not a perfect square, the
/// half-integer disc power is returned as a tagged [`SqrtFactor`] instead of
/// being floated.
pub fn tamagawa_volume_max_compact(spec: &LocalAlgebraSpec) -> Result<VolumeResult, LocalError> {
    spec.validate()?;
    let mult = volume_max_compact_mult(spec)?;
    let q = spec.q_scalar();
    let mut value = mult.value.try_mul(&q.pow(-half_q_exponent(spec))?)?;
    let mut formal_sqrt = None;
    let dim = i64::from(spec.n) * i64::from(spec.n) * i64::from(spec.d) * i64::from(spec.d);
    if spec.local_disc_norm > 1 {
        let disc = BigUint::from(spec.local_disc_norm);
        if dim % 2 == 0 {
            let inv = BigRational::new(
                BigInt::one(),
                BigInt::from(disc.pow((dim / 2) as u32)),
            );
            value = value.try_mul(&SymbolicScalar::from_rational(inv))?;
        } else if let Some(root) = perfect_sqrt(spec.local_disc_norm) {
            let inv = BigRational::new(BigInt::one(), BigInt::from(BigUint::from(root).pow(dim as u32)));
            value = value.try_mul(&SymbolicScalar::from_rational(inv))?;
        } else {
            formal_sqrt = Some(SqrtFactor {
                base: spec.local_disc_norm,
                exponent: -dim,
            });
        }
    }
    Ok(VolumeResult {
        value,
        normalization: Normalization::Tamagawa,
        formal_sqrt,
    })
}

/// Closed form of `vol(GL(nd, O_v)) / vol(GL(n_v, O(D_v)))` under the local
/// Tamagawa measures:
/// `q^(d_v (d_v-1) n_v^2 / 2) * prod_{i=1, d_v !| i}^{nd} (1 - q^-i)`.
pub fn volume_quotient(spec: &LocalAlgebraSpec) -> Result<SymbolicScalar, LocalError> {
    spec.validate()?;
    let q = spec.q_scalar();
    let mut value = q.pow(half_q_exponent(spec))?;
    for i in 1..=i64::from(spec.total_rank()) {
        if i % i64::from(spec.d_v) != 0 {
            value = value.try_mul(&one_minus_q_pow(&q, -i)?)?;
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn spec(q: QValue, disc: u64, n: u32, d: u32, n_v: u32, d_v: u32) -> LocalAlgebraSpec {
        LocalAlgebraSpec::new(q, disc, n, d, n_v, d_v).unwrap()
    }

    fn rational(s: &SymbolicScalar) -> BigRational {
        s.as_rational().expect("constant scalar")
    }

    #[test]
    fn unit_group_of_base_field_has_volume_one() {
        let v = volume_max_compact_mult(&spec(QValue::Symbolic, 1, 1, 1, 1, 1)).unwrap();
        assert!(v.value.is_one());
    }

    #[test]
    fn mult_volume_frozen_values() {
        let v = volume_max_compact_mult(&spec(QValue::Num(2), 1, 1, 2, 2, 1)).unwrap();
        assert_eq!(rational(&v.value), BigRational::new(3.into(), 4.into()));
        let v = volume_max_compact_mult(&spec(QValue::Num(3), 1, 1, 2, 1, 2)).unwrap();
        assert_eq!(rational(&v.value), BigRational::new(4.into(), 3.into()));
        assert_eq!(v.normalization, Normalization::Multiplicative);
    }

    #[test]
    fn disc_norm_values() {
        // split: exponent of q is zero
        let s = spec(QValue::Symbolic, 4, 1, 2, 2, 1);
        assert_eq!(disc_norm(&s).unwrap(), BigUint::from(256u32));
        // unramified quaternion: 1^4 * p^2
        let s = spec(QValue::Num(5), 1, 1, 2, 1, 2);
        assert_eq!(disc_norm(&s).unwrap(), BigUint::from(25u32));
        // symbolic q with a positive q-exponent is refused
        let s = spec(QValue::Symbolic, 1, 1, 2, 1, 2);
        assert!(matches!(
            disc_norm(&s),
            Err(LocalError::NeedsNumericQ { .. })
        ));
    }

    #[test]
    fn tamagawa_quaternion_at_two() {
        let v = tamagawa_volume_max_compact(&spec(QValue::Num(2), 1, 1, 2, 1, 2)).unwrap();
        assert_eq!(rational(&v.value), BigRational::new(3.into(), 4.into()));
        assert_eq!(v.normalization, Normalization::Tamagawa);
        assert!(v.formal_sqrt.is_none());
    }

    #[test]
    fn tamagawa_split_gl2_symbolic() {
        let v = tamagawa_volume_max_compact(&spec(QValue::Symbolic, 1, 1, 2, 2, 1)).unwrap();
        let expected = SymbolicScalar::one() - SymbolicScalar::q_pow(-2);
        assert_eq!(v.value, expected);
    }

    #[test]
    fn formal_sqrt_flagged_for_odd_dimension() {
        // n*d = 1, disc norm 5: volume carries sqrt(5)^-1
        let v = tamagawa_volume_max_compact(&spec(QValue::Num(3), 5, 1, 1, 1, 1)).unwrap();
        assert_eq!(
            v.formal_sqrt,
            Some(SqrtFactor {
                base: 5,
                exponent: -1
            })
        );
        assert!(v.value.is_one());
        // but a perfect square stays rational
        let v = tamagawa_volume_max_compact(&spec(QValue::Num(3), 9, 1, 1, 1, 1)).unwrap();
        assert!(v.formal_sqrt.is_none());
        assert_eq!(rational(&v.value), BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn volume_quotient_frozen_values() {
        assert!(volume_quotient(&spec(QValue::Symbolic, 1, 2, 1, 2, 1))
            .unwrap()
            .is_one());
        let v = volume_quotient(&spec(QValue::Symbolic, 1, 1, 2, 1, 2)).unwrap();
        assert_eq!(v, SymbolicScalar::q() - SymbolicScalar::one());
        let v = volume_quotient(&spec(QValue::Symbolic, 1, 1, 3, 1, 3)).unwrap();
        let expected = SymbolicScalar::q_pow(3)
            * (SymbolicScalar::one() - SymbolicScalar::q_pow(-1))
            * (SymbolicScalar::one() - SymbolicScalar::q_pow(-2));
        assert_eq!(v, expected);
    }

    /// volume_quotient must be the literal quotient of the two Tamagawa
    /// volumes with a shared disc norm; exhaustive over d_v | nd, nd <= 12.
    #[test]
    fn quotient_matches_tamagawa_volumes() {
        for nd in 1u32..=12 {
            for d_v in 1..=nd {
                if nd % d_v != 0 {
                    continue;
                }
                let s = spec(QValue::Symbolic, 1, 1, nd, nd / d_v, d_v);
                let g_side = tamagawa_volume_max_compact(&s.split_form()).unwrap();
                let gp_side = tamagawa_volume_max_compact(&s).unwrap();
                // disc norm is 1 here, so no sqrt factors on either side
                assert!(g_side.formal_sqrt.is_none() && gp_side.formal_sqrt.is_none());
                let quotient = g_side.value.try_div(&gp_side.value).unwrap();
                assert_eq!(
                    quotient,
                    volume_quotient(&s).unwrap(),
                    "mismatch at nd={nd}, d_v={d_v}"
                );
            }
        }
    }

    /// Same cross-check with a nontrivial disc norm: the sqrt factors agree
    /// on both sides (same global dimension), so they cancel in the
    /// quotient and the rational parts must still match.
    #[test]
    fn quotient_ignores_disc_factor() {
        for (nd, d_v, disc) in [(2u32, 2u32, 7u64), (3, 3, 5), (6, 2, 12), (4, 2, 9)] {
            let s = spec(QValue::Num(3), disc, 1, nd, nd / d_v, d_v);
            let g_side = tamagawa_volume_max_compact(&s.split_form()).unwrap();
            let gp_side = tamagawa_volume_max_compact(&s).unwrap();
            assert_eq!(g_side.formal_sqrt, gp_side.formal_sqrt);
            let quotient = g_side.value.try_div(&gp_side.value).unwrap();
            let direct = volume_quotient(&s).unwrap();
            assert_eq!(
                rational(&quotient),
                rational(&direct),
                "mismatch at nd={nd}, d_v={d_v}, disc={disc}"
            );
        }
    }

    /// Volumes are strictly positive for any real q > 1; spot-check a grid
    /// of rational q values on symbolic results.
    #[test]
    fn volumes_positive_past_one() {
        use num_bigint::BigInt;
        for (num, den) in [(3i64, 2i64), (2, 1), (7, 2), (11, 1)] {
            let qv = BigRational::new(BigInt::from(num), BigInt::from(den));
            for d_v in [1u32, 2, 3, 6] {
                let s = spec(QValue::Symbolic, 1, 1, 6, 6 / d_v, d_v);
                for value in [
                    volume_max_compact_mult(&s).unwrap().value,
                    tamagawa_volume_max_compact(&s).unwrap().value,
                    volume_quotient(&s).unwrap(),
                ] {
                    let n = value.evaluate_at(&qv, 10).unwrap();
                    assert!(
                        n.value.to_f64().unwrap() > 0.0,
                        "nonpositive volume at q={qv}, d_v={d_v}"
                    );
                }
            }
        }
    }

    #[test]
    fn disc_norm_q_exponent_scales_by_nv_squared() {
        // relative part for one D_v factor: q^(d_v (d_v - 1))
        let unit = spec(QValue::Num(3), 1, 1, 2, 1, 2);
        let relative = disc_norm(&unit).unwrap();
        // full M(3, D_v) with the same d_v = 2: exponent scales by n_v^2 = 9
        let full = spec(QValue::Num(3), 2, 3, 2, 3, 2);
        let expected = BigUint::from(2u32).pow(36) * relative.pow(9);
        assert_eq!(disc_norm(&full).unwrap(), expected);
    }

    #[test]
    fn validation_rejects_bad_specs() {
        assert!(matches!(
            LocalAlgebraSpec::new(QValue::Num(6), 1, 1, 2, 1, 2),
            Err(LocalError::NotPrimePower { q: 6 })
        ));
        assert!(matches!(
            LocalAlgebraSpec::new(QValue::Num(2), 1, 1, 2, 2, 2),
            Err(LocalError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            LocalAlgebraSpec::new(QValue::Num(2), 0, 1, 1, 1, 1),
            Err(LocalError::BadDiscNorm)
        ));
        assert!(matches!(
            LocalAlgebraSpec::new(QValue::Num(2), 1, 0, 1, 1, 1),
            Err(LocalError::NonPositive)
        ));
    }

    #[test]
    fn spec_json_round_trip() {
        let s = spec(QValue::Symbolic, 1, 1, 2, 1, 2);
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"symbolic\""));
        let back: LocalAlgebraSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let numeric: LocalAlgebraSpec = serde_json::from_str(
            r#"{"q": 9, "local_disc_norm": 1, "n": 1, "d": 2, "n_v": 1, "d_v": 2}"#,
        )
        .unwrap();
        assert_eq!(numeric.q, QValue::Num(9));
    }
}
