//! Formal degrees and Plancherel-density bookkeeping.
//!
//! Non-archimedean side: Steinberg formal degrees for `GL(m, D)` and the
//! telescoping density-ratio identity, assembled factor by factor so that
//! canonicalization decides it. Archimedean side: the explicit `GL(2,R)` /
//! quaternionic formal degrees, the real Jacquet-Langlands parameter map on
//! tempered parameters, and the p-adic transfer criterion.

use crate::localgeom::{volume_quotient, LocalAlgebraSpec, LocalError, Normalization};
use crate::symexpr::{SymError, SymbolicScalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlancherelError {
    #[error("group shape parameters must be positive")]
    InvalidShape,
    #[error("parameter is not square-integrable: expected a single discrete-series block")]
    NotSquareIntegrable,
    #[error("no discrete series at weight {0}; weights start at 2")]
    NoDiscreteSeries(u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// Constant convention used in [`steinberg_degree`]; recorded in the result
/// so downstream consumers see which normalization of the leading constant
/// was adopted.
pub const STEINBERG_CONSTANT_CONVENTION: &str = "1/(m*e)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinbergDegree {
    pub value: SymbolicScalar,
    /// `(m, e)`: the group `GL(m, D)` with `D` of index `e`.
    pub group_shape: (u32, u32),
    pub normalization: Normalization,
    pub constant_convention: String,
}

/// `(1/(m*e)) * prod_{i=1}^{m-1} (q^(e*i) - 1)` under the mass-one
/// normalization of the maximal compact subgroup.
pub fn steinberg_degree(
    m: u32,
    e: u32,
    q: &SymbolicScalar,
) -> Result<SteinbergDegree, PlancherelError> {
    if m == 0 || e == 0 {
        return Err(PlancherelError::InvalidShape);
    }
    let constant = BigRational::new(BigInt::from(1), BigInt::from(u64::from(m) * u64::from(e)));
    let value = steinberg_product(m, e, q, &constant)?;
    Ok(SteinbergDegree {
        value,
        group_shape: (m, e),
        normalization: Normalization::MassOne,
        constant_convention: STEINBERG_CONSTANT_CONVENTION.to_owned(),
    })
}

/// `constant * prod_{i=1}^{m-1} (q^(e*i) - 1)`; the constant is a parameter
/// so the ratio identity can be checked under every candidate convention.
fn steinberg_product(
    m: u32,
    e: u32,
    q: &SymbolicScalar,
    constant: &BigRational,
) -> Result<SymbolicScalar, PlancherelError> {
    if m == 0 || e == 0 {
        return Err(PlancherelError::InvalidShape);
    }
    let mut value = SymbolicScalar::from_rational(constant.clone());
    for i in 1..i64::from(m) {
        let factor = q.pow(i64::from(e) * i)?.try_sub(&SymbolicScalar::one())?;
        value = value.try_mul(&factor)?;
    }
    Ok(value)
}

/// Quotient of the two Plancherel densities at the Steinberg point, under
/// the local Tamagawa normalizations, assembled as the telescoping product
///
/// `prod_{i=1, d_v !| i}^{nd} (q^i - 1)^-1
///  * prod_{i=1, d_v !| i}^{nd} (1 - q^-i) * q^(d_v (d_v-1) n_v^2 / 2)`
///
/// (Steinberg-degree quotient times compact-volume quotient). The canonical
/// form is the identity's content: it must come out as `1`.
pub fn plancherel_ratio(spec: &LocalAlgebraSpec) -> Result<SymbolicScalar, PlancherelError> {
    spec.validate()?;
    let q = spec.q_scalar();
    let mut degree_quotient = SymbolicScalar::one();
    for i in 1..=i64::from(spec.total_rank()) {
        if i % i64::from(spec.d_v) != 0 {
            degree_quotient =
                degree_quotient.try_mul(&q.pow(i)?.try_sub(&SymbolicScalar::one())?)?;
        }
    }
    Ok(volume_quotient(spec)?.try_div(&degree_quotient)?)
}

/// [`plancherel_ratio`] reassembled from two [`steinberg_product`] calls
/// sharing one leading `constant`; the identity must not depend on which
/// convention that constant follows.
pub fn plancherel_ratio_with_steinberg_constant(
    spec: &LocalAlgebraSpec,
    constant: &BigRational,
) -> Result<SymbolicScalar, PlancherelError> {
    spec.validate()?;
    let q = spec.q_scalar();
    let split = steinberg_product(spec.total_rank(), 1, &q, constant)?;
    let inner = steinberg_product(spec.n_v, spec.d_v, &q, constant)?;
    Ok(inner.try_div(&split)?.try_mul(&volume_quotient(spec)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchTarget {
    RealGroup,
    QuaternionicGroup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// One block of a tempered parameter: a `GL(2,R)` discrete series of weight
/// `k` or a `GL(1,R)` unitary character. Central-character tags are opaque
/// labels carried through unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchBlock {
    Ds2 { k: u32, central_character: String },
    Ch1 { sign: Sign, t: f64, label: String },
}

impl ArchBlock {
    pub fn size(&self) -> u32 {
        match self {
            ArchBlock::Ds2 { .. } => 2,
            ArchBlock::Ch1 { .. } => 1,
        }
    }
}

/// Tempered parameter for `GL(rank, R)` or its quaternionic inner form,
/// as an ordered block list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchTemperedParam {
    pub blocks: Vec<ArchBlock>,
    pub target: ArchTarget,
}

impl ArchTemperedParam {
    pub fn new(blocks: Vec<ArchBlock>, target: ArchTarget) -> Result<Self, PlancherelError> {
        if blocks.is_empty() {
            return Err(PlancherelError::InvalidParameter(
                "parameter needs at least one block".to_owned(),
            ));
        }
        for b in &blocks {
            match b {
                ArchBlock::Ds2 { k, .. } if *k == 0 => {
                    return Err(PlancherelError::InvalidParameter(
                        "discrete-series weight must be >= 1".to_owned(),
                    ))
                }
                ArchBlock::Ch1 { t, .. } if !t.is_finite() => {
                    return Err(PlancherelError::InvalidParameter(
                        "character parameter t must be finite".to_owned(),
                    ))
                }
                _ => {}
            }
        }
        if target == ArchTarget::QuaternionicGroup
            && blocks.iter().any(|b| matches!(b, ArchBlock::Ch1 { .. }))
        {
            return Err(PlancherelError::InvalidParameter(
                "quaternionic parameters admit only discrete-series blocks".to_owned(),
            ));
        }
        Ok(ArchTemperedParam { blocks, target })
    }

    /// Sum of block sizes (2 per discrete-series block, 1 per character).
    pub fn rank(&self) -> u32 {
        self.blocks.iter().map(ArchBlock::size).sum()
    }
}

/// Formal degree of a square-integrable(-mod-center) representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormalDegree {
    pub value: SymbolicScalar,
    pub representation_tag: String,
    /// Haar-measure tag; `None` leaves the normalization unspecified.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub haar: Option<String>,
}

impl FormalDegree {
    /// Degree of a direct sum: values add (same pi power by construction of
    /// any in-scope family), tags concatenate.
    pub fn direct_sum(&self, other: &FormalDegree) -> Result<FormalDegree, PlancherelError> {
        if self.haar != other.haar {
            return Err(PlancherelError::InvalidParameter(format!(
                "direct sum across Haar normalizations {:?} and {:?}",
                self.haar, other.haar
            )));
        }
        Ok(FormalDegree {
            value: self.value.try_add(&other.value)?,
            representation_tag: format!("{} + {}", self.representation_tag, other.representation_tag),
            haar: self.haar.clone(),
        })
    }
}

/// Measure tag of the archimedean Tamagawa normalization used by
/// [`arch_formal_degree`].
pub const ARCH_TAMAGAWA_HAAR: &str = "arch_tamagawa";

/// Measure tag of the hyperbolic-area normalization in the `SL(2,R)`
/// worked example ([`sl2_discrete_series_degree`] and the covolume pi/3).
pub const SL2_HYPERBOLIC_HAAR: &str = "sl2_hyperbolic";

/// Formal degree `k / (2 pi^2)` of a single weight-`k` block, identical for
/// the real and quaternionic targets.
pub fn arch_formal_degree(param: &ArchTemperedParam) -> Result<FormalDegree, PlancherelError> {
    if param.blocks.len() != 1 {
        return Err(PlancherelError::NotSquareIntegrable);
    }
    let (k, omega) = match &param.blocks[0] {
        ArchBlock::Ds2 {
            k,
            central_character,
        } => (*k, central_character),
        ArchBlock::Ch1 { .. } => return Err(PlancherelError::NotSquareIntegrable),
    };
    let value = SymbolicScalar::from_rational(BigRational::new(BigInt::from(k), BigInt::from(2)))
        .try_mul(&SymbolicScalar::pi_pow(-2))?;
    let series = match param.target {
        ArchTarget::RealGroup => "H",
        ArchTarget::QuaternionicGroup => "V",
    };
    Ok(FormalDegree {
        value,
        representation_tag: format!("{series}_{k}({omega})"),
        haar: Some(ARCH_TAMAGAWA_HAAR.to_owned()),
    })
}

/// Formal degree `(k - 1) / (4 pi)` of the weight-`k` discrete series of
/// `SL(2, R)`, in the hyperbolic-area normalization.
pub fn sl2_discrete_series_degree(k: u32) -> Result<FormalDegree, PlancherelError> {
    if k < 2 {
        return Err(PlancherelError::NoDiscreteSeries(k));
    }
    let value = SymbolicScalar::from_rational(BigRational::new(
        BigInt::from(k - 1),
        BigInt::from(4),
    ))
    .try_mul(&SymbolicScalar::pi_pow(-1))?;
    Ok(FormalDegree {
        value,
        representation_tag: format!("sl2_ds_{k}"),
        haar: Some(SL2_HYPERBOLIC_HAAR.to_owned()),
    })
}

/// Real Jacquet-Langlands transfer on tempered parameters of `GL(2n, R)`:
/// an all-discrete-series parameter maps to the quaternionic parameter with
/// the same weight/character list; any character block sends the parameter
/// to the zero element of the Grothendieck group (`None`).
pub fn jl_match_real(
    param: &ArchTemperedParam,
) -> Result<Option<ArchTemperedParam>, PlancherelError> {
    if param.target != ArchTarget::RealGroup {
        return Err(PlancherelError::InvalidParameter(
            "jl_match_real expects a real-group parameter".to_owned(),
        ));
    }
    if !param.rank().is_multiple_of(2) {
        return Err(PlancherelError::InvalidParameter(format!(
            "total rank {} is odd; the quaternionic partner needs an even rank",
            param.rank()
        )));
    }
    if param
        .blocks
        .iter()
        .any(|b| matches!(b, ArchBlock::Ch1 { .. }))
    {
        return Ok(None);
    }
    Ok(Some(ArchTemperedParam::new(
        param.blocks.clone(),
        ArchTarget::QuaternionicGroup,
    )?))
}

/// Serializable image of [`jl_match_real`]: the zero Grothendieck element
/// renders as `{"zero": true}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JlImage {
    Zero { zero: bool },
    Param(ArchTemperedParam),
}

impl From<Option<ArchTemperedParam>> for JlImage {
    fn from(v: Option<ArchTemperedParam>) -> Self {
        match v {
            None => JlImage::Zero { zero: true },
            Some(p) => JlImage::Param(p),
        }
    }
}

/// Non-archimedean transfer criterion: the tempered representation induced
/// from the Levi `prod GL(n_i, F_v)` transfers with nonzero character iff
/// `d` divides every `n_i`.
pub fn jl_transferable_padic(levi_partition: &[u32], d: u32) -> Result<bool, PlancherelError> {
    if d == 0 || levi_partition.contains(&0) {
        return Err(PlancherelError::InvalidShape);
    }
    Ok(levi_partition.iter().all(|&n| n % d == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localgeom::QValue;
    use num_bigint::BigInt;
    use num_traits::One;
    use std::str::FromStr;

    fn ds2(k: u32, omega: &str) -> ArchBlock {
        ArchBlock::Ds2 {
            k,
            central_character: omega.to_owned(),
        }
    }

    fn ch1(t: f64) -> ArchBlock {
        ArchBlock::Ch1 {
            sign: Sign::Plus,
            t,
            label: "chi".to_owned(),
        }
    }

    #[test]
    fn steinberg_frozen_values() {
        let q = SymbolicScalar::q();
        let d = steinberg_degree(2, 1, &q).unwrap();
        let expected = (SymbolicScalar::q() - SymbolicScalar::one())
            * SymbolicScalar::rational(1, 2);
        assert_eq!(d.value, expected);
        assert_eq!(d.normalization, Normalization::MassOne);
        assert_eq!(d.constant_convention, "1/(m*e)");

        for e in 1..=5 {
            let d = steinberg_degree(1, e, &q).unwrap();
            assert_eq!(d.value, SymbolicScalar::rational(1, i64::from(e)));
        }

        let three = SymbolicScalar::from_int(3);
        let d = steinberg_degree(2, 2, &three).unwrap();
        assert_eq!(d.value, SymbolicScalar::from_int(2));
    }

    #[test]
    fn ratio_is_one_for_frozen_cases() {
        let quaternion = LocalAlgebraSpec::new(QValue::Symbolic, 1, 1, 2, 1, 2).unwrap();
        assert!(plancherel_ratio(&quaternion).unwrap().is_one());

        let split = LocalAlgebraSpec::new(QValue::Symbolic, 1, 3, 1, 3, 1).unwrap();
        assert!(plancherel_ratio(&split).unwrap().is_one());

        let numeric = LocalAlgebraSpec::new(QValue::Num(5), 1, 2, 2, 1, 4).unwrap();
        assert!(plancherel_ratio(&numeric).unwrap().is_one());
    }

    /// Exhaustive identity sweep: every divisor shape with nd <= 12, formal q.
    #[test]
    fn ratio_identity_exhaustive() {
        for nd in 1u32..=12 {
            for d_v in 1..=nd {
                if nd % d_v != 0 {
                    continue;
                }
                let spec = LocalAlgebraSpec::new(QValue::Symbolic, 1, 1, nd, nd / d_v, d_v).unwrap();
                let r = plancherel_ratio(&spec).unwrap();
                assert!(r.is_one(), "ratio != 1 at nd={nd}, d_v={d_v}: {r}");
            }
        }
    }

    /// The leading Steinberg constant cancels: any shared convention gives
    /// the same (unit) ratio.
    #[test]
    fn ratio_independent_of_steinberg_constant() {
        for (nd, d_v) in [(2u32, 2u32), (4, 2), (6, 3), (12, 4)] {
            let spec = LocalAlgebraSpec::new(QValue::Symbolic, 1, 1, nd, nd / d_v, d_v).unwrap();
            let conventions = [
                BigRational::one(),
                BigRational::new(BigInt::one(), BigInt::from(nd)),
                BigRational::new(BigInt::one(), BigInt::from(nd / d_v)),
            ];
            for c in conventions {
                let r = plancherel_ratio_with_steinberg_constant(&spec, &c).unwrap();
                assert_eq!(r, plancherel_ratio(&spec).unwrap(), "constant {c} changed the ratio");
                assert!(r.is_one());
            }
        }
    }

    #[test]
    fn arch_degree_frozen_values() {
        let one_block =
            ArchTemperedParam::new(vec![ds2(1, "w")], ArchTarget::RealGroup).unwrap();
        let d = arch_formal_degree(&one_block).unwrap();
        assert_eq!(
            d.value,
            SymbolicScalar::rational(1, 2) * SymbolicScalar::pi_pow(-2)
        );

        let real5 = ArchTemperedParam::new(vec![ds2(5, "w")], ArchTarget::RealGroup).unwrap();
        let quat5 =
            ArchTemperedParam::new(vec![ds2(5, "w")], ArchTarget::QuaternionicGroup).unwrap();
        assert_eq!(
            arch_formal_degree(&real5).unwrap().value,
            arch_formal_degree(&quat5).unwrap().value
        );
    }

    #[test]
    fn arch_degree_k3_numeric_against_reference_pi() {
        let param = ArchTemperedParam::new(vec![ds2(3, "w")], ArchTarget::RealGroup).unwrap();
        let d = arch_formal_degree(&param).unwrap();
        let n = d
            .value
            .evaluate_at(&BigRational::one(), 25)
            .unwrap();
        // independent 50-digit pi constant
        let p = BigRational::new(
            BigInt::from_str("314159265358979323846264338327950288419716939937510").unwrap(),
            BigInt::from(10).pow(50),
        );
        let oracle = BigRational::from_integer(BigInt::from(3))
            / (BigRational::from_integer(BigInt::from(2)) * &p * &p);
        let gap = {
            use num_traits::{Signed, ToPrimitive};
            (&n.value - &oracle).abs().to_f64().unwrap()
        };
        assert!(gap <= n.error_bound + 1e-40);
        assert_eq!(&n.decimal(9), "0.151981775");
    }

    #[test]
    fn multi_block_is_not_square_integrable() {
        let p = ArchTemperedParam::new(vec![ds2(3, "a"), ds2(5, "b")], ArchTarget::RealGroup)
            .unwrap();
        assert_eq!(
            arch_formal_degree(&p),
            Err(PlancherelError::NotSquareIntegrable)
        );
        let c = ArchTemperedParam::new(vec![ch1(0.3)], ArchTarget::RealGroup).unwrap();
        assert_eq!(
            arch_formal_degree(&c),
            Err(PlancherelError::NotSquareIntegrable)
        );
    }

    #[test]
    fn sl2_degrees_and_gamma_consistency() {
        assert_eq!(
            sl2_discrete_series_degree(2).unwrap().value,
            SymbolicScalar::rational(1, 4) * SymbolicScalar::pi_pow(-1)
        );
        assert_eq!(
            sl2_discrete_series_degree(12).unwrap().value,
            SymbolicScalar::rational(11, 4) * SymbolicScalar::pi_pow(-1)
        );
        assert_eq!(
            sl2_discrete_series_degree(1),
            Err(PlancherelError::NoDiscreteSeries(1))
        );
        // (pi/3) * (k-1)/(4 pi) == (k-1)/12
        let covol = SymbolicScalar::rational(1, 3) * SymbolicScalar::pi_pow(1);
        for k in 2u32..=12 {
            let dim = covol.try_mul(&sl2_discrete_series_degree(k).unwrap().value).unwrap();
            assert_eq!(dim, SymbolicScalar::rational(i64::from(k) - 1, 12));
        }
    }

    #[test]
    fn jl_match_frozen_cases() {
        let p = ArchTemperedParam::new(vec![ds2(3, "w1"), ds2(5, "w2")], ArchTarget::RealGroup)
            .unwrap();
        let image = jl_match_real(&p).unwrap().expect("nonzero image");
        assert_eq!(image.target, ArchTarget::QuaternionicGroup);
        assert_eq!(image.blocks, p.blocks);

        let with_char =
            ArchTemperedParam::new(vec![ds2(2, "w"), ch1(0.7), ch1(0.1)], ArchTarget::RealGroup)
                .unwrap();
        assert_eq!(jl_match_real(&with_char).unwrap(), None);

        let odd = ArchTemperedParam::new(vec![ds2(2, "w"), ch1(0.7)], ArchTarget::RealGroup)
            .unwrap();
        assert!(matches!(
            jl_match_real(&odd),
            Err(PlancherelError::InvalidParameter(_))
        ));

        // single block: degree agreement across the transfer
        let single = ArchTemperedParam::new(vec![ds2(7, "w")], ArchTarget::RealGroup).unwrap();
        let v = jl_match_real(&single).unwrap().unwrap();
        assert_eq!(
            arch_formal_degree(&single).unwrap().value,
            arch_formal_degree(&v).unwrap().value
        );
    }

    #[test]
    fn quaternionic_constructor_rejects_characters() {
        assert!(matches!(
            ArchTemperedParam::new(vec![ch1(0.5)], ArchTarget::QuaternionicGroup),
            Err(PlancherelError::InvalidParameter(_))
        ));
    }

    #[test]
    fn transfer_divisibility() {
        assert!(jl_transferable_padic(&[2, 2], 2).unwrap());
        assert!(!jl_transferable_padic(&[2, 1], 2).unwrap());
        assert!(jl_transferable_padic(&[3, 1, 4, 1], 1).unwrap());
    }

    #[test]
    fn zero_image_serialization() {
        let img: JlImage = None.into();
        assert_eq!(serde_json::to_string(&img).unwrap(), r#"{"zero":true}"#);
        let p = ArchTemperedParam::new(vec![ds2(3, "w")], ArchTarget::QuaternionicGroup).unwrap();
        let img: JlImage = Some(p.clone()).into();
        let text = serde_json::to_string(&img).unwrap();
        assert!(text.contains("quaternionic_group"));
        let back: JlImage = serde_json::from_str(&text).unwrap();
        assert_eq!(back, JlImage::Param(p));
    }

    #[test]
    fn direct_sum_adds_degrees() {
        let a = sl2_discrete_series_degree(4).unwrap();
        let b = sl2_discrete_series_degree(6).unwrap();
        let sum = a.direct_sum(&b).unwrap();
        assert_eq!(
            sum.value,
            SymbolicScalar::from_int(2) * SymbolicScalar::pi_pow(-1)
        );
    }
}
