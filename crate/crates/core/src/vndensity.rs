//! Von Neumann Gamma-dimensions and Gamma-densities: covolume times formal
//! degree for the discrete part, covolume-scaled spectral densities for the
//! continuous part, and the preservation check that composes the global
//! covolume comparison with local density agreement.

use crate::adelic::{
    covolume_equality_check, AdelicError, GlobalSetup, IndexedCovolume, Verdict,
};
use crate::localgeom::{LocalAlgebraSpec, LocalError};
use crate::plancherel::{plancherel_ratio, FormalDegree, PlancherelError, Sign};
use crate::symexpr::{SymError, SymbolicScalar};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VnError {
    #[error("Haar normalization mismatch: {left} vs {right}")]
    NormalizationMismatch { left: String, right: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("incomparable inputs: {0}")]
    Incomparable(String),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Plancherel(#[from] PlancherelError),
    #[error(transparent)]
    Adelic(#[from] AdelicError),
}

/// Reference measure tag of densities in the spectral parameter t.
pub const LEBESGUE_DT: &str = "dt Lebesgue";

/// A lattice with its covolume in a declared Haar normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDatum {
    pub covolume: SymbolicScalar,
    pub label: String,
    /// `None` leaves the normalization unspecified (compatible with any).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar: Option<String>,
}

impl LatticeDatum {
    pub fn validate(&self) -> Result<(), VnError> {
        if self.covolume.is_zero() {
            return Err(VnError::InvalidInput(format!(
                "covolume of {} is zero",
                self.label
            )));
        }
        if let Some(v) = self.covolume.constant_f64() {
            if v.is_nan() || v <= 0.0 {
                return Err(VnError::InvalidInput(format!(
                    "covolume of {} is not positive",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

/// Closed-form shapes of the densities in scope: atoms, and the two
/// principal-series families `coeff * t * tanh(pi t / 2)` and
/// `coeff * t * coth(pi t / 2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum DensityForm {
    Zero,
    Constant { value: SymbolicScalar },
    ScaledTanh { coeff: SymbolicScalar },
    ScaledCoth { coeff: SymbolicScalar },
}

impl DensityForm {
    /// Pointwise product with a scalar; zero collapses structurally.
    pub fn scale(&self, c: &SymbolicScalar) -> Result<DensityForm, SymError> {
        let scaled = |s: &SymbolicScalar| s.try_mul(c);
        Ok(match self {
            DensityForm::Zero => DensityForm::Zero,
            DensityForm::Constant { value } => {
                let value = scaled(value)?;
                if value.is_zero() {
                    DensityForm::Zero
                } else {
                    DensityForm::Constant { value }
                }
            }
            DensityForm::ScaledTanh { coeff } => DensityForm::ScaledTanh {
                coeff: scaled(coeff)?,
            },
            DensityForm::ScaledCoth { coeff } => DensityForm::ScaledCoth {
                coeff: scaled(coeff)?,
            },
        })
    }

    /// Evaluates at spectral parameter `t` when the coefficient is a
    /// constant (possibly with pi powers); `None` otherwise or outside the
    /// form's domain.
    pub fn evaluate(&self, t: f64) -> Option<f64> {
        if !t.is_finite() {
            return None;
        }
        let half_angle = std::f64::consts::PI * t / 2.0;
        match self {
            DensityForm::Zero => Some(0.0),
            DensityForm::Constant { value } => value.constant_f64(),
            DensityForm::ScaledTanh { coeff } => {
                Some(coeff.constant_f64()? * t * half_angle.tanh())
            }
            DensityForm::ScaledCoth { coeff } => {
                let tanh = half_angle.tanh();
                if tanh == 0.0 {
                    return None;
                }
                Some(coeff.constant_f64()? * t / tanh)
            }
        }
    }
}

/// A density against a declared reference measure in a declared Haar
/// normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaDensity {
    pub value: DensityForm,
    pub reference_measure: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar: Option<String>,
}

fn haar_compatible(left: &Option<String>, right: &Option<String>) -> Result<(), VnError> {
    match (left, right) {
        (Some(l), Some(r)) if l != r => Err(VnError::NormalizationMismatch {
            left: l.clone(),
            right: r.clone(),
        }),
        _ => Ok(()),
    }
}

/// Gamma-dimension of the module attached to a square-integrable
/// representation: covolume times formal degree. The product is invariant
/// under rescaling the Haar measure, so the result carries no tag.
pub fn gamma_dimension(
    lat: &LatticeDatum,
    deg: &FormalDegree,
) -> Result<SymbolicScalar, VnError> {
    lat.validate()?;
    haar_compatible(&lat.haar, &deg.haar)?;
    Ok(lat.covolume.try_mul(&deg.value)?)
}

/// Gamma-density of a tempered family: pointwise product of the covolume
/// with the local spectral density, against the same reference measure.
pub fn gamma_density(
    lat: &LatticeDatum,
    density: &GammaDensity,
) -> Result<GammaDensity, VnError> {
    lat.validate()?;
    haar_compatible(&lat.haar, &density.haar)?;
    Ok(GammaDensity {
        value: density.value.scale(&lat.covolume)?,
        reference_measure: density.reference_measure.clone(),
        haar: None,
    })
}

/// Local principal-series spectral density for the rank-one real group, at
/// spectral parameter `t > 0`: `(t/(8 pi)) tanh(pi t / 2)` in the even
/// family and `(t/(8 pi)) coth(pi t / 2)` in the odd one.
pub fn ps_density(t: f64, sign: Sign) -> Result<f64, VnError> {
    if !t.is_finite() || t <= 0.0 {
        return Err(VnError::InvalidInput(format!(
            "spectral parameter t = {t} outside the domain t > 0"
        )));
    }
    let tanh = (std::f64::consts::PI * t / 2.0).tanh();
    let shape = match sign {
        Sign::Plus => tanh,
        Sign::Minus => 1.0 / tanh,
    };
    Ok(t / (8.0 * std::f64::consts::PI) * shape)
}

/// The closed form behind [`ps_density`], as a density object.
pub fn principal_series_density(sign: Sign) -> GammaDensity {
    let coeff = SymbolicScalar::rational(1, 8)
        .try_mul(&SymbolicScalar::pi_pow(-1))
        .expect("constant product");
    let value = match sign {
        Sign::Plus => DensityForm::ScaledTanh { coeff },
        Sign::Minus => DensityForm::ScaledCoth { coeff },
    };
    GammaDensity {
        value,
        reference_measure: LEBESGUE_DT.to_owned(),
        haar: Some(crate::plancherel::SL2_HYPERBOLIC_HAAR.to_owned()),
    }
}

/// One side of a preservation comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySide {
    pub lattice: LatticeDatum,
    pub density: GammaDensity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EqVerdict {
    Equal,
    NotEqual { witness: String },
}

/// Decides whether two (covolume, density) pairs define the same
/// Gamma-density. Covolumes are compared through the global equality check
/// when the S-arithmetic data is supplied (an inconclusive global verdict
/// makes the sides incomparable), or as exact scalars otherwise; densities
/// must agree in form, and the shared local input is re-verified by
/// checking that the density ratio is 1 at every compared place.
pub fn density_preservation_check(
    left: &DensitySide,
    right: &DensitySide,
    compared_places: &[LocalAlgebraSpec],
    covolumes: Option<(&IndexedCovolume, &IndexedCovolume, &GlobalSetup)>,
) -> Result<EqVerdict, VnError> {
    left.lattice.validate()?;
    right.lattice.validate()?;
    haar_compatible(&left.lattice.haar, &left.density.haar)?;
    haar_compatible(&right.lattice.haar, &right.density.haar)?;
    haar_compatible(&left.lattice.haar, &right.lattice.haar)?;
    haar_compatible(&left.density.haar, &right.density.haar)?;
    if left.density.reference_measure != right.density.reference_measure {
        return Err(VnError::Incomparable(format!(
            "densities against different reference measures: {} vs {}",
            left.density.reference_measure, right.density.reference_measure
        )));
    }

    let covolumes_agree = match covolumes {
        Some((l, r, setup)) => match covolume_equality_check(l, r, setup)? {
            Verdict::Equal => true,
            Verdict::NotEqual { .. } => false,
            Verdict::Inconclusive { reason } => {
                return Err(VnError::Incomparable(reason));
            }
        },
        None => left.lattice.covolume == right.lattice.covolume,
    };
    if !covolumes_agree {
        return Ok(EqVerdict::NotEqual {
            witness: "covolume".to_owned(),
        });
    }
    if left.density.value != right.density.value {
        return Ok(EqVerdict::NotEqual {
            witness: "density".to_owned(),
        });
    }
    for (idx, place) in compared_places.iter().enumerate() {
        if !plancherel_ratio(place)?.is_one() {
            return Ok(EqVerdict::NotEqual {
                witness: format!("plancherel[{idx}]"),
            });
        }
    }
    Ok(EqVerdict::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adelic::{CovolumeExpr, DiscFactor, FinitePlace, IndexData, RamSet, Signature};
    use crate::jsonutil::{JsonBigUint, JsonRational};
    use crate::localgeom::QValue;
    use crate::plancherel::{sl2_discrete_series_degree, SL2_HYPERBOLIC_HAAR};
    use std::collections::BTreeMap;

    fn pi_over_3_lattice() -> LatticeDatum {
        LatticeDatum {
            covolume: SymbolicScalar::rational(1, 3)
                .try_mul(&SymbolicScalar::pi_pow(1))
                .unwrap(),
            label: "modular".to_owned(),
            haar: Some(SL2_HYPERBOLIC_HAAR.to_owned()),
        }
    }

    /// covol pi/3 against degree (k-1)/(4 pi): dimension (k-1)/12, exactly.
    #[test]
    fn modular_gamma_dimension_table() {
        let lat = pi_over_3_lattice();
        for k in 2..=12u32 {
            let deg = sl2_discrete_series_degree(k).unwrap();
            let dim = gamma_dimension(&lat, &deg).unwrap();
            assert_eq!(
                dim,
                SymbolicScalar::rational(i64::from(k) - 1, 12),
                "k = {k}"
            );
        }
    }

    #[test]
    fn exact_products_and_zero() {
        let lat = LatticeDatum {
            covolume: SymbolicScalar::rational(1, 2),
            label: "test".to_owned(),
            haar: None,
        };
        let deg = FormalDegree {
            value: SymbolicScalar::rational(3, 2)
                .try_mul(&SymbolicScalar::pi_pow(-2))
                .unwrap(),
            representation_tag: "pair".to_owned(),
            haar: None,
        };
        let expected = SymbolicScalar::rational(3, 4)
            .try_mul(&SymbolicScalar::pi_pow(-2))
            .unwrap();
        assert_eq!(gamma_dimension(&lat, &deg).unwrap(), expected);

        let zero_deg = FormalDegree {
            value: SymbolicScalar::zero(),
            representation_tag: "null".to_owned(),
            haar: None,
        };
        assert!(gamma_dimension(&lat, &zero_deg).unwrap().is_zero());
    }

    #[test]
    fn normalization_mismatch_is_rejected() {
        let lat = pi_over_3_lattice();
        let deg = FormalDegree {
            value: SymbolicScalar::one(),
            representation_tag: "x".to_owned(),
            haar: Some("arch_tamagawa".to_owned()),
        };
        assert!(matches!(
            gamma_dimension(&lat, &deg),
            Err(VnError::NormalizationMismatch { .. })
        ));
        // untagged degree is compatible with any lattice tag
        let untagged = FormalDegree { haar: None, ..deg };
        assert!(gamma_dimension(&lat, &untagged).is_ok());
    }

    #[test]
    fn invalid_covolume_rejected() {
        let zero = LatticeDatum {
            covolume: SymbolicScalar::zero(),
            label: "z".to_owned(),
            haar: None,
        };
        let negative = LatticeDatum {
            covolume: SymbolicScalar::from_int(-2),
            label: "n".to_owned(),
            haar: None,
        };
        let deg = FormalDegree {
            value: SymbolicScalar::one(),
            representation_tag: "x".to_owned(),
            haar: None,
        };
        assert!(gamma_dimension(&zero, &deg).is_err());
        assert!(gamma_dimension(&negative, &deg).is_err());
    }

    /// dim(lat, d1 (+) d2) = dim(lat, d1) + dim(lat, d2).
    #[test]
    fn additivity_over_direct_sums() {
        let lat = pi_over_3_lattice();
        let d1 = sl2_discrete_series_degree(4).unwrap();
        let d2 = sl2_discrete_series_degree(9).unwrap();
        let sum = d1.direct_sum(&d2).unwrap();
        let lhs = gamma_dimension(&lat, &sum).unwrap();
        let rhs = gamma_dimension(&lat, &d1)
            .unwrap()
            .try_add(&gamma_dimension(&lat, &d2).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, SymbolicScalar::rational(11, 12));
    }

    /// Rescaling Haar by c multiplies covolume by c and degree by 1/c; the
    /// dimension is unchanged.
    #[test]
    fn scaling_covariance() {
        let base_lat = LatticeDatum {
            covolume: SymbolicScalar::rational(2, 7),
            label: "base".to_owned(),
            haar: None,
        };
        let base_deg = FormalDegree {
            value: SymbolicScalar::rational(5, 3)
                .try_mul(&SymbolicScalar::pi_pow(-1))
                .unwrap(),
            representation_tag: "x".to_owned(),
            haar: None,
        };
        let reference = gamma_dimension(&base_lat, &base_deg).unwrap();
        let scales = [
            SymbolicScalar::from_int(2),
            SymbolicScalar::rational(1, 3),
            SymbolicScalar::rational(7, 5),
            SymbolicScalar::rational(3, 1)
                .try_mul(&SymbolicScalar::pi_pow(1))
                .unwrap(),
        ];
        for c in scales {
            let lat = LatticeDatum {
                covolume: base_lat.covolume.try_mul(&c).unwrap(),
                ..base_lat.clone()
            };
            let deg = FormalDegree {
                value: base_deg.value.try_div(&c).unwrap(),
                ..base_deg.clone()
            };
            assert_eq!(gamma_dimension(&lat, &deg).unwrap(), reference);
        }
    }

    /// covol pi/3 sends (t/(8 pi)) tanh to (t/24) tanh, same measure.
    #[test]
    fn density_scaling_matches_closed_forms() {
        let lat = pi_over_3_lattice();
        let even = gamma_density(&lat, &principal_series_density(Sign::Plus)).unwrap();
        assert_eq!(
            even.value,
            DensityForm::ScaledTanh {
                coeff: SymbolicScalar::rational(1, 24)
            }
        );
        assert_eq!(even.reference_measure, LEBESGUE_DT);
        assert_eq!(even.haar, None);

        let odd = gamma_density(&lat, &principal_series_density(Sign::Minus)).unwrap();
        assert_eq!(
            odd.value,
            DensityForm::ScaledCoth {
                coeff: SymbolicScalar::rational(1, 24)
            }
        );

        let zero = GammaDensity {
            value: DensityForm::Zero,
            reference_measure: LEBESGUE_DT.to_owned(),
            haar: None,
        };
        assert_eq!(gamma_density(&lat, &zero).unwrap().value, DensityForm::Zero);
    }

    /// tanh(pi)/(4 pi) = 0.079280812797478934879... frozen from an
    /// independent high-precision evaluation, rounded to f64.
    const PS_AT_2_PLUS: f64 = 0.07928081279747894;

    /// tanh(pi)/12 = 0.083022673018395828689... frozen the same way.
    const PS_TIMES_COVOL_AT_2: f64 = 0.08302267301839583;

    #[test]
    fn ps_density_frozen_value_and_cross_check() {
        let v = ps_density(2.0, Sign::Plus).unwrap();
        assert!((v - PS_AT_2_PLUS).abs() <= 1e-12, "got {v:.15}");
        // (pi/3) * ps_density(2,+) = tanh(pi)/12
        let lhs = std::f64::consts::PI / 3.0 * v;
        assert!((lhs - PS_TIMES_COVOL_AT_2).abs() <= 1e-12);
    }

    #[test]
    fn ps_density_domain_and_asymptotes() {
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                ps_density(bad, Sign::Plus),
                Err(VnError::InvalidInput(_))
            ));
        }
        // coth -> 1 from above, tanh -> 1 from below; both -> t/(8 pi)
        let t = 50.0;
        let flat = t / (8.0 * std::f64::consts::PI);
        assert!((ps_density(t, Sign::Minus).unwrap() - flat).abs() <= 1e-15);
        assert!((ps_density(t, Sign::Plus).unwrap() - flat).abs() <= 1e-15);
        // nonnegative on a grid, both families
        let mut t = 0.05;
        while t < 20.0 {
            assert!(ps_density(t, Sign::Plus).unwrap() >= 0.0);
            assert!(ps_density(t, Sign::Minus).unwrap() >= 0.0);
            t += 0.35;
        }
    }

    /// (pi/3) ps_density(t,+) agrees with (t/24) tanh(pi t/2) to 12
    /// significant digits, through both the scalar and the form evaluator.
    #[test]
    fn covolume_times_density_twelve_digits() {
        let lat = pi_over_3_lattice();
        let scaled = gamma_density(&lat, &principal_series_density(Sign::Plus)).unwrap();
        for t in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let lhs = std::f64::consts::PI / 3.0 * ps_density(t, Sign::Plus).unwrap();
            let rhs = t / 24.0 * (std::f64::consts::PI * t / 2.0).tanh();
            assert!(
                ((lhs - rhs) / rhs).abs() <= 1e-12,
                "t = {t}: {lhs:.16e} vs {rhs:.16e}"
            );
            let form = scaled.value.evaluate(t).unwrap();
            assert!(((form - rhs) / rhs).abs() <= 1e-12);
        }
    }

    fn plain_side(covolume: SymbolicScalar) -> DensitySide {
        DensitySide {
            lattice: LatticeDatum {
                covolume,
                label: "side".to_owned(),
                haar: None,
            },
            density: GammaDensity {
                value: DensityForm::ScaledTanh {
                    coeff: SymbolicScalar::rational(1, 24),
                },
                reference_measure: LEBESGUE_DT.to_owned(),
                haar: None,
            },
        }
    }

    #[test]
    fn preservation_check_scalar_covolumes() {
        let left = plain_side(SymbolicScalar::rational(1, 3));
        assert_eq!(
            density_preservation_check(&left, &left.clone(), &[], None).unwrap(),
            EqVerdict::Equal
        );

        let doubled = plain_side(SymbolicScalar::rational(2, 3));
        assert_eq!(
            density_preservation_check(&left, &doubled, &[], None).unwrap(),
            EqVerdict::NotEqual {
                witness: "covolume".to_owned()
            }
        );

        let mut other_form = left.clone();
        other_form.density.value = DensityForm::ScaledCoth {
            coeff: SymbolicScalar::rational(1, 24),
        };
        assert_eq!(
            density_preservation_check(&left, &other_form, &[], None).unwrap(),
            EqVerdict::NotEqual {
                witness: "density".to_owned()
            }
        );

        let mut other_measure = left.clone();
        other_measure.density.reference_measure = "Harish-Chandra".to_owned();
        assert!(matches!(
            density_preservation_check(&left, &other_measure, &[], None),
            Err(VnError::Incomparable(_))
        ));
    }

    #[test]
    fn preservation_check_verifies_compared_places() {
        let side = plain_side(SymbolicScalar::rational(1, 3));
        let places = [
            LocalAlgebraSpec::new(QValue::Symbolic, 1, 1, 2, 1, 2).unwrap(),
            LocalAlgebraSpec::new(QValue::Num(3), 1, 2, 2, 2, 2).unwrap(),
            LocalAlgebraSpec::new(QValue::Symbolic, 1, 3, 2, 6, 1).unwrap(),
        ];
        assert_eq!(
            density_preservation_check(&side, &side.clone(), &places, None).unwrap(),
            EqVerdict::Equal
        );
    }

    fn sample_setup(ram_in_s: bool) -> GlobalSetup {
        GlobalSetup {
            abs_discriminant: 5,
            signature: Signature { r1: 2, r2: 0 },
            torsion_order: 2,
            places: vec![FinitePlace {
                label: "p2".to_owned(),
                q: 2,
                local_disc_norm: Some(4),
            }],
            ram_set: RamSet {
                finite: vec!["p2".to_owned()],
                arch_real: vec![0, 1],
            },
            s_finite: if ram_in_s { vec!["p2".to_owned()] } else { vec![] },
        }
    }

    fn sample_covolume(tamagawa: i64) -> IndexedCovolume {
        IndexedCovolume {
            expr: CovolumeExpr {
                disc_factor: DiscFactor {
                    base: 5,
                    half_exponent: 3,
                },
                tamagawa_number: JsonRational::from_int(tamagawa),
                finite_factors: BTreeMap::from([(
                    "p2".to_owned(),
                    SymbolicScalar::rational(3, 8),
                )]),
                tail_spec: None,
            },
            index: IndexData {
                fs_index: JsonBigUint::from(4),
                os_index: JsonBigUint::from(2),
                mu_index: JsonBigUint::from(1),
            },
        }
    }

    #[test]
    fn preservation_check_with_global_covolumes() {
        let side = plain_side(SymbolicScalar::rational(1, 3));
        let place = [LocalAlgebraSpec::new(QValue::Num(2), 4, 1, 2, 1, 2).unwrap()];
        let setup = sample_setup(true);
        let l = sample_covolume(1);

        assert_eq!(
            density_preservation_check(&side, &side.clone(), &place, Some((&l, &l, &setup)))
                .unwrap(),
            EqVerdict::Equal
        );

        let perturbed = sample_covolume(2);
        assert_eq!(
            density_preservation_check(
                &side,
                &side.clone(),
                &place,
                Some((&l, &perturbed, &setup))
            )
            .unwrap(),
            EqVerdict::NotEqual {
                witness: "covolume".to_owned()
            }
        );

        // ramified place outside S: the global comparison cannot decide
        let escaped = sample_setup(false);
        let r = sample_covolume(2);
        assert!(matches!(
            density_preservation_check(&side, &side.clone(), &place, Some((&l, &r, &escaped))),
            Err(VnError::Incomparable(_))
        ));
    }

    #[test]
    fn preservation_check_cross_side_normalizations() {
        let mut left = plain_side(SymbolicScalar::rational(1, 3));
        let mut right = left.clone();
        left.lattice.haar = Some(SL2_HYPERBOLIC_HAAR.to_owned());
        right.lattice.haar = Some("arch_tamagawa".to_owned());
        right.density.haar = Some("arch_tamagawa".to_owned());
        assert!(matches!(
            density_preservation_check(&left, &right, &[], None),
            Err(VnError::NormalizationMismatch { .. })
        ));
    }

    #[test]
    fn density_serde_round_trip() {
        let density = principal_series_density(Sign::Minus);
        let text = serde_json::to_string(&density).unwrap();
        let back: GammaDensity = serde_json::from_str(&text).unwrap();
        assert_eq!(back, density);
        assert!(text.contains("scaled_coth"));

        let verdict = EqVerdict::NotEqual {
            witness: "density".to_owned(),
        };
        let text = serde_json::to_string(&verdict).unwrap();
        assert_eq!(text, r#"{"verdict":"not_equal","witness":"density"}"#);
    }
}
