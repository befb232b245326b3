//! The `verify-all` identity sweeps and the per-setup `verify-jl` report.

use crate::inputs::{CliError, JlVerifyRequest};
use crate::{CmdOutput, EXIT_NOT_EQUAL, EXIT_OK};
use jlm_core::adelic::{
    abelian_power_index, restricted_product_measure_capped, RestrictedProductSpec, TailRule,
};
use jlm_core::localgeom::{LocalAlgebraSpec, QValue, MAX_TOTAL_RANK};
use jlm_core::oracle::{
    abelian_groups_up_to, abelian_index_oracle, count_gl_by_enumeration,
    volume_formula_oracle_check, ChainRealization, FiniteRing, FiniteRingSpec, OracleVerdict,
    MAX_ABELIAN_ORDER,
};
use jlm_core::plancherel::{
    arch_formal_degree, jl_match_real, plancherel_ratio, ArchBlock, ArchTarget,
    ArchTemperedParam, FormalDegree, Sign,
};
use jlm_core::symexpr::SymbolicScalar;
use jlm_core::vndensity::{gamma_dimension, principal_series_density, ps_density, LatticeDatum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;
use std::path::Path;

struct CheckRow {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn row(name: &'static str, outcome: Result<String, CliError>) -> CheckRow {
    match outcome {
        Ok(detail) => CheckRow {
            name,
            ok: true,
            detail,
        },
        Err(e) => CheckRow {
            name,
            ok: false,
            detail: e.to_string(),
        },
    }
}

fn csv_quote(text: &str) -> String {
    format!("\"{}\"", text.replace('"', "\"\""))
}

pub fn run_verify_all(max_nd: u32, prime_cap: u64) -> Result<CmdOutput, CliError> {
    if u64::from(max_nd) > MAX_TOTAL_RANK {
        return Err(CliError::msg(format!(
            "max-nd {max_nd} exceeds the supported rank bound {MAX_TOTAL_RANK}"
        )));
    }
    let rows = vec![
        row("abelian_index_oracle", check_abelian()),
        row("arch_degree_jl", check_arch_jl()),
        row("euler_zeta2", check_zeta2(prime_cap)),
        row("gamma_dimension_table", check_gamma_table()),
        row("plancherel_ratio", check_ratio_sweep(max_nd)),
        row("ps_density_consistency", check_ps_density()),
        row("volume_vs_enumeration", check_volume_oracle()),
    ];

    let all_ok = rows.iter().all(|r| r.ok);
    let mut text_lines: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{} {:<24} {}",
                if r.ok { "ok  " } else { "FAIL" },
                r.name,
                r.detail
            )
        })
        .collect();
    text_lines.push(if all_ok {
        "all checks passed".to_owned()
    } else {
        "some checks FAILED".to_owned()
    });

    let mut csv = String::from("check,ok,detail\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{}\n", r.name, r.ok, csv_quote(&r.detail)));
    }
    let json = json!({
        "checks": rows
            .iter()
            .map(|r| json!({ "name": r.name, "ok": r.ok, "detail": r.detail }))
            .collect::<Vec<_>>(),
        "all_ok": all_ok,
    });

    Ok(CmdOutput {
        text: text_lines.join("\n"),
        json,
        csv: Some(csv.trim_end().to_owned()),
        code: if all_ok { EXIT_OK } else { EXIT_NOT_EQUAL },
    })
}

/// Power-map index on every abelian group of order <= 200, closed form
/// against element enumeration.
fn check_abelian() -> Result<String, CliError> {
    let groups = abelian_groups_up_to(MAX_ABELIAN_ORDER);
    let exponents = [2u64, 3, 4, 5, 6, 8, 12];
    let mut cases = 0usize;
    for orders in &groups {
        for &n in &exponents {
            let closed = abelian_power_index(0, orders, n)?;
            let counted = abelian_index_oracle(orders, n)?;
            if closed != counted.into() {
                return Err(CliError::msg(format!(
                    "group {orders:?}, n = {n}: closed form {closed} != enumeration {counted}"
                )));
            }
            cases += 1;
        }
    }
    Ok(format!(
        "{} groups x {} exponents = {cases} cases agree",
        groups.len(),
        exponents.len()
    ))
}

/// Weight-k formal degrees match across the real/quaternionic transfer.
fn check_arch_jl() -> Result<String, CliError> {
    for k in 1..=10u32 {
        let block = ArchBlock::Ds2 {
            k,
            central_character: "triv".to_owned(),
        };
        let real = ArchTemperedParam::new(vec![block.clone()], ArchTarget::RealGroup)?;
        let quat = ArchTemperedParam::new(vec![block], ArchTarget::QuaternionicGroup)?;
        let d_real = arch_formal_degree(&real)?;
        let d_quat = arch_formal_degree(&quat)?;
        if d_real.value != d_quat.value {
            return Err(CliError::msg(format!(
                "k = {k}: degrees {} and {} differ",
                d_real.value, d_quat.value
            )));
        }
        let image = jl_match_real(&real)?.ok_or_else(|| {
            CliError::msg(format!("k = {k}: transfer unexpectedly vanished"))
        })?;
        let d_image = arch_formal_degree(&image)?;
        if d_image.value != d_real.value {
            return Err(CliError::msg(format!(
                "k = {k}: transferred degree {} != source degree {}",
                d_image.value, d_real.value
            )));
        }
    }
    Ok("k = 1..10 preserved across the transfer".to_owned())
}

/// The inverted (1 - p^-2) tail over all primes is zeta(2).
fn check_zeta2(prime_cap: u64) -> Result<String, CliError> {
    let spec = RestrictedProductSpec {
        s_factors: Default::default(),
        tail_factors: TailRule::OneMinusQPow {
            exponent: -2,
            invert: true,
        },
        tolerance: 1e-6,
        tail_exclude: Vec::new(),
    };
    let value = restricted_product_measure_capped(&spec, prime_cap)?;
    let reference = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    let diff = (value.to_f64() - reference).abs();
    if diff > 1e-6 {
        return Err(CliError::msg(format!(
            "zeta(2) estimate {} is {diff:e} from pi^2/6",
            value.to_f64()
        )));
    }
    Ok(format!(
        "zeta(2) = {:.10} +/- {:.1e}",
        value.to_f64(),
        value.error_bound
    ))
}

/// Covolume pi/3 times degree (k-1)/(4 pi) is (k-1)/12.
fn check_gamma_table() -> Result<String, CliError> {
    let lattice = LatticeDatum {
        covolume: SymbolicScalar::rational(1, 3)
            .try_mul(&SymbolicScalar::pi_pow(1))
            .map_err(|e| CliError::msg(e.to_string()))?,
        label: "modular".to_owned(),
        haar: None,
    };
    for k in 2..=12i64 {
        let degree = FormalDegree {
            value: SymbolicScalar::from_rational(BigRational::new(
                BigInt::from(k - 1),
                BigInt::from(4),
            ))
            .try_mul(&SymbolicScalar::pi_pow(-1))
            .map_err(|e| CliError::msg(e.to_string()))?,
            representation_tag: format!("weight-{k}"),
            haar: None,
        };
        let dim = gamma_dimension(&lattice, &degree)?;
        let expected = SymbolicScalar::from_rational(BigRational::new(
            BigInt::from(k - 1),
            BigInt::from(12),
        ));
        if dim != expected {
            return Err(CliError::msg(format!(
                "k = {k}: dimension {dim} != {expected}"
            )));
        }
    }
    Ok("k = 2..12 matches (k-1)/12".to_owned())
}

/// Density ratio is 1 for every split/inner pair up to the rank bound, at
/// symbolic q.
fn check_ratio_sweep(max_nd: u32) -> Result<String, CliError> {
    let mut cases = 0usize;
    for nd in 1..=max_nd {
        for n in (1..=nd).filter(|n| nd % n == 0) {
            let d = nd / n;
            for d_v in (1..=nd).filter(|d_v| nd % d_v == 0) {
                let spec =
                    LocalAlgebraSpec::new(QValue::Symbolic, 1, n, d, nd / d_v, d_v)?;
                let ratio = plancherel_ratio(&spec)?;
                if !ratio.is_one() {
                    return Err(CliError::msg(format!(
                        "n = {n}, d = {d}, d_v = {d_v}: ratio {ratio} != 1"
                    )));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} shapes up to rank {max_nd}, all ratios = 1"))
}

/// Closed-form density against its defining elementary expression, both
/// signs, twelve digits.
fn check_ps_density() -> Result<String, CliError> {
    let grid = [0.5f64, 1.0, 2.0, 5.0, 10.0];
    for &t in &grid {
        let half_pi_t = std::f64::consts::PI * t / 2.0;
        let base = t / (8.0 * std::f64::consts::PI);
        for (sign, shape) in [
            (Sign::Plus, half_pi_t.tanh()),
            (Sign::Minus, 1.0 / half_pi_t.tanh()),
        ] {
            let expected = base * shape;
            let got = ps_density(t, sign)?;
            if (got - expected).abs() > 1e-12 * expected.abs() {
                return Err(CliError::msg(format!(
                    "t = {t}, sign {sign:?}: {got} != {expected}"
                )));
            }
            let form = principal_series_density(sign);
            let via_form = form.value.evaluate(t).ok_or_else(|| {
                CliError::msg("closed-form density did not evaluate")
            })?;
            if (via_form - expected).abs() > 1e-12 * expected.abs() {
                return Err(CliError::msg(format!(
                    "t = {t}, sign {sign:?}: form value {via_form} != {expected}"
                )));
            }
        }
    }
    Ok(format!("{} grid points, both signs, 1e-12 relative", grid.len()))
}

/// Unit-group volume formula against brute-force GL counts over small
/// chain rings; heavy combinations are left to the full test suite.
fn check_volume_oracle() -> Result<String, CliError> {
    const WORK_LIMIT: u64 = 1_000_000;
    let mut cases = 0usize;
    let mut skipped = 0usize;
    for q in [2u64, 3] {
        for n_v in [1u32, 2] {
            for d_v in [1u32, 2] {
                for length in [1u32, 2] {
                    let ring_size = q.pow(d_v * length);
                    if ring_size.pow(n_v * n_v) > WORK_LIMIT {
                        skipped += 1;
                        continue;
                    }
                    let spec = LocalAlgebraSpec::new(
                        QValue::Num(q),
                        1,
                        n_v * d_v,
                        1,
                        n_v,
                        d_v,
                    )?;
                    match volume_formula_oracle_check(&spec, length)? {
                        OracleVerdict::Equal => cases += 1,
                        OracleVerdict::NotEqual {
                            formula,
                            enumeration,
                        } => {
                            return Err(CliError::msg(format!(
                                "q = {q}, n_v = {n_v}, d_v = {d_v}, length = {length}: \
                                 formula {formula} != enumeration {enumeration}"
                            )))
                        }
                    }
                }
            }
        }
    }
    // fixed anchor with an independently known order
    let ring = FiniteRing::build(
        FiniteRingSpec::residue_extension(2, 1, 1)?,
        ChainRealization::ModPm,
    )?;
    let gl3 = count_gl_by_enumeration(3, &ring)?;
    if gl3 != 168 {
        return Err(CliError::msg(format!("|GL(3, F_2)| counted as {gl3}, not 168")));
    }
    Ok(format!(
        "{cases} combos agree ({skipped} heavy {} deferred), |GL(3, F_2)| = 168",
        if skipped == 1 { "combo" } else { "combos" }
    ))
}

pub fn run_verify_jl(path: &Path, k_max: u32) -> Result<CmdOutput, CliError> {
    let request: JlVerifyRequest = crate::inputs::read_json(path)?;
    request.setup.validate()?;
    let nd = request
        .n
        .checked_mul(request.d)
        .filter(|&x| x > 0)
        .ok_or_else(|| CliError::msg("n and d must be positive"))?;
    if k_max == 0 {
        return Err(CliError::msg("k-max must be at least 1"));
    }

    let labels: Vec<&str> = request.setup.places.iter().map(|p| p.label.as_str()).collect();
    for key in request.local_index.keys().chain(request.local_disc_norm.keys()) {
        if !labels.contains(&key.as_str()) {
            return Err(CliError::msg(format!(
                "datum for unknown place label {key:?}"
            )));
        }
    }

    let mut place_rows = Vec::new();
    let mut text_lines = Vec::new();
    let mut all_ok = true;
    for place in &request.setup.places {
        let d_v = request.local_index.get(&place.label).copied().unwrap_or(1);
        if d_v != 1 && !request.setup.ram_set.finite.contains(&place.label) {
            return Err(CliError::msg(format!(
                "place {} carries index {d_v} but is not in the ramification set",
                place.label
            )));
        }
        if d_v == 0 || nd % d_v != 0 {
            return Err(CliError::msg(format!(
                "index {d_v} at place {} does not divide n*d = {nd}",
                place.label
            )));
        }
        let disc = request
            .local_disc_norm
            .get(&place.label)
            .copied()
            .or(place.local_disc_norm)
            .unwrap_or(1);
        let spec = LocalAlgebraSpec::new(
            QValue::Num(place.q),
            disc,
            request.n,
            request.d,
            nd / d_v,
            d_v,
        )?;
        let ratio = plancherel_ratio(&spec)?;
        let ok = ratio.is_one();
        all_ok &= ok;
        text_lines.push(format!(
            "{} place {} (q = {}, d_v = {d_v}): ratio = {ratio}",
            if ok { "ok  " } else { "FAIL" },
            place.label,
            place.q
        ));
        place_rows.push(json!({
            "label": place.label,
            "q": place.q,
            "d_v": d_v,
            "local_disc_norm": disc,
            "ratio": ratio,
            "ok": ok,
        }));
    }

    let arch_checked = !request.setup.ram_set.arch_real.is_empty();
    let mut arch_ok = true;
    if arch_checked {
        for k in 1..=k_max {
            let real = ArchTemperedParam::new(
                vec![ArchBlock::Ds2 {
                    k,
                    central_character: "triv".to_owned(),
                }],
                ArchTarget::RealGroup,
            )?;
            let d_real = arch_formal_degree(&real)?;
            let image = jl_match_real(&real)?.ok_or_else(|| {
                CliError::msg(format!("k = {k}: transfer unexpectedly vanished"))
            })?;
            let d_image = arch_formal_degree(&image)?;
            if d_image.value != d_real.value {
                arch_ok = false;
            }
        }
        all_ok &= arch_ok;
        text_lines.push(format!(
            "{} archimedean degrees preserved for k = 1..{k_max}",
            if arch_ok { "ok  " } else { "FAIL" }
        ));
    }

    let mut measure_product = SymbolicScalar::one();
    for factor in request.measure_factors.values() {
        measure_product = measure_product
            .try_mul(factor)
            .map_err(|e| CliError::msg(e.to_string()))?;
    }
    let measure_ok = request
        .declared_measure_product
        .as_ref()
        .map(|declared| *declared == measure_product);
    if let Some(ok) = measure_ok {
        all_ok &= ok;
        text_lines.push(format!(
            "{} measure factors multiply to {measure_product}",
            if ok { "ok  " } else { "FAIL" }
        ));
    } else if !request.measure_factors.is_empty() {
        text_lines.push(format!("     measure factor product: {measure_product}"));
    }

    text_lines.push(if all_ok {
        "all checks passed".to_owned()
    } else {
        "some checks FAILED".to_owned()
    });

    let json = json!({
        "n": request.n,
        "d": request.d,
        "places": place_rows,
        "arch": { "checked": arch_checked, "k_max": k_max, "ok": arch_ok },
        "measure_product": measure_product,
        "declared_measure_product": request.declared_measure_product,
        "measure_ok": measure_ok,
        "all_ok": all_ok,
    });

    Ok(CmdOutput {
        text: text_lines.join("\n"),
        json,
        csv: None,
        code: if all_ok { EXIT_OK } else { EXIT_NOT_EQUAL },
    })
}
