//! End-to-end tests of the jlm binary: output text, JSON documents, and the
//! exit-code contract (0 ok/equal, 1 input error, 2 not-equal, 3
//! inconclusive).

use jlm_core::symexpr::{default_variables, parse_expression};
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jlm"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn write_doc(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).expect("tmpdir");
    let path = dir.join(name);
    std::fs::write(&path, body).expect("write doc");
    path
}

#[test]
fn ratio_split_one_dimensional_case_prints_one() {
    let out = run(&["ratio", "--n", "1", "--d", "2", "--dv", "2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "1");
}

#[test]
fn ratio_json_document_round_trips() {
    let out = run(&["ratio", "--n", "2", "--d", "2", "--dv", "4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(doc["is_one"], serde_json::Value::Bool(true));
    let ratio = parse_expression(doc["ratio"].as_str().unwrap(), &default_variables()).unwrap();
    assert!(ratio.is_one());
}

#[test]
fn gamma_dim_weight_seven_modular_case() {
    let out = run(&[
        "gamma-dim",
        "--covol",
        "pi/3",
        "--degree",
        "(k-1)/(4*pi)",
        "--k",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "1/2");
}

#[test]
fn gamma_dim_table_as_csv() {
    let out = run(&[
        "gamma-dim",
        "--covol",
        "pi/3",
        "--degree",
        "(k-1)/(4*pi)",
        "--k-range",
        "2..5",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    let lines: Vec<&str> = body.trim().lines().collect();
    assert_eq!(lines[0], "k,gamma_dimension");
    assert_eq!(lines[1], "2,1/12");
    assert_eq!(lines[4], "5,1/3");
}

#[test]
fn volume_agrees_with_library_and_parses_back() {
    let out = run(&["volume", "--q", "3", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "8/9");

    // symbolic q: the printed form is canonical text the parser accepts
    let out = run(&["volume", "--n", "2", "--dv", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let printed = parse_expression(stdout(&out).trim(), &default_variables()).unwrap();
    use jlm_core::localgeom::{volume_max_compact_mult, LocalAlgebraSpec, QValue};
    let spec = LocalAlgebraSpec::new(QValue::Symbolic, 1, 2, 1, 1, 2).unwrap();
    assert_eq!(printed, volume_max_compact_mult(&spec).unwrap().value);
}

#[test]
fn arch_degree_numeric_evaluation() {
    let out = run(&["arch-degree", "--k", "4", "--numeric", "--digits", "15"]);
    assert_eq!(out.status.code(), Some(0));
    let value: f64 = stdout(&out).trim().parse().unwrap();
    let expected = 2.0 / (std::f64::consts::PI * std::f64::consts::PI);
    assert!((value - expected).abs() < 1e-14, "got {value}");
}

#[test]
fn numeric_refuses_q_dependent_results() {
    let out = run(&["volume", "--n", "2", "--dv", "2", "--numeric"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("depends on q"), "stderr: {}", stderr(&out));
}

#[test]
fn steinberg_split_rank_one_matches_library() {
    let out = run(&["steinberg", "--m", "2", "--e", "1", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    use jlm_core::plancherel::steinberg_degree;
    use jlm_core::symexpr::SymbolicScalar;
    let expected = steinberg_degree(2, 1, &SymbolicScalar::from_int(2)).unwrap();
    assert_eq!(stdout(&out).trim(), expected.value.to_string());
}

#[test]
fn covolume_zeta_two_within_tolerance() {
    let doc = write_doc(
        "covol_zeta2.json",
        r#"{
            "disc_factor": { "base": 1, "half_exponent": 0 },
            "tamagawa_number": 1,
            "tail_spec": { "rule": "one_minus_q_pow", "exponent": -2, "tolerance": 1e-6 }
        }"#,
    );
    let out = run(&["covolume", "--input", doc.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["kind"], "numeric");
    let value: f64 = parsed["value_decimal"].as_str().unwrap().parse().unwrap();
    // zeta(2) = 1.6449340668482264...
    assert!((value - 1.6449340668482264).abs() <= 2e-6, "got {value}");
    assert!(parsed["error_bound"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn covolume_symbolic_when_everything_is_exact() {
    let doc = write_doc(
        "covol_exact.json",
        r#"{
            "disc_factor": { "base": 9, "half_exponent": 3 },
            "tamagawa_number": "2/3",
            "finite_factors": { "p2": "3/4" }
        }"#,
    );
    let out = run(&["covolume", "--input", doc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    // 27 * (2/3) / (3/4) = 24
    assert_eq!(stdout(&out).trim(), "24");
}

fn eq_request(p3_left: &str, s_finite: &str) -> String {
    format!(
        r#"{{
        "left": {{
            "expr": {{
                "disc_factor": {{ "base": 4, "half_exponent": 1 }},
                "tamagawa_number": 1,
                "finite_factors": {{ "p2": "3/4", "p3": "{p3_left}" }}
            }},
            "index": {{ "fs_index": 4, "os_index": 2, "mu_index": 1 }}
        }},
        "right": {{
            "expr": {{
                "disc_factor": {{ "base": 2, "half_exponent": 2 }},
                "tamagawa_number": 1,
                "finite_factors": {{ "p2": "2/3", "p3": "1" }}
            }},
            "index": {{ "fs_index": 4, "os_index": 2, "mu_index": 1 }}
        }},
        "setup": {{
            "abs_discriminant": 1,
            "signature": {{ "r1": 1, "r2": 0 }},
            "torsion_order": 2,
            "places": [
                {{ "label": "p2", "q": 2 }},
                {{ "label": "p3", "q": 3 }}
            ],
            "ram_set": {{ "finite": ["p3"], "arch_real": [0] }},
            "S_finite": {s_finite}
        }}
    }}"#
    )
}

#[test]
fn check_covolume_eq_exit_codes() {
    // matched pair: 2 * 1 / (3/4 * 8/9) = 3 on both sides
    let doc = write_doc("eq_ok.json", &eq_request("8/9", r#"["p2", "p3"]"#));
    let out = run(&["check-covolume-eq", "--input", doc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "equal");

    // perturbed local factor: verdict not_equal, exit 2
    let doc = write_doc("eq_bad.json", &eq_request("7/9", r#"["p2", "p3"]"#));
    let out = run(&["check-covolume-eq", "--input", doc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).starts_with("not_equal"));

    // ramified place p3 outside S: comparison theorem does not apply
    let doc = write_doc("eq_inc.json", &eq_request("8/9", r#"["p2"]"#));
    let out = run(&["check-covolume-eq", "--input", doc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).starts_with("inconclusive"));
}

#[test]
fn schema_violations_report_json_pointer_paths() {
    let doc = write_doc(
        "eq_broken.json",
        r#"{ "left": { "expr": { "disc_factor": { "base": 4 } } } }"#,
    );
    let out = run(&["check-covolume-eq", "--input", doc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("/left/expr"), "stderr: {err}");
}

#[test]
fn missing_input_file_is_an_input_error() {
    let out = run(&["covolume", "--input", "/nonexistent/x.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn csv_rejected_for_scalar_commands() {
    let out = run(&["ratio", "--n", "1", "--d", "2", "--dv", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("csv output is not available"));
}

#[test]
fn clap_errors_exit_one_and_help_exits_zero() {
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["ratio"]); // missing required --n
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gamma_density_frozen_grid_value() {
    let out = run(&["gamma-density", "--t-grid", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    let lines: Vec<&str> = body.trim().lines().collect();
    assert_eq!(lines[0], "t,density");
    let value: f64 = lines[1].strip_prefix("2,").unwrap().parse().unwrap();
    // tanh(pi)/(4 pi) frozen independently
    assert!((value - 0.07928081279747894).abs() <= 1e-15, "got {value}");
}

#[test]
fn gamma_density_rejects_bad_grid() {
    let out = run(&["gamma-density", "--t-grid", "1,-3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("outside the domain"));
}

#[test]
fn jl_real_transfer_and_zero_image() {
    let doc = write_doc(
        "arch_ds.json",
        r#"{ "blocks": [ { "ds2": { "k": 6, "central_character": "triv" } } ],
             "target": "real_group" }"#,
    );
    let out = run(&["jl-real", "--input", doc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let image: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(image["target"], "quaternionic_group");

    let doc = write_doc(
        "arch_ch.json",
        r#"{ "blocks": [ { "ch1": { "sign": "+", "t": 1.0, "label": "chi" } },
                          { "ch1": { "sign": "-", "t": 0.5, "label": "eta" } } ],
             "target": "real_group" }"#,
    );
    let out = run(&["jl-real", "--input", doc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn verify_all_passes_quickly() {
    let out = run(&["verify-all", "--max-nd", "8"]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    assert!(stdout(&out).trim().ends_with("all checks passed"));
}

#[test]
fn verify_jl_report_and_measure_mismatch() {
    let body = |declared: &str| {
        format!(
            r#"{{
            "setup": {{
                "abs_discriminant": 5,
                "signature": {{ "r1": 1, "r2": 0 }},
                "torsion_order": 2,
                "places": [
                    {{ "label": "p2", "q": 2 }},
                    {{ "label": "p7", "q": 7 }}
                ],
                "ram_set": {{ "finite": ["p2"], "arch_real": [0] }},
                "S_finite": ["p2", "p7"]
            }},
            "n": 2,
            "d": 2,
            "local_index": {{ "p2": 2 }},
            "measure_factors": {{ "p2": "1/2", "p7": "2" }},
            "declared_measure_product": "{declared}"
        }}"#
        )
    };
    let doc = write_doc("jl_ok.json", &body("1"));
    let out = run(&["verify-jl", "--input", doc.to_str().unwrap(), "--k-max", "4"]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("ratio = 1"));

    let doc = write_doc("jl_bad.json", &body("3"));
    let out = run(&["verify-jl", "--input", doc.to_str().unwrap(), "--k-max", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn verify_jl_rejects_index_outside_ramification() {
    let doc = write_doc(
        "jl_invalid.json",
        r#"{
            "setup": {
                "abs_discriminant": 5,
                "signature": { "r1": 1, "r2": 0 },
                "torsion_order": 2,
                "places": [ { "label": "p2", "q": 2 } ],
                "ram_set": { "finite": [], "arch_real": [] },
                "S_finite": ["p2"]
            },
            "n": 2,
            "d": 2,
            "local_index": { "p2": 2 }
        }"#,
    );
    let out = run(&["verify-jl", "--input", doc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("ramification set"));
}

#[test]
fn prime_cap_env_is_honored_and_validated() {
    let doc = write_doc(
        "covol_env.json",
        r#"{
            "disc_factor": { "base": 1, "half_exponent": 0 },
            "tamagawa_number": 1,
            "tail_spec": { "rule": "one_minus_q_pow", "exponent": -2, "tolerance": 1e-6 }
        }"#,
    );
    let out = bin()
        .args(["covolume", "--input", doc.to_str().unwrap()])
        .env("JLM_PRIME_CAP", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("prime cap"));

    let out = bin()
        .args(["covolume", "--input", doc.to_str().unwrap()])
        .env("JLM_PRIME_CAP", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("JLM_PRIME_CAP"));
}
