//! `jlm`: exact unit-group volumes, formal degrees, density ratios, and
//! S-arithmetic covolume verification from the command line.
//!
//! Exit codes: 0 on success and on verdict "equal"; 1 on input and schema
//! errors; 2 on verdict "not_equal" and failed verification sweeps; 3 on
//! verdict "inconclusive". Exact values are printed in the canonical scalar
//! text form and are never silently floated; `--numeric --digits N` opts
//! into decimal evaluation.

mod inputs;
mod verify;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use inputs::{
    parse_scalar, parse_scalar_with_k, prime_cap_setting, read_arch_param, read_json, CliError,
};
use jlm_core::adelic::{
    covolume_equality_check, covolume_s_arithmetic_capped, CovolumeValue, Verdict,
};
use jlm_core::localgeom::{
    disc_norm, tamagawa_volume_max_compact, volume_max_compact_mult, LocalAlgebraSpec, QValue,
    VolumeResult,
};
use jlm_core::plancherel::{
    arch_formal_degree, jl_match_real, plancherel_ratio, steinberg_degree, ArchBlock,
    ArchTarget, ArchTemperedParam, FormalDegree, JlImage, Sign,
};
use jlm_core::symexpr::SymbolicScalar;
use jlm_core::vndensity::{gamma_density, gamma_dimension, principal_series_density, LatticeDatum};
use num_rational::BigRational;
use serde_json::{json, Value};
use std::path::PathBuf;

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_NOT_EQUAL: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "jlm",
    version,
    about = "Exact-arithmetic verification of local and global measure quantities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Args)]
struct OutputOpts {
    /// Output format: text (canonical scalars), json (one document), csv (tables)
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Evaluate exact results as decimals
    #[arg(long, global = true)]
    numeric: bool,
    /// Decimal digits for numeric renderings
    #[arg(long, global = true, default_value_t = 12)]
    digits: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum NormArg {
    /// Multiplicative Haar measure of the unit group
    Mult,
    /// Local Tamagawa measure
    Tamagawa,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Real,
    Quaternionic,
}

/// Inline description of the local algebra `M(n_v, D_v)` inside the global
/// shape `(n, d)`.
#[derive(Args)]
struct SpecArgs {
    /// Residue cardinality; omit to compute with symbolic q
    #[arg(long)]
    q: Option<u64>,
    /// Local discriminant norm d(F_v)
    #[arg(long, default_value_t = 1)]
    disc: u64,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Local matrix size; defaults to n*d/dv
    #[arg(long)]
    nv: Option<u32>,
    /// Local division-algebra index
    #[arg(long, default_value_t = 1)]
    dv: u32,
}

impl SpecArgs {
    fn build(&self) -> Result<LocalAlgebraSpec, CliError> {
        let q = self.q.map_or(QValue::Symbolic, QValue::Num);
        let nd = self.n.checked_mul(self.d).filter(|&x| x > 0).ok_or_else(|| {
            CliError::msg("n and d must be positive and their product must fit in 32 bits")
        })?;
        let nv = match self.nv {
            Some(nv) => nv,
            None => {
                if self.dv == 0 || nd % self.dv != 0 {
                    return Err(CliError::msg(format!(
                        "dv = {} does not divide n*d = {nd}",
                        self.dv
                    )));
                }
                nd / self.dv
            }
        };
        Ok(LocalAlgebraSpec::new(q, self.disc, self.n, self.d, nv, self.dv)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Unit-group volume of a maximal order
    Volume {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value_t = NormArg::Mult)]
        normalization: NormArg,
    },
    /// Reduced discriminant norm of the local algebra
    DiscNorm {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Formal degree of the Steinberg representation of GL(m, D), ind(D) = e
    Steinberg {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        e: u32,
        /// Residue cardinality; omit for symbolic q
        #[arg(long)]
        q: Option<u64>,
    },
    /// Plancherel density ratio across the correspondence
    Ratio {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Formal degree k/(2 pi^2) of a weight-k archimedean block
    ArchDegree {
        #[arg(long, required_unless_present = "input", conflicts_with = "input")]
        k: Option<u32>,
        #[arg(long, value_enum, default_value_t = TargetArg::Real)]
        target: TargetArg,
        /// Central-character label carried through unchanged
        #[arg(long, default_value = "triv")]
        character: String,
        /// Tempered-parameter JSON document instead of inline flags
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Real Jacquet-Langlands transfer of a tempered-parameter document
    JlReal {
        #[arg(long)]
        input: PathBuf,
    },
    /// S-arithmetic covolume of an expression document
    Covolume {
        #[arg(long)]
        input: PathBuf,
        /// Sieve bound for Euler tails (env JLM_PRIME_CAP)
        #[arg(long)]
        prime_cap: Option<u64>,
    },
    /// Compare two indexed covolume expressions over a global setup
    CheckCovolumeEq {
        /// JSON document {"left": ..., "right": ..., "setup": ...}
        #[arg(long)]
        input: PathBuf,
    },
    /// Gamma-dimension: covolume expression times formal-degree expression
    GammaDim {
        /// Covolume, e.g. "pi/3"
        #[arg(long)]
        covol: String,
        /// Formal degree, may reference k, e.g. "(k-1)/(4*pi)"
        #[arg(long)]
        degree: String,
        #[arg(long, conflicts_with = "k_range")]
        k: Option<i64>,
        /// Inclusive table range "A..B" for k
        #[arg(long)]
        k_range: Option<String>,
    },
    /// Gamma-density values on a grid of spectral parameters
    GammaDensity {
        /// Comma-separated positive reals
        #[arg(long, default_value = "0.5,1,2,5,10")]
        t_grid: String,
        /// "+" for the tanh family, "-" for the coth family
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: String,
        /// Optional covolume expression scaling the local density
        #[arg(long)]
        covol: Option<String>,
    },
    /// Run the identity sweeps and print a summary table
    VerifyAll {
        /// Largest total rank in the density-ratio sweep
        #[arg(long, default_value_t = 12)]
        max_nd: u32,
        #[arg(long)]
        prime_cap: Option<u64>,
    },
    /// Per-place correspondence report for a global setup document
    VerifyJl {
        #[arg(long)]
        input: PathBuf,
        /// Largest archimedean weight checked
        #[arg(long, default_value_t = 10)]
        k_max: u32,
    },
}

/// One rendered result: every subcommand produces all the formats it
/// supports, and `emit` picks one.
struct CmdOutput {
    text: String,
    json: Value,
    csv: Option<String>,
    code: u8,
}

impl CmdOutput {
    fn ok(text: String, json: Value) -> Self {
        CmdOutput {
            text,
            json,
            csv: None,
            code: EXIT_OK,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            std::process::exit(i32::from(code));
        }
    };
    let format = cli.out.format;
    match run(cli) {
        Ok(out) => {
            let rendered = match format {
                Format::Text => Ok(out.text),
                Format::Json => serde_json::to_string_pretty(&out.json)
                    .map_err(|e| CliError::msg(e.to_string())),
                Format::Csv => out.csv.ok_or_else(|| {
                    CliError::msg("csv output is not available for this subcommand")
                }),
            };
            match rendered {
                Ok(payload) => print_and_exit(&payload, out.code),
                Err(e) => {
                    eprintln!("error: {e}");
                    std::process::exit(i32::from(EXIT_INPUT));
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(i32::from(EXIT_INPUT));
        }
    }
}

/// Writes the payload and exits with the command's code; a consumer that
/// closed the pipe early (`jlm ... | head`) is not an error.
fn print_and_exit(payload: &str, code: u8) -> ! {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    let outcome = stdout
        .write_all(payload.as_bytes())
        .and_then(|()| stdout.write_all(b"\n"))
        .and_then(|()| stdout.flush());
    match outcome {
        Ok(()) => std::process::exit(i32::from(code)),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {
            std::process::exit(i32::from(code))
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(i32::from(EXIT_INPUT));
        }
    }
}

fn run(cli: Cli) -> Result<CmdOutput, CliError> {
    match cli.command {
        Command::Volume {
            ref spec,
            normalization,
        } => cmd_volume(spec, normalization, &cli.out),
        Command::DiscNorm { ref spec } => cmd_disc_norm(spec),
        Command::Steinberg { m, e, q } => cmd_steinberg(m, e, q, &cli.out),
        Command::Ratio { ref spec } => cmd_ratio(spec, &cli.out),
        Command::ArchDegree {
            k,
            target,
            ref character,
            ref input,
        } => cmd_arch_degree(k, target, character, input.as_deref(), &cli.out),
        Command::JlReal { ref input } => cmd_jl_real(input),
        Command::Covolume {
            ref input,
            prime_cap,
        } => cmd_covolume(input, prime_cap, &cli.out),
        Command::CheckCovolumeEq { ref input } => cmd_check_eq(input),
        Command::GammaDim {
            ref covol,
            ref degree,
            k,
            ref k_range,
        } => cmd_gamma_dim(covol, degree, k, k_range.as_deref(), &cli.out),
        Command::GammaDensity {
            ref t_grid,
            ref sign,
            ref covol,
        } => cmd_gamma_density(t_grid, sign, covol.as_deref()),
        Command::VerifyAll { max_nd, prime_cap } => {
            verify::run_verify_all(max_nd, prime_cap_setting(prime_cap)?)
        }
        Command::VerifyJl { ref input, k_max } => verify::run_verify_jl(input, k_max),
    }
}

/// Appends the decimal evaluation of a constant scalar when `--numeric` is
/// set; errors when the value still depends on q.
fn numeric_fields(
    value: &SymbolicScalar,
    out: &OutputOpts,
    json: &mut serde_json::Map<String, Value>,
) -> Result<Option<String>, CliError> {
    if !out.numeric {
        return Ok(None);
    }
    if !value.is_constant() {
        return Err(CliError::msg(
            "result depends on q; pass --q to evaluate numerically",
        ));
    }
    let digits = out.digits.clamp(1, 50);
    let n = value.evaluate_at(&BigRational::from_integer(0.into()), (digits + 12) as u32)?;
    let text = n.decimal(digits);
    json.insert("value_decimal".to_owned(), Value::String(text.clone()));
    json.insert("error_bound".to_owned(), json!(n.error_bound));
    Ok(Some(text))
}

/// Scalar-valued command output: canonical text (or its decimal under
/// `--numeric`) plus the base JSON document.
fn scalar_output(
    value: &SymbolicScalar,
    base: Value,
    out: &OutputOpts,
) -> Result<CmdOutput, CliError> {
    let mut doc = match base {
        Value::Object(map) => map,
        other => {
            let mut map = serde_json::Map::new();
            map.insert("value".to_owned(), other);
            map
        }
    };
    let text = match numeric_fields(value, out, &mut doc)? {
        Some(decimal) => decimal,
        None => value.to_string(),
    };
    Ok(CmdOutput::ok(text, Value::Object(doc)))
}

fn cmd_volume(
    args: &SpecArgs,
    normalization: NormArg,
    out: &OutputOpts,
) -> Result<CmdOutput, CliError> {
    let spec = args.build()?;
    let result: VolumeResult = match normalization {
        NormArg::Mult => volume_max_compact_mult(&spec)?,
        NormArg::Tamagawa => tamagawa_volume_max_compact(&spec)?,
    };
    let mut base = json!({
        "spec": spec,
        "normalization": result.normalization,
        "value": result.value,
    });
    if let Some(sqrt) = result.formal_sqrt {
        base["formal_sqrt"] = json!(sqrt);
        // an irrational factor cannot be folded into the canonical scalar
        let text = format!(
            "{} * sqrt({})^{}",
            result.value, sqrt.base, sqrt.exponent
        );
        if out.numeric {
            return Err(CliError::msg(
                "volume carries a formal sqrt factor; numeric evaluation is not supported here",
            ));
        }
        return Ok(CmdOutput::ok(text, base));
    }
    scalar_output(&result.value, base, out)
}

fn cmd_disc_norm(args: &SpecArgs) -> Result<CmdOutput, CliError> {
    let spec = args.build()?;
    let value = disc_norm(&spec)?;
    let text = value.to_string();
    let json = json!({ "spec": spec, "value": text });
    Ok(CmdOutput::ok(text, json))
}

fn cmd_steinberg(
    m: u32,
    e: u32,
    q: Option<u64>,
    out: &OutputOpts,
) -> Result<CmdOutput, CliError> {
    let q_scalar = match q {
        Some(v) => SymbolicScalar::from_rational(BigRational::from_integer(v.into())),
        None => SymbolicScalar::q(),
    };
    let degree = steinberg_degree(m, e, &q_scalar)?;
    let base = json!({
        "m": m,
        "e": e,
        "q": q,
        "value": degree.value,
        "normalization": degree.normalization,
        "constant_convention": degree.constant_convention,
    });
    scalar_output(&degree.value, base, out)
}

fn cmd_ratio(args: &SpecArgs, out: &OutputOpts) -> Result<CmdOutput, CliError> {
    let spec = args.build()?;
    let ratio = plancherel_ratio(&spec)?;
    let base = json!({
        "spec": spec,
        "ratio": ratio,
        "is_one": ratio.is_one(),
    });
    scalar_output(&ratio, base, out)
}

fn cmd_arch_degree(
    k: Option<u32>,
    target: TargetArg,
    character: &str,
    input: Option<&std::path::Path>,
    out: &OutputOpts,
) -> Result<CmdOutput, CliError> {
    let param: ArchTemperedParam = match input {
        Some(path) => read_arch_param(path)?,
        None => {
            let k = k.expect("clap enforces k xor input");
            let target = match target {
                TargetArg::Real => ArchTarget::RealGroup,
                TargetArg::Quaternionic => ArchTarget::QuaternionicGroup,
            };
            ArchTemperedParam::new(
                vec![ArchBlock::Ds2 {
                    k,
                    central_character: character.to_owned(),
                }],
                target,
            )?
        }
    };
    let degree: FormalDegree = arch_formal_degree(&param)?;
    let base = json!({ "param": param, "degree": degree });
    scalar_output(&degree.value, base, out)
}

fn cmd_jl_real(input: &std::path::Path) -> Result<CmdOutput, CliError> {
    let param = read_arch_param(input)?;
    let image = JlImage::from(jl_match_real(&param)?);
    let text = match &image {
        JlImage::Zero { .. } => "0".to_owned(),
        JlImage::Param(p) => serde_json::to_string(p).map_err(|e| CliError::msg(e.to_string()))?,
    };
    let json = json!({ "input": param, "image": image });
    Ok(CmdOutput::ok(text, json))
}

fn cmd_covolume(
    input: &std::path::Path,
    prime_cap: Option<u64>,
    out: &OutputOpts,
) -> Result<CmdOutput, CliError> {
    let expr: jlm_core::adelic::CovolumeExpr = read_json(input)?;
    let cap = prime_cap_setting(prime_cap)?;
    match covolume_s_arithmetic_capped(&expr, cap)? {
        CovolumeValue::Symbolic(value) => {
            let base = json!({ "kind": "symbolic", "value": value });
            scalar_output(&value, base, out)
        }
        CovolumeValue::Numeric(n) => {
            let digits = out.digits.clamp(1, 50);
            let decimal = n.decimal(digits);
            let json = json!({
                "kind": "numeric",
                "value_decimal": decimal,
                "error_bound": n.error_bound,
                "prime_cap": cap,
            });
            Ok(CmdOutput::ok(decimal, json))
        }
    }
}

fn cmd_check_eq(input: &std::path::Path) -> Result<CmdOutput, CliError> {
    let request: inputs::EqRequest = read_json(input)?;
    let verdict = covolume_equality_check(&request.left, &request.right, &request.setup)?;
    let (text, code) = match &verdict {
        Verdict::Equal => ("equal".to_owned(), EXIT_OK),
        Verdict::NotEqual { witness } => {
            (format!("not_equal (witness: {witness})"), EXIT_NOT_EQUAL)
        }
        Verdict::Inconclusive { reason } => {
            (format!("inconclusive ({reason})"), EXIT_INCONCLUSIVE)
        }
    };
    let json = serde_json::to_value(&verdict).map_err(|e| CliError::msg(e.to_string()))?;
    Ok(CmdOutput {
        text,
        json,
        csv: None,
        code,
    })
}

fn cmd_gamma_dim(
    covol: &str,
    degree: &str,
    k: Option<i64>,
    k_range: Option<&str>,
    out: &OutputOpts,
) -> Result<CmdOutput, CliError> {
    let dim_at = |k_value: Option<i64>| -> Result<SymbolicScalar, CliError> {
        let covolume = parse_scalar_with_k(covol, k_value)?;
        let deg_value = parse_scalar_with_k(degree, k_value)?;
        let lat = LatticeDatum {
            covolume,
            label: "cli".to_owned(),
            haar: None,
        };
        let deg = FormalDegree {
            value: deg_value,
            representation_tag: "cli".to_owned(),
            haar: None,
        };
        Ok(gamma_dimension(&lat, &deg)?)
    };

    if let Some(range) = k_range {
        let (lo, hi) = inputs::parse_range(range)?;
        let mut rows = Vec::new();
        let mut text_lines = Vec::new();
        let mut csv = String::from("k,gamma_dimension\n");
        for k_value in lo..=hi {
            let value = dim_at(Some(k_value))?;
            text_lines.push(format!("k = {k_value}: {value}"));
            csv.push_str(&format!("{k_value},{value}\n"));
            rows.push(json!({ "k": k_value, "value": value }));
        }
        let json = json!({ "covol": covol, "degree": degree, "rows": rows });
        return Ok(CmdOutput {
            text: text_lines.join("\n"),
            json,
            csv: Some(csv.trim_end().to_owned()),
            code: EXIT_OK,
        });
    }

    let value = dim_at(k)?;
    let base = json!({
        "covol": covol,
        "degree": degree,
        "k": k,
        "value": value,
    });
    scalar_output(&value, base, out)
}

fn cmd_gamma_density(
    t_grid: &str,
    sign_text: &str,
    covol: Option<&str>,
) -> Result<CmdOutput, CliError> {
    let sign = match sign_text {
        "+" | "plus" => Sign::Plus,
        "-" | "minus" => Sign::Minus,
        other => {
            return Err(CliError::msg(format!(
                "sign must be \"+\" or \"-\", got {other:?}"
            )))
        }
    };
    let grid: Vec<f64> = t_grid
        .split(',')
        .map(|part| {
            let t: f64 = part
                .trim()
                .parse()
                .map_err(|_| CliError::msg(format!("malformed grid entry {part:?}")))?;
            if !t.is_finite() || t <= 0.0 {
                return Err(CliError::msg(format!(
                    "grid entry {t} outside the domain t > 0"
                )));
            }
            Ok(t)
        })
        .collect::<Result<_, _>>()?;
    if grid.is_empty() {
        return Err(CliError::msg("empty t grid"));
    }

    let local = principal_series_density(sign);
    let density = match covol {
        Some(expr) => {
            let lat = LatticeDatum {
                covolume: parse_scalar(expr)?,
                label: "cli".to_owned(),
                haar: None,
            };
            gamma_density(&lat, &local)?
        }
        None => local,
    };
    let mut rows = Vec::new();
    let mut text_lines = Vec::new();
    let mut csv = String::from("t,density\n");
    for &t in &grid {
        let value = density.value.evaluate(t).ok_or_else(|| {
            CliError::msg("density coefficient is not a numeric constant")
        })?;
        text_lines.push(format!("t = {t}: {value}"));
        csv.push_str(&format!("{t},{value}\n"));
        rows.push(json!({ "t": t, "value": value }));
    }
    let json = json!({
        "sign": sign,
        "covol": covol,
        "reference_measure": density.reference_measure,
        "rows": rows,
    });
    Ok(CmdOutput {
        text: text_lines.join("\n"),
        json,
        csv: Some(csv.trim_end().to_owned()),
        code: EXIT_OK,
    })
}
