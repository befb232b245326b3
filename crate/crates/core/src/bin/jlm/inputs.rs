//! Input documents, expression parsing, and error plumbing for the CLI.

use jlm_core::adelic::{GlobalSetup, IndexedCovolume, DEFAULT_PRIME_CAP};
use jlm_core::plancherel::ArchTemperedParam;
use jlm_core::symexpr::{default_variables, parse_expression, SymbolicScalar};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Flat error used by the binary: everything renders as one stderr line.
/// Not `std::error::Error` itself so the blanket `From` below stays coherent.
pub struct CliError(String);

impl CliError {
    pub fn msg(m: impl Into<String>) -> Self {
        CliError(m.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

/// Reads a JSON document, reporting schema violations with a JSON-pointer
/// path ("/left/expr/disc_factor") rather than a bare serde message.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::msg(format!("{}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let mut pointer = String::new();
        for segment in e.path().iter() {
            use serde_path_to_error::Segment;
            pointer.push('/');
            match segment {
                Segment::Seq { index } => pointer.push_str(&index.to_string()),
                Segment::Map { key } => pointer.push_str(key),
                Segment::Enum { variant } => pointer.push_str(variant),
                Segment::Unknown => pointer.push('?'),
            }
        }
        if pointer.is_empty() {
            pointer.push('/');
        }
        CliError::msg(format!("{} at {pointer}: {}", path.display(), e.inner()))
    })
}

/// Reads and re-validates a tempered-parameter document; plain
/// deserialization would bypass the constructor checks.
pub fn read_arch_param(path: &Path) -> Result<ArchTemperedParam, CliError> {
    let raw: ArchTemperedParam = read_json(path)?;
    Ok(ArchTemperedParam::new(raw.blocks, raw.target)?)
}

/// Parses an expression over the built-in variables q and pi.
pub fn parse_scalar(text: &str) -> Result<SymbolicScalar, CliError> {
    Ok(parse_expression(text, &default_variables())?)
}

/// Same, with an integer value bound to the extra variable k.
pub fn parse_scalar_with_k(text: &str, k: Option<i64>) -> Result<SymbolicScalar, CliError> {
    let mut vars = default_variables();
    if let Some(k) = k {
        vars.insert("k".to_owned(), SymbolicScalar::from_int(k));
    }
    Ok(parse_expression(text, &vars)?)
}

/// Inclusive integer range written "A..B". Capped so a typo cannot request
/// a billion-row table.
pub fn parse_range(text: &str) -> Result<(i64, i64), CliError> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| CliError::msg(format!("range {text:?} is not of the form A..B")))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|_| CliError::msg(format!("malformed range start {lo:?}")))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|_| CliError::msg(format!("malformed range end {hi:?}")))?;
    if lo > hi {
        return Err(CliError::msg(format!("empty range {lo}..{hi}")));
    }
    if hi - lo >= 10_000 {
        return Err(CliError::msg("range spans more than 10000 values"));
    }
    Ok((lo, hi))
}

/// Resolves the Euler-tail sieve bound: explicit flag, then the
/// JLM_PRIME_CAP environment variable, then the library default. Range
/// validation happens inside the tail evaluator.
pub fn prime_cap_setting(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var("JLM_PRIME_CAP") {
        Ok(text) => text
            .parse()
            .map_err(|_| CliError::msg(format!("JLM_PRIME_CAP={text:?} is not an integer"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_PRIME_CAP),
        Err(e) => Err(CliError::msg(format!("JLM_PRIME_CAP: {e}"))),
    }
}

/// Request body of `check-covolume-eq`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqRequest {
    pub left: IndexedCovolume,
    pub right: IndexedCovolume,
    pub setup: GlobalSetup,
}

/// Request body of `verify-jl`: a global setup plus the local shape data
/// needed to run the density-ratio identity at every listed place.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JlVerifyRequest {
    pub setup: GlobalSetup,
    /// Global shape (n, d) of the pair of inner forms being compared.
    pub n: u32,
    pub d: u32,
    /// Division-algebra index at each ramified finite place, by label;
    /// places not listed are split (index 1).
    #[serde(default)]
    pub local_index: BTreeMap<String, u32>,
    /// Local discriminant norms by label, defaulting to 1.
    #[serde(default)]
    pub local_disc_norm: BTreeMap<String, u64>,
    /// Optional per-place measure factors whose product is reported and,
    /// when a declared product is present, checked against it.
    #[serde(default)]
    pub measure_factors: BTreeMap<String, SymbolicScalar>,
    #[serde(default)]
    pub declared_measure_product: Option<SymbolicScalar>,
}
