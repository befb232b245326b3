//! C ABI over jlm-core. Scalars are opaque heap handles; every fallible
//! call returns a status code and leaves a message for
//! `jlm_last_error_message` on failure. No panic crosses the boundary:
//! internal panics are caught and reported as `JLM_STATUS_INTERNAL`.

use jlm_core::localgeom::{volume_max_compact_mult, LocalAlgebraSpec, QValue};
use jlm_core::plancherel::{
    arch_formal_degree, plancherel_ratio, steinberg_degree, ArchBlock, ArchTarget,
    ArchTemperedParam, FormalDegree, Sign,
};
use jlm_core::symexpr::{default_variables, parse_expression, SymbolicScalar};
use jlm_core::vndensity::{gamma_dimension, ps_density, LatticeDatum};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JlmStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// An expression string did not parse.
    Parse = 3,
    /// Arguments violate a structural constraint (shape, domain, range).
    InvalidInput = 4,
    /// The operation is undefined for these values (division by zero,
    /// evaluation at a pole, precision limits).
    Arithmetic = 5,
    /// Internal failure; the library state is still consistent.
    Internal = 6,
}

/// Opaque exact scalar: a rational function of q times a power of pi.
pub struct JlmScalar {
    inner: SymbolicScalar,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl std::fmt::Display) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: JlmStatus, msg: impl std::fmt::Display) -> JlmStatus {
    set_last_error(msg);
    status
}

fn guarded(f: impl FnOnce() -> JlmStatus) -> JlmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(JlmStatus::Internal, "internal panic"),
    }
}

fn box_scalar(value: SymbolicScalar) -> *mut JlmScalar {
    Box::into_raw(Box::new(JlmScalar { inner: value }))
}

/// Message from the most recent failing call on this thread, empty until
/// the first failure. The pointer stays valid until the next failing call
/// on the same thread; copy the string if it must outlive that.
#[no_mangle]
pub extern "C" fn jlm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses an expression over the variables q and pi, e.g. "(1 - q^-2)" or
/// "pi/3".
///
/// # Safety
/// `text` must point to a NUL-terminated string and `out` to writable
/// memory. On `Ok`, `*out` owns a new scalar; release it with
/// `jlm_scalar_free`.
#[no_mangle]
pub unsafe extern "C" fn jlm_scalar_parse(
    text: *const c_char,
    out: *mut *mut JlmScalar,
) -> JlmStatus {
    guarded(|| {
        if text.is_null() || out.is_null() {
            return fail(JlmStatus::NullPointer, "null pointer argument");
        }
        let text = match CStr::from_ptr(text).to_str() {
            Ok(s) => s,
            Err(e) => return fail(JlmStatus::Utf8, e),
        };
        match parse_expression(text, &default_variables()) {
            Ok(value) => {
                *out = box_scalar(value);
                JlmStatus::Ok
            }
            Err(e) => fail(JlmStatus::Parse, e),
        }
    })
}

/// Releases a scalar returned by this library. NULL is a no-op.
///
/// # Safety
/// `scalar` must be NULL or a pointer obtained from this library that has
/// not been freed already.
#[no_mangle]
pub unsafe extern "C" fn jlm_scalar_free(scalar: *mut JlmScalar) {
    if !scalar.is_null() {
        drop(Box::from_raw(scalar));
    }
}

/// Canonical text form of a scalar; parseable by `jlm_scalar_parse`.
/// Returns NULL on NULL input. Release with `jlm_string_free`.
///
/// # Safety
/// `scalar` must be NULL or a live scalar handle.
#[no_mangle]
pub unsafe extern "C" fn jlm_scalar_to_string(scalar: *const JlmScalar) -> *mut c_char {
    let Some(scalar) = scalar.as_ref() else {
        return std::ptr::null_mut();
    };
    let text = scalar.inner.to_string().replace('\0', " ");
    CString::new(text)
        .map(CString::into_raw)
        .unwrap_or(std::ptr::null_mut())
}

/// Releases a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `text` must be NULL or a string obtained from this library that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn jlm_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

unsafe fn binary_op(
    a: *const JlmScalar,
    b: *const JlmScalar,
    out: *mut *mut JlmScalar,
    op: impl FnOnce(&SymbolicScalar, &SymbolicScalar) -> Result<SymbolicScalar, jlm_core::symexpr::SymError>,
) -> JlmStatus {
    let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else {
        return fail(JlmStatus::NullPointer, "null scalar argument");
    };
    if out.is_null() {
        return fail(JlmStatus::NullPointer, "null output pointer");
    }
    match op(&a.inner, &b.inner) {
        Ok(value) => {
            *out = box_scalar(value);
            JlmStatus::Ok
        }
        Err(e) => fail(JlmStatus::Arithmetic, e),
    }
}

/// `*out = a + b`.
///
/// # Safety
/// `a` and `b` must be live scalar handles and `out` writable. On `Ok`,
/// `*out` owns a new scalar.
#[no_mangle]
pub unsafe extern "C" fn jlm_scalar_add(
    a: *const JlmScalar,
    b: *const JlmScalar,
    out: *mut *mut JlmScalar,
) -> JlmStatus {
    guarded(|| binary_op(a, b, out, SymbolicScalar::try_add))
}

/// `*out = a * b`.
///
/// # Safety
/// Same contract as `jlm_scalar_add`.
#[no_mangle]
pub unsafe extern "C" fn jlm_scalar_mul(
    a: *const JlmScalar,
    b: *const JlmScalar,
    out: *mut *mut JlmScalar,
) -> JlmStatus {
    guarded(|| binary_op(a, b, out, SymbolicScalar::try_mul))
}

/// `*out = a / b`; division by the zero scalar is an arithmetic error.
///
/// # Safety
/// Same contract as `jlm_scalar_add`.
#[no_mangle]
pub unsafe extern "C" fn jlm_scalar_div(
    a: *const JlmScalar,
    b: *const JlmScalar,
    out: *mut *mut JlmScalar,
) -> JlmStatus {
    guarded(|| binary_op(a, b, out, SymbolicScalar::try_div))
}

/// Writes 1 into `*out` when the scalar is exactly 1.
///
/// # Safety
/// `scalar` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn jlm_scalar_is_one(
    scalar: *const JlmScalar,
    out: *mut bool,
) -> JlmStatus {
    guarded(|| {
        let Some(scalar) = scalar.as_ref() else {
            return fail(JlmStatus::NullPointer, "null scalar argument");
        };
        if out.is_null() {
            return fail(JlmStatus::NullPointer, "null output pointer");
        }
        *out = scalar.inner.is_one();
        JlmStatus::Ok
    })
}

/// Evaluates the scalar at `q = q_num/q_den` into a certified enclosure:
/// midpoint in `*out_value`, absolute error bound in `*out_error`.
/// `pi_digits` controls the pi precision (1..=50000).
///
/// # Safety
/// `scalar` must be a live handle, `out_value` and `out_error` writable.
#[no_mangle]
pub unsafe extern "C" fn jlm_scalar_evaluate(
    scalar: *const JlmScalar,
    q_num: i64,
    q_den: i64,
    pi_digits: u32,
    out_value: *mut f64,
    out_error: *mut f64,
) -> JlmStatus {
    guarded(|| {
        let Some(scalar) = scalar.as_ref() else {
            return fail(JlmStatus::NullPointer, "null scalar argument");
        };
        if out_value.is_null() || out_error.is_null() {
            return fail(JlmStatus::NullPointer, "null output pointer");
        }
        if q_den == 0 {
            return fail(JlmStatus::InvalidInput, "q denominator is zero");
        }
        let q = BigRational::new(BigInt::from(q_num), BigInt::from(q_den));
        match scalar.inner.evaluate_at(&q, pi_digits) {
            Ok(n) => {
                *out_value = n.to_f64();
                *out_error = n.error_bound;
                JlmStatus::Ok
            }
            Err(e) => fail(JlmStatus::Arithmetic, e),
        }
    })
}

fn build_spec(
    q: u64,
    disc: u64,
    n: u32,
    d: u32,
    n_v: u32,
    d_v: u32,
) -> Result<LocalAlgebraSpec, jlm_core::localgeom::LocalError> {
    let q = if q == 0 { QValue::Symbolic } else { QValue::Num(q) };
    LocalAlgebraSpec::new(q, disc, n, d, n_v, d_v)
}

/// Unit-group volume of a maximal compact in multiplicative normalization.
/// `q = 0` computes symbolically in q; `disc` is the local discriminant
/// norm; the shape must satisfy `n_v * d_v = n * d`.
///
/// # Safety
/// `out` must be writable. On `Ok`, `*out` owns a new scalar.
#[no_mangle]
pub unsafe extern "C" fn jlm_volume_mult(
    q: u64,
    disc: u64,
    n: u32,
    d: u32,
    n_v: u32,
    d_v: u32,
    out: *mut *mut JlmScalar,
) -> JlmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(JlmStatus::NullPointer, "null output pointer");
        }
        let spec = match build_spec(q, disc, n, d, n_v, d_v) {
            Ok(spec) => spec,
            Err(e) => return fail(JlmStatus::InvalidInput, e),
        };
        match volume_max_compact_mult(&spec) {
            Ok(result) => {
                if result.formal_sqrt.is_some() {
                    return fail(
                        JlmStatus::Arithmetic,
                        "volume carries a formal sqrt factor",
                    );
                }
                *out = box_scalar(result.value);
                JlmStatus::Ok
            }
            Err(e) => fail(JlmStatus::Arithmetic, e),
        }
    })
}

/// Formal degree of the Steinberg representation of `GL(m, D)` with
/// `ind(D) = e`, at `q` (`0` = symbolic).
///
/// # Safety
/// `out` must be writable. On `Ok`, `*out` owns a new scalar.
#[no_mangle]
pub unsafe extern "C" fn jlm_steinberg_degree(
    m: u32,
    e: u32,
    q: u64,
    out: *mut *mut JlmScalar,
) -> JlmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(JlmStatus::NullPointer, "null output pointer");
        }
        let q_scalar = if q == 0 {
            SymbolicScalar::q()
        } else {
            SymbolicScalar::from_rational(BigRational::from_integer(BigInt::from(q)))
        };
        match steinberg_degree(m, e, &q_scalar) {
            Ok(degree) => {
                *out = box_scalar(degree.value);
                JlmStatus::Ok
            }
            Err(e) => fail(JlmStatus::InvalidInput, e),
        }
    })
}

/// Plancherel density ratio across the correspondence for the given local
/// shape; the library guarantees the value 1 for every admissible shape.
/// `q = 0` computes symbolically.
///
/// # Safety
/// `out` must be writable. On `Ok`, `*out` owns a new scalar.
#[no_mangle]
pub unsafe extern "C" fn jlm_plancherel_ratio(
    q: u64,
    disc: u64,
    n: u32,
    d: u32,
    n_v: u32,
    d_v: u32,
    out: *mut *mut JlmScalar,
) -> JlmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(JlmStatus::NullPointer, "null output pointer");
        }
        let spec = match build_spec(q, disc, n, d, n_v, d_v) {
            Ok(spec) => spec,
            Err(e) => return fail(JlmStatus::InvalidInput, e),
        };
        match plancherel_ratio(&spec) {
            Ok(ratio) => {
                *out = box_scalar(ratio);
                JlmStatus::Ok
            }
            Err(e) => fail(JlmStatus::Arithmetic, e),
        }
    })
}

/// Formal degree `k/(2 pi^2)` of the weight-`k` archimedean block,
/// `k >= 1`.
///
/// # Safety
/// `out` must be writable. On `Ok`, `*out` owns a new scalar.
#[no_mangle]
pub unsafe extern "C" fn jlm_arch_degree(k: u32, out: *mut *mut JlmScalar) -> JlmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(JlmStatus::NullPointer, "null output pointer");
        }
        let param = match ArchTemperedParam::new(
            vec![ArchBlock::Ds2 {
                k,
                central_character: "triv".to_owned(),
            }],
            ArchTarget::RealGroup,
        ) {
            Ok(param) => param,
            Err(e) => return fail(JlmStatus::InvalidInput, e),
        };
        match arch_formal_degree(&param) {
            Ok(degree) => {
                *out = box_scalar(degree.value);
                JlmStatus::Ok
            }
            Err(e) => fail(JlmStatus::InvalidInput, e),
        }
    })
}

/// Product of a lattice covolume and a formal degree. The covolume must be
/// a positive constant (powers of pi allowed).
///
/// # Safety
/// `covolume` and `degree` must be live scalar handles and `out` writable.
/// On `Ok`, `*out` owns a new scalar.
#[no_mangle]
pub unsafe extern "C" fn jlm_gamma_dimension(
    covolume: *const JlmScalar,
    degree: *const JlmScalar,
    out: *mut *mut JlmScalar,
) -> JlmStatus {
    guarded(|| {
        let (Some(covolume), Some(degree)) = (covolume.as_ref(), degree.as_ref()) else {
            return fail(JlmStatus::NullPointer, "null scalar argument");
        };
        if out.is_null() {
            return fail(JlmStatus::NullPointer, "null output pointer");
        }
        let lattice = LatticeDatum {
            covolume: covolume.inner.clone(),
            label: "ffi".to_owned(),
            haar: None,
        };
        let formal = FormalDegree {
            value: degree.inner.clone(),
            representation_tag: "ffi".to_owned(),
            haar: None,
        };
        match gamma_dimension(&lattice, &formal) {
            Ok(value) => {
                *out = box_scalar(value);
                JlmStatus::Ok
            }
            Err(e) => fail(JlmStatus::InvalidInput, e),
        }
    })
}

/// Closed-form spectral density at `t > 0`: `t/(8 pi) * tanh(pi t/2)` when
/// `plus` is true, the `coth` variant otherwise.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jlm_ps_density(t: f64, plus: bool, out: *mut f64) -> JlmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(JlmStatus::NullPointer, "null output pointer");
        }
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        match ps_density(t, sign) {
            Ok(value) => {
                *out = value;
                JlmStatus::Ok
            }
            Err(e) => fail(JlmStatus::InvalidInput, e),
        }
    })
}
