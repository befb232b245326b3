/* C interface to jlm-core: exact unit-group volumes, formal degrees, density ratios. */

#ifndef JLM_H
#define JLM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum JlmStatus {
  // Success.
  JlmStatus_Ok = 0,
  // A required pointer argument was NULL.
  JlmStatus_NullPointer = 1,
  // A string argument was not valid UTF-8.
  JlmStatus_Utf8 = 2,
  // An expression string did not parse.
  JlmStatus_Parse = 3,
  // Arguments violate a structural constraint (shape, domain, range).
  JlmStatus_InvalidInput = 4,
  // The operation is undefined for these values (division by zero,
  // evaluation at a pole, precision limits).
  JlmStatus_Arithmetic = 5,
  // Internal failure; the library state is still consistent.
  JlmStatus_Internal = 6,
} JlmStatus;

// Opaque exact scalar: a rational function of q times a power of pi.
typedef struct JlmScalar JlmScalar;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message from the most recent failing call on this thread, empty until
// the first failure. The pointer stays valid until the next failing call
// on the same thread; copy the string if it must outlive that.
const char *jlm_last_error_message(void);

// Parses an expression over the variables q and pi, e.g. "(1 - q^-2)" or
// "pi/3".
//
// # Safety
// `text` must point to a NUL-terminated string and `out` to writable
// memory. On `Ok`, `*out` owns a new scalar; release it with
// `jlm_scalar_free`.
enum JlmStatus jlm_scalar_parse(const char *text, struct JlmScalar **out);

// Releases a scalar returned by this library. NULL is a no-op.
//
// # Safety
// `scalar` must be NULL or a pointer obtained from this library that has
// not been freed already.
void jlm_scalar_free(struct JlmScalar *scalar);

// Canonical text form of a scalar; parseable by `jlm_scalar_parse`.
// Returns NULL on NULL input. Release with `jlm_string_free`.
//
// # Safety
// `scalar` must be NULL or a live scalar handle.
char *jlm_scalar_to_string(const struct JlmScalar *scalar);

// Releases a string returned by this library. NULL is a no-op.
//
// # Safety
// `text` must be NULL or a string obtained from this library that has not
// been freed already.
void jlm_string_free(char *text);

// `*out = a + b`.
//
// # Safety
// `a` and `b` must be live scalar handles and `out` writable. On `Ok`,
// `*out` owns a new scalar.
enum JlmStatus jlm_scalar_add(const struct JlmScalar *a,
                              const struct JlmScalar *b,
                              struct JlmScalar **out);

// `*out = a * b`.
//
// # Safety
// Same contract as `jlm_scalar_add`.
enum JlmStatus jlm_scalar_mul(const struct JlmScalar *a,
                              const struct JlmScalar *b,
                              struct JlmScalar **out);

// `*out = a / b`; division by the zero scalar is an arithmetic error.
//
// # Safety
// Same contract as `jlm_scalar_add`.
enum JlmStatus jlm_scalar_div(const struct JlmScalar *a,
                              const struct JlmScalar *b,
                              struct JlmScalar **out);

// Writes 1 into `*out` when the scalar is exactly 1.
//
// # Safety
// `scalar` must be a live handle and `out` writable.
enum JlmStatus jlm_scalar_is_one(const struct JlmScalar *scalar, bool *out);

// Evaluates the scalar at `q = q_num/q_den` into a certified enclosure:
// midpoint in `*out_value`, absolute error bound in `*out_error`.
// `pi_digits` controls the pi precision (1..=50000).
//
// # Safety
// `scalar` must be a live handle, `out_value` and `out_error` writable.
enum JlmStatus jlm_scalar_evaluate(const struct JlmScalar *scalar,
                                   int64_t q_num,
                                   int64_t q_den,
                                   uint32_t pi_digits,
                                   double *out_value,
                                   double *out_error);

// Unit-group volume of a maximal compact in multiplicative normalization.
// `q = 0` computes symbolically in q; `disc` is the local discriminant
// norm; the shape must satisfy `n_v * d_v = n * d`.
//
// # Safety
// `out` must be writable. On `Ok`, `*out` owns a new scalar.
enum JlmStatus jlm_volume_mult(uint64_t q,
                               uint64_t disc,
                               uint32_t n,
                               uint32_t d,
                               uint32_t n_v,
                               uint32_t d_v,
                               struct JlmScalar **out);

// Formal degree of the Steinberg representation of `GL(m, D)` with
// `ind(D) = e`, at `q` (`0` = symbolic).
//
// # Safety
// `out` must be writable. On `Ok`, `*out` owns a new scalar.
enum JlmStatus jlm_steinberg_degree(uint32_t m, uint32_t e, uint64_t q, struct JlmScalar **out);

// Plancherel density ratio across the correspondence for the given local
// shape; the library guarantees the value 1 for every admissible shape.
// `q = 0` computes symbolically.
//
// # Safety
// `out` must be writable. On `Ok`, `*out` owns a new scalar.
enum JlmStatus jlm_plancherel_ratio(uint64_t q,
                                    uint64_t disc,
                                    uint32_t n,
                                    uint32_t d,
                                    uint32_t n_v,
                                    uint32_t d_v,
                                    struct JlmScalar **out);

// Formal degree `k/(2 pi^2)` of the weight-`k` archimedean block,
// `k >= 1`.
//
// # Safety
// `out` must be writable. On `Ok`, `*out` owns a new scalar.
enum JlmStatus jlm_arch_degree(uint32_t k, struct JlmScalar **out);

// Product of a lattice covolume and a formal degree. The covolume must be
// a positive constant (powers of pi allowed).
//
// # Safety
// `covolume` and `degree` must be live scalar handles and `out` writable.
// On `Ok`, `*out` owns a new scalar.
enum JlmStatus jlm_gamma_dimension(const struct JlmScalar *covolume,
                                   const struct JlmScalar *degree,
                                   struct JlmScalar **out);

// Closed-form spectral density at `t > 0`: `t/(8 pi) * tanh(pi t/2)` when
// `plus` is true, the `coth` variant otherwise.
//
// # Safety
// `out` must be writable.
enum JlmStatus jlm_ps_density(double t, bool plus, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JLM_H */
