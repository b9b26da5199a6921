#ifndef HERMITE_DETREP_H
#define HERMITE_DETREP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HdStatus {
  HD_STATUS_OK = 0,
  /*
   A well-defined negative answer.
   */
  HD_STATUS_NEGATIVE = 1,
  HD_STATUS_INVALID_ARGUMENT = 2,
  HD_STATUS_PARSE_ERROR = 3,
  /*
   The numerics could not decide.
   */
  HD_STATUS_INDETERMINATE = 4,
  HD_STATUS_ERROR = 5,
} HdStatus;

/*
 A certificate `q²·H(p) = w·QᵀQ`, exact or floating point.
 */
typedef struct HdCertificate HdCertificate;

/*
 A polynomial with rational coefficients.
 */
typedef struct HdPolynomial HdPolynomial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread. The pointer stays valid
 until the next call on the same thread.
 */
const char *hd_last_error_message(void);

const char *hd_version(void);

/*
 # Safety
 `s` must be null or a string returned by this library.
 */
void hd_string_free(char *s);

/*
 # Safety
 `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HdStatus hd_polynomial_parse(const char *text, struct HdPolynomial **out);

/*
 # Safety
 `p` must be null or a handle from [`hd_polynomial_parse`].
 */
void hd_polynomial_free(struct HdPolynomial *p);

/*
 # Safety
 `p` must be a valid handle and `out` a valid pointer.
 */
enum HdStatus hd_polynomial_to_string(const struct HdPolynomial *p, char **out);

/*
 `H(p)` as JSON `{"d": d, "entries": [[...]]}`.

 # Safety
 `p` must be a valid handle and `out` a valid pointer.
 */
enum HdStatus hd_hermite_json(const struct HdPolynomial *p, char **out);

/*
 Real-zero test: exact for quadratics, `samples` random points otherwise.
 Returns `HD_STATUS_NEGATIVE` on a counterexample.

 # Safety
 `p` must be a valid handle.
 */
enum HdStatus hd_rz_check(const struct HdPolynomial *p, uint64_t seed, size_t samples);

/*
 Reads a certificate in the JSON file format for the variables of `p`.

 # Safety
 `json` must be a NUL-terminated string, `p` a valid handle and `out` a
 valid pointer.
 */
enum HdStatus hd_certificate_from_json(const char *json,
                                       const struct HdPolynomial *p,
                                       struct HdCertificate **out);

/*
 # Safety
 `c` must be a valid handle and `out` a valid pointer.
 */
enum HdStatus hd_certificate_to_json(const struct HdCertificate *c, char **out);

/*
 # Safety
 `c` must be null or a certificate handle from this library.
 */
void hd_certificate_free(struct HdCertificate *c);

/*
 `HD_STATUS_OK` when the certificate verifies, `HD_STATUS_NEGATIVE` otherwise.

 # Safety
 `p` and `c` must be valid handles.
 */
enum HdStatus hd_sos_verify(const struct HdPolynomial *p, const struct HdCertificate *c);

/*
 Closed-form certificate of a real-zero quadratic.

 # Safety
 `p` must be a valid handle and `out` a valid pointer.
 */
enum HdStatus hd_quadratic_sos(const struct HdPolynomial *p, struct HdCertificate **out);

/*
 SDP search for `H(p) = QᵀQ`. A positive `relax_11` lets the `(1,1)`
 entry grow up to that value. Returns `HD_STATUS_NEGATIVE` when the SDP
 is infeasible and `HD_STATUS_INDETERMINATE` when the solver cannot
 decide; `*out` is set only on success.

 # Safety
 `p` must be a valid handle and `out` a valid pointer.
 */
enum HdStatus hd_sos_find(const struct HdPolynomial *p,
                          double relax_11,
                          struct HdCertificate **out);

/*
 Closed-form pencil of a real-zero quadratic as JSON `{"k", "M"}`.

 # Safety
 `p` must be a valid handle and `out` a valid pointer.
 */
enum HdStatus hd_detrep_quadratic_json(const struct HdPolynomial *p, char **out);

/*
 Solves `MQ = QL_t` exactly. Writes the pencil JSON on success and
 returns `HD_STATUS_NEGATIVE` when the system is infeasible.

 # Safety
 `p` and `c` must be valid handles and `out` a valid pointer.
 */
enum HdStatus hd_detrep_extend_json(const struct HdPolynomial *p,
                                    const struct HdCertificate *c,
                                    char **out);

/*
 Rational representation as JSON `{"den", "num"}`, checked at `samples`
 random points; `HD_STATUS_NEGATIVE` if the check fails.

 # Safety
 `p` and `c` must be valid handles and `out` a valid pointer.
 */
enum HdStatus hd_ratrep_json(const struct HdPolynomial *p,
                             const struct HdCertificate *c,
                             uint64_t seed,
                             size_t samples,
                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HERMITE_DETREP_H */
