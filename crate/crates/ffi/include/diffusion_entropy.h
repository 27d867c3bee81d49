#ifndef DIFFUSION_ENTROPY_H
#define DIFFUSION_ENTROPY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible function.
 */
typedef enum DeStatus {
  DE_STATUS_OK = 0,
  DE_STATUS_NULL_POINTER = 1,
  DE_STATUS_INVALID_UTF8 = 2,
  DE_STATUS_CONFIG = 3,
  DE_STATUS_DOMAIN = 4,
  DE_STATUS_DIVERGENT = 5,
  DE_STATUS_NON_CONVERGENCE = 6,
  DE_STATUS_SUPPORT_MISMATCH = 7,
  DE_STATUS_UNSUPPORTED = 8,
  DE_STATUS_NOT_ERGODIC = 9,
  DE_STATUS_IO = 10,
  DE_STATUS_NUMERIC = 11,
  DE_STATUS_OUT_OF_RANGE = 12,
  DE_STATUS_PANIC = 13,
} DeStatus;

/*
 How a value was obtained.
 */
typedef enum DeMethod {
  DE_METHOD_CLOSED = 0,
  DE_METHOD_QUADRATURE = 1,
  DE_METHOD_FINITE_DIFFERENCE = 2,
} DeMethod;

/*
 Why a spectrum row has no value.
 */
typedef enum DeRowFlag {
  DE_ROW_FLAG_NONE = 0,
  DE_ROW_FLAG_DIVERGENT = 1,
  DE_ROW_FLAG_ERROR = 2,
} DeRowFlag;

/*
 Opaque model handle.
 */
typedef struct DeModel DeModel;

/*
 Opaque spectrum handle.
 */
typedef struct DeSpectrum DeSpectrum;

typedef struct DeMeasure {
  double value;
  double abs_err_est;
  enum DeMethod method;
} DeMeasure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Builds a model from a TOML configuration document.

 # Safety
 `toml` must be a valid nul-terminated string and `out` a valid pointer.
 */
enum DeStatus de_model_from_toml(const char *toml, struct DeModel **out);

/*
 Builds a model from a TOML configuration file.

 # Safety
 `path` must be a valid nul-terminated string and `out` a valid pointer.
 */
enum DeStatus de_model_from_file(const char *path, struct DeModel **out);

/*
 Builds a named family from parallel arrays of parameter names and
 values; unspecified parameters take their defaults.

 # Safety
 `family` must be a valid string, `names` and `values` arrays of length
 `n` (either may be null when `n` is 0), and `out` a valid pointer.
 */
enum DeStatus de_model_from_params(const char *family,
                                   const char *const *names,
                                   const double *values,
                                   size_t n,
                                   struct DeModel **out);

/*
 Releases a model. Null is ignored.

 # Safety
 `model` must come from a `de_model_*` constructor and not be used again.
 */
void de_model_free(struct DeModel *model);

/*
 Sets the relative quadrature tolerance used by later calls on `model`.

 # Safety
 `model` must be a live handle.
 */
enum DeStatus de_model_set_tolerance(struct DeModel *model, double rel);

/*
 `log f(x)` of the model's invariant density.

 # Safety
 `model` must be a live handle and `out` a valid pointer.
 */
enum DeStatus de_model_log_density(const struct DeModel *model, double x, double *out);

/*
 Rényi information of order `alpha` (`alpha = 1` gives the Shannon entropy).

 # Safety
 `model` must be a live handle and `out` a valid pointer.
 */
enum DeStatus de_model_renyi(const struct DeModel *model, double alpha, struct DeMeasure *out);

/*
 Shannon entropy.

 # Safety
 `model` must be a live handle and `out` a valid pointer.
 */
enum DeStatus de_model_shannon(const struct DeModel *model, struct DeMeasure *out);

/*
 Song measure `Var(log f(X))`.

 # Safety
 `model` must be a live handle and `out` a valid pointer.
 */
enum DeStatus de_model_song(const struct DeModel *model, struct DeMeasure *out);

/*
 Rényi divergence `D_α(f, g)` and power divergence `Ψ_α(f, g)`.
 Either output may be null.

 # Safety
 `f` and `g` must be live handles; non-null outputs must be valid.
 */
enum DeStatus de_divergence(const struct DeModel *f,
                            const struct DeModel *g,
                            double alpha,
                            double *renyi_out,
                            double *power_out);

/*
 Rényi spectrum at `n` strictly increasing orders plus the Shannon row.

 # Safety
 `model` must be a live handle, `alphas` an array of length `n` and
 `out` a valid pointer.
 */
enum DeStatus de_spectrum_compute(const struct DeModel *model,
                                  const double *alphas,
                                  size_t n,
                                  struct DeSpectrum **out);

/*
 Number of rows; 0 for null.

 # Safety
 `spectrum` must be null or a live handle.
 */
size_t de_spectrum_len(const struct DeSpectrum *spectrum);

/*
 Row `i`: its order, and either its value (`flag` = none) or the reason
 it has none, in which case `value` is NaN.

 # Safety
 `spectrum` must be a live handle and the outputs valid pointers.
 */
enum DeStatus de_spectrum_row(const struct DeSpectrum *spectrum,
                              size_t i,
                              double *alpha,
                              struct DeMeasure *value,
                              enum DeRowFlag *flag);

/*
 Releases a spectrum. Null is ignored.

 # Safety
 `spectrum` must come from `de_spectrum_compute` and not be used again.
 */
void de_spectrum_free(struct DeSpectrum *spectrum);

/*
 Message for the last failed call on this thread, or null if the last
 call succeeded. Valid until the next call on the same thread.
 */
const char *de_last_error_message(void);

/*
 Static name of a status code.
 */
const char *de_status_name(enum DeStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIFFUSION_ENTROPY_H */
