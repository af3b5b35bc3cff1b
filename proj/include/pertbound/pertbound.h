// Copyright 2026 The pertbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface of libpertbound.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_destroy function (NULL is accepted). Every fallible call
 * returns a pb_status; on failure pb_last_error() describes the problem.
 * The message is thread-local and valid until the next failing call on
 * the same thread.
 */
#ifndef PERTBOUND_H
#define PERTBOUND_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PB_BUILDING_LIBRARY)
#    define PB_API __declspec(dllexport)
#  else
#    define PB_API __declspec(dllimport)
#  endif
#else
#  define PB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pb_status {
  PB_OK = 0,
  PB_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad size, unknown name */
  PB_ERR_DOMAIN = 2,           /* input outside an operation's domain */
  PB_ERR_CONVERGENCE = 3,      /* iterative solver hit its cap */
  PB_ERR_IO = 4,
  PB_ERR_INTERNAL = 5
} pb_status;

typedef struct pb_matrix pb_matrix;
typedef struct pb_svd pb_svd;
typedef struct pb_command pb_command;
typedef struct pb_result pb_result;

typedef struct pb_params {
  double C1;
  double c1;
  double gamma;
} pb_params;

typedef struct pb_bound {
  int available;
  double value;      /* clipped to the natural range */
  double raw_value;
  double prob_lower; /* clipped to [0, 1]; NaN when only asymptotic */
  double raw_prob;
  int clipped;
  int vacuous;
} pb_bound;

PB_API const char* pb_version(void);
PB_API const char* pb_last_error(void);
PB_API const char* pb_status_string(pb_status status);

/* Matrices. Data is passed row-major; NULL data gives a zero matrix. */
PB_API pb_status pb_matrix_create(size_t rows, size_t cols, const double* row_major, pb_matrix** out);
PB_API pb_status pb_matrix_read_file(const char* path, pb_matrix** out);
PB_API pb_status pb_matrix_write_file(const pb_matrix* m, const char* path);
PB_API void pb_matrix_destroy(pb_matrix* m);
PB_API size_t pb_matrix_rows(const pb_matrix* m);
PB_API size_t pb_matrix_cols(const pb_matrix* m);
PB_API pb_status pb_matrix_get(const pb_matrix* m, size_t i, size_t j, double* out);
/* Copies rows * cols entries, row-major, into buf of length len. */
PB_API pb_status pb_matrix_copy(const pb_matrix* m, double* buf, size_t len);

/* Linear algebra. */
PB_API pb_status pb_svd_compute(const pb_matrix* a, pb_svd** out);
PB_API void pb_svd_destroy(pb_svd* s);
PB_API size_t pb_svd_count(const pb_svd* s);
PB_API pb_status pb_svd_singular_values(const pb_svd* s, double* buf, size_t len);
PB_API pb_status pb_svd_left(const pb_svd* s, pb_matrix** out);
PB_API pb_status pb_svd_right(const pb_svd* s, pb_matrix** out);
PB_API pb_status pb_spectral_norm(const pb_matrix* m, double* out);
PB_API pb_status pb_dilate(const pb_matrix* a, pb_matrix** out);
PB_API pb_status pb_vector_angle_sin(const double* u, const double* v, size_t n, double* out);
/* Columns of u and v span the two subspaces. */
PB_API pb_status pb_subspace_angle_sin(const pb_matrix* u, const pb_matrix* v, double* out);

/* Noise models; kind is "zero", "bernoulli", "gaussian", "bounded_iid",
 * "bounded_symmetric" or "subexponential". */
PB_API pb_status pb_sample_noise(const char* kind, double K, size_t m, size_t n, uint64_t seed, pb_matrix** out);
PB_API pb_status pb_concentration_params(const char* kind, double K, pb_params* out);
PB_API pb_status pb_norm_bound(const pb_params* p, size_t m, size_t n, double eps, double* out);

/* Bounds. kind is one of "main_sine", "general_sine_cascade",
 * "subspace_sine", "two_interval_subspace", "singular_value_lower",
 * "singular_value_upper", "projection_lemma", "trailing_overlap_lemma".
 * singular_values has length r (descending); j and l are 1-based. */
PB_API pb_status pb_bound_evaluate(const char* kind, const pb_params* p, double norm_E, double t,
                                   const double* singular_values, size_t r, size_t j, size_t l, pb_bound* out);
/* Smallest grid t with raw_prob >= 1 - eps; *t_star is NaN if none. */
PB_API pb_status pb_optimize_t(const char* kind, const pb_params* p, double norm_E, const double* singular_values,
                               size_t r, size_t j, size_t l, double eps, double* t_star, pb_bound* out);
PB_API pb_status pb_dk_wedin_bound(double norm_E, double delta, pb_bound* out);

/* Commands: "simulate", "bounds", "concentration", "complete", "report". */
PB_API pb_status pb_command_create(const char* name, pb_command** out);
PB_API void pb_command_destroy(pb_command* c);
PB_API pb_status pb_command_set_config(pb_command* c, const char* path);
PB_API pb_status pb_command_set_seed(pb_command* c, uint64_t seed);
PB_API pb_status pb_command_set_threads(pb_command* c, unsigned threads);
PB_API pb_status pb_command_set_output(pb_command* c, const char* dir);
PB_API pb_status pb_command_set_ci(pb_command* c, int ci);
PB_API pb_status pb_command_add_override(pb_command* c, const char* assignment);
PB_API pb_status pb_command_add_input(pb_command* c, const char* path);
/* Runs the command; configuration problems are reported through the
 * result's exit code and stderr text, not the status. */
PB_API pb_status pb_command_run(const pb_command* c, pb_result** out);

PB_API void pb_result_destroy(pb_result* r);
PB_API int pb_result_exit_code(const pb_result* r);
PB_API const char* pb_result_stdout(const pb_result* r);
PB_API const char* pb_result_stderr(const pb_result* r);

#ifdef __cplusplus
}
#endif

#endif /* PERTBOUND_H */
