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

#include "pertbound/pertbound.h"

#include "pertbound/bounds.hpp"
#include "pertbound/commands.hpp"
#include "pertbound/linalg.hpp"
#include "pertbound/matrix_io.hpp"
#include "pertbound/noise.hpp"

#include <cmath>
#include <new>
#include <stdexcept>
#include <string>

struct pb_matrix {
  pertbound::Matrix m;
};

struct pb_svd {
  pertbound::SvdResult s;
};

struct pb_command {
  pertbound::CommandOptions opts;
};

struct pb_result {
  pertbound::CommandOutput out;
};

namespace {

thread_local std::string g_last_error;

pb_status fail(pb_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

// An unknown kind name is a bad argument rather than a domain problem.
struct BadName : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

template <class F>
auto by_name(F&& parse, const char* name) {
  try {
    return parse(name);
  } catch (const pertbound::DomainError& e) {
    throw BadName(e.what());
  }
}

pertbound::NoiseKind noise_kind(const char* name) {
  return by_name([](const char* n) { return pertbound::parse_noise_kind(n); }, name);
}

// Runs body, translating exceptions to status codes.
template <class F>
pb_status guarded(F&& body) {
  try {
    return body();
  } catch (const BadName& e) {
    return fail(PB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const pertbound::ConvergenceError& e) {
    return fail(PB_ERR_CONVERGENCE, e.what());
  } catch (const pertbound::DomainError& e) {
    return fail(PB_ERR_DOMAIN, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PB_ERR_INTERNAL, "out of memory");
  } catch (const std::ios_base::failure& e) {
    return fail(PB_ERR_IO, e.what());
  } catch (const std::runtime_error& e) {
    return fail(PB_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(PB_ERR_INTERNAL, e.what());
  }
}

#define PB_REQUIRE(cond, msg) \
  do {                        \
    if (!(cond)) return fail(PB_ERR_INVALID_ARGUMENT, msg); \
  } while (0)

void to_c(const pertbound::BoundReport& b, pb_bound* out) {
  out->available = b.available ? 1 : 0;
  out->value = b.value;
  out->raw_value = b.raw_value;
  out->prob_lower = b.prob_lower;
  out->raw_prob = b.raw_prob;
  out->clipped = b.clipped ? 1 : 0;
  out->vacuous = b.vacuous ? 1 : 0;
}

pertbound::BoundQuery make_query(const char* kind, const pb_params* p, double norm_E, double t,
                                 const double* sv, size_t r, size_t j, size_t l) {
  pertbound::BoundQuery q;
  q.kind = by_name([](const char* n) { return pertbound::parse_bound_kind(n); }, kind);
  if (q.kind == pertbound::BoundKind::GeneralSine) {
    throw pertbound::DomainError("general_sine needs prior sines; use general_sine_cascade");
  }
  q.input.params = {p->C1, p->c1, p->gamma};
  q.input.norm_E = norm_E;
  q.input.t = t;
  q.input.r = static_cast<pertbound::Index>(r);
  q.singular_values.assign(sv, sv + r);
  q.j = static_cast<pertbound::Index>(j);
  q.l = static_cast<pertbound::Index>(l);
  return q;
}

}  // namespace

extern "C" {

const char* pb_version(void) { return "1.0.0"; }

const char* pb_last_error(void) { return g_last_error.c_str(); }

const char* pb_status_string(pb_status status) {
  switch (status) {
    case PB_OK: return "ok";
    case PB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PB_ERR_DOMAIN: return "domain error";
    case PB_ERR_CONVERGENCE: return "convergence failure";
    case PB_ERR_IO: return "i/o error";
    case PB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

pb_status pb_matrix_create(size_t rows, size_t cols, const double* row_major, pb_matrix** out) {
  PB_REQUIRE(out, "out is null");
  PB_REQUIRE(rows > 0 && cols > 0, "dimensions must be positive");
  return guarded([&] {
    auto* h = new pb_matrix{pertbound::Matrix::Zero(static_cast<long>(rows), static_cast<long>(cols))};
    if (row_major) {
      for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < cols; ++j) h->m(static_cast<long>(i), static_cast<long>(j)) = row_major[i * cols + j];
      }
    }
    try {
      pertbound::require_finite(h->m, "pb_matrix_create");
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
    return PB_OK;
  });
}

pb_status pb_matrix_read_file(const char* path, pb_matrix** out) {
  PB_REQUIRE(path && out, "null argument");
  return guarded([&] {
    *out = new pb_matrix{pertbound::read_matrix_file(path)};
    return PB_OK;
  });
}

pb_status pb_matrix_write_file(const pb_matrix* m, const char* path) {
  PB_REQUIRE(m && path, "null argument");
  return guarded([&] {
    pertbound::write_matrix_file(path, m->m);
    return PB_OK;
  });
}

void pb_matrix_destroy(pb_matrix* m) { delete m; }

size_t pb_matrix_rows(const pb_matrix* m) { return m ? static_cast<size_t>(m->m.rows()) : 0; }

size_t pb_matrix_cols(const pb_matrix* m) { return m ? static_cast<size_t>(m->m.cols()) : 0; }

pb_status pb_matrix_get(const pb_matrix* m, size_t i, size_t j, double* out) {
  PB_REQUIRE(m && out, "null argument");
  PB_REQUIRE(i < pb_matrix_rows(m) && j < pb_matrix_cols(m), "index out of range");
  *out = m->m(static_cast<long>(i), static_cast<long>(j));
  return PB_OK;
}

pb_status pb_matrix_copy(const pb_matrix* m, double* buf, size_t len) {
  PB_REQUIRE(m && buf, "null argument");
  const size_t rows = pb_matrix_rows(m);
  const size_t cols = pb_matrix_cols(m);
  PB_REQUIRE(len >= rows * cols, "buffer too small");
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) buf[i * cols + j] = m->m(static_cast<long>(i), static_cast<long>(j));
  }
  return PB_OK;
}

pb_status pb_svd_compute(const pb_matrix* a, pb_svd** out) {
  PB_REQUIRE(a && out, "null argument");
  return guarded([&] {
    *out = new pb_svd{pertbound::svd(a->m)};
    return PB_OK;
  });
}

void pb_svd_destroy(pb_svd* s) { delete s; }

size_t pb_svd_count(const pb_svd* s) { return s ? static_cast<size_t>(s->s.singular_values.size()) : 0; }

pb_status pb_svd_singular_values(const pb_svd* s, double* buf, size_t len) {
  PB_REQUIRE(s && buf, "null argument");
  PB_REQUIRE(len >= pb_svd_count(s), "buffer too small");
  for (size_t i = 0; i < pb_svd_count(s); ++i) buf[i] = s->s.singular_values(static_cast<long>(i));
  return PB_OK;
}

pb_status pb_svd_left(const pb_svd* s, pb_matrix** out) {
  PB_REQUIRE(s && out, "null argument");
  return guarded([&] {
    *out = new pb_matrix{s->s.left};
    return PB_OK;
  });
}

pb_status pb_svd_right(const pb_svd* s, pb_matrix** out) {
  PB_REQUIRE(s && out, "null argument");
  return guarded([&] {
    *out = new pb_matrix{s->s.right};
    return PB_OK;
  });
}

pb_status pb_spectral_norm(const pb_matrix* m, double* out) {
  PB_REQUIRE(m && out, "null argument");
  return guarded([&] {
    *out = pertbound::spectral_norm(m->m);
    return PB_OK;
  });
}

pb_status pb_dilate(const pb_matrix* a, pb_matrix** out) {
  PB_REQUIRE(a && out, "null argument");
  return guarded([&] {
    *out = new pb_matrix{pertbound::dilate(a->m)};
    return PB_OK;
  });
}

pb_status pb_vector_angle_sin(const double* u, const double* v, size_t n, double* out) {
  PB_REQUIRE(u && v && out, "null argument");
  PB_REQUIRE(n > 0, "length must be positive");
  return guarded([&] {
    const auto len = static_cast<long>(n);
    *out = pertbound::vector_angle_sin(Eigen::Map<const pertbound::Vector>(u, len),
                                       Eigen::Map<const pertbound::Vector>(v, len));
    return PB_OK;
  });
}

pb_status pb_subspace_angle_sin(const pb_matrix* u, const pb_matrix* v, double* out) {
  PB_REQUIRE(u && v && out, "null argument");
  return guarded([&] {
    *out = pertbound::subspace_angle_sin(pertbound::orthonormalize(u->m), pertbound::orthonormalize(v->m));
    return PB_OK;
  });
}

pb_status pb_sample_noise(const char* kind, double K, size_t m, size_t n, uint64_t seed, pb_matrix** out) {
  PB_REQUIRE(kind && out, "null argument");
  PB_REQUIRE(m > 0 && n > 0, "dimensions must be positive");
  return guarded([&] {
    pertbound::NoiseSpec spec{noise_kind(kind), K, {}, {}};
    *out = new pb_matrix{pertbound::sample_noise(spec, static_cast<long>(m), static_cast<long>(n), seed)};
    return PB_OK;
  });
}

pb_status pb_concentration_params(const char* kind, double K, pb_params* out) {
  PB_REQUIRE(kind && out, "null argument");
  return guarded([&] {
    const auto p = pertbound::concentration_params({noise_kind(kind), K, {}, {}});
    *out = {p.C1, p.c1, p.gamma};
    return PB_OK;
  });
}

pb_status pb_norm_bound(const pb_params* p, size_t m, size_t n, double eps, double* out) {
  PB_REQUIRE(p && out, "null argument");
  return guarded([&] {
    *out = pertbound::norm_bound_from_params({p->C1, p->c1, p->gamma}, static_cast<long>(m), static_cast<long>(n), eps);
    return PB_OK;
  });
}

pb_status pb_bound_evaluate(const char* kind, const pb_params* p, double norm_E, double t,
                            const double* singular_values, size_t r, size_t j, size_t l, pb_bound* out) {
  PB_REQUIRE(kind && p && singular_values && out, "null argument");
  PB_REQUIRE(r > 0, "r must be positive");
  return guarded([&] {
    to_c(pertbound::evaluate(make_query(kind, p, norm_E, t, singular_values, r, j, l)), out);
    return PB_OK;
  });
}

pb_status pb_optimize_t(const char* kind, const pb_params* p, double norm_E, const double* singular_values,
                        size_t r, size_t j, size_t l, double eps, double* t_star, pb_bound* out) {
  PB_REQUIRE(kind && p && singular_values && t_star && out, "null argument");
  PB_REQUIRE(r > 0, "r must be positive");
  return guarded([&] {
    const auto opt = pertbound::optimize_t(make_query(kind, p, norm_E, 1.0, singular_values, r, j, l), eps);
    *t_star = opt.t_star.value_or(NAN);
    to_c(opt.report, out);
    return PB_OK;
  });
}

pb_status pb_dk_wedin_bound(double norm_E, double delta, pb_bound* out) {
  PB_REQUIRE(out, "null argument");
  return guarded([&] {
    to_c(pertbound::dk_wedin_bound(norm_E, delta), out);
    return PB_OK;
  });
}

pb_status pb_command_create(const char* name, pb_command** out) {
  PB_REQUIRE(name && out, "null argument");
  return guarded([&] {
    auto* c = new pb_command{};
    c->opts.command = name;
    *out = c;
    return PB_OK;
  });
}

void pb_command_destroy(pb_command* c) { delete c; }

pb_status pb_command_set_config(pb_command* c, const char* path) {
  PB_REQUIRE(c && path, "null argument");
  c->opts.config_path = path;
  return PB_OK;
}

pb_status pb_command_set_seed(pb_command* c, uint64_t seed) {
  PB_REQUIRE(c, "null argument");
  c->opts.seed = seed;
  return PB_OK;
}

pb_status pb_command_set_threads(pb_command* c, unsigned threads) {
  PB_REQUIRE(c, "null argument");
  PB_REQUIRE(threads > 0, "threads must be >= 1");
  c->opts.threads = threads;
  return PB_OK;
}

pb_status pb_command_set_output(pb_command* c, const char* dir) {
  PB_REQUIRE(c && dir, "null argument");
  c->opts.output_dir = dir;
  return PB_OK;
}

pb_status pb_command_set_ci(pb_command* c, int ci) {
  PB_REQUIRE(c, "null argument");
  c->opts.ci = ci != 0;
  return PB_OK;
}

pb_status pb_command_add_override(pb_command* c, const char* assignment) {
  PB_REQUIRE(c && assignment, "null argument");
  return guarded([&] {
    c->opts.overrides.emplace_back(assignment);
    return PB_OK;
  });
}

pb_status pb_command_add_input(pb_command* c, const char* path) {
  PB_REQUIRE(c && path, "null argument");
  return guarded([&] {
    c->opts.inputs.emplace_back(path);
    return PB_OK;
  });
}

pb_status pb_command_run(const pb_command* c, pb_result** out) {
  PB_REQUIRE(c && out, "null argument");
  return guarded([&] {
    *out = new pb_result{pertbound::run_command(c->opts)};
    return PB_OK;
  });
}

void pb_result_destroy(pb_result* r) { delete r; }

int pb_result_exit_code(const pb_result* r) { return r ? r->out.exit_code : pertbound::kExitConfigError; }

const char* pb_result_stdout(const pb_result* r) { return r ? r->out.out.c_str() : ""; }

const char* pb_result_stderr(const pb_result* r) { return r ? r->out.err.c_str() : ""; }

}  // extern "C"
