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

// Exercises libpertbound through its C header only.

#include "pertbound/pertbound.h"

#include "bound_oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace {

struct MatrixHandle {
  pb_matrix* m = nullptr;
  ~MatrixHandle() { pb_matrix_destroy(m); }
};

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(pb_version()).size() > 0);
  CHECK(std::string(pb_status_string(PB_OK)) == "ok");
  CHECK(std::string(pb_status_string(PB_ERR_DOMAIN)).size() > 0);
}

TEST_CASE("matrices round trip") {
  const double data[6] = {1, 2, 3, 4, 5, 6};
  MatrixHandle a;
  REQUIRE(pb_matrix_create(2, 3, data, &a.m) == PB_OK);
  CHECK(pb_matrix_rows(a.m) == 2);
  CHECK(pb_matrix_cols(a.m) == 3);
  double x = 0;
  REQUIRE(pb_matrix_get(a.m, 1, 0, &x) == PB_OK);
  CHECK(x == 4);
  CHECK(pb_matrix_get(a.m, 2, 0, &x) == PB_ERR_INVALID_ARGUMENT);
  CHECK(std::string(pb_last_error()).size() > 0);

  double buf[6];
  REQUIRE(pb_matrix_copy(a.m, buf, 6) == PB_OK);
  for (int i = 0; i < 6; ++i) CHECK(buf[i] == data[i]);
  CHECK(pb_matrix_copy(a.m, buf, 5) == PB_ERR_INVALID_ARGUMENT);

  const auto path = std::filesystem::temp_directory_path() / "pertbound_capi_matrix.txt";
  REQUIRE(pb_matrix_write_file(a.m, path.string().c_str()) == PB_OK);
  MatrixHandle b;
  REQUIRE(pb_matrix_read_file(path.string().c_str(), &b.m) == PB_OK);
  double back[6];
  REQUIRE(pb_matrix_copy(b.m, back, 6) == PB_OK);
  for (int i = 0; i < 6; ++i) CHECK(back[i] == data[i]);
  MatrixHandle missing;
  CHECK(pb_matrix_read_file("/nonexistent/m.txt", &missing.m) != PB_OK);
  CHECK(missing.m == nullptr);

  CHECK(pb_matrix_create(0, 3, data, &missing.m) != PB_OK);
  CHECK(pb_matrix_create(2, 3, data, nullptr) == PB_ERR_INVALID_ARGUMENT);
  MatrixHandle zero;
  REQUIRE(pb_matrix_create(2, 3, nullptr, &zero.m) == PB_OK);
  REQUIRE(pb_matrix_copy(zero.m, buf, 6) == PB_OK);
  for (double z : buf) CHECK(z == 0.0);
  pb_matrix_destroy(nullptr);
}

TEST_CASE("svd, norms and angles") {
  const double data[4] = {3, 0, 0, -2};
  MatrixHandle a;
  REQUIRE(pb_matrix_create(2, 2, data, &a.m) == PB_OK);
  pb_svd* s = nullptr;
  REQUIRE(pb_svd_compute(a.m, &s) == PB_OK);
  REQUIRE(pb_svd_count(s) == 2);
  double sv[2];
  REQUIRE(pb_svd_singular_values(s, sv, 2) == PB_OK);
  CHECK(sv[0] == doctest::Approx(3).epsilon(1e-12));
  CHECK(sv[1] == doctest::Approx(2).epsilon(1e-12));
  MatrixHandle left;
  REQUIRE(pb_svd_left(s, &left.m) == PB_OK);
  CHECK(pb_matrix_rows(left.m) == 2);
  pb_svd_destroy(s);

  double norm = 0;
  REQUIRE(pb_spectral_norm(a.m, &norm) == PB_OK);
  CHECK(norm == doctest::Approx(3).epsilon(1e-12));

  MatrixHandle d;
  REQUIRE(pb_dilate(a.m, &d.m) == PB_OK);
  CHECK(pb_matrix_rows(d.m) == 4);

  const double u[2] = {1, 0}, v[2] = {1, 1};
  double sine = 0;
  REQUIRE(pb_vector_angle_sin(u, v, 2, &sine) == PB_OK);
  CHECK(sine == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  const double zero[2] = {0, 0};
  CHECK(pb_vector_angle_sin(zero, v, 2, &sine) == PB_ERR_DOMAIN);
}

TEST_CASE("noise and certificates") {
  MatrixHandle e;
  REQUIRE(pb_sample_noise("bernoulli", 1, 4, 5, 9, &e.m) == PB_OK);
  double buf[20];
  REQUIRE(pb_matrix_copy(e.m, buf, 20) == PB_OK);
  for (double x : buf) CHECK(std::abs(x) == 1.0);
  MatrixHandle bad;
  CHECK(pb_sample_noise("purple", 1, 4, 5, 9, &bad.m) == PB_ERR_INVALID_ARGUMENT);

  pb_params p{};
  REQUIRE(pb_concentration_params("bounded_symmetric", 2, &p) == PB_OK);
  CHECK(p.C1 == 2);
  CHECK(p.c1 == doctest::Approx(1.0 / 32).epsilon(1e-15));
  CHECK(p.gamma == 2);

  double b = 0;
  REQUIRE(pb_norm_bound(&p, 10, 20, 0.05, &b) == PB_OK);
  CHECK(b == doctest::Approx(oracle::norm_bound({p.C1, p.c1, p.gamma}, 10, 20, 0.05)).epsilon(1e-12));
}

TEST_CASE("bounds through the C API") {
  const pb_params p{2, 0.5, 2};
  const double sv[3] = {200, 192, 100};
  pb_bound b{};
  REQUIRE(pb_bound_evaluate("main_sine", &p, 40, 3, sv, 3, 1, 0, &b) == PB_OK);
  const oracle::Value want = oracle::main_sine({2, 0.5, 2}, 3, 3, 40, 200, 8);
  CHECK(b.raw_value == doctest::Approx(want.value).epsilon(1e-12));
  CHECK(oracle::prob_err(b.raw_prob, want.prob) <= 1e-12);
  CHECK(b.available == 1);

  CHECK(pb_bound_evaluate("no_such_bound", &p, 40, 3, sv, 3, 1, 0, &b) == PB_ERR_INVALID_ARGUMENT);
  CHECK(pb_bound_evaluate("main_sine", &p, -1, 3, sv, 3, 1, 0, &b) == PB_ERR_DOMAIN);

  double t_star = 0;
  REQUIRE(pb_optimize_t("singular_value_lower", &p, 40, sv, 3, 1, 0, 0.1, &t_star, &b) == PB_OK);
  CHECK(std::isfinite(t_star));
  CHECK(b.raw_prob >= 0.9);

  REQUIRE(pb_dk_wedin_bound(1, 8, &b) == PB_OK);
  CHECK(b.value == 0.25);
  REQUIRE(pb_dk_wedin_bound(40, 8, &b) == PB_OK);
  CHECK(b.clipped == 1);
  CHECK(b.value == 1.0);
  CHECK(b.raw_value == 10.0);
}

TEST_CASE("commands through the C API") {
  pb_command* c = nullptr;
  REQUIRE(pb_command_create("bounds", &c) == PB_OK);
  REQUIRE(pb_command_add_override(c, "kind=weyl") == PB_OK);
  REQUIRE(pb_command_add_override(c, "norm_E=5") == PB_OK);
  pb_result* r = nullptr;
  REQUIRE(pb_command_run(c, &r) == PB_OK);
  CHECK(pb_result_exit_code(r) == 0);
  const std::string out = pb_result_stdout(r);
  CHECK(out.find("\"value\": 5.0") != std::string::npos);
  pb_result_destroy(r);
  pb_command_destroy(c);

  REQUIRE(pb_command_create("frobnicate", &c) == PB_OK);
  REQUIRE(pb_command_run(c, &r) == PB_OK);
  CHECK(pb_result_exit_code(r) == 1);
  CHECK(std::string(pb_result_stderr(r)).find("unknown command") != std::string::npos);
  pb_result_destroy(r);
  CHECK(pb_command_set_threads(c, 0) == PB_ERR_INVALID_ARGUMENT);
  pb_command_destroy(c);

  CHECK(pb_command_create(nullptr, &c) == PB_ERR_INVALID_ARGUMENT);
}
