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

#pragma once

// Rank-1 completion instance: A = 5 u v^T with flat sign vectors in R^50,
// p = 0.9, Uniform[-0.1, 0.1] noise, j = 1. Shared by the unit test and
// its calibration run.

#include "pertbound/completion.hpp"

#include "support.hpp"

namespace rank1fixture {

inline constexpr int kSeeds = 100;
inline constexpr pertbound::Index kN = 50;
inline constexpr double kP = 0.9;
inline constexpr double kK = 0.1;

inline double error_rel(int s) {
  using namespace pertbound;
  testsupport::Gen g(1000 + s);
  Vector u(kN), v(kN);
  const double h = 1 / std::sqrt(double(kN));
  for (Index i = 0; i < kN; ++i) {
    u(i) = g.uniform(0, 1) < 0.5 ? h : -h;
    v(i) = g.uniform(0, 1) < 0.5 ? h : -h;
  }
  const Matrix a = 5.0 * u * v.transpose();
  ObservedMatrix obs;
  obs.values = Matrix::Zero(kN, kN);
  Mask mask(kN, kN);
  for (Index j = 0; j < kN; ++j) {
    for (Index i = 0; i < kN; ++i) {
      mask(i, j) = g.uniform(0, 1) < kP;
      const double z = g.uniform(-kK, kK);
      if (mask(i, j)) obs.values(i, j) = a(i, j) + z;
    }
  }
  obs.mask = mask;
  obs.p_nominal = kP;
  const Index col = 1 + s % kN;
  return *recovery_error(a, recover_column(obs, kP, 1, col)).error_rel;
}

}  // namespace rank1fixture
