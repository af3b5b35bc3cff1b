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

// Empirical checks of the (C1, c1, gamma) concentration property and the
// helper quantities used with it (dilated constants, epsilon-net sizes,
// distribution of ||E||).

#include "pertbound/linalg.hpp"
#include "pertbound/noise.hpp"

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace pertbound {

/// Empirical P(|u^T E v| > t) for one fixed (u, v) over `trials` draws of E.
struct TailCurve {
  std::vector<double> t_grid;          // strictly increasing, >= 0
  std::vector<double> empirical_tail;  // exceed_counts / trials, non-increasing
  std::vector<std::size_t> exceed_counts;
  std::size_t trials = 0;
  Vector u;
  Vector v;
};

inline constexpr std::size_t kMinTailTrials = 1000;

/// One curve per (u, v) pair, all computed from the same draws of E:
/// trial i uses sample_noise(spec, m, n, derive_seed(seed, i)).
std::vector<TailCurve> tail_estimate(const NoiseSpec& spec, Index m, Index n,
                                     const std::vector<std::pair<Vector, Vector>>& pairs,
                                     const std::vector<double>& t_grid, std::size_t trials,
                                     std::uint64_t seed, unsigned threads = 1);

TailCurve tail_estimate(const NoiseSpec& spec, Index m, Index n, const Vector& u, const Vector& v,
                        const std::vector<double>& t_grid, std::size_t trials, std::uint64_t seed,
                        unsigned threads = 1);

/// Same as tail_estimate but for |u^T dilate(E) v| with u, v in R^(m+n).
TailCurve dilation_tail_estimate(const NoiseSpec& spec, Index m, Index n, const Vector& u,
                                 const Vector& v, const std::vector<double>& t_grid,
                                 std::size_t trials, std::uint64_t seed, unsigned threads = 1);

/// `random_pairs` uniformly random unit pairs followed by one flat pair
/// with entries +-1/sqrt(m), +-1/sqrt(n) under a random sign pattern.
std::vector<std::pair<Vector, Vector>> tail_test_pairs(Index m, Index n, std::size_t random_pairs,
                                                       std::uint64_t seed);

struct ConcentrationReport {
  bool holds = true;
  double worst_ratio = 0.0;           // max over t of empirical / theoretical
  std::vector<double> theoretical;    // C1 exp(-c1 t^gamma), per t
  std::vector<double> standard_error; // sqrt(p(1-p)/trials) at the empirical p
  std::vector<double> margins;        // theoretical + 3 se - empirical
};

/// holds iff empirical <= C1 exp(-c1 t^gamma) + 3 se at every t.
ConcentrationReport check_concentration(const TailCurve& curve, const ConcentrationParams& p);

/// Certificate of dilate(E): (2 C1, c1 / 2^gamma, gamma).
ConcentrationParams tilde_params(const ConcentrationParams& p);

/// Size bound (1 + 2/eps)^d of an eps-net of the unit sphere in R^d, and
/// its logarithm. Any eps > 0 is accepted.
long double net_size_bound(double eps, Index d);
double log_net_size_bound(double eps, Index d);

/// Sorted sample of ||E|| over `trials` draws (trials >= 50).
std::vector<double> norm_tail(const NoiseSpec& spec, Index m, Index n, std::size_t trials,
                              std::uint64_t seed, unsigned threads = 1);
inline std::vector<double> norm_tail(const NoiseSpec& spec, Index n, std::size_t trials,
                                     std::uint64_t seed, unsigned threads = 1) {
  return norm_tail(spec, n, n, trials, seed, threads);
}

/// Diagnostic only: least-squares fit of log tail = log C1 - c1 t^gamma at
/// fixed gamma over grid points with tail >= 10 / trials. Not a certificate.
struct ParamsFit {
  ConcentrationParams params;
  std::size_t points_used = 0;
  bool certified = false;
};
ParamsFit fit_params_diagnostic(const TailCurve& curve, double gamma);

/// CSV with header "t,empirical_tail,theoretical_tail,stderr".
void write_tail_csv(std::ostream& out, const TailCurve& curve, const ConcentrationParams& p);

/// Same columns for the norm sample: empirical P(||E|| > t) against
/// min(1, 9^(m+n) C1 exp(-c1 (t/2)^gamma)).
void write_norm_tail_csv(std::ostream& out, const std::vector<double>& sorted_norms,
                         const std::vector<double>& t_grid, const ConcentrationParams& p, Index m,
                         Index n);

}  // namespace pertbound
