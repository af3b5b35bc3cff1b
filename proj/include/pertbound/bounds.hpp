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

// Closed-form perturbation bounds. Each evaluator returns the bound value
// together with the probability the corresponding theorem guarantees.
//
// Failure probabilities contain net counts 9^j and 9^(2r); they are
// evaluated in the log domain so large ranks do not overflow.

#include "pertbound/noise.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pertbound {

/// sigma_1 >= ... >= sigma_r > 0 and gaps delta_j = sigma_j - sigma_{j+1},
/// with delta_r = sigma_r. Indices below are 1-based.
class SpectrumProfile {
 public:
  explicit SpectrumProfile(std::vector<double> singular_values);

  Index rank() const { return static_cast<Index>(sigma_.size()); }
  double sigma(Index j) const;
  double gap(Index j) const;
  const std::vector<double>& singular_values() const { return sigma_; }
  const std::vector<double>& gaps() const { return gaps_; }

 private:
  std::vector<double> sigma_;
  std::vector<double> gaps_;
};

/// Where norm_E came from. The bounds hold with the measured ||E||; a
/// value from norm_bound_from_params costs its own failure probability.
enum class NormProvenance { Measured, ParamsBound };

struct PerturbInput {
  ConcentrationParams params;
  double norm_E = 0.0;
  NormProvenance provenance = NormProvenance::Measured;
  double t = 1.0;  // the theorems' free parameter, > 0
  Index r = 1;     // rank of A
  bool rigorous_constants = true;
};

void validate(const PerturbInput& inp);

struct BoundReport {
  std::string kind;
  bool available = true;
  double value = 0.0;       // clipped to the natural range
  double raw_value = 0.0;
  double prob_lower = 1.0;  // clipped to [0, 1]
  double raw_prob = 1.0;    // may be negative or -inf (vacuous)
  bool clipped = false;
  bool vacuous = false;
  std::vector<std::string> flags;
  std::vector<std::pair<std::string, double>> inputs;

  bool has_flag(std::string_view f) const;
};

/// coefficient * 9^nets * exp(-decay), computed as exp(log(...)).
double failure_term(double coefficient, double nets, double decay);

/// Weyl: max_i |sigma_i - sigma_i'| <= ||E||.
double weyl_bound(double norm_E);

/// sin(v1, v1') <= 2 ||E|| / delta, deterministic.
BoundReport dk_wedin_bound(double norm_E, double delta);

/// Classical corollary for ||E|| = (2 + o(1)) sqrt(n): singular value shift
/// (2 + eta) sqrt(n) and sine bound 2 (2 + eta) sqrt(n) / delta. The
/// probability is 1 - o(1), reported via the "asymptotic_probability" flag.
struct ClassicalCorollary {
  double sv_bound = 0.0;
  BoundReport sine;
};
ClassicalCorollary classical_corollary(double n, double eta, double delta);

/// sin(v1, v1') <= 4 sqrt(2) (t r^(1/gamma) / delta + ||E|| / sigma1 + ||E||^2 / (sigma1 delta))
/// w.p. 1 - 54 C1 exp(-c1 delta^gamma / 8^gamma) - 2 C1 9^(2r) exp(-c1 r t^gamma / 4^gamma).
BoundReport main_sine_bound(const PerturbInput& inp, double sigma1, double delta);

enum class PriorMode { Measured, Recursive };

/// j-th vector bound with the (sum_{i<j} sin^2)^(1/2) prior term; prior_sines
/// has length j - 1 (measured sines or earlier bound values).
BoundReport general_sine_bound(const PerturbInput& inp, Index j, double sigma_j, double delta_j,
                               const std::vector<double>& prior_sines,
                               PriorMode mode = PriorMode::Measured);

/// general_sine_bound for j = 1..count, feeding each clipped value into the
/// later priors. Probabilities are joint: the gap terms of all i <= j are
/// summed, the net term (the same event for every j) is counted once.
std::vector<BoundReport> general_sine_cascade(const PerturbInput& inp, const SpectrumProfile& profile,
                                              Index count);

/// sin(V_j, V_j') <= 4 sqrt(2j) (t r^(1/gamma)/delta_j + ||E||^2/(sigma_j delta_j) + ||E||/sigma_j).
BoundReport subspace_sine_bound(const PerturbInput& inp, Index j, double sigma_j, double delta_j);

/// Subspace spanned by v_j..v_l, 1 < j <= l <= r.
BoundReport two_interval_subspace_bound(const PerturbInput& inp, Index j, Index l, double sigma_jm1,
                                        double sigma_l, double delta_jm1, double delta_l);

/// Probabilistic Weyl bounds on sigma_j'. Without a measured sigma_j' the
/// upper expression uses sigma_j - t in its place ("substituted" flag)
/// and its probability also pays the lower bound's failure term.
struct SingularValueBounds {
  BoundReport lower;
  BoundReport upper;
};
SingularValueBounds singular_value_bounds(const PerturbInput& inp, Index j, double sigma_j,
                                          std::optional<double> measured_sigma_j_prime = std::nullopt);

/// sup_{i<=j} ||P v_i|| <= 2 ||E|| / sigma_j, P projecting off the signal
/// space of the dilation; w.p. 1 - 2 C1 9^j exp(-c1 sigma_j^gamma / 8^gamma).
BoundReport projection_lemma_bound(const PerturbInput& inp, Index j, double sigma_j);

/// sup_{i<=j} ||U_j^T v_i|| <= 4 (t r^(1/gamma)/delta_j + ||E||^2/(delta_j sigma_j)) w.p.
/// 1 - 4 C1 9^j exp(-c1 delta_j^gamma / 8^gamma) - 2 C1 9^(2r) exp(-c1 r t^gamma / 4^gamma).
BoundReport trailing_overlap_lemma_bound(const PerturbInput& inp, Index j, double sigma_j,
                                         double delta_j);

enum class BoundKind {
  MainSine,
  GeneralSine,         // uses prior_sines
  GeneralSineCascade,  // recursive priors, reports the j-th entry
  Subspace,
  TwoInterval,         // indices j..l
  SingularValueLower,
  SingularValueUpper,
  ProjectionLemma,
  TrailingOverlapLemma
};

std::string_view to_string(BoundKind kind);
BoundKind parse_bound_kind(std::string_view name);

/// A bound family with everything but t fixed.
struct BoundQuery {
  BoundKind kind = BoundKind::MainSine;
  PerturbInput input;
  std::vector<double> singular_values;  // spectrum of A
  Index j = 1;
  Index l = 1;
  std::vector<double> prior_sines;
};

BoundReport evaluate(const BoundQuery& q);

struct TGrid {
  double t_min = 1e-3;
  double t_max = 1e6;
  double factor = 1.05;
};

struct TOptimum {
  std::optional<double> t_star;
  BoundReport report;  // at t_star, or at t_max with available = false
};

/// Smallest grid t with raw_prob >= 1 - eps.
TOptimum optimize_t(const std::function<BoundReport(double)>& evaluate_at, double eps, TGrid grid = {});
TOptimum optimize_t(const BoundQuery& q, double eps, TGrid grid = {});

}  // namespace pertbound
