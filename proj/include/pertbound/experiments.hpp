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

// Monte Carlo harness. A is built once per experiment from the low-rank
// spec; trial i samples E from derive_seed(master_seed, i) and measures
// angles and singular value shifts of A + E against A.

#include "pertbound/bounds.hpp"
#include "pertbound/noise.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pertbound {

inline constexpr double kTheoremTol = 1e-8;

enum class VectorSide { Right, Left };

struct ExperimentConfig {
  LowRankSpec lowrank;
  NoiseSpec noise;
  std::size_t trials = 1;
  std::vector<Index> js{1};
  std::vector<Index> subspace_js;
  std::uint64_t master_seed = 0;
  VectorSide side = VectorSide::Right;
  unsigned threads = 1;
  double eps = 0.1;       // confidence target for optimize_t
  double eta = 0.1;       // slack of the classical corollary
  Index lemma_j = 1;      // index of the proof-lemma checks
  SvdMethod svd_method = SvdMethod::Auto;
};

/// Throws DomainError on trials == 0, indices outside [1, r], bad eps.
void validate(const ExperimentConfig& cfg);

/// Measured lemma quantities for one perturbed matrix, next to the lemma
/// bounds evaluated at the trial's ||E||.
struct LemmaChecks {
  double projection = 0.0;  // sup_{i<=j} ||P v_i||
  double overlap = 0.0;     // sup_{i<=j} ||U_j^T v_i||
  BoundReport projection_bound;
  BoundReport overlap_bound;
  bool projection_holds = true;
  bool overlap_holds = true;
};

/// v_i are the top eigenvectors [u_i'; v_i'] / sqrt(2) of dilate(A + E),
/// P projects off span{[u_k; 0], [0; v_k] : k <= r}, and U_j collects
/// [u_k; v_k] / sqrt(2) for j < k <= r and [u_k; -v_k] / sqrt(2) for
/// k <= r. `exact` has the r true triplets of A.
LemmaChecks proof_lemma_checks(const SvdResult& exact, const SvdResult& perturbed, Index j,
                               const PerturbInput& inp);

struct TrialResult {
  std::size_t trial_index = 0;
  bool ok = true;
  std::string error;
  double norm_E = 0.0;
  std::vector<double> sin_vj;          // per cfg.js
  std::vector<double> sin_subspace_j;  // per cfg.subspace_js
  std::vector<double> sv_shifts;       // |sigma_j - sigma_j'| per cfg.js
  std::vector<double> sigma_prime;     // sigma_j' per cfg.js
  double max_sv_shift = 0.0;           // over all min(m, n) values
  double dk_wedin_raw = 0.0;           // 2 ||E|| / delta_1
  bool weyl_ok = true;
  bool dk_wedin_ok = true;
  bool prob_weyl_lower_ok = true;      // sigma_j' >= sigma_j - t, j = cfg.js[0]
  bool prob_weyl_upper_ok = true;
  LemmaChecks lemma;
  std::vector<std::string> flags;
};

/// One step of an empirical CDF: fraction of samples <= value.
struct CdfPoint {
  double value;
  double cdf;
};

struct Cdf {
  std::string quantity;
  std::vector<CdfPoint> points;
};

/// Per-distinct-value steps of the empirical CDF of `samples`.
std::vector<CdfPoint> empirical_cdf(std::vector<double> samples);

/// Nearest-rank quantile x_(ceil(qN)) of the samples.
double quantile(std::vector<double> samples, double q);

struct ExperimentResult {
  LowRankMatrix a;
  std::vector<TrialResult> trials;  // sorted by trial_index
  std::vector<Cdf> cdfs;
  double t_lemma = 0.0;             // t used for the proof-lemma checks
  double t_weyl_lower = 0.0;        // t used for the probabilistic Weyl checks
  std::optional<double> t_weyl_upper;
};

/// Quantity names: "sin_v<j>", "sin_V<j>", "sv_shift_<j>", "norm_E".
ExperimentResult run_sine_experiment(const ExperimentConfig& cfg);

/// The samples of a named quantity over successful trials.
std::vector<double> quantity_samples(const ExperimentResult& res, const ExperimentConfig& cfg,
                                     const std::string& quantity);

struct WeylSummary {
  std::size_t trials = 0;
  std::size_t failed_trials = 0;
  std::size_t weyl_violations = 0;
  std::size_t dk_wedin_violations = 0;
  double max_shift_over_norm = 0.0;  // max_trial max_i |shift| / ||E||
  Index j = 1;
  double t_lower = 0.0;
  double lower_prob = 0.0;           // prob_lower of sigma_j' >= sigma_j - t
  std::size_t lower_violations = 0;
  std::optional<double> t_upper;
  double upper_prob = 0.0;
  std::size_t upper_violations = 0;
  std::size_t projection_lemma_holds = 0;
  std::size_t overlap_lemma_holds = 0;
  double projection_lemma_prob = 0.0;
  double overlap_lemma_prob = 0.0;
};

WeylSummary summarize_weyl(const ExperimentResult& res, const ExperimentConfig& cfg);
WeylSummary run_weyl_experiment(const ExperimentConfig& cfg);

struct ComparisonRow {
  std::string quantity;
  std::vector<double> empirical;            // per q level
  std::vector<BoundReport> classical;       // dk_wedin (sines), weyl (shifts), norm bound (norm_E)
  std::vector<BoundReport> corollary;       // sine rows only
  std::vector<TOptimum> new_bound;          // at optimize_t(eps = 1 - q); empty for norm_E
  std::vector<double> violation_rate;       // of new_bound over trials, NaN when unavailable
};

struct ComparisonTable {
  std::vector<double> q_levels{0.5, 0.9, 0.95};
  std::vector<ComparisonRow> rows;
};

/// Bounds use the empirical q-quantile of ||E|| as the measured norm.
ComparisonTable compare_bounds(const ExperimentResult& res, const ExperimentConfig& cfg);

/// Long CSV "quantity,value,empirical_cdf"; header only when there are no points.
void emit_cdf_csv(std::ostream& out, const std::vector<Cdf>& cdfs);
void emit_cdf_csv(const std::vector<Cdf>& cdfs, const std::filesystem::path& path);
std::vector<Cdf> read_cdf_csv(std::istream& in);

}  // namespace pertbound
