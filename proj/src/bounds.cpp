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

#include "pertbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pertbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double x, const char* what) {
  if (!std::isfinite(x) || !(x > 0)) throw DomainError(std::string(what) + " must be a positive finite number");
}

double rpow(const PerturbInput& inp) { return std::pow(static_cast<double>(inp.r), 1.0 / inp.params.gamma); }

// The shared net term 2 C1 9^(2r) exp(-c1 r t^gamma / 4^gamma), times `scale`.
double net_term(const PerturbInput& inp, double scale = 1.0) {
  const auto& p = inp.params;
  const double r = static_cast<double>(inp.r);
  return failure_term(2.0 * scale * p.C1, 2.0 * r, p.c1 * r * std::pow(inp.t / 4.0, p.gamma));
}

// coef C1 9^nets exp(-c1 (x/8)^gamma)
double gap_term(const PerturbInput& inp, double coef, double nets, double x) {
  const auto& p = inp.params;
  return failure_term(coef * p.C1, nets, p.c1 * std::pow(x / 8.0, p.gamma));
}

BoundReport start(std::string kind, const PerturbInput& inp) {
  validate(inp);
  BoundReport b;
  b.kind = std::move(kind);
  b.inputs = {{"C1", inp.params.C1}, {"c1", inp.params.c1},    {"gamma", inp.params.gamma},
              {"norm_E", inp.norm_E}, {"t", inp.t},            {"r", static_cast<double>(inp.r)}};
  if (!inp.rigorous_constants) b.flags.emplace_back("non_rigorous_constants");
  if (inp.provenance == NormProvenance::ParamsBound) b.flags.emplace_back("norm_E_from_params_bound");
  return b;
}

// Fills value / prob_lower from the raw fields. upper_cap is the top of
// the quantity's natural range.
void finish(BoundReport& b, double upper_cap) {
  b.value = std::clamp(b.raw_value, 0.0, upper_cap);
  if (b.value != b.raw_value) {
    b.clipped = true;
    b.flags.emplace_back("clipped");
  }
  if (std::isnan(b.raw_prob)) {
    b.prob_lower = NAN;
    return;
  }
  b.prob_lower = std::clamp(b.raw_prob, 0.0, 1.0);
  if (!(b.raw_prob > 0)) {
    b.vacuous = true;
    b.flags.emplace_back("vacuous");
  }
}

void require_index(Index j, Index r, const char* what) {
  if (j < 1 || j > r) throw DomainError(std::string(what) + ": index j must satisfy 1 <= j <= r");
}

}  // namespace

SpectrumProfile::SpectrumProfile(std::vector<double> singular_values) : sigma_(std::move(singular_values)) {
  if (sigma_.empty()) throw DomainError("spectrum: at least one singular value required");
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    if (!std::isfinite(sigma_[i]) || sigma_[i] <= 0) throw DomainError("spectrum: singular values must be positive");
    if (i > 0 && sigma_[i] > sigma_[i - 1]) throw DomainError("spectrum: singular values must be descending");
  }
  gaps_ = spectral_gaps(sigma_);
}

double SpectrumProfile::sigma(Index j) const {
  require_index(j, rank(), "spectrum");
  return sigma_[static_cast<std::size_t>(j - 1)];
}

double SpectrumProfile::gap(Index j) const {
  require_index(j, rank(), "spectrum");
  return gaps_[static_cast<std::size_t>(j - 1)];
}

void validate(const PerturbInput& inp) {
  validate(inp.params);
  if (!std::isfinite(inp.norm_E) || inp.norm_E < 0) throw DomainError("norm_E must be finite and >= 0");
  require_positive(inp.t, "t");
  if (inp.r < 1) throw DomainError("r must be >= 1");
}

bool BoundReport::has_flag(std::string_view f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

double failure_term(double coefficient, double nets, double decay) {
  if (coefficient == 0) return 0.0;
  const double log_term = std::log(coefficient) + nets * std::log(9.0) - decay;
  return std::exp(log_term);
}

double weyl_bound(double norm_E) {
  if (!std::isfinite(norm_E) || norm_E < 0) throw DomainError("norm_E must be finite and >= 0");
  return norm_E;
}

BoundReport dk_wedin_bound(double norm_E, double delta) {
  if (!std::isfinite(norm_E) || norm_E < 0) throw DomainError("norm_E must be finite and >= 0");
  require_positive(delta, "delta");
  BoundReport b;
  b.kind = "dk_wedin";
  b.inputs = {{"norm_E", norm_E}, {"delta", delta}};
  b.flags.emplace_back("deterministic");
  b.raw_value = 2.0 * norm_E / delta;
  b.raw_prob = 1.0;
  finish(b, 1.0);
  return b;
}

ClassicalCorollary classical_corollary(double n, double eta, double delta) {
  if (!std::isfinite(n) || n < 0) throw DomainError("n must be finite and >= 0");
  require_positive(eta, "eta");
  require_positive(delta, "delta");
  ClassicalCorollary c;
  c.sv_bound = (2.0 + eta) * std::sqrt(n);
  BoundReport& b = c.sine;
  b.kind = "classical_corollary";
  b.inputs = {{"n", n}, {"eta", eta}, {"delta", delta}};
  b.flags.emplace_back("asymptotic_probability");
  b.raw_value = 2.0 * c.sv_bound / delta;
  b.raw_prob = NAN;
  finish(b, 1.0);
  return c;
}

BoundReport main_sine_bound(const PerturbInput& inp, double sigma1, double delta) {
  require_positive(sigma1, "sigma1");
  require_positive(delta, "delta");
  BoundReport b = start("main_sine", inp);
  b.inputs.emplace_back("sigma1", sigma1);
  b.inputs.emplace_back("delta", delta);
  const double e = inp.norm_E;
  b.raw_value = 4.0 * std::numbers::sqrt2 * (inp.t * rpow(inp) / delta + e / sigma1 + e * e / (sigma1 * delta));
  b.raw_prob = 1.0 - gap_term(inp, 54.0, 0.0, delta) - net_term(inp);
  finish(b, 1.0);
  return b;
}

BoundReport general_sine_bound(const PerturbInput& inp, Index j, double sigma_j, double delta_j,
                               const std::vector<double>& prior_sines, PriorMode mode) {
  require_index(j, inp.r, "general_sine_bound");
  require_positive(sigma_j, "sigma_j");
  require_positive(delta_j, "delta_j");
  if (static_cast<Index>(prior_sines.size()) != j - 1) {
    throw DomainError("general_sine_bound: prior_sines must have length j - 1");
  }
  double prior_sq = 0.0;
  for (double s : prior_sines) {
    if (!std::isfinite(s) || s < 0) throw DomainError("general_sine_bound: prior sines must be finite and >= 0");
    prior_sq += s * s;
  }
  BoundReport b = start("general_sine", inp);
  b.inputs.emplace_back("j", static_cast<double>(j));
  b.inputs.emplace_back("sigma_j", sigma_j);
  b.inputs.emplace_back("delta_j", delta_j);
  b.inputs.emplace_back("prior_sum_sq", prior_sq);
  b.flags.emplace_back(mode == PriorMode::Measured ? "priors_measured" : "priors_recursive");
  const double e = inp.norm_E;
  b.raw_value = 4.0 * std::numbers::sqrt2 *
                (std::sqrt(prior_sq) + inp.t * rpow(inp) / delta_j + e * e / (sigma_j * delta_j) + e / sigma_j);
  b.raw_prob = 1.0 - gap_term(inp, 6.0, static_cast<double>(j), delta_j) - net_term(inp);
  finish(b, 1.0);
  return b;
}

std::vector<BoundReport> general_sine_cascade(const PerturbInput& inp, const SpectrumProfile& profile,
                                              Index count) {
  if (count < 1 || count > profile.rank()) throw DomainError("general_sine_cascade: count must lie in [1, r]");
  std::vector<BoundReport> out;
  std::vector<double> priors;
  double gap_sum = 0.0;
  for (Index j = 1; j <= count; ++j) {
    BoundReport b = general_sine_bound(inp, j, profile.sigma(j), profile.gap(j), priors, PriorMode::Recursive);
    gap_sum += gap_term(inp, 6.0, static_cast<double>(j), profile.gap(j));
    b.raw_prob = 1.0 - gap_sum - net_term(inp);
    b.flags.erase(std::remove(b.flags.begin(), b.flags.end(), "vacuous"), b.flags.end());
    b.vacuous = false;
    b.flags.emplace_back("joint_probability");
    b.prob_lower = std::clamp(b.raw_prob, 0.0, 1.0);
    if (!(b.raw_prob > 0)) {
      b.vacuous = true;
      b.flags.emplace_back("vacuous");
    }
    priors.push_back(b.value);
    out.push_back(std::move(b));
  }
  return out;
}

BoundReport subspace_sine_bound(const PerturbInput& inp, Index j, double sigma_j, double delta_j) {
  require_index(j, inp.r, "subspace_sine_bound");
  require_positive(sigma_j, "sigma_j");
  require_positive(delta_j, "delta_j");
  BoundReport b = start("subspace_sine", inp);
  b.inputs.emplace_back("j", static_cast<double>(j));
  b.inputs.emplace_back("sigma_j", sigma_j);
  b.inputs.emplace_back("delta_j", delta_j);
  const double e = inp.norm_E;
  b.raw_value = 4.0 * std::sqrt(2.0 * static_cast<double>(j)) *
                (inp.t * rpow(inp) / delta_j + e * e / (sigma_j * delta_j) + e / sigma_j);
  b.raw_prob = 1.0 - gap_term(inp, 6.0, static_cast<double>(j), delta_j) - net_term(inp);
  finish(b, 1.0);
  return b;
}

BoundReport two_interval_subspace_bound(const PerturbInput& inp, Index j, Index l, double sigma_jm1,
                                        double sigma_l, double delta_jm1, double delta_l) {
  if (!(1 < j && j <= l && l <= inp.r)) {
    throw DomainError("two_interval_subspace_bound: indices must satisfy 1 < j <= l <= r");
  }
  require_positive(sigma_jm1, "sigma_{j-1}");
  require_positive(sigma_l, "sigma_l");
  require_positive(delta_jm1, "delta_{j-1}");
  require_positive(delta_l, "delta_l");
  BoundReport b = start("two_interval_subspace", inp);
  b.inputs.emplace_back("j", static_cast<double>(j));
  b.inputs.emplace_back("l", static_cast<double>(l));
  b.inputs.emplace_back("sigma_jm1", sigma_jm1);
  b.inputs.emplace_back("sigma_l", sigma_l);
  b.inputs.emplace_back("delta_jm1", delta_jm1);
  b.inputs.emplace_back("delta_l", delta_l);
  const double e = inp.norm_E;
  const double tr = inp.t * rpow(inp);
  b.raw_value = 8.0 * std::sqrt(2.0 * static_cast<double>(l)) *
                (tr / delta_jm1 + tr / delta_l + e * e / (sigma_jm1 * delta_jm1) + e * e / (sigma_l * delta_l) +
                 e / sigma_l);
  b.raw_prob = 1.0 - gap_term(inp, 6.0, static_cast<double>(j - 1), delta_jm1) -
               gap_term(inp, 6.0, static_cast<double>(l), delta_l) - net_term(inp, 2.0);
  finish(b, 1.0);
  return b;
}

SingularValueBounds singular_value_bounds(const PerturbInput& inp, Index j, double sigma_j,
                                          std::optional<double> measured_sigma_j_prime) {
  require_index(j, inp.r, "singular_value_bounds");
  require_positive(sigma_j, "sigma_j");
  const auto& p = inp.params;
  const double jd = static_cast<double>(j);
  const double lower_fail = failure_term(2.0 * p.C1, jd, p.c1 * std::pow(inp.t / 4.0, p.gamma));

  SingularValueBounds out;
  BoundReport& lo = out.lower;
  lo = start("singular_value_lower", inp);
  lo.inputs.emplace_back("j", jd);
  lo.inputs.emplace_back("sigma_j", sigma_j);
  lo.raw_value = sigma_j - inp.t;
  lo.raw_prob = 1.0 - lower_fail;
  finish(lo, kInf);

  BoundReport& up = out.upper;
  up = start("singular_value_upper", inp);
  up.inputs.emplace_back("j", jd);
  up.inputs.emplace_back("sigma_j", sigma_j);
  double s_prime = 0.0;
  double fail = net_term(inp);
  if (measured_sigma_j_prime) {
    s_prime = *measured_sigma_j_prime;
    up.inputs.emplace_back("sigma_j_prime", s_prime);
    up.flags.emplace_back("measured_sigma_prime");
  } else {
    s_prime = sigma_j - inp.t;
    fail += lower_fail;
    up.flags.emplace_back("substituted");
  }
  if (!std::isfinite(s_prime) || !(s_prime > 0)) {
    up.available = false;
    up.flags.emplace_back("unavailable");
    up.raw_value = kInf;
    up.value = kInf;
    up.raw_prob = 0.0;
    up.prob_lower = 0.0;
    return out;
  }
  const double e = inp.norm_E;
  up.raw_value = sigma_j + inp.t * rpow(inp) + 2.0 * std::sqrt(jd) * e * e / s_prime +
                 jd * e * e * e / (s_prime * s_prime);
  up.raw_prob = 1.0 - fail;
  finish(up, kInf);
  return out;
}

BoundReport projection_lemma_bound(const PerturbInput& inp, Index j, double sigma_j) {
  require_index(j, inp.r, "projection_lemma_bound");
  require_positive(sigma_j, "sigma_j");
  BoundReport b = start("projection_lemma", inp);
  b.inputs.emplace_back("j", static_cast<double>(j));
  b.inputs.emplace_back("sigma_j", sigma_j);
  b.raw_value = 2.0 * inp.norm_E / sigma_j;
  b.raw_prob = 1.0 - gap_term(inp, 2.0, static_cast<double>(j), sigma_j);
  finish(b, 1.0);
  return b;
}

BoundReport trailing_overlap_lemma_bound(const PerturbInput& inp, Index j, double sigma_j,
                                         double delta_j) {
  require_index(j, inp.r, "trailing_overlap_lemma_bound");
  require_positive(sigma_j, "sigma_j");
  require_positive(delta_j, "delta_j");
  BoundReport b = start("trailing_overlap_lemma", inp);
  b.inputs.emplace_back("j", static_cast<double>(j));
  b.inputs.emplace_back("sigma_j", sigma_j);
  b.inputs.emplace_back("delta_j", delta_j);
  const double e = inp.norm_E;
  b.raw_value = 4.0 * (inp.t * rpow(inp) / delta_j + e * e / (delta_j * sigma_j));
  b.raw_prob = 1.0 - gap_term(inp, 4.0, static_cast<double>(j), delta_j) - net_term(inp);
  finish(b, 1.0);
  return b;
}

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::MainSine: return "main_sine";
    case BoundKind::GeneralSine: return "general_sine";
    case BoundKind::GeneralSineCascade: return "general_sine_cascade";
    case BoundKind::Subspace: return "subspace_sine";
    case BoundKind::TwoInterval: return "two_interval_subspace";
    case BoundKind::SingularValueLower: return "singular_value_lower";
    case BoundKind::SingularValueUpper: return "singular_value_upper";
    case BoundKind::ProjectionLemma: return "projection_lemma";
    case BoundKind::TrailingOverlapLemma: return "trailing_overlap_lemma";
  }
  return "unknown";
}

BoundKind parse_bound_kind(std::string_view name) {
  for (BoundKind k : {BoundKind::MainSine, BoundKind::GeneralSine, BoundKind::GeneralSineCascade,
                      BoundKind::Subspace, BoundKind::TwoInterval, BoundKind::SingularValueLower,
                      BoundKind::SingularValueUpper, BoundKind::ProjectionLemma,
                      BoundKind::TrailingOverlapLemma}) {
    if (name == to_string(k)) return k;
  }
  throw DomainError("unknown bound kind: '" + std::string(name) + "'");
}

BoundReport evaluate(const BoundQuery& q) {
  const SpectrumProfile prof(q.singular_values);
  PerturbInput inp = q.input;
  inp.r = prof.rank();
  switch (q.kind) {
    case BoundKind::MainSine: return main_sine_bound(inp, prof.sigma(1), prof.gap(1));
    case BoundKind::GeneralSine:
      return general_sine_bound(inp, q.j, prof.sigma(q.j), prof.gap(q.j), q.prior_sines, PriorMode::Measured);
    case BoundKind::GeneralSineCascade: return general_sine_cascade(inp, prof, q.j).back();
    case BoundKind::Subspace: return subspace_sine_bound(inp, q.j, prof.sigma(q.j), prof.gap(q.j));
    case BoundKind::TwoInterval: {
      if (q.j < 2) throw DomainError("two_interval_subspace: j must be > 1");
      return two_interval_subspace_bound(inp, q.j, q.l, prof.sigma(q.j - 1), prof.sigma(q.l), prof.gap(q.j - 1),
                                         prof.gap(q.l));
    }
    case BoundKind::SingularValueLower: return singular_value_bounds(inp, q.j, prof.sigma(q.j)).lower;
    case BoundKind::SingularValueUpper: return singular_value_bounds(inp, q.j, prof.sigma(q.j)).upper;
    case BoundKind::ProjectionLemma: return projection_lemma_bound(inp, q.j, prof.sigma(q.j));
    case BoundKind::TrailingOverlapLemma:
      return trailing_overlap_lemma_bound(inp, q.j, prof.sigma(q.j), prof.gap(q.j));
  }
  throw DomainError("evaluate: unsupported bound kind");
}

TOptimum optimize_t(const std::function<BoundReport(double)>& evaluate_at, double eps, TGrid grid) {
  if (!(eps > 0 && eps < 1)) throw DomainError("optimize_t: eps must lie in (0, 1)");
  if (!(grid.t_min > 0 && grid.t_max >= grid.t_min && grid.factor > 1)) {
    throw DomainError("optimize_t: invalid grid");
  }
  TOptimum out;
  double t = grid.t_min;
  for (int i = 0; t <= grid.t_max * (1.0 + 1e-12); t = grid.t_min * std::pow(grid.factor, ++i)) {
    BoundReport b = evaluate_at(t);
    if (b.available && b.raw_prob >= 1.0 - eps) {
      out.t_star = t;
      out.report = std::move(b);
      return out;
    }
    out.report = std::move(b);
  }
  out.report.available = false;
  out.report.flags.emplace_back("no_feasible_t");
  return out;
}

TOptimum optimize_t(const BoundQuery& q, double eps, TGrid grid) {
  return optimize_t(
      [&](double t) {
        BoundQuery qt = q;
        qt.input.t = t;
        return evaluate(qt);
      },
      eps, grid);
}

}  // namespace pertbound
