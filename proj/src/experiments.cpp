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

#include "pertbound/experiments.hpp"

#include "format.hpp"
#include "pertbound/parallel.hpp"
#include "pertbound/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace pertbound {

namespace {

Index rank_of(const ExperimentConfig& cfg) { return static_cast<Index>(cfg.lowrank.singular_values.size()); }

const Matrix& side_vectors(const SvdResult& s, VectorSide side) {
  return side == VectorSide::Right ? s.right : s.left;
}

bool gap_degenerate(double gap, double sigma1) { return gap <= kSvdTol * std::max(1.0, sigma1); }

// Gap that isolates v_j: delta_1 for j = 1, else min(delta_{j-1}, delta_j).
double isolating_gap(const SpectrumProfile& prof, Index j) {
  return j == 1 ? prof.gap(1) : std::min(prof.gap(j - 1), prof.gap(j));
}

PerturbInput base_input(const ExperimentConfig& cfg, double norm_E, double t) {
  PerturbInput inp;
  inp.params = concentration_params(cfg.noise);
  inp.rigorous_constants = params_are_rigorous(cfg.noise);
  inp.norm_E = norm_E;
  inp.t = t;
  inp.r = rank_of(cfg);
  return inp;
}

// Smallest grid t at which the shared net event has probability >= 1 - eps.
double net_event_t(const ExperimentConfig& cfg) {
  const double sigma1 = cfg.lowrank.singular_values.front();
  const TOptimum opt = optimize_t(
      [&](double t) { return singular_value_bounds(base_input(cfg, 0.0, t), 1, sigma1, sigma1).upper; }, cfg.eps);
  return opt.t_star.value_or(TGrid{}.t_max);
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  validate(cfg.lowrank);
  validate(cfg.noise);
  if (cfg.trials == 0) throw DomainError("experiment: trials must be >= 1");
  if (cfg.js.empty()) throw DomainError("experiment: js must not be empty");
  const Index r = rank_of(cfg);
  auto check = [&](Index j, const char* what) {
    if (j < 1 || j > r) throw DomainError(std::string("experiment: ") + what + " index outside [1, r]");
  };
  for (Index j : cfg.js) check(j, "js");
  for (Index j : cfg.subspace_js) check(j, "subspace_js");
  check(cfg.lemma_j, "lemma_j");
  if (!(cfg.eps > 0 && cfg.eps < 1)) throw DomainError("experiment: eps must lie in (0, 1)");
  if (!(cfg.eta > 0)) throw DomainError("experiment: eta must be > 0");
}

LemmaChecks proof_lemma_checks(const SvdResult& exact, const SvdResult& perturbed, Index j,
                               const PerturbInput& inp) {
  const Index r = exact.singular_values.size();
  if (j < 1 || j > r) throw DomainError("proof_lemma_checks: j outside [1, r]");
  if (perturbed.left.cols() < j) throw DomainError("proof_lemma_checks: too few perturbed vectors");
  LemmaChecks out;
  for (Index i = 0; i < j; ++i) {
    const Vector a = exact.left.transpose() * perturbed.left.col(i);
    const Vector b = exact.right.transpose() * perturbed.right.col(i);
    const double p2 = 0.5 * ((perturbed.left.col(i).squaredNorm() - a.squaredNorm()) +
                             (perturbed.right.col(i).squaredNorm() - b.squaredNorm()));
    out.projection = std::max(out.projection, std::sqrt(std::max(p2, 0.0)));
    double o2 = 0.0;
    for (Index k = 0; k < r; ++k) {
      const double minus = 0.5 * (a(k) - b(k));
      o2 += minus * minus;
      if (k >= j) {
        const double plus = 0.5 * (a(k) + b(k));
        o2 += plus * plus;
      }
    }
    out.overlap = std::max(out.overlap, std::sqrt(o2));
  }
  const double sigma_j = exact.singular_values(j - 1);
  const double delta_j = sigma_j - (j < r ? exact.singular_values(j) : 0.0);
  out.projection_bound = projection_lemma_bound(inp, j, sigma_j);
  out.projection_holds = out.projection <= out.projection_bound.value + kTheoremTol;
  if (delta_j > 0) {
    out.overlap_bound = trailing_overlap_lemma_bound(inp, j, sigma_j, delta_j);
    out.overlap_holds = out.overlap <= out.overlap_bound.value + kTheoremTol;
  } else {
    out.overlap_bound.available = false;
    out.overlap_bound.flags.emplace_back("gap_degenerate");
  }
  return out;
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    out.push_back({samples[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw DomainError("quantile: no samples");
  if (!(q > 0 && q <= 1)) throw DomainError("quantile: q must lie in (0, 1]");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  return samples[rank - 1];
}

ExperimentResult run_sine_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentResult res;
  res.a = low_rank_matrix(cfg.lowrank);
  const SpectrumProfile prof(cfg.lowrank.singular_values);
  const Index m = cfg.lowrank.m;
  const Index n = cfg.lowrank.n;
  const Index k = std::min(m, n);
  Vector sigma_full = Vector::Zero(k);
  sigma_full.head(prof.rank()) = res.a.factors.singular_values;

  const Index j0 = cfg.js.front();
  {
    BoundQuery q;
    q.kind = BoundKind::SingularValueLower;
    q.input = base_input(cfg, 0.0, 1.0);
    q.singular_values = cfg.lowrank.singular_values;
    q.j = j0;
    res.t_weyl_lower = optimize_t(q, cfg.eps).t_star.value_or(TGrid{}.t_max);
    q.kind = BoundKind::SingularValueUpper;
    res.t_weyl_upper = optimize_t(q, cfg.eps).t_star;
  }
  res.t_lemma = net_event_t(cfg);
  const bool degenerate1 = gap_degenerate(prof.gap(1), prof.sigma(1));
  const Matrix& exact_side = side_vectors(res.a.factors, cfg.side);

  res.trials.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
    TrialResult& tr = res.trials[i];
    tr.trial_index = i;
    try {
      const Matrix e = sample_noise(cfg.noise, m, n, derive_seed(cfg.master_seed, i));
      tr.norm_E = spectral_norm(e, cfg.svd_method);
      // With E identically zero the exact factors already are an SVD of A + E.
      SvdResult s;
      if (e.isZero(0.0)) {
        s = res.a.factors;
        s.singular_values = sigma_full;
      } else {
        s = svd(res.a.a + e, cfg.svd_method);
      }
      tr.max_sv_shift = (s.singular_values - sigma_full).cwiseAbs().maxCoeff();
      tr.weyl_ok = tr.max_sv_shift <= weyl_bound(tr.norm_E) + kTheoremTol;

      const Matrix& pert_side = side_vectors(s, cfg.side);
      for (Index j : cfg.js) {
        tr.sin_vj.push_back(vector_angle_sin(exact_side.col(j - 1), pert_side.col(j - 1)));
        tr.sigma_prime.push_back(s.singular_values(j - 1));
        tr.sv_shifts.push_back(std::abs(s.singular_values(j - 1) - prof.sigma(j)));
        if (has_multiplicity(s.singular_values, j)) tr.flags.push_back("perturbed_multiplicity_" + std::to_string(j));
      }
      for (Index j : cfg.subspace_js) {
        tr.sin_subspace_j.push_back(
            subspace_angle_sin(leading_subspace(exact_side, j), leading_subspace(pert_side, j)));
      }
      if (degenerate1) {
        tr.flags.emplace_back("gap_degenerate");
      } else {
        const double sin1 =
            vector_angle_sin(res.a.factors.right.col(0), s.right.col(0));
        tr.dk_wedin_raw = 2.0 * tr.norm_E / prof.gap(1);
        tr.dk_wedin_ok = sin1 <= tr.dk_wedin_raw + kTheoremTol;
      }

      const double sj = prof.sigma(j0);
      const double sj_prime = s.singular_values(j0 - 1);
      tr.prob_weyl_lower_ok = sj_prime >= sj - res.t_weyl_lower;
      if (res.t_weyl_upper) {
        const auto up = singular_value_bounds(base_input(cfg, tr.norm_E, *res.t_weyl_upper), j0, sj).upper;
        tr.prob_weyl_upper_ok = !up.available || sj_prime <= up.value;
      }
      tr.lemma = proof_lemma_checks(res.a.factors, s, cfg.lemma_j, base_input(cfg, tr.norm_E, res.t_lemma));
    } catch (const std::exception& ex) {
      tr.ok = false;
      tr.error = ex.what();
      tr.flags.emplace_back("failed");
    }
  });

  std::vector<std::string> names;
  for (Index j : cfg.js) names.push_back("sin_v" + std::to_string(j));
  for (Index j : cfg.subspace_js) names.push_back("sin_V" + std::to_string(j));
  for (Index j : cfg.js) names.push_back("sv_shift_" + std::to_string(j));
  names.emplace_back("norm_E");
  for (const auto& name : names) res.cdfs.push_back({name, empirical_cdf(quantity_samples(res, cfg, name))});
  return res;
}

std::vector<double> quantity_samples(const ExperimentResult& res, const ExperimentConfig& cfg,
                                     const std::string& quantity) {
  auto position = [&](const std::vector<Index>& js, const std::string& prefix) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < js.size(); ++k) {
      if (quantity == prefix + std::to_string(js[k])) return k;
    }
    return std::nullopt;
  };
  std::vector<double> out;
  if (quantity == "norm_E") {
    for (const auto& t : res.trials) {
      if (t.ok) out.push_back(t.norm_E);
    }
    return out;
  }
  const std::vector<double> TrialResult::*field = nullptr;
  std::optional<std::size_t> k;
  if ((k = position(cfg.js, "sin_v"))) {
    field = &TrialResult::sin_vj;
  } else if ((k = position(cfg.subspace_js, "sin_V"))) {
    field = &TrialResult::sin_subspace_j;
  } else if ((k = position(cfg.js, "sv_shift_"))) {
    field = &TrialResult::sv_shifts;
  } else {
    throw DomainError("unknown quantity: '" + quantity + "'");
  }
  for (const auto& t : res.trials) {
    if (t.ok) out.push_back((t.*field)[*k]);
  }
  return out;
}

WeylSummary summarize_weyl(const ExperimentResult& res, const ExperimentConfig& cfg) {
  WeylSummary w;
  w.j = cfg.js.front();
  w.t_lower = res.t_weyl_lower;
  w.t_upper = res.t_weyl_upper;
  const SpectrumProfile prof(cfg.lowrank.singular_values);
  const PerturbInput inp = base_input(cfg, 0.0, res.t_weyl_lower);
  w.lower_prob = singular_value_bounds(inp, w.j, prof.sigma(w.j)).lower.prob_lower;
  if (res.t_weyl_upper) {
    PerturbInput up = inp;
    up.t = *res.t_weyl_upper;
    w.upper_prob = singular_value_bounds(up, w.j, prof.sigma(w.j)).upper.prob_lower;
  }
  for (const auto& t : res.trials) {
    ++w.trials;
    if (!t.ok) {
      ++w.failed_trials;
      continue;
    }
    if (!t.weyl_ok) ++w.weyl_violations;
    if (!t.dk_wedin_ok) ++w.dk_wedin_violations;
    if (t.norm_E > 0) w.max_shift_over_norm = std::max(w.max_shift_over_norm, t.max_sv_shift / t.norm_E);
    if (!t.prob_weyl_lower_ok) ++w.lower_violations;
    if (!t.prob_weyl_upper_ok) ++w.upper_violations;
    if (t.lemma.projection_holds) ++w.projection_lemma_holds;
    if (t.lemma.overlap_holds) ++w.overlap_lemma_holds;
    w.projection_lemma_prob = t.lemma.projection_bound.prob_lower;
    w.overlap_lemma_prob = t.lemma.overlap_bound.prob_lower;
  }
  return w;
}

WeylSummary run_weyl_experiment(const ExperimentConfig& cfg) { return summarize_weyl(run_sine_experiment(cfg), cfg); }

ComparisonTable compare_bounds(const ExperimentResult& res, const ExperimentConfig& cfg) {
  ComparisonTable table;
  const SpectrumProfile prof(cfg.lowrank.singular_values);
  const std::vector<double> norms = quantity_samples(res, cfg, "norm_E");
  if (norms.empty()) throw DomainError("compare_bounds: no successful trials");
  const double dim = static_cast<double>(std::max(cfg.lowrank.m, cfg.lowrank.n));
  const ConcentrationParams params = concentration_params(cfg.noise);

  struct RowSpec {
    std::string name;
    std::optional<BoundKind> kind;
    Index j;
    enum { Sine, Subspace, Shift, Norm } family;
  };
  std::vector<RowSpec> specs;
  for (Index j : cfg.js) {
    specs.push_back({"sin_v" + std::to_string(j), j == 1 ? BoundKind::MainSine : BoundKind::GeneralSineCascade, j,
                     RowSpec::Sine});
  }
  for (Index j : cfg.subspace_js) specs.push_back({"sin_V" + std::to_string(j), BoundKind::Subspace, j, RowSpec::Subspace});
  for (Index j : cfg.js) specs.push_back({"sv_shift_" + std::to_string(j), BoundKind::SingularValueLower, j, RowSpec::Shift});
  specs.push_back({"norm_E", std::nullopt, 0, RowSpec::Norm});

  for (const auto& spec : specs) {
    ComparisonRow row;
    row.quantity = spec.name;
    const std::vector<double> samples = quantity_samples(res, cfg, spec.name);
    for (double q : table.q_levels) row.empirical.push_back(quantile(samples, q));
    for (double q : table.q_levels) {
      const double norm_q = quantile(norms, q);
      switch (spec.family) {
        case RowSpec::Norm: {
          BoundReport b;
          b.kind = "norm_bound";
          b.flags.emplace_back("derived_constants");
          b.inputs = {{"C1", params.C1}, {"c1", params.c1}, {"gamma", params.gamma}, {"eps", 1.0 - q}};
          b.raw_value = b.value = norm_bound_from_params(params, cfg.lowrank.m, cfg.lowrank.n, 1.0 - q);
          b.raw_prob = b.prob_lower = q;
          row.classical.push_back(b);
          continue;
        }
        case RowSpec::Shift: {
          BoundReport b;
          b.kind = "weyl";
          b.flags.emplace_back("deterministic");
          b.inputs = {{"norm_E", norm_q}};
          b.raw_value = b.value = weyl_bound(norm_q);
          row.classical.push_back(b);
          break;
        }
        case RowSpec::Sine:
        case RowSpec::Subspace: {
          const double gap = spec.family == RowSpec::Sine ? isolating_gap(prof, spec.j) : prof.gap(spec.j);
          if (gap_degenerate(gap, prof.sigma(1))) {
            BoundReport b;
            b.kind = "dk_wedin";
            b.available = false;
            b.flags.emplace_back("gap_degenerate");
            row.classical.push_back(b);
            row.corollary.push_back(b);
          } else {
            row.classical.push_back(dk_wedin_bound(norm_q, gap));
            row.corollary.push_back(classical_corollary(dim, cfg.eta, gap).sine);
          }
          break;
        }
      }
      BoundQuery query;
      query.kind = *spec.kind;
      query.input = base_input(cfg, norm_q, 1.0);
      query.singular_values = cfg.lowrank.singular_values;
      query.j = spec.j;
      TOptimum opt;
      try {
        opt = optimize_t(query, 1.0 - q);
      } catch (const DomainError& ex) {
        opt.report.available = false;
        opt.report.kind = std::string(to_string(*spec.kind));
        opt.report.flags.emplace_back(ex.what());
      }
      double rate = NAN;
      if (opt.t_star) {
        std::size_t bad = 0;
        std::size_t count = 0;
        std::size_t slot = 0;
        for (const auto& t : res.trials) {
          if (!t.ok) continue;
          BoundQuery per = query;
          per.input.norm_E = t.norm_E;
          per.input.t = *opt.t_star;
          const BoundReport b = evaluate(per);
          const double measured = samples[slot++];
          ++count;
          if (spec.family == RowSpec::Shift) {
            const auto pos = static_cast<std::size_t>(
                std::find(cfg.js.begin(), cfg.js.end(), spec.j) - cfg.js.begin());
            if (t.sigma_prime[pos] < b.value) ++bad;
          } else if (measured > b.value + kTheoremTol) {
            ++bad;
          }
        }
        rate = count ? static_cast<double>(bad) / static_cast<double>(count) : NAN;
      }
      row.new_bound.push_back(std::move(opt));
      row.violation_rate.push_back(rate);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void emit_cdf_csv(std::ostream& out, const std::vector<Cdf>& cdfs) {
  out << "quantity,value,empirical_cdf\n";
  for (const auto& c : cdfs) {
    for (const auto& p : c.points) {
      out << c.quantity << ',' << detail::format_double(p.value) << ',' << detail::format_double(p.cdf) << '\n';
    }
  }
}

void emit_cdf_csv(const std::vector<Cdf>& cdfs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  emit_cdf_csv(out, cdfs);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<Cdf> read_cdf_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "quantity,value,empirical_cdf") {
    throw DomainError("cdf csv: missing header 'quantity,value,empirical_cdf'");
  }
  std::vector<Cdf> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw DomainError("cdf csv: line " + std::to_string(line_no) + ": expected 3 fields");
    auto number = [&](std::string_view tok) {
      double x = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw DomainError("cdf csv: line " + std::to_string(line_no) + ": not a number");
      }
      return x;
    };
    const std::string_view view(line);
    const std::string name(view.substr(0, c1));
    const CdfPoint p{number(view.substr(c1 + 1, c2 - c1 - 1)), number(view.substr(c2 + 1))};
    if (out.empty() || out.back().quantity != name) out.push_back({name, {}});
    out.back().points.push_back(p);
  }
  return out;
}

}  // namespace pertbound
