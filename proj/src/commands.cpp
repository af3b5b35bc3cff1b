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

#include "pertbound/commands.hpp"

#include "format.hpp"
#include "json_out.hpp"
#include "pertbound/completion.hpp"
#include "pertbound/concentration.hpp"
#include "pertbound/config.hpp"
#include "pertbound/experiments.hpp"
#include "pertbound/matrix_io.hpp"
#include "pertbound/rng.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace pertbound {

namespace fs = std::filesystem;
using detail::Json;
using detail::number;

namespace {

constexpr std::uint64_t kMatrixStream = std::numeric_limits<std::uint64_t>::max();

struct MissingParameter : ConfigError {
  using ConfigError::ConfigError;
};

struct Context {
  const CommandOptions& opts;
  Config cfg;
  std::uint64_t seed = 0;
  fs::path out_dir;
  std::ostringstream out;
  std::ostringstream err;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Index to_index(std::int64_t v, const char* what) {
  if (v < 1) throw ConfigError(std::string(what) + " must be >= 1");
  return static_cast<Index>(v);
}

std::vector<Index> to_indices(const std::vector<std::int64_t>& v, const char* what) {
  std::vector<Index> out;
  for (auto x : v) out.push_back(to_index(x, what));
  return out;
}

NoiseSpec noise_from(const Config& cfg, const std::string& section, NoiseKind fallback) {
  NoiseSpec spec;
  spec.kind = cfg.has(section + ".kind") ? parse_noise_kind(cfg.get_string(section + ".kind")) : fallback;
  spec.K = cfg.get_double(section + ".K", 1.0);
  if (cfg.has(section + ".C1")) spec.subexp_C1 = cfg.get_double(section + ".C1");
  if (cfg.has(section + ".c1")) spec.subexp_c1 = cfg.get_double(section + ".c1");
  validate(spec);
  return spec;
}

SvdMethod svd_method_from(const std::string& name) {
  if (name == "auto") return SvdMethod::Auto;
  if (name == "jacobi") return SvdMethod::Jacobi;
  if (name == "bidiagonal") return SvdMethod::Bidiagonal;
  throw ConfigError("unknown svd method '" + name + "' (auto, jacobi, bidiagonal)");
}

// Dimensions of a [section]: m defaults to n.
std::pair<Index, Index> dims_from(const Config& cfg, const std::string& section) {
  const Index n = to_index(cfg.get_int(section + ".n"), "n");
  const Index m = to_index(cfg.get_int(section + ".m", n), "m");
  return {m, n};
}

ExperimentConfig experiment_from(const Context& ctx) {
  const Config& c = ctx.cfg;
  ExperimentConfig e;
  auto [m, n] = dims_from(c, "lowrank");
  e.lowrank.m = m;
  e.lowrank.n = n;
  e.lowrank.singular_values = c.get_doubles("lowrank.singular_values");
  e.lowrank.seed = c.get_uint("lowrank.seed", derive_seed(ctx.seed, kMatrixStream));
  e.noise = noise_from(c, "noise", NoiseKind::Bernoulli);
  e.trials = static_cast<std::size_t>(to_index(c.get_int("experiment.trials"), "experiment.trials"));
  e.js = to_indices(c.get_ints("experiment.js", {1}), "experiment.js");
  e.subspace_js = to_indices(c.get_ints("experiment.subspace_js", {}), "experiment.subspace_js");
  e.master_seed = ctx.seed;
  const std::string side = c.get_string("experiment.side", "right");
  if (side != "right" && side != "left") throw ConfigError("experiment.side must be 'right' or 'left'");
  e.side = side == "right" ? VectorSide::Right : VectorSide::Left;
  e.threads = ctx.opts.threads;
  e.eps = c.get_double("experiment.eps", 0.1);
  e.eta = c.get_double("experiment.eta", 0.1);
  e.lemma_j = to_index(c.get_int("experiment.lemma_j", 1), "experiment.lemma_j");
  e.svd_method = svd_method_from(c.get_string("experiment.svd", "auto"));
  validate(e);
  return e;
}

int cmd_simulate(Context& ctx) {
  const ExperimentConfig cfg = experiment_from(ctx);
  const ExperimentResult res = run_sine_experiment(cfg);
  const WeylSummary w = summarize_weyl(res, cfg);

  Json report;
  report["schema_version"] = detail::kSchemaVersion;
  report["kind"] = "simulate";
  report["config"] = detail::to_json(cfg);
  report["t_choices"] = {{"t_lemma", number(res.t_lemma)},
                         {"t_weyl_lower", number(res.t_weyl_lower)},
                         {"t_weyl_upper", res.t_weyl_upper ? number(*res.t_weyl_upper) : Json(nullptr)}};
  report["summary"] = detail::to_json(w);
  if (w.failed_trials < w.trials) {
    report["comparison"] = detail::to_json(compare_bounds(res, cfg));
  } else {
    report["comparison"] = nullptr;
  }
  Json trials = Json::array();
  for (const auto& t : res.trials) trials.push_back(detail::to_json(t));
  report["trials"] = trials;

  const fs::path csv = ctx.out_dir / ctx.cfg.get_string("output.cdf_csv", "cdf.csv");
  const fs::path json = ctx.out_dir / ctx.cfg.get_string("output.report_json", "report.json");
  emit_cdf_csv(res.cdfs, csv);
  write_text(json, dump(report));

  ctx.out << "trials: " << w.trials << " (" << w.failed_trials << " failed)\n";
  ctx.out << "weyl violations: " << w.weyl_violations << "\n";
  ctx.out << "dk_wedin violations: " << w.dk_wedin_violations << "\n";
  if (!cfg.js.empty() && w.failed_trials < w.trials) {
    const auto s = quantity_samples(res, cfg, "sin_v" + std::to_string(cfg.js.front()));
    ctx.out << "median sin_v" << cfg.js.front() << ": " << detail::format_double(quantile(s, 0.5)) << "\n";
  }
  ctx.out << "wrote " << csv.string() << "\n";
  ctx.out << "wrote " << json.string() << "\n";
  if (w.failed_trials > 0) ctx.err << "warning: " << w.failed_trials << " trials failed (flagged in the report)\n";
  if (w.weyl_violations > 0 || w.dk_wedin_violations > 0) {
    ctx.err << "error: deterministic theorem violated\n";
    return kExitTheoremViolation;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- bounds

class BoundParams {
 public:
  BoundParams(const Config& cfg, std::string kind) : cfg_(cfg), kind_(std::move(kind)) {}

  bool has(const std::string& k) const { return cfg_.has("bounds." + k) || cfg_.has(k); }
  std::string key(const std::string& k) const { return cfg_.has("bounds." + k) ? "bounds." + k : k; }

  double num(const std::string& k) const {
    if (!has(k)) throw missing(k);
    return cfg_.get_double(key(k));
  }
  Index index(const std::string& k) const {
    if (!has(k)) throw missing(k);
    return to_index(cfg_.get_int(key(k)), k.c_str());
  }
  std::vector<double> list(const std::string& k) const {
    if (!has(k)) throw missing(k);
    const std::string v = cfg_.get_string(key(k));
    if (v.empty()) return {};
    return cfg_.get_doubles(key(k));
  }
  MissingParameter missing(const std::string& k) const {
    return MissingParameter("missing parameter '" + k + "' for bound '" + kind_ + "'");
  }

 private:
  const Config& cfg_;
  std::string kind_;
};

int cmd_bounds(Context& ctx) {
  const Config& c = ctx.cfg;
  if (!c.has("bounds.kind") && !c.has("kind")) throw MissingParameter("missing parameter 'kind' (bound name)");
  const std::string kind = c.has("bounds.kind") ? c.get_string("bounds.kind") : c.get_string("kind");
  const BoundParams bp(c, kind);

  Json result;
  auto emit = [&](const BoundReport& b) {
    result["schema_version"] = detail::kSchemaVersion;
    const Json j = detail::to_json(b);
    for (auto it = j.begin(); it != j.end(); ++it) result[it.key()] = it.value();
  };

  if (kind == "weyl") {
    BoundReport b;
    b.kind = "weyl";
    b.flags.emplace_back("deterministic");
    b.raw_value = b.value = weyl_bound(bp.num("norm_E"));
    b.inputs = {{"norm_E", bp.num("norm_E")}};
    emit(b);
  } else if (kind == "dk_wedin") {
    emit(dk_wedin_bound(bp.num("norm_E"), bp.num("delta")));
  } else if (kind == "classical_corollary") {
    const auto cc = classical_corollary(bp.num("n"), bp.num("eta"), bp.num("delta"));
    emit(cc.sine);
    result["sv_bound"] = number(cc.sv_bound);
  } else if (kind == "norm_bound") {
    ConcentrationParams p;
    if (c.has("noise.kind")) p = concentration_params(noise_from(c, "noise", NoiseKind::Bernoulli));
    if (bp.has("C1")) p.C1 = bp.num("C1");
    if (bp.has("c1")) p.c1 = bp.num("c1");
    if (bp.has("gamma")) p.gamma = bp.num("gamma");
    const Index n = bp.index("n");
    const Index m = bp.has("m") ? bp.index("m") : n;
    const double eps = bp.num("eps");
    BoundReport b;
    b.kind = "norm_bound";
    b.flags.emplace_back("derived_constants");
    b.inputs = {{"C1", p.C1}, {"c1", p.c1}, {"gamma", p.gamma}, {"m", double(m)}, {"n", double(n)}, {"eps", eps}};
    b.raw_value = b.value = norm_bound_from_params(p, m, n, eps);
    b.raw_prob = b.prob_lower = 1.0 - eps;
    emit(b);
  } else if (kind == "recovery") {
    RecoveryBoundInput in;
    in.sigma_jp1 = bp.num("sigma_jp1");
    in.j = bp.index("j");
    in.r = bp.index("r");
    in.norm_x_inf = bp.num("norm_x_inf");
    in.norm_x = bp.num("norm_x");
    in.n = bp.index("n");
    in.p = bp.num("p");
    in.K = bp.num("K");
    in.lambda = bp.num("lambda");
    if (c.has("noise.kind")) in.params = concentration_params(noise_from(c, "noise", NoiseKind::Bernoulli));
    if (bp.has("C1")) in.params.C1 = bp.num("C1");
    if (bp.has("c1")) in.params.c1 = bp.num("c1");
    if (bp.has("gamma")) in.params.gamma = bp.num("gamma");
    in.delta_j = bp.num("delta_j");
    in.sigma_j = bp.num("sigma_j");
    in.norm_E = bp.num("norm_E");
    in.C_abs = bp.has("C") ? bp.num("C") : 1.0;
    emit(recovery_bound(in));
  } else {
    const BoundKind bk = parse_bound_kind(kind);
    PerturbInput inp;
    bool rigorous = true;
    if (c.has("noise.kind")) {
      const NoiseSpec ns = noise_from(c, "noise", NoiseKind::Bernoulli);
      inp.params = concentration_params(ns);
      rigorous = params_are_rigorous(ns);
    }
    if (bp.has("C1")) inp.params.C1 = bp.num("C1");
    if (bp.has("c1")) inp.params.c1 = bp.num("c1");
    if (bp.has("gamma")) inp.params.gamma = bp.num("gamma");
    inp.rigorous_constants = rigorous;
    inp.norm_E = bp.num("norm_E");
    if (bp.has("norm_E_provenance")) {
      const std::string prov = c.get_string(bp.key("norm_E_provenance"));
      if (prov == "params_bound") {
        inp.provenance = NormProvenance::ParamsBound;
      } else if (prov != "measured") {
        throw ConfigError("norm_E_provenance must be 'measured' or 'params_bound'");
      }
    }
    std::optional<SpectrumProfile> prof;
    if (bp.has("singular_values")) prof.emplace(bp.list("singular_values"));
    inp.r = prof ? prof->rank() : bp.index("r");
    auto sigma = [&](const std::string& name, Index j) { return prof ? prof->sigma(j) : bp.num(name); };
    auto gap = [&](const std::string& name, Index j) { return prof ? prof->gap(j) : bp.num(name); };
    const Index j = bk == BoundKind::MainSine ? 1 : bp.index("j");

    std::function<BoundReport(double)> at;
    switch (bk) {
      case BoundKind::MainSine: {
        const double s1 = sigma("sigma1", 1);
        const double d = gap("delta", 1);
        at = [=](double t) { PerturbInput q = inp; q.t = t; return main_sine_bound(q, s1, d); };
        break;
      }
      case BoundKind::GeneralSine: {
        const double s = sigma("sigma_j", j);
        const double d = gap("delta_j", j);
        const std::vector<double> priors = j == 1 && !bp.has("prior_sines") ? std::vector<double>{} : bp.list("prior_sines");
        at = [=](double t) { PerturbInput q = inp; q.t = t; return general_sine_bound(q, j, s, d, priors); };
        break;
      }
      case BoundKind::GeneralSineCascade: {
        if (!prof) throw bp.missing("singular_values");
        const SpectrumProfile pr = *prof;
        at = [=](double t) { PerturbInput q = inp; q.t = t; return general_sine_cascade(q, pr, j).back(); };
        break;
      }
      case BoundKind::Subspace: {
        const double s = sigma("sigma_j", j);
        const double d = gap("delta_j", j);
        at = [=](double t) { PerturbInput q = inp; q.t = t; return subspace_sine_bound(q, j, s, d); };
        break;
      }
      case BoundKind::TwoInterval: {
        const Index l = bp.index("l");
        if (j < 2) throw ConfigError("two_interval_subspace: j must be > 1");
        const double sjm1 = sigma("sigma_jm1", j - 1);
        const double sl = sigma("sigma_l", l);
        const double djm1 = gap("delta_jm1", j - 1);
        const double dl = gap("delta_l", l);
        at = [=](double t) {
          PerturbInput q = inp;
          q.t = t;
          return two_interval_subspace_bound(q, j, l, sjm1, sl, djm1, dl);
        };
        break;
      }
      case BoundKind::SingularValueLower:
      case BoundKind::SingularValueUpper: {
        const double s = sigma("sigma_j", j);
        std::optional<double> sp;
        if (bp.has("sigma_j_prime")) sp = bp.num("sigma_j_prime");
        const bool lower = bk == BoundKind::SingularValueLower;
        at = [=](double t) {
          PerturbInput q = inp;
          q.t = t;
          const auto both = singular_value_bounds(q, j, s, sp);
          return lower ? both.lower : both.upper;
        };
        break;
      }
      case BoundKind::ProjectionLemma: {
        const double s = sigma("sigma_j", j);
        at = [=](double t) { PerturbInput q = inp; q.t = t; return projection_lemma_bound(q, j, s); };
        break;
      }
      case BoundKind::TrailingOverlapLemma: {
        const double s = sigma("sigma_j", j);
        const double d = gap("delta_j", j);
        at = [=](double t) { PerturbInput q = inp; q.t = t; return trailing_overlap_lemma_bound(q, j, s, d); };
        break;
      }
    }
    if (bp.has("t")) {
      emit(at(bp.num("t")));
    } else if (bp.has("eps")) {
      const TOptimum opt = optimize_t(at, bp.num("eps"));
      emit(opt.report);
      result["t_star"] = opt.t_star ? number(*opt.t_star) : Json(nullptr);
    } else {
      throw MissingParameter("missing parameter 't' (or 'eps' to choose t) for bound '" + kind + "'");
    }
  }
  ctx.out << dump(result);
  return kExitOk;
}

// --------------------------------------------------------- concentration

int cmd_concentration(Context& ctx) {
  const Config& c = ctx.cfg;
  const auto [m, n] = dims_from(c, "concentration");
  const NoiseSpec spec = noise_from(c, "noise", NoiseKind::Bernoulli);
  ConcentrationParams params = concentration_params(spec);
  if (c.has("concentration.C1")) params.C1 = c.get_double("concentration.C1");
  if (c.has("concentration.c1")) params.c1 = c.get_double("concentration.c1");
  if (c.has("concentration.gamma")) params.gamma = c.get_double("concentration.gamma");
  validate(params);
  const auto trials = static_cast<std::size_t>(c.get_uint("concentration.trials", 100000));
  const auto pair_count = static_cast<std::size_t>(c.get_uint("concentration.pairs", 5));
  const auto norm_trials = static_cast<std::size_t>(c.get_uint("concentration.norm_trials", 100));
  const std::vector<double> grid =
      c.has("concentration.t_grid") ? c.get_doubles("concentration.t_grid") : std::vector<double>{0.5, 1, 1.5, 2, 2.5, 3};

  const auto pairs = tail_test_pairs(m, n, pair_count, derive_seed(ctx.seed, 1));
  const auto curves = tail_estimate(spec, m, n, pairs, grid, trials, derive_seed(ctx.seed, 2), ctx.opts.threads);

  Json summary;
  summary["schema_version"] = detail::kSchemaVersion;
  summary["kind"] = "concentration";
  summary["noise"] = {{"kind", std::string(to_string(spec.kind))}, {"K", number(spec.K)}};
  summary["params"] = detail::to_json(params);
  summary["rigorous_constants"] = params_are_rigorous(spec);
  summary["m"] = m;
  summary["n"] = n;
  summary["trials"] = trials;
  summary["coverage"] = std::to_string(pair_count) + " random unit pairs + 1 flat sign pair; sampled, not exhaustive";
  bool holds = true;
  Json pj = Json::array();
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto rep = check_concentration(curves[k], params);
    holds = holds && rep.holds;
    const std::string name = "tail_pair" + std::to_string(k) + ".csv";
    std::ostringstream csv;
    write_tail_csv(csv, curves[k], params);
    write_text(ctx.out_dir / name, csv.str());
    Json e;
    e["pair"] = k;
    e["type"] = k + 1 == curves.size() ? "flat_signs" : "random";
    e["holds"] = rep.holds;
    e["worst_ratio"] = number(rep.worst_ratio);
    Json margins = Json::array();
    for (double mg : rep.margins) margins.push_back(number(mg));
    e["margins"] = margins;
    e["csv"] = name;
    pj.push_back(e);
  }
  summary["holds"] = holds;
  summary["pairs"] = pj;
  if (norm_trials > 0) {
    const auto norms = norm_tail(spec, m, n, norm_trials, derive_seed(ctx.seed, 3), ctx.opts.threads);
    const double root = std::sqrt(static_cast<double>(std::max(m, n)));
    std::size_t above = 0;
    for (double x : norms) above += x > 3.0 * root ? 1 : 0;
    std::vector<double> ngrid;
    for (int k = 1; k <= 40; ++k) ngrid.push_back(0.1 * k * root);
    std::ostringstream csv;
    write_norm_tail_csv(csv, norms, ngrid, params, m, n);
    write_text(ctx.out_dir / "norm_tail.csv", csv.str());
    summary["norm"] = {{"trials", norm_trials},
                       {"median", number(quantile(norms, 0.5))},
                       {"max", number(norms.back())},
                       {"median_over_sqrt_n", number(quantile(norms, 0.5) / root)},
                       {"above_3_sqrt_n", above},
                       {"params_bound_eps_0.01", number(norm_bound_from_params(params, m, n, 0.01))},
                       {"csv", "norm_tail.csv"}};
  }
  const fs::path json = ctx.out_dir / "concentration.json";
  write_text(json, dump(summary));
  ctx.out << "holds: " << (holds ? "true" : "false") << "\n";
  ctx.out << "wrote " << json.string() << "\n";
  return kExitOk;
}

// -------------------------------------------------------------- complete

Mask read_mask_file(const fs::path& path) {
  const Matrix m = read_matrix_file(path);
  Mask mask(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) != 0.0 && m(i, j) != 1.0) throw DomainError("mask file: entries must be 0 or 1");
      mask(i, j) = m(i, j) == 1.0;
    }
  }
  return mask;
}

int cmd_complete(Context& ctx) {
  const Config& c = ctx.cfg;
  const std::string source = c.get_string("completion.source", "generate");
  const Index j = to_index(c.get_int("completion.j", 1), "completion.j");
  const double lambda = c.get_double("completion.lambda", 1.0);
  const double c_abs = c.get_double("completion.C", 1.0);
  const bool emit_estimates = c.get_bool("completion.emit_estimates", false);
  const SvdMethod method = svd_method_from(c.get_string("completion.svd", "auto"));

  struct Instance {
    ObservedMatrix obs;
    std::vector<std::string> flags;
  };
  std::optional<LowRankMatrix> truth;
  std::optional<Matrix> truth_matrix;
  std::vector<Instance> instances;
  double K = c.get_double("completion.K", 1.0);
  std::optional<double> p_nominal;

  if (source == "generate") {
    auto [m, n] = dims_from(c, "completion");
    const std::vector<double> sv = c.get_doubles("completion.singular_values");
    const std::uint64_t mseed = c.get_uint("completion.matrix_seed", derive_seed(ctx.seed, kMatrixStream));
    const std::string design = c.get_string("completion.design", "gaussian");
    if (design == "gaussian") {
      truth = low_rank_matrix({m, n, sv, mseed});
    } else if (design == "flat") {
      truth = flat_low_rank_matrix(m, n, sv, mseed);
    } else {
      throw ConfigError("completion.design must be 'gaussian' or 'flat'");
    }
    truth_matrix = truth->a;
    const NoiseSpec z = noise_from(c, "noise", NoiseKind::BoundedIID);
    K = z.kind == NoiseKind::Zero ? 0.0 : z.K;
    p_nominal = c.get_double("completion.p");
    const bool allow = c.get_bool("completion.allow_unbounded", false);
    const auto trials = static_cast<std::size_t>(c.get_uint("completion.trials", 1));
    if (trials == 0) throw ConfigError("completion.trials must be >= 1");
    for (std::size_t t = 0; t < trials; ++t) {
      Observation o = observe(truth->a, *p_nominal, z, derive_seed(ctx.seed, t), allow);
      instances.push_back({std::move(o.observed), std::move(o.flags)});
    }
  } else if (source == "files") {
    Instance inst;
    inst.obs.values = read_matrix_file(c.get_string("completion.values"));
    if (c.has("completion.mask")) inst.obs.mask = read_mask_file(c.get_string("completion.mask"));
    if (c.has("completion.p")) p_nominal = c.get_double("completion.p");
    inst.obs.p_nominal = p_nominal;
    validate(inst.obs);
    if (c.has("completion.truth")) {
      truth_matrix = read_matrix_file(c.get_string("completion.truth"));
      if (truth_matrix->rows() != inst.obs.values.rows() || truth_matrix->cols() != inst.obs.values.cols()) {
        throw DomainError("completion: truth and values differ in shape");
      }
    }
    instances.push_back(std::move(inst));
  } else {
    throw ConfigError("completion.source must be 'generate' or 'files'");
  }

  // Spectrum of the truth for the certificate.
  std::optional<SvdResult> truth_svd;
  Index rank = 0;
  if (truth) {
    truth_svd = truth->factors;
    rank = truth->factors.singular_values.size();
  } else if (truth_matrix) {
    truth_svd = svd(*truth_matrix, method);
    const double tol = kSvdTol * std::max(1.0, truth_svd->singular_values(0));
    rank = (truth_svd->singular_values.array() > tol).count();
  }

  const Index cols = instances.front().obs.values.cols();
  std::vector<Index> columns;
  if (c.has("completion.columns")) {
    columns = to_indices(c.get_ints("completion.columns"), "completion.columns");
  } else {
    for (Index k = 1; k <= cols; ++k) columns.push_back(k);
  }

  Json summary;
  summary["schema_version"] = detail::kSchemaVersion;
  summary["kind"] = "complete";
  summary["source"] = source;
  summary["j"] = j;
  summary["lambda"] = number(lambda);
  summary["C"] = number(c_abs);
  summary["flags"] = Json::array({"non_rigorous_constant"});
  if (p_nominal && *p_nominal > 0.5) summary["flags"].push_back("p_above_one_half");
  Json runs = Json::array();
  std::vector<double> all_rel;
  for (std::size_t t = 0; t < instances.size(); ++t) {
    const Instance& inst = instances[t];
    const PEstimate est = estimate_p(inst.obs);
    const double p = p_nominal.value_or(est.p);
    if (!(p > 0)) throw DomainError("completion: estimated p is 0 (nothing observed)");
    const SpectralCompleter completer(inst.obs, p, j, method);

    std::optional<Subspace> true_u;
    double norm_e = NAN;
    std::optional<ConcentrationParams> params;
    if (truth_matrix) {
      true_u = leading_subspace(truth_svd->left, std::min<Index>(j, truth_svd->left.cols()));
      norm_e = spectral_norm(inst.obs.values / p - *truth_matrix, method);
      params = completion_params(*truth_matrix, p, K);
    }
    std::ostringstream csv;
    csv << "m,error_abs,error_rel,bound,prob_lower\n";
    Json results = Json::array();
    for (Index col : columns) {
      RecoveryResult r = completer.recover(col);
      double bound = NAN;
      double prob = NAN;
      if (truth_matrix) {
        r = recovery_error(*truth_matrix, std::move(r), true_u);
        all_rel.push_back(*r.error_rel);
        if (j <= rank) {
          const Vector x = truth_matrix->col(col - 1);
          RecoveryBoundInput in;
          in.sigma_j = truth_svd->singular_values(j - 1);
          in.sigma_jp1 = j < rank ? truth_svd->singular_values(j) : 0.0;
          in.delta_j = in.sigma_j - in.sigma_jp1;
          in.j = j;
          in.r = rank;
          in.norm_x_inf = x.cwiseAbs().maxCoeff();
          in.norm_x = x.norm();
          in.n = x.size();
          in.p = p;
          in.K = K;
          in.lambda = lambda;
          in.params = *params;
          in.norm_E = norm_e;
          in.C_abs = c_abs;
          if (in.delta_j > 0) {
            const BoundReport b = recovery_bound(in);
            bound = b.value;
            prob = b.prob_lower;
          }
        }
      }
      csv << col << ',' << detail::format_double(r.error_abs.value_or(NAN)) << ','
          << detail::format_double(r.error_rel.value_or(NAN)) << ',' << detail::format_double(bound) << ','
          << detail::format_double(prob) << '\n';
      Json rj = detail::to_json(r);
      if (!emit_estimates) rj.erase("estimate");
      rj["bound"] = number(bound);
      rj["prob_lower"] = number(prob);
      results.push_back(rj);
    }
    const std::string name = instances.size() == 1 ? "recovery.csv" : "recovery_" + std::to_string(t) + ".csv";
    write_text(ctx.out_dir / name, csv.str());
    Json run;
    run["trial"] = t;
    run["p_estimate"] = {{"p", number(est.p)}, {"approximate", est.approximate}};
    run["p_used"] = number(p);
    run["norm_E"] = number(norm_e);
    run["params"] = params ? detail::to_json(*params) : Json(nullptr);
    run["flags"] = inst.flags;
    run["csv"] = name;
    run["columns"] = results;
    runs.push_back(run);
  }
  summary["runs"] = runs;
  summary["median_error_rel"] = all_rel.empty() ? Json(nullptr) : number(quantile(all_rel, 0.5));
  const fs::path json = ctx.out_dir / "completion.json";
  write_text(json, dump(summary));
  if (!all_rel.empty()) ctx.out << "median error_rel: " << detail::format_double(quantile(all_rel, 0.5)) << "\n";
  ctx.out << "wrote " << json.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- report

int cmd_report(Context& ctx) {
  if (ctx.opts.inputs.empty()) throw ConfigError("report: no input paths given");
  Json artifacts = Json::array();
  for (std::size_t k = 0; k < ctx.opts.inputs.size(); ++k) {
    const fs::path in = ctx.opts.inputs[k];
    std::vector<fs::path> files;
    if (fs::is_directory(in)) {
      for (const auto& e : fs::directory_iterator(in)) {
        const auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".json" || ext == ".csv") && e.path().filename() != "summary.json") {
          files.push_back(e.path());
        }
      }
      std::sort(files.begin(), files.end());
    } else if (fs::is_regular_file(in)) {
      files.push_back(in);
    } else {
      throw std::runtime_error("report: no such file or directory: " + in.string());
    }
    for (const auto& f : files) {
      std::ifstream s(f, std::ios::binary);
      if (!s) throw std::runtime_error("report: cannot read " + f.string());
      Json a;
      a["input"] = k;
      a["file"] = f.filename().string();
      if (f.extension() == ".json") {
        a["type"] = "json";
        try {
          a["content"] = Json::parse(s);
        } catch (const nlohmann::json::exception& ex) {
          throw DomainError("report: " + f.string() + ": invalid JSON: " + ex.what());
        }
      } else {
        a["type"] = "csv";
        std::string header;
        std::getline(s, header);
        std::size_t rows = 0;
        for (std::string line; std::getline(s, line);) rows += line.empty() ? 0 : 1;
        a["header"] = header;
        a["rows"] = rows;
      }
      artifacts.push_back(a);
    }
  }
  if (artifacts.empty()) throw ConfigError("report: no JSON or CSV artifacts found");
  Json summary;
  summary["schema_version"] = detail::kSchemaVersion;
  summary["kind"] = "summary";
  summary["artifacts"] = artifacts;
  if (ctx.opts.output_dir) {
    const fs::path out = ctx.out_dir / "summary.json";
    write_text(out, dump(summary));
    ctx.out << "wrote " << out.string() << "\n";
  } else {
    ctx.out << dump(summary);
  }
  return kExitOk;
}

}  // namespace

CommandOutput run_command(const CommandOptions& opts) {
  CommandOutput result;
  Context ctx{opts, {}, 0, {}, {}, {}};
  auto finish = [&](int code) {
    result.exit_code = code;
    result.out = ctx.out.str();
    result.err = ctx.err.str();
    return result;
  };
  static const std::vector<std::string> known{"simulate", "bounds", "concentration", "complete", "report"};
  if (std::find(known.begin(), known.end(), opts.command) == known.end()) {
    ctx.err << "error: unknown command '" << opts.command << "' (simulate, bounds, concentration, complete, report)\n";
    return finish(kExitConfigError);
  }
  try {
    if (opts.threads == 0) throw ConfigError("--threads must be >= 1");
    if (opts.config_path) ctx.cfg = Config::parse_file(*opts.config_path);
    for (const auto& o : opts.overrides) ctx.cfg.apply_override(o);
    const bool random = opts.command == "simulate" || opts.command == "concentration" || opts.command == "complete";
    if (random) {
      if (opts.seed) {
        ctx.seed = *opts.seed;
      } else if (opts.ci) {
        throw ConfigError("--seed is required with --ci");
      } else {
        ctx.err << "warning: no --seed given; using seed 0\n";
      }
    }
    ctx.out_dir = opts.output_dir.value_or(".");
    if (opts.output_dir) fs::create_directories(ctx.out_dir);
    int code = kExitOk;
    if (opts.command == "simulate") code = cmd_simulate(ctx);
    if (opts.command == "bounds") code = cmd_bounds(ctx);
    if (opts.command == "concentration") code = cmd_concentration(ctx);
    if (opts.command == "complete") code = cmd_complete(ctx);
    if (opts.command == "report") code = cmd_report(ctx);
    return finish(code);
  } catch (const std::exception& ex) {
    ctx.err << "error: " << ex.what() << "\n";
    return finish(kExitConfigError);
  }
}

}  // namespace pertbound
