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

#include "json_out.hpp"

#include <cmath>

namespace pertbound::detail {

Json number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

namespace {

Json numbers(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

}  // namespace

Json to_json(const BoundReport& b) {
  Json j;
  j["kind"] = b.kind;
  j["available"] = b.available;
  j["value"] = number(b.value);
  j["raw_value"] = number(b.raw_value);
  j["prob_lower"] = number(b.prob_lower);
  j["raw_prob"] = number(b.raw_prob);
  j["clipped"] = b.clipped;
  j["vacuous"] = b.vacuous;
  j["flags"] = b.flags;
  Json inputs = Json::object();
  for (const auto& [k, v] : b.inputs) inputs[k] = number(v);
  j["inputs"] = inputs;
  return j;
}

Json to_json(const TOptimum& t) {
  Json j;
  j["t_star"] = t.t_star ? number(*t.t_star) : Json(nullptr);
  j["bound"] = to_json(t.report);
  return j;
}

Json to_json(const ConcentrationParams& p) {
  return Json{{"C1", number(p.C1)}, {"c1", number(p.c1)}, {"gamma", number(p.gamma)}};
}

Json to_json(const WeylSummary& w) {
  Json j;
  j["trials"] = w.trials;
  j["failed_trials"] = w.failed_trials;
  j["weyl_violations"] = w.weyl_violations;
  j["dk_wedin_violations"] = w.dk_wedin_violations;
  j["max_shift_over_norm"] = number(w.max_shift_over_norm);
  Json pw;
  pw["j"] = w.j;
  pw["t_lower"] = number(w.t_lower);
  pw["lower_prob"] = number(w.lower_prob);
  pw["lower_violations"] = w.lower_violations;
  pw["t_upper"] = w.t_upper ? number(*w.t_upper) : Json(nullptr);
  pw["upper_prob"] = number(w.upper_prob);
  pw["upper_violations"] = w.upper_violations;
  j["probabilistic_weyl"] = pw;
  Json lem;
  lem["projection_holds"] = w.projection_lemma_holds;
  lem["projection_prob"] = number(w.projection_lemma_prob);
  lem["overlap_holds"] = w.overlap_lemma_holds;
  lem["overlap_prob"] = number(w.overlap_lemma_prob);
  j["proof_lemmas"] = lem;
  return j;
}

Json to_json(const ComparisonTable& table) {
  Json j;
  j["q_levels"] = numbers(table.q_levels);
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    Json row;
    row["quantity"] = r.quantity;
    row["empirical"] = numbers(r.empirical);
    Json cl = Json::array();
    for (const auto& b : r.classical) cl.push_back(to_json(b));
    row["classical"] = cl;
    Json co = Json::array();
    for (const auto& b : r.corollary) co.push_back(to_json(b));
    row["corollary"] = co;
    Json nb = Json::array();
    for (const auto& t : r.new_bound) nb.push_back(to_json(t));
    row["new_bound"] = nb;
    row["violation_rate"] = numbers(r.violation_rate);
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

Json to_json(const TrialResult& t) {
  Json j;
  j["trial_index"] = t.trial_index;
  j["ok"] = t.ok;
  if (!t.ok) j["error"] = t.error;
  j["norm_E"] = number(t.norm_E);
  j["sin_vj"] = numbers(t.sin_vj);
  j["sin_subspace_j"] = numbers(t.sin_subspace_j);
  j["sv_shifts"] = numbers(t.sv_shifts);
  j["max_sv_shift"] = number(t.max_sv_shift);
  j["weyl_ok"] = t.weyl_ok;
  j["dk_wedin_ok"] = t.dk_wedin_ok;
  j["prob_weyl_lower_ok"] = t.prob_weyl_lower_ok;
  j["prob_weyl_upper_ok"] = t.prob_weyl_upper_ok;
  j["projection_lemma"] = {{"measured", number(t.lemma.projection)},
                           {"bound", number(t.lemma.projection_bound.value)},
                           {"holds", t.lemma.projection_holds}};
  j["overlap_lemma"] = {{"measured", number(t.lemma.overlap)},
                        {"bound", number(t.lemma.overlap_bound.value)},
                        {"holds", t.lemma.overlap_holds}};
  j["flags"] = t.flags;
  return j;
}

Json to_json(const ExperimentConfig& cfg) {
  Json j;
  j["m"] = cfg.lowrank.m;
  j["n"] = cfg.lowrank.n;
  j["singular_values"] = numbers(cfg.lowrank.singular_values);
  j["lowrank_seed"] = cfg.lowrank.seed;
  j["noise"] = {{"kind", std::string(to_string(cfg.noise.kind))}, {"K", number(cfg.noise.K)}};
  j["params"] = to_json(concentration_params(cfg.noise));
  j["rigorous_constants"] = params_are_rigorous(cfg.noise);
  j["trials"] = cfg.trials;
  j["js"] = cfg.js;
  j["subspace_js"] = cfg.subspace_js;
  j["master_seed"] = cfg.master_seed;
  j["side"] = cfg.side == VectorSide::Right ? "right" : "left";
  j["eps"] = number(cfg.eps);
  j["eta"] = number(cfg.eta);
  j["lemma_j"] = cfg.lemma_j;
  return j;
}

Json to_json(const RecoveryResult& r) {
  Json j;
  j["column"] = r.column;
  j["j"] = r.j;
  j["subspace"] = "top_j_left_singular_vectors_of_observed";
  j["error_abs"] = r.error_abs ? number(*r.error_abs) : Json(nullptr);
  j["error_rel"] = r.error_rel ? number(*r.error_rel) : Json(nullptr);
  if (r.terms) j["terms"] = Json::array({number((*r.terms)[0]), number((*r.terms)[1]), number((*r.terms)[2])});
  j["estimate"] = numbers(std::vector<double>(r.estimate.data(), r.estimate.data() + r.estimate.size()));
  return j;
}

}  // namespace pertbound::detail
