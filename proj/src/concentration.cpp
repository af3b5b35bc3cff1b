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

#include "pertbound/concentration.hpp"

#include "pertbound/parallel.hpp"
#include "pertbound/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace pertbound {

namespace {

void require_unit(const Vector& x, Index dim, const char* what) {
  if (x.size() != dim) throw DomainError(std::string(what) + ": dimension mismatch");
  if (std::abs(x.norm() - 1.0) > 1e-8) throw DomainError(std::string(what) + ": vector is not unit length");
}

void require_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw DomainError("tail_estimate: empty t grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i]) || t_grid[i] < 0) throw DomainError("tail_estimate: t must be >= 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw DomainError("tail_estimate: t grid must be increasing");
  }
}

// Builds a curve from |statistic| samples.
TailCurve make_curve(std::vector<double> samples, const std::vector<double>& t_grid, Vector u, Vector v) {
  std::sort(samples.begin(), samples.end());
  TailCurve c;
  c.t_grid = t_grid;
  c.trials = samples.size();
  c.u = std::move(u);
  c.v = std::move(v);
  for (double t : t_grid) {
    const auto above = samples.end() - std::upper_bound(samples.begin(), samples.end(), t);
    c.exceed_counts.push_back(static_cast<std::size_t>(above));
    c.empirical_tail.push_back(static_cast<double>(above) / static_cast<double>(c.trials));
  }
  return c;
}

void write_number(std::ostream& out, double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.write(buf, res.ptr - buf);
}

}  // namespace

std::vector<TailCurve> tail_estimate(const NoiseSpec& spec, Index m, Index n,
                                     const std::vector<std::pair<Vector, Vector>>& pairs,
                                     const std::vector<double>& t_grid, std::size_t trials,
                                     std::uint64_t seed, unsigned threads) {
  validate(spec);
  require_grid(t_grid);
  if (trials < kMinTailTrials) throw DomainError("tail_estimate: at least 1000 trials required");
  if (pairs.empty()) throw DomainError("tail_estimate: no (u, v) pairs");
  for (const auto& [u, v] : pairs) {
    require_unit(u, m, "tail_estimate u");
    require_unit(v, n, "tail_estimate v");
  }
  Matrix us(m, pairs.size());
  Matrix vs(n, pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    us.col(k) = pairs[k].first;
    vs.col(k) = pairs[k].second;
  }
  // samples[k * trials + i]
  std::vector<double> samples(pairs.size() * trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    const Matrix e = sample_noise(spec, m, n, derive_seed(seed, i));
    const Matrix ev = e * vs;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      samples[k * trials + i] = std::abs(us.col(k).dot(ev.col(k)));
    }
  });
  std::vector<TailCurve> curves;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    std::vector<double> s(samples.begin() + k * trials, samples.begin() + (k + 1) * trials);
    curves.push_back(make_curve(std::move(s), t_grid, pairs[k].first, pairs[k].second));
  }
  return curves;
}

TailCurve tail_estimate(const NoiseSpec& spec, Index m, Index n, const Vector& u, const Vector& v,
                        const std::vector<double>& t_grid, std::size_t trials, std::uint64_t seed,
                        unsigned threads) {
  return tail_estimate(spec, m, n, {{u, v}}, t_grid, trials, seed, threads).front();
}

TailCurve dilation_tail_estimate(const NoiseSpec& spec, Index m, Index n, const Vector& u,
                                 const Vector& v, const std::vector<double>& t_grid,
                                 std::size_t trials, std::uint64_t seed, unsigned threads) {
  validate(spec);
  require_grid(t_grid);
  if (trials < kMinTailTrials) throw DomainError("dilation_tail_estimate: at least 1000 trials required");
  require_unit(u, m + n, "dilation_tail_estimate u");
  require_unit(v, m + n, "dilation_tail_estimate v");
  std::vector<double> samples(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    const Matrix e = sample_noise(spec, m, n, derive_seed(seed, i));
    // u^T [0 E; E^T 0] v = u_1^T E v_2 + u_2^T E^T v_1
    const double x = u.head(m).dot(e * v.tail(n)) + v.head(m).dot(e * u.tail(n));
    samples[i] = std::abs(x);
  });
  return make_curve(std::move(samples), t_grid, u, v);
}

std::vector<std::pair<Vector, Vector>> tail_test_pairs(Index m, Index n, std::size_t random_pairs,
                                                       std::uint64_t seed) {
  Xoshiro256 rng(seed);
  auto gaussian_unit = [&](Index d) {
    Vector x(d);
    for (Index i = 0; i < d; ++i) x(i) = rng.normal();
    return Vector(x / x.norm());
  };
  auto sign_unit = [&](Index d) {
    Vector x(d);
    for (Index i = 0; i < d; ++i) x(i) = rng.bit() ? 1.0 : -1.0;
    return Vector(x / std::sqrt(static_cast<double>(d)));
  };
  std::vector<std::pair<Vector, Vector>> out;
  for (std::size_t k = 0; k < random_pairs; ++k) {
    Vector u = gaussian_unit(m);
    Vector v = gaussian_unit(n);
    out.emplace_back(std::move(u), std::move(v));
  }
  Vector u = sign_unit(m);
  Vector v = sign_unit(n);
  out.emplace_back(std::move(u), std::move(v));
  return out;
}

ConcentrationReport check_concentration(const TailCurve& curve, const ConcentrationParams& p) {
  validate(p);
  ConcentrationReport r;
  const double n = static_cast<double>(std::max<std::size_t>(curve.trials, 1));
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    const double t = curve.t_grid[i];
    const double emp = curve.empirical_tail[i];
    const double theory = p.C1 * std::exp(-p.c1 * std::pow(t, p.gamma));
    const double se = std::sqrt(emp * (1.0 - emp) / n);
    const double margin = theory + 3.0 * se - emp;
    r.theoretical.push_back(theory);
    r.standard_error.push_back(se);
    r.margins.push_back(margin);
    if (margin < 0) r.holds = false;
    const double ratio = theory > 0 ? emp / theory : (emp > 0 ? INFINITY : 0.0);
    r.worst_ratio = std::max(r.worst_ratio, ratio);
  }
  return r;
}

ConcentrationParams tilde_params(const ConcentrationParams& p) {
  validate(p);
  return {2.0 * p.C1, p.c1 / std::pow(2.0, p.gamma), p.gamma};
}

long double net_size_bound(double eps, Index d) {
  if (!(eps > 0)) throw DomainError("net_size_bound: eps must be > 0");
  if (d <= 0) throw DomainError("net_size_bound: d must be positive");
  return std::pow(1.0L + 2.0L / static_cast<long double>(eps), static_cast<long double>(d));
}

double log_net_size_bound(double eps, Index d) {
  if (!(eps > 0)) throw DomainError("log_net_size_bound: eps must be > 0");
  if (d <= 0) throw DomainError("log_net_size_bound: d must be positive");
  return static_cast<double>(d) * std::log1p(2.0 / eps);
}

std::vector<double> norm_tail(const NoiseSpec& spec, Index m, Index n, std::size_t trials,
                              std::uint64_t seed, unsigned threads) {
  validate(spec);
  if (trials < 50) throw DomainError("norm_tail: at least 50 trials required");
  std::vector<double> norms(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    norms[i] = spectral_norm(sample_noise(spec, m, n, derive_seed(seed, i)));
  });
  std::sort(norms.begin(), norms.end());
  return norms;
}

ParamsFit fit_params_diagnostic(const TailCurve& curve, double gamma) {
  if (!(gamma > 0)) throw DomainError("fit_params_diagnostic: gamma must be > 0");
  const double floor = 10.0 / static_cast<double>(std::max<std::size_t>(curve.trials, 1));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    if (curve.empirical_tail[i] < floor) continue;
    const double x = std::pow(curve.t_grid[i], gamma);
    const double y = std::log(curve.empirical_tail[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  ParamsFit fit;
  fit.points_used = k;
  fit.params.gamma = gamma;
  if (k < 2) {
    fit.params.C1 = NAN;
    fit.params.c1 = NAN;
    return fit;
  }
  const double denom = static_cast<double>(k) * sxx - sx * sx;
  const double slope = (static_cast<double>(k) * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / static_cast<double>(k);
  fit.params.C1 = std::exp(intercept);
  fit.params.c1 = -slope;
  return fit;
}

void write_tail_csv(std::ostream& out, const TailCurve& curve, const ConcentrationParams& p) {
  const ConcentrationReport r = check_concentration(curve, p);
  out << "t,empirical_tail,theoretical_tail,stderr\n";
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    write_number(out, curve.t_grid[i]);
    out << ',';
    write_number(out, curve.empirical_tail[i]);
    out << ',';
    write_number(out, r.theoretical[i]);
    out << ',';
    write_number(out, r.standard_error[i]);
    out << '\n';
  }
}

void write_norm_tail_csv(std::ostream& out, const std::vector<double>& sorted_norms,
                         const std::vector<double>& t_grid, const ConcentrationParams& p, Index m,
                         Index n) {
  validate(p);
  const double count = static_cast<double>(std::max<std::size_t>(sorted_norms.size(), 1));
  out << "t,empirical_tail,theoretical_tail,stderr\n";
  for (double t : t_grid) {
    const auto above = sorted_norms.end() - std::upper_bound(sorted_norms.begin(), sorted_norms.end(), t);
    const double emp = static_cast<double>(above) / count;
    const double log_theory = static_cast<double>(m + n) * std::log(9.0) + std::log(p.C1) -
                              p.c1 * std::pow(t / 2.0, p.gamma);
    const double theory = log_theory >= 0 ? 1.0 : std::exp(log_theory);
    write_number(out, t);
    out << ',';
    write_number(out, emp);
    out << ',';
    write_number(out, theory);
    out << ',';
    write_number(out, std::sqrt(emp * (1.0 - emp) / count));
    out << '\n';
  }
}

}  // namespace pertbound
