// Copyright 2026 The kc Authors
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

#include "kc/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kc/error.hpp"
#include "kc/parallel.hpp"
#include "kc/rng.hpp"
#include "kc/transport.hpp"

namespace kc {
namespace {

std::vector<double> default_eps_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
  return grid;
}

double objective_value(DriftObjective objective, double eps, double c) {
  return objective == DriftObjective::kMinC ? c : c / (1.0 - eps);
}

double norm_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double distance_between(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) s += (x[a] - y[a]) * (x[a] - y[a]);
  return std::sqrt(s);
}

// E |U|^p for U uniform on [a, b].
double uniform_abs_moment(double a, double b, double p) {
  auto F = [p](double u) { return std::copysign(std::pow(std::abs(u), p + 1.0) / (p + 1.0), u); };
  return (F(b) - F(a)) / (b - a);
}

// E exp(delta |U|) for U uniform on [a, b].
double uniform_abs_exp(double a, double b, double delta) {
  auto F = [delta](double u) {
    return u >= 0.0 ? std::expm1(delta * u) / delta : -std::expm1(-delta * u) / delta;
  };
  return (F(b) - F(a)) / (b - a);
}

}  // namespace

double drift_constant(const Vector& PV, const Vector& V, double eps) {
  return std::max(0.0, (PV - eps * V).maxCoeff());
}

DriftCertificate certify_drift_at(const KernelMatrix& P, const WeightFunction& V, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("drift eps must lie in (0,1)");
  require_same_size(P.size(), V.size(), "certify_drift");
  const Vector PV = right_action(P, V.values());
  DriftCertificate cert;
  cert.eps = eps;
  cert.c = drift_constant(PV, V.values(), eps);
  cert.V_label = V.label();
  cert.residual = (PV - eps * V.values()).maxCoeff() - cert.c;
  cert.curve.emplace_back(eps, cert.c);
  return cert;
}

DriftCertificate certify_drift(const KernelMatrix& P, const WeightFunction& V,
                               const DriftOptions& options) {
  require_same_size(P.size(), V.size(), "certify_drift");
  const Vector PV = right_action(P, V.values());
  std::vector<double> grid = options.eps_grid.empty() ? default_eps_grid() : options.eps_grid;
  for (double e : grid)
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("drift eps grid must lie in (0,1)");

  DriftCertificate best;
  double best_score = INFINITY;
  auto consider = [&](double eps) {
    const double c = drift_constant(PV, V.values(), eps);
    best.curve.emplace_back(eps, c);
    const double score = objective_value(options.objective, eps, c);
    if (score < best_score) {
      best_score = score;
      best.eps = eps;
      best.c = c;
    }
  };
  for (double e : grid) consider(e);
  if (options.refine && best_score < INFINITY) {
    const double center = best.eps;
    for (int k = -50; k <= 50; ++k) {
      const double e = center + 1e-3 * k;
      if (k != 0 && e > 1e-3 && e < 1.0 - 1e-3) consider(e);
    }
  }
  std::sort(best.curve.begin(), best.curve.end());
  best.V_label = V.label();
  best.residual = (PV - best.eps * V.values()).maxCoeff() - best.c;
  return best;
}

DriftPairCertificate certify_drift_pair(const KernelMatrix& K, const KernelMatrix& L,
                                        const WeightFunction& V, const WeightFunction& W,
                                        double eps0) {
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw ConfigError("drift eps must lie in (0,1)");
  require_same_size(K.size(), L.size(), "certify_drift_pair");
  require_same_size(K.size(), V.size(), "certify_drift_pair");
  require_same_size(K.size(), W.size(), "certify_drift_pair");
  const Vector KW = right_action(K, W.values());
  const Vector LV = right_action(L, V.values());
  DriftPairCertificate out;
  out.eps0 = eps0;
  out.c0 = std::max(drift_constant(KW, V.values(), eps0), drift_constant(LV, W.values(), eps0));
  out.K = {eps0, out.c0, W.label() + "->" + V.label(),
           (KW - eps0 * V.values()).maxCoeff() - out.c0, {{eps0, out.c0}}};
  out.L = {eps0, out.c0, V.label() + "->" + W.label(),
           (LV - eps0 * W.values()).maxCoeff() - out.c0, {{eps0, out.c0}}};
  out.eps = eps0 * eps0;
  out.c = (1.0 + eps0) * out.c0;
  const Vector KLV = right_action(K, LV);
  out.product_residual = (KLV - out.eps * V.values()).maxCoeff() - out.c;
  return out;
}

DriftPairCertificate certify_drift_pair_scan(const KernelMatrix& K, const KernelMatrix& L,
                                             const WeightFunction& V, const WeightFunction& W) {
  DriftPairCertificate best;
  double best_score = INFINITY;
  auto consider = [&](double e) {
    auto cert = certify_drift_pair(K, L, V, W, e);
    const double score = cert.c / (1.0 - cert.eps);
    if (score < best_score) {
      best_score = score;
      best = std::move(cert);
    }
  };
  for (double e : default_eps_grid()) consider(e);
  const double center = best.eps0;
  for (int k = -50; k <= 50; ++k) {
    const double e = center + 1e-3 * k;
    if (k != 0 && e > 1e-3 && e < 1.0 - 1e-3) consider(e);
  }
  return best;
}

MinorizationCertificate minorization(const KernelMatrix& P, const WeightFunction& V, double r) {
  require_same_size(P.size(), V.size(), "minorization");
  MinorizationCertificate cert;
  cert.r = r;
  for (Index i = 0; i < V.size(); ++i)
    if (V[i] <= r) cert.sublevel.push_back(i);
  if (cert.sublevel.empty()) {
    cert.message = "empty sublevel set";
    return cert;
  }
  Vector q = P.row(cert.sublevel.front());
  for (Index i : cert.sublevel) q = q.cwiseMin(P.row(i));
  cert.alpha = q.sum();
  if (!(cert.alpha > 0.0)) {
    cert.message = "rows on the sublevel set share no common mass";
    cert.alpha = 0.0;
    return cert;
  }
  cert.nu_r = q / cert.alpha;
  cert.alpha = std::min(cert.alpha, 1.0);
  cert.ok = true;
  return cert;
}

namespace {

struct PairRatio {
  double level;
  double ratio;
  Index i;
  Index j;
};

std::vector<std::pair<Index, Index>> candidate_pairs(Index n, bool symmetric) {
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < n; ++i)
    for (Index j = symmetric ? i + 1 : 0; j < n; ++j)
      if (i != j) pairs.emplace_back(i, j);
  return pairs;
}

std::vector<PairRatio> pair_ratios(const KernelMatrix& P, const CostFunction& kappa,
                                   const WeightFunction& V,
                                   const std::vector<std::pair<Index, Index>>& pairs) {
  std::vector<PairRatio> out(pairs.size());
  const CostFunction cost = kappa.discrete_weights() ? kappa : kappa.materialized();
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const double denom = cost(i, j);
    if (!(denom > 0.0)) throw AxiomViolationError("cost vanishes off the diagonal");
    const double num = transport_value(P.row(i), P.row(j), cost);
    out[k] = {V[i] + V[j], num / denom, i, j};
  });
  return out;
}

}  // namespace

LocalContractionCertificate local_contraction(const KernelMatrix& P, const CostFunction& kappa,
                                              const WeightFunction& V, double r,
                                              const LocalContractionOptions& options) {
  require_same_size(P.size(), kappa.size(), "local_contraction");
  require_same_size(P.size(), V.size(), "local_contraction");
  LocalContractionCertificate cert;
  cert.r = r;
  cert.kappa_label = kappa.label();
  std::vector<std::pair<Index, Index>> pairs;
  for (const auto& [i, j] : candidate_pairs(P.size(), kappa.symmetric()))
    if (V[i] + V[j] <= r) pairs.emplace_back(i, j);
  if (pairs.empty()) {
    cert.message = "no pairs with V(x) + V(y) <= r";
    return cert;
  }
  if (options.max_pairs > 0 && static_cast<Index>(pairs.size()) > options.max_pairs) {
    CounterRng rng(options.seed);
    for (std::size_t k = 0; k < static_cast<std::size_t>(options.max_pairs); ++k)
      std::swap(pairs[k], pairs[k + rng.below(pairs.size() - k)]);
    pairs.resize(static_cast<std::size_t>(options.max_pairs));
    cert.heuristic = true;
  }
  const auto ratios = pair_ratios(P, kappa, V, pairs);
  cert.n_pairs = static_cast<Index>(ratios.size());
  cert.s = -1.0;
  for (const auto& pr : ratios)
    if (pr.ratio > cert.s) {
      cert.s = pr.ratio;
      cert.witness_i = pr.i;
      cert.witness_j = pr.j;
    }
  if (cert.s >= 1.0) {
    cert.message = "no contraction on the sublevel pairs";
    return cert;
  }
  cert.alpha = std::min(1.0 - cert.s, kAlphaCap);
  cert.ok = true;
  return cert;
}

LocalContractionProfile LocalContractionProfile::build(const KernelMatrix& P,
                                                       const CostFunction& kappa,
                                                       const WeightFunction& V) {
  require_same_size(P.size(), kappa.size(), "LocalContractionProfile");
  require_same_size(P.size(), V.size(), "LocalContractionProfile");
  auto ratios = pair_ratios(P, kappa, V, candidate_pairs(P.size(), kappa.symmetric()));
  std::sort(ratios.begin(), ratios.end(),
            [](const PairRatio& a, const PairRatio& b) { return a.level < b.level; });
  LocalContractionProfile profile;
  profile.kappa_label_ = kappa.label();
  double running = -1.0;
  std::pair<Index, Index> arg{-1, -1};
  for (const auto& pr : ratios) {
    if (pr.ratio > running) {
      running = pr.ratio;
      arg = {pr.i, pr.j};
    }
    profile.levels_.push_back(pr.level);
    profile.running_max_.push_back(running);
    profile.argmax_.push_back(arg);
  }
  return profile;
}

LocalContractionCertificate LocalContractionProfile::at(double r) const {
  LocalContractionCertificate cert;
  cert.r = r;
  cert.kappa_label = kappa_label_;
  const auto it = std::upper_bound(levels_.begin(), levels_.end(), r);
  const auto count = static_cast<std::size_t>(it - levels_.begin());
  cert.n_pairs = static_cast<Index>(count);
  if (count == 0) {
    cert.message = "no pairs with V(x) + V(y) <= r";
    return cert;
  }
  cert.s = running_max_[count - 1];
  cert.witness_i = argmax_[count - 1].first;
  cert.witness_j = argmax_[count - 1].second;
  if (cert.s >= 1.0) {
    cert.message = "no contraction on the sublevel pairs";
    return cert;
  }
  cert.alpha = std::min(1.0 - cert.s, kAlphaCap);
  cert.ok = true;
  return cert;
}

LocalContractionProfile LocalContractionProfile::rescaled(double s) const {
  LocalContractionProfile out = *this;
  for (double& level : out.levels_) level = 1.0 + s * level;
  return out;
}

HypFxFit fit_hypfx(const PointMap& F, const Grid& grid, std::vector<double> x0) {
  if (static_cast<int>(x0.size()) != grid.dim()) throw ConfigError("x0 dimension mismatch");
  HypFxFit fit;
  const auto fx0 = F(x0);
  const Index n = grid.size();
  std::vector<double> dist(static_cast<std::size_t>(n)), image(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    dist[static_cast<std::size_t>(i)] = distance_between(grid.point(i), x0);
    const auto fx = F(grid.point(i));
    image[static_cast<std::size_t>(i)] = distance_between(fx, fx0);
  }
  std::vector<double> sorted = dist;
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  const double median = sorted[static_cast<std::size_t>(n / 2)];
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (dist[k] >= median && dist[k] > 0.0) fit.lambda = std::max(fit.lambda, image[k] / dist[k]);
  }
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    fit.c = std::max(fit.c, image[k] - fit.lambda * dist[k]);
  }
  fit.x0 = std::move(x0);
  fit.certifiable = fit.lambda < 1.0;
  return fit;
}

IrfLyapunovReport irf_lyapunov(const IrfModel& model, const Grid& grid, const KernelMatrix& P,
                               const IrfLyapunovOptions& options) {
  require_same_size(P.size(), grid.size(), "irf_lyapunov");
  IrfLyapunovReport report;
  report.hypfx = options.hypfx
                     ? *options.hypfx
                     : fit_hypfx(model.F, grid, std::vector<double>(static_cast<std::size_t>(grid.dim()), 0.0));
  if (!(report.hypfx.lambda < 1.0)) {
    report.message = "fitted lambda(x0) >= 1; the deterministic part does not contract";
    return report;
  }
  // The construction needs lambda0 in (0,1); a larger lambda keeps the fit valid.
  const double lambda0 = std::max(report.hypfx.lambda, 1e-6);
  const auto fx0 = model.F(report.hypfx.x0);
  report.c_lambda = report.hypfx.c + norm_of(fx0) + lambda0 * norm_of(report.hypfx.x0);
  const bool spread = grid.dim() == 1 && model.noise_spacing > 0.0;
  const double half = 0.5 * model.noise_spacing;
  const DiscreteMeasure noise(model.noise_weights);

  if (options.mode == IrfLyapunovMode::kPolynomial) {
    const double p = options.p;
    if (!(p >= 1.0)) throw ConfigError("polynomial Lyapunov mode needs p >= 1");
    double moment = 0.0;
    for (std::size_t k = 0; k < model.noise_points.size(); ++k) {
      const auto& z = model.noise_points[k];
      moment += noise[static_cast<Index>(k)] *
                (spread ? uniform_abs_moment(z[0] - half, z[0] + half, p) : std::pow(norm_of(z), p));
    }
    report.c_lambda_p = report.c_lambda + std::pow(moment, 1.0 / p);
    report.r = report.c_lambda_p / (lambda0 * (1.0 - lambda0));
    const double lambda1 = 1.0 - (1.0 - lambda0) * (1.0 - lambda0);
    report.predicted_eps = std::pow(lambda1, p);
    report.predicted_c = 0.5 + std::pow(lambda0 * report.r + report.c_lambda_p, p);
    report.V = WeightFunction::from_function(
        grid, [p](std::span<const double> x) { return 0.5 + std::pow(norm_of(x), p); },
        "1/2+|x|^p");
  } else {
    const double delta = options.delta;
    if (!(delta > 0.0)) throw ConfigError("exponential Lyapunov mode needs delta > 0");
    if (!(options.eps > 0.0 && options.eps < 1.0)) throw ConfigError("target eps must lie in (0,1)");
    double mgf = 0.0;
    for (std::size_t k = 0; k < model.noise_points.size(); ++k) {
      const auto& z = model.noise_points[k];
      mgf += noise[static_cast<Index>(k)] *
             (spread ? uniform_abs_exp(z[0] - half, z[0] + half, delta) : std::exp(delta * norm_of(z)));
    }
    report.a1 = std::exp(delta * report.c_lambda) * mgf;
    report.predicted_eps = options.eps;
    report.predicted_c =
        report.a1 * 0.5 * std::pow(report.a1 / options.eps, 1.0 / (1.0 - lambda0));
    report.V = WeightFunction::from_function(
        grid, [delta](std::span<const double> x) { return 0.5 * std::exp(delta * norm_of(x)); },
        "exp(delta|x|)/2");
  }
  report.check = certify_drift_at(P, report.V, report.predicted_eps);
  report.prediction_holds = report.check.c <= report.predicted_c;
  report.certifiable = report.check.valid();
  if (!report.prediction_holds)
    report.message = "grid drift constant exceeds the predicted one (truncation or grid effects)";
  return report;
}

GeneratorDriftReport generator_drift_check(const KernelMatrix& Qh, const WeightFunction& V,
                                           double a0, double a1, double h,
                                           double relative_slack) {
  if (!(h > 0.0)) throw ConfigError("generator_drift_check requires h > 0");
  require_same_size(Qh.size(), V.size(), "generator_drift_check");
  GeneratorDriftReport report;
  report.eps_h = 1.0 / (1.0 + a0 * h);
  report.c_h = a1 * h;
  report.relative_slack = relative_slack;
  const Vector QV = right_action(Qh, V.values());
  report.max_violation = -INFINITY;
  report.max_relative_violation = -INFINITY;
  for (Index i = 0; i < V.size(); ++i) {
    const double rhs = report.eps_h * V[i] + report.c_h;
    const double gap = QV[i] - rhs;
    report.max_violation = std::max(report.max_violation, gap);
    if (gap / rhs > report.max_relative_violation) {
      report.max_relative_violation = gap / rhs;
      report.worst = i;
    }
  }
  report.passes = report.max_relative_violation <= relative_slack;
  return report;
}

GibbsMinorization gibbs_minorization(const GibbsModel& model, const GibbsPair& pair, double r) {
  GibbsMinorization out;
  out.r = r;
  std::vector<Index> CV, CW;
  for (Index i = 0; i < model.size(); ++i) {
    if (pair.V[i] <= r) CV.push_back(i);
    if (pair.W[i] <= r) CW.push_back(i);
  }
  if (CV.empty() || CW.empty()) throw OutOfRangeError("gibbs sublevel set is empty at this r");
  double sup_m = -INFINITY;
  for (Index x : CV)
    for (Index y : CW) sup_m = std::max(sup_m, model.m(y, x));
  double nu_h_CW = 0.0, nu_g_CV = 0.0;
  out.nu_h_r = Vector::Zero(model.size());
  out.nu_g_r = Vector::Zero(model.size());
  for (Index y : CW) {
    nu_h_CW += pair.nu_h[y];
    out.nu_h_r[y] = pair.nu_h[y];
  }
  for (Index x : CV) {
    nu_g_CV += pair.nu_g[x];
    out.nu_g_r[x] = pair.nu_g[x];
  }
  out.nu_h_r /= nu_h_CW;
  out.nu_g_r /= nu_g_CV;
  const double delta = model.delta;
  const double nu_1md_g =
      ((-(1.0 - delta) * model.g).array().exp() * model.nu.array()).sum();
  out.a = pair.m_min - sup_m;
  out.b = pair.g_delta.minCoeff() - sup_m;
  out.alpha_h = std::exp(out.a) * nu_h_CW;
  // Lower bounding the normalizer of L costs a factor exp(2 m_min) when m can
  // be negative; for m >= 0 the bound below is the plain one.
  out.alpha_g = nu_g_CV * std::exp(out.b) / nu_1md_g * std::exp(2.0 * std::min(pair.m_min, 0.0));
  out.alpha = std::min(out.alpha_h, out.alpha_g);
  out.direct_K = minorization(pair.K, pair.V, r);
  out.direct_L = minorization(pair.L, pair.W, r);
  out.alpha_direct = std::min(out.direct_K.alpha, out.direct_L.alpha);
  out.ok = out.alpha > 0.0;
  if (!out.ok) out.message = "explicit minorization constant vanished";
  return out;
}

}  // namespace kc
