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


#include "kc/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kc/error.hpp"
#include "kc/parallel.hpp"
#include "kc/rng.hpp"
#include "kc/transport.hpp"

namespace kc {
namespace {

CostFunction prepared(const CostFunction& c) {
  return c.discrete_weights() ? c : c.materialized();
}

Vector dirichlet(CounterRng& rng, Index n, Index support) {
  Vector w = Vector::Zero(n);
  if (support <= 0 || support >= n) {
    for (Index i = 0; i < n; ++i) w[i] = rng.exponential() + 1e-300;
  } else {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index k = 0; k < support; ++k) {
      const auto pick = static_cast<std::size_t>(k) + rng.below(static_cast<std::uint64_t>(n - k));
      std::swap(idx[static_cast<std::size_t>(k)], idx[pick]);
      w[idx[static_cast<std::size_t>(k)]] = rng.exponential() + 1e-300;
    }
  }
  return w / w.sum();
}

Vector propagate(const Vector& mu, const Matrix& P) { return (mu.transpose() * P).transpose(); }

double vec_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double vec_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

}  // namespace

double pair_ratio(const KernelMatrix& P, const CostFunction& psi, const CostFunction& phi,
                  Index i, Index j) {
  const double denom = psi(i, j);
  if (!(denom > 0.0)) throw AxiomViolationError("input cost vanishes off the diagonal");
  return transport_value(P.row(i), P.row(j), phi) / denom;
}

ContractionEstimate dobrushin(const KernelMatrix& P, const CostFunction& psi,
                              const CostFunction& phi) {
  require_same_size(P.size(), psi.size(), "dobrushin");
  require_same_size(P.size(), phi.size(), "dobrushin");
  const CostFunction in = prepared(psi);
  const CostFunction out = prepared(phi);
  const bool sym = psi.symmetric() && phi.symmetric();
  std::vector<std::pair<Index, Index>> pairs;
  const Index n = P.size();
  for (Index i = 0; i < n; ++i)
    for (Index j = sym ? i + 1 : 0; j < n; ++j)
      if (i != j) pairs.emplace_back(i, j);

  std::vector<double> ratios(pairs.size(), 0.0);
  parallel_for(pairs.size(), [&](std::size_t k) {
    ratios[k] = pair_ratio(P, in, out, pairs[k].first, pairs[k].second);
  });

  ContractionEstimate est;
  est.psi_label = psi.label();
  est.phi_label = phi.label();
  est.n_pairs = static_cast<Index>(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (!std::isfinite(ratios[k])) {
      est.infinite = true;
      est.value = INFINITY;
      est.witness_i = pairs[k].first;
      est.witness_j = pairs[k].second;
      return est;
    }
    if (ratios[k] > est.value || est.witness_i < 0) {
      est.value = ratios[k];
      est.witness_i = pairs[k].first;
      est.witness_j = pairs[k].second;
    }
  }
  return est;
}

MeasureCheck dobrushin_measure_check(
    const KernelMatrix& P, const CostFunction& psi, const CostFunction& phi,
    const ContractionEstimate& beta,
    const std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>>& pairs) {
  const CostFunction in = prepared(psi);
  const CostFunction out = prepared(phi);
  MeasureCheck check;
  check.n_pairs = static_cast<Index>(pairs.size());
  std::vector<double> excess(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto& [mu1, mu2] = pairs[k];
    const double lhs =
        transport_value(propagate(mu1.weights(), P.matrix()), propagate(mu2.weights(), P.matrix()), out);
    const double rhs = beta.value * transport_value(mu1.weights(), mu2.weights(), in);
    excess[k] = lhs - rhs;
  });
  for (double e : excess) {
    check.max_excess = std::max(check.max_excess, e);
    if (e > 1e-9) ++check.violations;
  }
  if (beta.witness_i >= 0) {
    const Index i = beta.witness_i, j = beta.witness_j;
    check.witness_gap = transport_value(P.row(i), P.row(j), out) - beta.value * in(i, j);
  }
  return check;
}

std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> random_measure_pairs(
    Index n, int count, std::uint64_t seed, Index support_size) {
  if (n < 2) throw ConfigError("random measure pairs need at least two points");
  const Index support = support_size == 0 ? n : std::max<Index>(2, std::min(support_size, n));
  CounterRng rng(seed);
  std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vector a = dirichlet(rng, n, support);
    Vector b = dirichlet(rng, n, support);
    out.emplace_back(DiscreteMeasure::normalized(a), DiscreteMeasure::normalized(b));
  }
  return out;
}

BoundReport theorem1_bounds(double eps, double alpha, double r, double r0, double iota,
                            std::optional<double> phi_ratio) {
  if (!(eps > 0.0 && eps < 1.0)) throw OutOfRangeError("eps must lie in (0,1)");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw OutOfRangeError("alpha must lie in (0,1]");
  if (!(iota >= 0.5 && iota < 1.0)) throw OutOfRangeError("iota must lie in [1/2, 1)");
  BoundReport b;
  b.eps = eps;
  b.alpha = alpha;
  b.r = r;
  b.r0 = r0;
  b.iota = iota;
  b.r_eps = 1.0 / (1.0 - eps);
  if (!(r > std::max(b.r_eps, r0)))
    throw OutOfRangeError("r must exceed max(1/(1-eps), r0)");
  b.delta = (1.0 - eps) / (2.0 + eps) * (1.0 - b.r_eps / r);
  b.rho = alpha / ((1.0 + eps) * 2.0 * r);
  b.bound_re3 = 1.0 - b.delta * alpha / 2.0;
  b.bound_reupsilon = std::pow(1.0 - alpha * std::min(b.delta / 2.0, alpha), 1.0 - iota);
  b.re3cor_threshold = b.rho * (1.0 - b.bound_re3);
  b.bound_re3cor = 1.0 - std::pow(1.0 - b.bound_re3, 2);
  b.phi_ratio = phi_ratio;
  b.re3cor_applicable = phi_ratio && *phi_ratio <= b.re3cor_threshold;
  b.bound_pregibbs = b.bound_re3 * b.bound_re3;
  return b;
}

BoundSweep sweep_theorem_bounds(double eps, const AlphaMap& alpha, double r0,
                                const std::vector<double>& rs, double iota) {
  BoundSweep sweep;
  const double r_eps = 1.0 / (1.0 - eps);
  for (double r : rs) {
    if (!(r > std::max(r_eps, r0))) {
      sweep.skipped.push_back(r);
      continue;
    }
    const auto a = alpha(r);
    if (!a || !(*a > 0.0)) {
      sweep.skipped.push_back(r);
      continue;
    }
    sweep.reports.push_back(theorem1_bounds(eps, std::min(*a, 1.0), r, r0, iota));
  }
  for (std::size_t k = 0; k < sweep.reports.size(); ++k) {
    const int idx = static_cast<int>(k);
    if (sweep.best_re3 < 0 ||
        sweep.reports[k].bound_re3 < sweep.reports[static_cast<std::size_t>(sweep.best_re3)].bound_re3)
      sweep.best_re3 = idx;
    if (sweep.best_reupsilon < 0 ||
        sweep.reports[k].bound_reupsilon <
            sweep.reports[static_cast<std::size_t>(sweep.best_reupsilon)].bound_reupsilon)
      sweep.best_reupsilon = idx;
  }
  return sweep;
}

std::vector<double> geometric_sweep(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi >= lo) || count < 1) throw ConfigError("bad geometric sweep");
  std::vector<double> out;
  if (count == 1) return {lo};
  const double q = std::pow(hi / lo, 1.0 / (count - 1));
  for (int k = 0; k < count; ++k) out.push_back(lo * std::pow(q, k));
  return out;
}

double ComparisonItem::slack() const {
  return equality ? -std::abs(lhs - rhs) : rhs - lhs;
}

double ComparisonReport::worst_slack() const {
  double worst = INFINITY;
  for (const auto& it : items) worst = std::min(worst, it.slack());
  return worst;
}

ComparisonItem product_check(const KernelMatrix& K, const KernelMatrix& L,
                             const CostFunction& phi, const CostFunction& varphi,
                             const CostFunction& psi) {
  ComparisonItem item;
  item.name = "product";
  item.lhs = dobrushin(compose(K, L), phi, psi).value;
  item.rhs = dobrushin(K, phi, varphi).value * dobrushin(L, varphi, psi).value;
  return item;
}

ComparisonReport comparison_suite(const KernelMatrix& P, const CostFunction& phi,
                                  const CostFunction& psi, double scale, double iota) {
  if (!(scale > 0.0)) throw ConfigError("comparison scale must be positive");
  if (!(iota > 0.0 && iota <= 1.0)) throw ConfigError("comparison power must lie in (0,1]");
  const CostFunction f = prepared(phi);
  const CostFunction g = prepared(psi);
  const Index n = P.size();
  ComparisonReport report;
  const double beta_phi = dobrushin(P, f, f).value;
  const double beta_psi = dobrushin(P, g, g).value;

  const CostFunction scaled = scaled_cost(f, scale);
  report.items.push_back({"scaling", dobrushin(P, scaled, scaled).value, beta_phi, true});

  const CostFunction powered = power_cost(f, iota);
  report.items.push_back({"power", dobrushin(P, powered, powered).value,
                          std::pow(beta_phi, iota), false});

  double a = INFINITY, b = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j) {
        const double q = g(i, j) / f(i, j);
        a = std::min(a, q);
        b = std::max(b, q);
      }
  report.items.push_back({"equivalent_costs", beta_phi, b / a * beta_psi, false});

  if (beta_psi < 1.0) {
    const double t = 1.0 - beta_psi;
    const CostFunction mixed(
        n, [f, g, t](Index i, Index j) { return t * std::min(f(i, j), g(i, j)) + g(i, j); },
        "mix(" + f.label() + "," + g.label() + ")", f.symmetric() && g.symmetric());
    const CostFunction m = mixed.materialized();
    report.items.push_back(
        {"small_perturbation", dobrushin(P, m, m).value, 1.0 - t * t, false});
  }

  report.items.push_back(product_check(P, P, f, g, g));
  return report;
}

DecayFit fit_decay(const std::vector<double>& d) {
  DecayFit fit;
  std::size_t m = 0;
  while (m < d.size() && d[m] >= 1e-14 && std::isfinite(d[m])) ++m;
  if (m < 2) return fit;
  std::vector<double> logs(m);
  for (std::size_t k = 0; k < m; ++k) logs[k] = std::log(d[k]);
  // Burn-in: first n from which every local log-slope stays within 5% of the
  // terminal slope, capped so that at least half of the curve is fitted.
  // Curves too short to judge fall back to dropping the first 20%.
  std::size_t burn = static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(m)));
  if (m >= 3) {
    const double tail = logs[m - 1] - logs[m - 2];
    std::size_t k = m - 1;
    while (k > 0) {
      const double s = logs[k] - logs[k - 1];
      if (std::abs(s - tail) > 0.05 * std::abs(tail)) break;
      --k;
    }
    burn = std::min(k, m / 2);
  }
  if (m - burn < 2) burn = m - 2;
  const double count = static_cast<double>(m - burn);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = burn; k < m; ++k) {
    const double x = static_cast<double>(k);
    sx += x;
    sy += logs[k];
    sxx += x * x;
    sxy += x * logs[k];
  }
  const double denom = count * sxx - sx * sx;
  const double slope = (count * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / count;
  const double mean = sy / count;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t k = burn; k < m; ++k) {
    const double pred = intercept + slope * static_cast<double>(k);
    ss_res += (logs[k] - pred) * (logs[k] - pred);
    ss_tot += (logs[k] - mean) * (logs[k] - mean);
  }
  fit.valid = true;
  fit.lambda = std::exp(slope);
  fit.prefactor = std::exp(intercept);
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.burn_in = static_cast<int>(burn);
  fit.n_used = static_cast<int>(m - burn);
  return fit;
}

DecayResult decay_curve(const KernelMatrix& P, const DiscreteMeasure& mu1,
                        const DiscreteMeasure& mu2, const CostFunction& phi,
                        const WeightFunction& V, int N, std::optional<TheoremRate> theorem) {
  require_same_size(P.size(), mu1.size(), "decay_curve");
  require_same_size(P.size(), mu2.size(), "decay_curve");
  require_same_size(P.size(), V.size(), "decay_curve");
  if (N < 0) throw ConfigError("decay horizon must be non-negative");
  const CostFunction cost = prepared(phi);
  DecayResult result;
  Vector a = mu1.weights(), b = mu2.weights();
  const double v0 = weighted_norm_diff(mu1, mu2, V);
  std::vector<double> dphi, dv;
  for (int n = 0; n <= N; ++n) {
    DecaySample s;
    s.n = n;
    s.d_phi = transport_value(a, b, cost);
    s.d_V = ((a - b).cwiseAbs().array() * V.values().array()).sum();
    if (theorem) s.theorem_bound = theorem->prefactor * std::pow(theorem->lambda, n) * v0;
    if (n > 0 && s.d_phi < 1e-14 && result.samples.front().d_phi > 0.0) {
      result.truncated = true;
      break;
    }
    result.samples.push_back(s);
    dphi.push_back(s.d_phi);
    dv.push_back(s.d_V);
    a = propagate(a, P.matrix());
    b = propagate(b, P.matrix());
    // Keep unit mass against drift from repeated products.
    a /= a.sum();
    b /= b.sum();
  }
  result.fit = fit_decay(dphi);
  result.fit_V = fit_decay(dv);
  return result;
}

InvariantResult invariant_measure(const KernelMatrix& P, double tol, int max_iter,
                                  std::uint64_t seed, int restarts) {
  const Index n = P.size();
  auto run = [&](Vector pi, int& iters, double& residual) {
    residual = INFINITY;
    for (iters = 0; iters < max_iter; ++iters) {
      Vector next = propagate(pi, P.matrix());
      next /= next.sum();
      residual = 0.5 * (next - pi).cwiseAbs().sum();
      pi = std::move(next);
      if (residual <= tol) {
        ++iters;
        break;
      }
    }
    return pi;
  };
  InvariantResult res;
  Vector pi = run(Vector::Constant(n, 1.0 / static_cast<double>(n)), res.iterations, res.residual);
  res.converged = res.residual <= tol;
  res.pi = DiscreteMeasure::normalized(pi);
  if (!res.converged) {
    res.message = "power iteration did not converge within the iteration cap";
    return res;
  }
  CounterRng rng(seed);
  res.unique = true;
  for (int k = 0; k < restarts; ++k) {
    int it = 0;
    double r = 0.0;
    const Vector other = run(dirichlet(rng, n, 0), it, r);
    const double tv = 0.5 * (other - pi).cwiseAbs().sum();
    res.max_restart_tv = std::max(res.max_restart_tv, tv);
    if (r > tol || tv > 10.0 * tol) res.unique = false;
  }
  if (!res.unique) res.message = "restarts reached different limits; invariant measure not unique";
  return res;
}

double ContinuousRate::bound(double t) const { return prefactor * std::exp(-rate * t); }

ContinuousRate continuous_time_rate(double h, double lambda_h, double c_h, double iota_const) {
  if (!(h > 0.0)) throw OutOfRangeError("step h must be positive");
  if (!(lambda_h > 0.0 && lambda_h < 1.0)) throw OutOfRangeError("lambda_h must lie in (0,1)");
  ContinuousRate out;
  out.rate = -std::log(lambda_h) / h;
  out.prefactor = iota_const * c_h / lambda_h;
  return out;
}

double wasserstein_constant(WeightType type, double p, double delta) {
  if (!(p >= 1.0)) throw ConfigError("Wasserstein order must be at least 1");
  if (type == WeightType::kPolynomial) return std::pow(2.0, -std::max(p - 1.0, 0.0));
  if (!(delta > 0.0)) throw ConfigError("exponential rate must be positive");
  return std::pow(delta, p) / (std::pow(2.0, p - 1.0) * std::tgamma(p + 1.0));
}

double grid_wasserstein_constant(const Grid& grid, const WeightFunction& V, double p) {
  require_same_size(grid.size(), V.size(), "grid_wasserstein_constant");
  double best = INFINITY;
  for (Index i = 0; i < grid.size(); ++i)
    for (Index j = i + 1; j < grid.size(); ++j)
      best = std::min(best, (V[i] + V[j]) / std::pow(grid.distance(i, j), p));
  return best;
}

WassersteinCurve wasserstein_from_vnorm(const KernelMatrix& P, const DiscreteMeasure& mu1,
                                        const DiscreteMeasure& mu2, const Grid& grid,
                                        const WeightFunction& V, double p, double c_p,
                                        const DecayFit& fit_V, int N) {
  if (!(c_p > 0.0)) throw ConfigError("Wasserstein constant must be positive");
  const CostFunction cost = power_metric(p, grid).materialized();
  WassersteinCurve out;
  out.c_p = c_p;
  out.p = p;
  out.dominated = true;
  Vector a = mu1.weights(), b = mu2.weights();
  for (int n = 0; n <= N; ++n) {
    const double w = transport_value(a, b, cost);
    const double v = ((a - b).cwiseAbs().array() * V.values().array()).sum();
    out.measured.push_back(w);
    out.bound_from_norm.push_back(v / c_p);
    out.bound_from_fit.push_back(fit_V.valid ? fit_V.prefactor * std::pow(fit_V.lambda, n) / c_p
                                             : NAN);
    if (w > v / c_p + 1e-12 * (1.0 + v / c_p)) out.dominated = false;
    a = propagate(a, P.matrix());
    b = propagate(b, P.matrix());
    a /= a.sum();
    b /= b.sum();
  }
  return out;
}

FixedPointResult fixed_point(const PointMap& F, std::vector<double> y0, double tol,
                             int max_iter) {
  FixedPointResult res;
  std::vector<std::vector<double>> path{y0};
  std::vector<double> y = std::move(y0);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> next = F(y);
    if (next.size() != y.size()) throw ConfigError("map changes dimension");
    for (double v : next)
      if (!std::isfinite(v)) {
        res.iterations = it + 1;
        res.message = "iterates diverged";
        return res;
      }
    const double step = vec_dist(next, y);
    path.push_back(next);
    y = std::move(next);
    res.iterations = it + 1;
    if (step <= tol) {
      res.converged = true;
      break;
    }
  }
  res.y_star = y;
  if (!res.converged) {
    res.message = "no convergence within the iteration cap";
    return res;
  }

  // Local Lipschitz ratio around the limit along each axis.
  const std::vector<double> Fy = F(y);
  const double h = 1e-6 * (1.0 + vec_norm(y));
  double ratio = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k)
    for (double sign : {-1.0, 1.0}) {
      std::vector<double> z = y;
      z[k] += sign * h;
      ratio = std::max(ratio, vec_dist(F(z), Fy) / h);
    }
  res.local_ratio = ratio;
  if (ratio >= 1.0 - 1e-9) {
    res.converged = false;
    res.message = "map is not a strict contraction near the limit";
    return res;
  }

  std::vector<double> err;
  for (const auto& p : path) {
    const double e = vec_dist(p, y);
    if (e <= std::max(1e4 * tol, 1e-13)) break;
    err.push_back(e);
  }
  const DecayFit fit = fit_decay(err);
  if (fit.valid) {
    res.rate = fit.lambda;
    res.r_squared = fit.r_squared;
  }
  return res;
}

DeterministicCertificate certify_deterministic_map(const PointMap& F, const Grid& grid,
                                                   double delta, const std::vector<double>& rs) {
  if (!(delta > 0.0)) throw ConfigError("exponential rate must be positive");
  const Index n = grid.size();
  std::vector<std::vector<double>> image(static_cast<std::size_t>(n));
  Vector V(n), PV(n);
  for (Index i = 0; i < n; ++i) {
    const auto x = grid.point(i);
    image[static_cast<std::size_t>(i)] = F(x);
    V[i] = 0.5 * std::exp(delta * grid.norm(i));
    PV[i] = 0.5 * std::exp(delta * vec_norm(image[static_cast<std::size_t>(i)]));
  }
  DeterministicCertificate cert;
  DriftCertificate& d = cert.drift;
  d.V_label = "exp";
  double best = INFINITY;
  for (int k = 1; k <= 950; ++k) {
    const double eps = 1e-3 * k;
    const double c = drift_constant(PV, V, eps);
    if (k % 50 == 0) d.curve.emplace_back(eps, c);
    if (c / (1.0 - eps) < best) {
      best = c / (1.0 - eps);
      d.eps = eps;
      d.c = c;
    }
  }
  d.residual = (PV - d.eps * V).maxCoeff() - d.c;

  cert.ok = d.valid();
  for (double r : rs) {
    LocalContractionCertificate lc;
    lc.r = r;
    lc.kappa_label = "euclidean";
    lc.s = -1.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        if (V[i] + V[j] > r) continue;
        ++lc.n_pairs;
        const double q = vec_dist(image[static_cast<std::size_t>(i)],
                                  image[static_cast<std::size_t>(j)]) /
                         grid.distance(i, j);
        if (q > lc.s) {
          lc.s = q;
          lc.witness_i = i;
          lc.witness_j = j;
        }
      }
    if (lc.n_pairs == 0) {
      lc.message = "no pairs with V(x) + V(y) <= r";
    } else if (lc.s >= 1.0) {
      lc.message = "no contraction on the sublevel pairs";
      cert.ok = false;
    } else {
      lc.alpha = std::min(1.0 - lc.s, kAlphaCap);
      lc.ok = true;
    }
    cert.contraction.push_back(lc);
  }
  return cert;
}

}  // namespace kc
