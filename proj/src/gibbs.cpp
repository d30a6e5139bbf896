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

#include "kc/gibbs.hpp"

#include <cmath>

#include "kc/error.hpp"

namespace kc {

void GibbsModel::validate() const {
  const Index n = size();
  if (n == 0 || g.size() != n || h.size() != n || m.rows() != n || m.cols() != n)
    throw ModelInvariantError("gibbs model arrays have inconsistent sizes");
  if (!(delta > 0.0 && delta < 0.5)) throw ModelInvariantError("gibbs delta must lie in (0,1/2)");
  if (!((nu.array() > 0.0).all()) || !nu.allFinite() || !g.allFinite() || !h.allFinite() ||
      !m.allFinite())
    throw ModelInvariantError("gibbs model has non-finite potentials or non-positive nu");
  if (std::abs(((-g).array().exp() * nu.array()).sum() - 1.0) > 1e-9)
    throw ModelInvariantError("exp(-g) nu is not a probability measure");
  if (std::abs(((-h).array().exp() * nu.array()).sum() - 1.0) > 1e-9)
    throw ModelInvariantError("exp(-h) nu is not a probability measure");
  for (Index y = 0; y < n; ++y)
    if (std::abs(((-m.row(y).transpose()).array().exp() * nu.array()).sum() - 1.0) > 1e-9)
      throw ModelInvariantError("exp(-m(y,.)) nu is not a probability measure");
}

namespace {

// log sum_i exp(-f_i) nu_i, stable for large |f|.
double log_partition(const Vector& f, const Vector& nu) {
  const double fmin = f.minCoeff();
  return -fmin + std::log(((fmin - f.array()).exp() * nu.array()).sum());
}

}  // namespace

GibbsModel GibbsModel::normalized(Vector nu, Vector g, Vector h, Matrix m, double delta) {
  GibbsModel model;
  g.array() += log_partition(g, nu);
  h.array() += log_partition(h, nu);
  for (Index y = 0; y < m.rows(); ++y) {
    const Vector row = m.row(y).transpose();
    m.row(y).array() += log_partition(row, nu);
  }
  model.nu = std::move(nu);
  model.g = std::move(g);
  model.h = std::move(h);
  model.m = std::move(m);
  model.delta = delta;
  model.validate();
  return model;
}

GibbsModel quadratic_gibbs_model(const Grid& grid, double a, double b, double k, double delta) {
  if (grid.dim() != 1) throw ConfigError("quadratic_gibbs_model needs a 1-D grid");
  if (!(a > 0.0 && b > 0.0 && k >= 0.0)) throw ConfigError("gibbs coefficients must be positive");
  const Index n = grid.size();
  Vector g(n), h(n);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    const double x = grid.x(i);
    g[i] = 0.5 * a * x * x;
    h[i] = 0.5 * b * x * x;
    for (Index j = 0; j < n; ++j) {
      const double d = grid.x(i) - grid.x(j);
      m(i, j) = 0.5 * k * d * d;
    }
  }
  return GibbsModel::normalized(Vector::Ones(n), std::move(g), std::move(h), std::move(m), delta);
}

GibbsPair build_gibbs_pair(const GibbsModel& model) {
  model.validate();
  const Index n = model.size();
  const double delta = model.delta;
  const Vector& nu = model.nu;
  GibbsPair pair;
  pair.nu_g = ((-model.g).array().exp() * nu.array()).matrix();
  pair.nu_h = ((-model.h).array().exp() * nu.array()).matrix();
  const Matrix E = (-model.m).array().exp().matrix();  // E(y, x) = exp(-m(y,x))

  Matrix M = E * nu.asDiagonal();
  // q(x) = d(nu_h M)/d nu (x) = sum_y nu_h(y) exp(-m(y,x)).
  const Vector q = E.transpose() * pair.nu_h;
  Matrix K(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) K(x, y) = pair.nu_h[y] * E(y, x) / q[x];
  // w = d nu_g / d(nu_h M).
  const Vector w = ((-model.g).array().exp() / q.array()).matrix();
  Matrix L = M * w.asDiagonal();
  for (Index y = 0; y < n; ++y) L.row(y) /= L.row(y).sum();

  pair.M = KernelMatrix::normalized(std::move(M), "gibbs.M", {0.0, "exact"});
  pair.K = KernelMatrix::normalized(std::move(K), "gibbs.K", {0.0, "exact"});
  pair.L = KernelMatrix::normalized(std::move(L), "gibbs.L", {0.0, "exact"});

  pair.m_h = model.m.transpose() * pair.nu_h;
  pair.m_g = model.m * pair.nu_g;
  pair.g_delta = delta * model.g - pair.m_h;
  pair.h_delta = delta * model.h - pair.m_g;
  pair.m_min = model.m.minCoeff();
  const double nu_1md_h = ((-(1.0 - delta) * model.h).array().exp() * nu.array()).sum();
  const double nu_1m2d_g = ((-(1.0 - 2.0 * delta) * model.g).array().exp() * nu.array()).sum();
  const double nu_g_of_g = pair.nu_g.dot(model.g);
  pair.c_delta_h = std::exp(-pair.m_min) * nu_1md_h;
  // The bound on exp(-m) in the second inequality costs exp(-m_min) whenever
  // m takes negative values; with m >= 0 this is the plain constant.
  pair.c_delta_g = nu_1m2d_g * std::exp(-pair.g_delta.minCoeff() - nu_g_of_g) *
                   std::exp(std::max(0.0, -pair.m_min));
  if (!std::isfinite(pair.c_delta_h) || !std::isfinite(pair.c_delta_g))
    throw ModelInvariantError("gibbs integrability constants are not finite for this delta");
  pair.V = WeightFunction((delta * model.g).array().exp().matrix(), "exp(delta g)");
  pair.W = WeightFunction((delta * model.h).array().exp().matrix(), "exp(delta h)");
  return pair;
}

GibbsLyapunovCheck gibbs_lyapunov_check(const GibbsModel& model, const GibbsPair& pair) {
  const double delta = model.delta;
  const Vector KW = right_action(pair.K, pair.W.values());
  const Vector LV = right_action(pair.L, pair.V.values());
  GibbsLyapunovCheck check;
  check.min_slack_h2g = INFINITY;
  check.min_slack_g2h = INFINITY;
  for (Index i = 0; i < model.size(); ++i) {
    const double lhs_h = std::exp(-delta * model.g[i]) * KW[i];
    const double rhs_h = pair.c_delta_h * std::exp(-pair.g_delta[i]);
    check.min_slack_h2g = std::min(check.min_slack_h2g, (rhs_h - lhs_h) / rhs_h);
    const double lhs_g = std::exp(-delta * model.h[i]) * LV[i];
    const double rhs_g = pair.c_delta_g * std::exp(-pair.h_delta[i]);
    check.min_slack_g2h = std::min(check.min_slack_g2h, (rhs_g - lhs_g) / rhs_g);
  }
  return check;
}

}  // namespace kc
