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

#include "kc/semidistance.hpp"

#include <cmath>
#include <sstream>

#include "kc/error.hpp"

namespace kc {
namespace {

std::string with_param(const std::string& name, double value) {
  std::ostringstream out;
  out << name << "(" << value << ")";
  return out.str();
}

double distance_to_boundary(const Domain& domain, std::span<const double> x) {
  double d = INFINITY;
  for (std::size_t a = 0; a < x.size(); ++a)
    d = std::min({d, x[a] - domain.lo[a], domain.hi[a] - x[a]});
  return d;
}

}  // namespace

CostFunction::CostFunction(Index n, Fn fn, std::string label, bool symmetric)
    : n_(n), fn_(std::move(fn)), label_(std::move(label)), symmetric_(symmetric) {
  if (n_ <= 0) throw ConfigError("cost function on an empty grid");
}

CostFunction& CostFunction::set_discrete_weights(Vector U) {
  require_same_size(U.size(), n_, "set_discrete_weights");
  discrete_weights_ = std::move(U);
  return *this;
}

CostFunction CostFunction::materialized() const {
  CostFunction copy = *this;
  if (dense_ || n_ > kMaxMaterializedSize) return copy;
  auto m = std::make_shared<Matrix>(n_, n_);
  for (Index j = 0; j < n_; ++j)
    for (Index i = 0; i < n_; ++i) (*m)(i, j) = fn_(i, j);
  copy.dense_ = std::move(m);
  return copy;
}

Matrix CostFunction::block(const std::vector<Index>& rows, const std::vector<Index>& cols) const {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t b = 0; b < cols.size(); ++b)
    for (std::size_t a = 0; a < rows.size(); ++a)
      out(static_cast<Index>(a), static_cast<Index>(b)) = (*this)(rows[a], cols[b]);
  return out;
}

CostFunction discrete_metric(Index n) {
  CostFunction c(n, [](Index i, Index j) { return i == j ? 0.0 : 1.0; }, "phi0");
  c.set_discrete_weights(Vector::Constant(n, 0.5));
  return c;
}

CostFunction weighted_discrete(const WeightFunction& V) {
  const Vector v = V.values();
  CostFunction c(
      v.size(), [v](Index i, Index j) { return i == j ? 0.0 : v[i] + v[j]; },
      "phiV[" + V.label() + "]");
  c.set_discrete_weights(v);
  return c;
}

CostFunction pair_weight(const WeightFunction& V) {
  const Vector v = V.values();
  return CostFunction(
      v.size(), [v](Index i, Index j) { return v[i] + v[j]; }, "varpi[" + V.label() + "]");
}

RhoFamily rho_family(const WeightFunction& V, double rho) {
  if (!(rho > 0.0)) throw ConfigError("rho must be positive");
  WeightFunction V_rho = rho_weight(V, rho);
  const Vector v = V_rho.values();
  // 1 + rho (V(x) + V(y)) = V_rho(x) + V_rho(y).
  CostFunction varpi(
      v.size(), [v](Index i, Index j) { return v[i] + v[j]; },
      with_param("varpiRho[" + V.label() + "]", rho));
  CostFunction phi(
      v.size(), [v](Index i, Index j) { return i == j ? 0.0 : v[i] + v[j]; },
      with_param("phiRho[" + V.label() + "]", rho));
  phi.set_discrete_weights(v);
  return {std::move(V_rho), std::move(varpi), std::move(phi)};
}

CostFunction kappa_interp(const CostFunction& kappa, const WeightFunction& V, double rho,
                          double iota) {
  if (!(iota >= 0.0 && iota <= 1.0)) throw ConfigError("iota must lie in [0,1]");
  require_same_size(kappa.size(), V.size(), "kappa_interp");
  const Vector v = rho_weight(V, rho).values();
  CostFunction c(
      v.size(),
      [kappa, v, iota](Index i, Index j) {
        if (i == j) return 0.0;
        const double k = kappa(i, j);
        if (iota == 1.0) return k;
        return std::pow(k, iota) * std::pow(v[i] + v[j], 1.0 - iota);
      },
      "kappaInterp[" + kappa.label() + "," + with_param("rho", rho) + "," +
          with_param("iota", iota) + "]",
      kappa.symmetric());
  return c;
}

CostFunction additive_cost(const CostFunction& phi, const CostFunction& psi) {
  require_same_size(phi.size(), psi.size(), "additive_cost");
  CostFunction c(
      phi.size(), [phi, psi](Index i, Index j) { return phi(i, j) + psi(i, j); },
      phi.label() + "+" + psi.label(), phi.symmetric() && psi.symmetric());
  if (phi.discrete_weights() && psi.discrete_weights())
    c.set_discrete_weights(*phi.discrete_weights() + *psi.discrete_weights());
  return c;
}

CostFunction scaled_cost(const CostFunction& phi, double a) {
  if (!(a > 0.0)) throw ConfigError("cost scale must be positive");
  CostFunction c(
      phi.size(), [phi, a](Index i, Index j) { return a * phi(i, j); },
      with_param("scale", a) + "*" + phi.label(), phi.symmetric());
  if (phi.discrete_weights()) c.set_discrete_weights(a * *phi.discrete_weights());
  return c;
}

CostFunction power_cost(const CostFunction& phi, double p) {
  if (!(p > 0.0)) throw ConfigError("cost exponent must be positive");
  return CostFunction(
      phi.size(), [phi, p](Index i, Index j) { return std::pow(phi(i, j), p); },
      phi.label() + "^" + with_param("", p), phi.symmetric());
}

CostFunction exp_cost(double delta, const Grid& grid) {
  if (!(delta > 0.0)) throw ConfigError("exp_cost requires delta > 0");
  auto g = std::make_shared<const Grid>(grid);
  return CostFunction(
      grid.size(),
      [g, delta](Index i, Index j) {
        return i == j ? 0.0 : 2.0 * std::expm1(0.5 * delta * g->distance(i, j));
      },
      with_param("expCost", delta));
}

CostFunction power_metric(double p, const Grid& grid) {
  if (!(p > 0.0)) throw ConfigError("power_metric requires p > 0");
  auto g = std::make_shared<const Grid>(grid);
  return CostFunction(
      grid.size(),
      [g, p](Index i, Index j) {
        return i == j ? 0.0 : std::pow(g->distance(i, j), p);
      },
      with_param("powerMetric", p));
}

CostFunction boundary_metric(double iota, const Grid& grid) {
  if (!(iota > 0.0 && iota <= 1.0)) throw ConfigError("boundary_metric requires iota in (0,1]");
  const Domain& dom = grid.domain();
  for (Index i = 0; i < grid.size(); ++i) {
    const auto x = grid.point(i);
    const bool on_edge = dom.kind == DomainKind::kHalfLineTruncated
                             ? !(x[0] > 0.0)
                             : !(distance_to_boundary(dom, x) > 0.0);
    if (on_edge) throw SingularCostError("boundary_metric: grid point on the domain boundary");
  }
  auto g = std::make_shared<const Grid>(grid);
  CostFunction::Fn fn;
  switch (dom.kind) {
    case DomainKind::kOpenInterval: {
      const double a = dom.lo[0], b = dom.hi[0];
      fn = [g, a, b, iota](Index i, Index j) {
        if (i == j) return 0.0;
        const double x = g->x(i), y = g->x(j);
        return std::pow(std::abs(1.0 / (x - a) - 1.0 / (y - a)), iota) +
               std::pow(std::abs(1.0 / (b - x) - 1.0 / (b - y)), iota);
      };
      break;
    }
    case DomainKind::kHalfLineTruncated:
      fn = [g, iota](Index i, Index j) {
        if (i == j) return 0.0;
        const double x = g->x(i), y = g->x(j);
        return std::pow(std::abs(1.0 / x - 1.0 / y), iota) + std::abs(x - y);
      };
      break;
    case DomainKind::kBox:
      fn = [g, iota](Index i, Index j) {
        if (i == j) return 0.0;
        const double dx = distance_to_boundary(g->domain(), g->point(i));
        const double dy = distance_to_boundary(g->domain(), g->point(j));
        return std::pow(std::abs(1.0 / dx - 1.0 / dy), iota) +
               std::pow(g->distance(i, j), iota);
      };
      break;
  }
  return CostFunction(grid.size(), std::move(fn), with_param("boundaryMetric", iota));
}

CostFunction matrix_cost(Matrix m, std::string label) {
  if (m.rows() != m.cols()) throw ConfigError("cost matrix must be square");
  const bool symmetric = m == m.transpose();
  auto shared = std::make_shared<const Matrix>(std::move(m));
  return CostFunction(
      shared->rows(), [shared](Index i, Index j) { return (*shared)(i, j); }, std::move(label),
      symmetric);
}

CostReport validate_cost(const CostFunction& phi, const WeightFunction& V) {
  require_same_size(phi.size(), V.size(), "validate_cost");
  CostReport report;
  const Index n = phi.size();
  for (Index i = 0; i < n; ++i) {
    if (phi(i, i) != 0.0) {
      report.zero_diagonal = false;
      ++report.violations;
    }
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double c = phi(i, j);
      if (!(c > 0.0) || !std::isfinite(c)) {
        report.positive_off_diagonal = false;
        ++report.violations;
      }
      if (j > i && c != phi(j, i)) report.symmetric = false;
      const double ratio = c / (V[i] + V[j]);
      if (ratio > report.max_ratio || report.ratio_i < 0) {
        report.max_ratio = ratio;
        report.ratio_i = i;
        report.ratio_j = j;
      }
    }
  }
  return report;
}

}  // namespace kc
