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


// Test-only oracles and random instance generators. Nothing here calls into
// the code under test except for the value types it constructs.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "kc/gibbs.hpp"
#include "kc/kernels.hpp"
#include "kc/measures.hpp"
#include "kc/rng.hpp"
#include "kc/semidistance.hpp"

namespace kct {

using kc::CostFunction;
using kc::DiscreteMeasure;
using kc::Index;
using kc::KernelMatrix;
using kc::Matrix;
using kc::Vector;
using kc::WeightFunction;

inline KernelMatrix two_state(double p = 0.1, double q = 0.2) {
  Matrix m(2, 2);
  m << 1 - p, p, q, 1 - q;
  return KernelMatrix(m, "two_state");
}

// Row-stochastic matrix; each row keeps a random subset of at least one entry.
inline KernelMatrix random_kernel(Index n, kc::CounterRng& rng, double keep = 1.0) {
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (rng.uniform() > keep) continue;
      m(i, j) = rng.exponential();
      s += m(i, j);
    }
    if (s == 0.0) {
      m(i, static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)))) = 1.0;
      s = 1.0;
    }
    m.row(i) /= s;
  }
  return KernelMatrix(m, "random");
}

// Dirichlet(1,..,1) weights on a random support of the given size (0: full).
inline Vector random_simplex(Index n, kc::CounterRng& rng, Index support = 0) {
  Vector w = Vector::Zero(n);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Index i = n - 1; i > 0; --i)
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
  const Index k = support > 0 ? std::min(support, n) : n;
  double s = 0.0;
  for (Index t = 0; t < k; ++t) {
    const double e = rng.exponential();
    w[idx[static_cast<std::size_t>(t)]] = e;
    s += e;
  }
  return w / s;
}

inline DiscreteMeasure random_measure(Index n, kc::CounterRng& rng, Index support = 0) {
  return DiscreteMeasure(random_simplex(n, rng, support));
}

inline WeightFunction random_weight(Index n, kc::CounterRng& rng, double lo = 0.5,
                                    double hi = 5.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return WeightFunction(v, "randV", lo);
}

// Symmetric cost with zero diagonal and positive off-diagonal entries.
inline Matrix random_cost_matrix(Index n, kc::CounterRng& rng, double lo = 0.1,
                                 double hi = 3.0) {
  Matrix c = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) c(i, j) = c(j, i) = rng.uniform(lo, hi);
  return c;
}

// Direct |mu1 - mu2|(V).
inline double vnorm_oracle(const Vector& a, const Vector& b, const Vector& V) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]) * V[i];
  return s;
}

inline double tv_oracle(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

// Exhaustive minimum over couplings of a 2 x 2 problem: the plan set is the
// segment pi(0,0) = t, t in [max(0, a0 + b0 - 1), min(a0, b0)], and the cost
// is linear in t, so only the endpoints matter.
inline double transport_2x2_oracle(const Vector& a, const Vector& b, const Matrix& c) {
  auto cost = [&](double t) {
    return t * c(0, 0) + (a[0] - t) * c(0, 1) + (b[0] - t) * c(1, 0) +
           (1.0 - a[0] - b[0] + t) * c(1, 1);
  };
  return std::min(cost(std::max(0.0, a[0] + b[0] - 1.0)), cost(std::min(a[0], b[0])));
}

// Second eigenvalue (by modulus) and stationary law of a small chain, from
// Eigen's dense solvers.
struct ChainSpectrum {
  double lambda2 = 0.0;
  Vector pi;
};

inline ChainSpectrum chain_spectrum(const Matrix& P) {
  const Index n = P.rows();
  Eigen::EigenSolver<Matrix> es(P);
  std::vector<double> mods;
  for (Index i = 0; i < n; ++i) mods.push_back(std::abs(es.eigenvalues()[i]));
  std::sort(mods.begin(), mods.end(), std::greater<>());
  ChainSpectrum out;
  out.lambda2 = n > 1 ? mods[1] : 0.0;
  // pi (P - I) = 0 with sum(pi) = 1: replace one equation by the normalization.
  Matrix A = (P - Matrix::Identity(n, n)).transpose();
  A.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  out.pi = A.fullPivLu().solve(rhs);
  return out;
}

// Composite Simpson rule.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int panels = 2000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int k = 1; k < panels; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Continuum arcsine-type transition applied to V(y) = y^-iota + (1-y)^-iota:
// (1/(2x)) int_0^x V + (1/(2(1-x))) int_x^1 V. Endpoint singularities are
// removed with y = x t^4 and y = 1 - (1-x) t^4.
inline double arcsine_PV_quadrature(double x, double iota) {
  auto V = [iota](double y) { return std::pow(y, -iota) + std::pow(1.0 - y, -iota); };
  auto left = [&](double t) {
    if (t == 0.0) return 0.0;
    const double y = x * std::pow(t, 4);
    return V(y) * 4.0 * x * std::pow(t, 3);
  };
  auto right = [&](double t) {
    if (t == 0.0) return 0.0;
    const double y = 1.0 - (1.0 - x) * std::pow(t, 4);
    return V(y) * 4.0 * (1.0 - x) * std::pow(t, 3);
  };
  return simpson(left, 0.0, 1.0) / (2.0 * x) + simpson(right, 0.0, 1.0) / (2.0 * (1.0 - x));
}

// Random small Gibbs model. Potentials are shifted to their log-normalizers
// here, independently of GibbsModel::normalized.
inline kc::GibbsModel random_gibbs_model(Index n, kc::CounterRng& rng, double delta = 0.25) {
  Vector nu(n);
  for (Index i = 0; i < n; ++i) nu[i] = rng.uniform(0.5, 2.0);
  auto normalize = [&](Vector v) {
    double z = 0.0;
    for (Index i = 0; i < n; ++i) z += std::exp(-v[i]) * nu[i];
    return Vector(v.array() + std::log(z));
  };
  Vector g(n), h(n);
  for (Index i = 0; i < n; ++i) {
    g[i] = rng.uniform(0.0, 3.0);
    h[i] = rng.uniform(0.0, 3.0);
  }
  g = normalize(g);
  h = normalize(h);
  Matrix m(n, n);
  for (Index y = 0; y < n; ++y) {
    Vector row(n);
    for (Index x = 0; x < n; ++x) row[x] = rng.uniform(0.0, 2.0);
    m.row(y) = normalize(row).transpose();
  }
  kc::GibbsModel model;
  model.nu = nu;
  model.g = g;
  model.h = h;
  model.m = m;
  model.delta = delta;
  return model;
}

}  // namespace kct
