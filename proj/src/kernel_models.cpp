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

#include <algorithm>
#include <cmath>
#include <limits>

#include "kc/error.hpp"
#include "kc/kernels.hpp"

namespace kc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double overlap(double a, double b, double lo, double hi) {
  return std::max(0.0, std::min(b, hi) - std::max(a, lo));
}

// P(N(0,1) <= z) without cancellation in the upper tail.
double normal_cdf(double z) {
  if (z == kInf) return 1.0;
  if (z == -kInf) return 0.0;
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// P(a < N(0,1) <= b), computed on the side of the tail that keeps precision.
double normal_mass(double a, double b) {
  if (b <= a) return 0.0;
  if (a >= 0.0) return normal_cdf(-a) - normal_cdf(-b);
  return normal_cdf(b) - normal_cdf(a);
}

void require_unit_interval(const Grid& grid, const char* who) {
  const Domain& d = grid.domain();
  if (d.kind != DomainKind::kOpenInterval || d.lo[0] != 0.0 || d.hi[0] != 1.0)
    throw ConfigError(std::string(who) + " needs a grid on open_interval(0,1)");
}

void require_one_dimensional(const Grid& grid, const char* who) {
  if (grid.dim() != 1) throw ConfigError(std::string(who) + " needs a 1-D grid");
}

// Cell bounds with the outermost cells extended to the given limits.
std::pair<double, double> extended_cell(const Grid& grid, Index j, double below, double above) {
  const double lo = j == 0 ? below : grid.cell_lo(j, 0);
  const double hi = j == grid.size() - 1 ? above : grid.cell_hi(j, 0);
  return {lo, hi};
}

}  // namespace

KernelMatrix unit_interval_kernel(const KernelMatrix& Q, const DiscreteMeasure& nu,
                                  const Grid& grid) {
  require_unit_interval(grid, "unit_interval_kernel");
  require_same_size(Q.size(), grid.size(), "unit_interval_kernel");
  require_same_size(nu.size(), grid.size(), "unit_interval_kernel");
  Matrix rows(grid.size(), grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    rows.row(i) = x * Q.matrix().row(i) + (1.0 - x) * nu.weights().transpose();
  }
  return KernelMatrix::normalized(std::move(rows), "unit_interval_mixture[" + Q.model_tag() + "]",
                                  {0.0, "exact"});
}

KernelMatrix arcsine_kernel(const Grid& grid) {
  require_unit_interval(grid, "arcsine_kernel");
  const Index n = grid.size();
  Matrix rows(n, n);
  for (Index i = 0; i < n; ++i) {
    const double x = grid.x(i);
    for (Index j = 0; j < n; ++j) {
      const double lo = grid.cell_lo(j, 0), hi = grid.cell_hi(j, 0);
      rows(i, j) = overlap(0.0, x, lo, hi) / (2.0 * x) + overlap(x, 1.0, lo, hi) / (2.0 * (1.0 - x));
    }
  }
  return KernelMatrix::normalized(std::move(rows), "arcsine", {0.0, "exact"});
}

double weibull_mass(double gamma, double lo, double hi) {
  const double k = 1.0 + gamma;
  const double upper = hi == kInf ? 0.0 : std::exp(-std::pow(hi, k));
  const double lower = lo <= 0.0 ? 1.0 : std::exp(-std::pow(lo, k));
  return std::max(0.0, lower - upper);
}

KernelMatrix halfline_kernel(double delta, double gamma, const Grid& grid) {
  if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("half_line requires delta in [0,1)");
  if (!(gamma > 0.0)) throw ConfigError("half_line requires gamma > 0");
  if (grid.domain().kind != DomainKind::kHalfLineTruncated)
    throw ConfigError("halfline_kernel needs a half_line_truncated grid");
  const Index n = grid.size();
  const double x_min = grid.domain().lo[0], x_max = grid.domain().hi[0];
  Matrix rows(n, n);
  KernelDiagnostics diag{0.0, "exact"};
  for (Index i = 0; i < n; ++i) {
    const double x = grid.x(i);
    double outside = 0.0;
    for (Index j = 0; j < n; ++j) {
      const auto [lo, hi] = extended_cell(grid, j, 0.0, kInf);
      const double uniform = overlap(0.0, x, lo, hi) / x;
      const double shift = hi > x ? 2.0 * normal_mass(std::max(lo, x) - x, hi - x) : 0.0;
      const double weibull = weibull_mass(gamma, lo, hi);
      rows(i, j) = 0.5 * delta * (uniform + shift) + (1.0 - delta) * weibull;
    }
    outside += 0.5 * delta * (std::min(x, x_min) / x + 2.0 * normal_mass(std::max(x_max - x, 0.0), kInf));
    outside += (1.0 - delta) * (weibull_mass(gamma, 0.0, x_min) + weibull_mass(gamma, x_max, kInf));
    diag.max_clamped_fraction = std::max(diag.max_clamped_fraction, outside);
  }
  return KernelMatrix::normalized(std::move(rows), "half_line", diag);
}

void set_gaussian_noise(IrfModel& model, double sigma, int atoms, double width) {
  if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be non-negative");
  model.noise_points.clear();
  if (sigma == 0.0 || atoms < 2) {
    model.noise_points.push_back({0.0});
    model.noise_weights = Vector::Ones(1);
    model.noise_spacing = 0.0;
    return;
  }
  const double span = 2.0 * width * sigma;
  const double dz = span / atoms;
  Vector w(atoms);
  for (int k = 0; k < atoms; ++k) {
    const double z = -width * sigma + (k + 0.5) * dz;
    model.noise_points.push_back({z});
    w[k] = normal_mass((z - 0.5 * dz) / sigma, (z + 0.5 * dz) / sigma);
  }
  model.noise_weights = w / w.sum();
  model.noise_spacing = dz;
}

KernelMatrix irf_kernel(const IrfModel& model, const Grid& grid) {
  if (!model.F) throw ConfigError("irf model without a map");
  if (model.noise_points.empty() ||
      static_cast<Index>(model.noise_points.size()) != model.noise_weights.size())
    throw ConfigError("irf noise atoms and weights disagree");
  const DiscreteMeasure noise(model.noise_weights);
  const int d = grid.dim();
  for (const auto& z : model.noise_points)
    if (static_cast<int>(z.size()) != d) throw ConfigError("noise dimension differs from grid");
  const bool spread = d == 1 && model.noise_spacing > 0.0;
  const Index n = grid.size();
  Matrix rows = Matrix::Zero(n, n);
  KernelDiagnostics diag{0.0, spread ? "histogram" : "atoms"};
  std::vector<double> y(static_cast<std::size_t>(d));
  for (Index i = 0; i < n; ++i) {
    const auto fx = model.F(grid.point(i));
    if (static_cast<int>(fx.size()) != d) throw ConfigError("irf map changes dimension");
    double outside = 0.0;
    for (std::size_t k = 0; k < model.noise_points.size(); ++k) {
      const double w = noise[static_cast<Index>(k)];
      if (w == 0.0) continue;
      if (spread) {
        const double h = 0.5 * model.noise_spacing;
        const double a = fx[0] + model.noise_points[k][0] - h;
        const double b = a + 2.0 * h;
        const double lo_w = grid.domain().lo[0], hi_w = grid.domain().hi[0];
        outside += w * (overlap(a, b, -kInf, lo_w) + overlap(a, b, hi_w, kInf)) / (b - a);
        const Index first = grid.locate(std::span<const double>(&a, 1));
        const Index last = grid.locate(std::span<const double>(&b, 1));
        for (Index j = first; j <= last; ++j) {
          const auto [lo, hi] = extended_cell(grid, j, -kInf, kInf);
          rows(i, j) += w * overlap(a, b, lo, hi) / (b - a);
        }
        continue;
      }
      for (int a = 0; a < d; ++a)
        y[static_cast<std::size_t>(a)] = fx[static_cast<std::size_t>(a)] + model.noise_points[k][static_cast<std::size_t>(a)];
      if (!grid.inside_window(y)) outside += w;
      rows(i, grid.locate(y)) += w;
    }
    diag.max_clamped_fraction = std::max(diag.max_clamped_fraction, outside);
  }
  return KernelMatrix::normalized(std::move(rows), model.tag, diag);
}

KernelMatrix langevin_kernel(const LangevinModel& model, const Grid& grid) {
  require_one_dimensional(grid, "langevin_kernel");
  if (!model.grad_U) throw ConfigError("langevin model without a potential gradient");
  if (!(model.h > 0.0)) throw ConfigError("langevin step h must be positive");
  if (!(model.sigma >= 0.0) || !(model.gamma > 0.0))
    throw ConfigError("langevin requires sigma >= 0 and gamma > 0");
  const Index n = grid.size();
  const double lo_w = grid.domain().lo[0], hi_w = grid.domain().hi[0];
  const double sd = model.sigma * std::sqrt(model.h);
  Matrix rows = Matrix::Zero(n, n);
  KernelDiagnostics diag{0.0, sd > 0.0 ? "erf" : "point"};
  for (Index i = 0; i < n; ++i) {
    const double x = grid.x(i);
    const double mean = x - model.gamma * model.grad_U(x) * model.h;
    if (sd == 0.0) {
      rows(i, grid.locate(std::span<const double>(&mean, 1))) = 1.0;
      if (mean < lo_w || mean > hi_w) diag.max_clamped_fraction = 1.0;
      continue;
    }
    for (Index j = 0; j < n; ++j) {
      const auto [lo, hi] = extended_cell(grid, j, -kInf, kInf);
      rows(i, j) = normal_mass((lo - mean) / sd, (hi - mean) / sd);
    }
    const double outside =
        normal_mass(-kInf, (lo_w - mean) / sd) + normal_mass((hi_w - mean) / sd, kInf);
    diag.max_clamped_fraction = std::max(diag.max_clamped_fraction, outside);
  }
  return KernelMatrix::normalized(std::move(rows), "langevin", diag);
}

}  // namespace kc
