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

#include "kc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kc/error.hpp"

namespace kc {

Domain Domain::open_interval(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw ConfigError("open_interval requires finite a < b");
  return {DomainKind::kOpenInterval, {a}, {b}};
}

Domain Domain::half_line(double x_min, double x_max) {
  if (!(x_min > 0.0) || !(x_min < x_max) || !std::isfinite(x_max))
    throw ConfigError("half_line_truncated requires 0 < x_min < x_max");
  return {DomainKind::kHalfLineTruncated, {x_min}, {x_max}};
}

Domain Domain::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.empty() || lo.size() != hi.size() || lo.size() > 3)
    throw ConfigError("box requires 1 to 3 matching lower/upper bounds");
  for (std::size_t d = 0; d < lo.size(); ++d)
    if (!(lo[d] < hi[d]) || !std::isfinite(lo[d]) || !std::isfinite(hi[d]))
      throw ConfigError("box requires finite lo < hi on every axis");
  return {DomainKind::kBox, std::move(lo), std::move(hi)};
}

std::string Domain::tag() const {
  std::ostringstream out;
  switch (kind) {
    case DomainKind::kOpenInterval:
      out << "open_interval(" << lo[0] << "," << hi[0] << ")";
      break;
    case DomainKind::kHalfLineTruncated:
      out << "half_line_truncated(" << lo[0] << "," << hi[0] << ")";
      break;
    case DomainKind::kBox:
      out << "box(";
      for (std::size_t d = 0; d < lo.size(); ++d)
        out << (d ? ";" : "") << lo[d] << ":" << hi[d];
      out << ")";
      break;
  }
  return out.str();
}

double Domain::volume() const {
  double v = 1.0;
  for (std::size_t d = 0; d < lo.size(); ++d) v *= hi[d] - lo[d];
  return v;
}

Grid::Grid(Domain domain, std::vector<int> n_per_axis)
    : domain_(std::move(domain)), n_per_axis_(std::move(n_per_axis)) {
  if (static_cast<int>(n_per_axis_.size()) != domain_.dim())
    throw ConfigError("grid axis count does not match domain dimension");
  size_ = 1;
  for (int n : n_per_axis_) {
    if (n < 2) throw ConfigError("grid requires at least 2 points per axis");
    size_ *= n;
  }
  const int d = domain_.dim();
  coords_.resize(static_cast<std::size_t>(size_ * d));
  volumes_ = Vector::Constant(size_, 1.0);
  double cell_volume = 1.0;
  for (int a = 0; a < d; ++a) cell_volume *= spacing(a);
  volumes_.setConstant(cell_volume);
  for (Index i = 0; i < size_; ++i) {
    const auto idx = multi_index(i);
    for (int a = 0; a < d; ++a)
      coords_[static_cast<std::size_t>(i * d + a)] =
          domain_.lo[static_cast<std::size_t>(a)] + (idx[static_cast<std::size_t>(a)] + 0.5) * spacing(a);
  }
}

double Grid::spacing(int axis) const {
  const auto a = static_cast<std::size_t>(axis);
  return (domain_.hi[a] - domain_.lo[a]) / n_per_axis_[a];
}

std::vector<int> Grid::multi_index(Index i) const {
  std::vector<int> idx(n_per_axis_.size());
  for (int a = dim() - 1; a >= 0; --a) {
    const auto ua = static_cast<std::size_t>(a);
    idx[ua] = static_cast<int>(i % n_per_axis_[ua]);
    i /= n_per_axis_[ua];
  }
  return idx;
}

double Grid::cell_lo(Index i, int axis) const {
  return point(i)[static_cast<std::size_t>(axis)] - 0.5 * spacing(axis);
}

double Grid::cell_hi(Index i, int axis) const {
  return point(i)[static_cast<std::size_t>(axis)] + 0.5 * spacing(axis);
}

Index Grid::locate(std::span<const double> y) const {
  Index flat = 0;
  for (int a = 0; a < dim(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const double t = (y[ua] - domain_.lo[ua]) / spacing(a);
    const int k = std::clamp(static_cast<int>(std::floor(t)), 0, n_per_axis_[ua] - 1);
    flat = flat * n_per_axis_[ua] + k;
  }
  return flat;
}

bool Grid::inside_window(std::span<const double> y) const {
  for (int a = 0; a < dim(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (y[ua] < domain_.lo[ua] || y[ua] > domain_.hi[ua]) return false;
  }
  return true;
}

double Grid::distance(Index i, Index j) const {
  const auto p = point(i);
  const auto q = point(j);
  double s = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) s += (p[a] - q[a]) * (p[a] - q[a]);
  return std::sqrt(s);
}

double Grid::norm(Index i) const {
  double s = 0.0;
  for (double v : point(i)) s += v * v;
  return std::sqrt(s);
}

Grid build_grid(const Domain& domain, int n_per_dim) {
  if (n_per_dim < 2) throw ConfigError("build_grid requires n_per_dim >= 2");
  return Grid(domain, std::vector<int>(static_cast<std::size_t>(domain.dim()), n_per_dim));
}

DiscreteMeasure::DiscreteMeasure(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw ConfigError("empty measure");
  if ((weights_.array() < 0.0).any() || !weights_.allFinite())
    throw ConfigError("measure weights must be finite and non-negative");
  if (std::abs(weights_.sum() - 1.0) > 1e-12)
    throw ConfigError("measure weights must sum to 1 within 1e-12");
}

DiscreteMeasure DiscreteMeasure::normalized(Vector weights) {
  if ((weights.array() < 0.0).any() || !weights.allFinite())
    throw ConfigError("measure weights must be finite and non-negative");
  const double total = weights.sum();
  if (!(total > 0.0)) throw DegenerateMeasureError("measure has zero total mass");
  weights /= total;
  // One more pass absorbs the rounding of the division.
  weights /= weights.sum();
  return DiscreteMeasure(std::move(weights));
}

DiscreteMeasure DiscreteMeasure::dirac(Index n, Index i) {
  Vector w = Vector::Zero(n);
  w[i] = 1.0;
  return DiscreteMeasure(std::move(w));
}

DiscreteMeasure DiscreteMeasure::uniform(Index n) {
  return normalized(Vector::Constant(n, 1.0));
}

WeightFunction::WeightFunction(Vector values, std::string label, double lower_bound)
    : values_(std::move(values)), label_(std::move(label)) {
  if (values_.size() == 0) throw ConfigError("empty weight function");
  if (!values_.allFinite()) throw ConfigError("weight function must be finite");
  const double min_value = values_.minCoeff();
  lower_bound_ = lower_bound > 0.0 ? lower_bound : min_value;
  if (!(lower_bound_ > 0.0)) throw ConfigError("weight function must be bounded away from zero");
  if (min_value < lower_bound_) throw ConfigError("weight function below its declared lower bound");
}

WeightFunction WeightFunction::from_function(const Grid& grid, const PointFn& f,
                                             std::string label) {
  Vector v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) v[i] = f(grid.point(i));
  return WeightFunction(std::move(v), std::move(label));
}

WeightFunction WeightFunction::constant(Index n, double value, std::string label) {
  return WeightFunction(Vector::Constant(n, value), std::move(label));
}

DiscreteMeasure discretize_density(const PointFn& density, const Grid& grid) {
  Vector w(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double d = density(grid.point(i));
    if (!std::isfinite(d) || d < 0.0)
      throw ConfigError("density must be finite and non-negative at every grid point");
    w[i] = d * grid.cell_volumes()[i];
  }
  if (!(w.sum() > 0.0)) throw DegenerateMeasureError("discretized density has zero mass");
  return DiscreteMeasure::normalized(std::move(w));
}

WeightFunction rescale_weight(const WeightFunction& V, double eps, double c) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("rescale_weight requires eps in (0,1)");
  if (!(c > 0.5)) throw ConfigError("rescale_weight requires c > 1/2");
  const double s = eps / (2.0 * c);
  return WeightFunction((0.5 + s * V.values().array()).matrix(), V.label() + "_bar",
                        0.5 + s * V.lower_bound());
}

WeightFunction rho_weight(const WeightFunction& V, double rho) {
  if (!(rho > 0.0)) throw ConfigError("rho must be positive");
  return WeightFunction((0.5 + rho * V.values().array()).matrix(), V.label() + "_rho",
                        0.5 + rho * V.lower_bound());
}

void require_same_size(Index a, Index b, const char* what) {
  if (a != b) throw GridMismatchError(std::string(what) + ": objects live on different grids");
}

double weighted_norm_diff(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                          const WeightFunction& V) {
  require_same_size(mu1.size(), mu2.size(), "weighted_norm_diff");
  require_same_size(mu1.size(), V.size(), "weighted_norm_diff");
  return ((mu1.weights() - mu2.weights()).cwiseAbs().array() * V.values().array()).sum();
}

double total_variation(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  require_same_size(mu1.size(), mu2.size(), "total_variation");
  return 0.5 * (mu1.weights() - mu2.weights()).cwiseAbs().sum();
}

}  // namespace kc
