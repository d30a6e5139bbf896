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

#pragma once

// Grids on discretized state spaces, discrete probability measures and
// positive weight (Lyapunov) functions.

#include <Eigen/Core>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace kc {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;

enum class DomainKind { kOpenInterval, kHalfLineTruncated, kBox };

// The open set a grid discretizes. A truncated half-line keeps (0, inf) as the
// underlying domain and [x_min, x_max] as the computational window.
struct Domain {
  DomainKind kind = DomainKind::kOpenInterval;
  std::vector<double> lo;
  std::vector<double> hi;

  static Domain open_interval(double a, double b);
  static Domain half_line(double x_min, double x_max);
  static Domain box(std::vector<double> lo, std::vector<double> hi);

  int dim() const { return static_cast<int>(lo.size()); }
  std::string tag() const;
  // Volume of the computational window.
  double volume() const;
};

// Midpoint grid over a tensor product of uniform axes. Points are stored
// row-major with the last axis varying fastest.
class Grid {
 public:
  Grid(Domain domain, std::vector<int> n_per_axis);

  const Domain& domain() const { return domain_; }
  Index size() const { return size_; }
  int dim() const { return domain_.dim(); }

  std::span<const double> point(Index i) const {
    return {coords_.data() + i * dim(), static_cast<std::size_t>(dim())};
  }
  // First coordinate; the natural accessor for 1-D grids.
  double x(Index i) const { return coords_[static_cast<std::size_t>(i * dim())]; }

  const Vector& cell_volumes() const { return volumes_; }
  double cell_lo(Index i, int axis) const;
  double cell_hi(Index i, int axis) const;
  int axis_size(int axis) const { return n_per_axis_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const;

  // Index of the cell containing y; coordinates outside the window are
  // clamped to the nearest boundary cell.
  Index locate(std::span<const double> y) const;
  bool inside_window(std::span<const double> y) const;

  // Axis-wise multi index of a flat index.
  std::vector<int> multi_index(Index i) const;

  // Euclidean distance between two grid points.
  double distance(Index i, Index j) const;
  double norm(Index i) const;

 private:
  Domain domain_;
  std::vector<int> n_per_axis_;
  Index size_ = 0;
  std::vector<double> coords_;
  Vector volumes_;
};

// Midpoint grid with n_per_dim points along every axis.
// Throws ConfigError for n_per_dim < 2 or invalid bounds.
Grid build_grid(const Domain& domain, int n_per_dim);

using PointFn = std::function<double(std::span<const double>)>;

class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  // Validates non-negativity and unit mass (1e-12).
  explicit DiscreteMeasure(Vector weights);

  // Rescales non-negative weights to unit mass.
  static DiscreteMeasure normalized(Vector weights);
  static DiscreteMeasure dirac(Index n, Index i);
  static DiscreteMeasure uniform(Index n);

  const Vector& weights() const { return weights_; }
  Index size() const { return weights_.size(); }
  double operator[](Index i) const { return weights_[i]; }

 private:
  Vector weights_;
};

class WeightFunction {
 public:
  WeightFunction() = default;
  // lower_bound defaults to the minimum value; must be positive.
  explicit WeightFunction(Vector values, std::string label = "V", double lower_bound = 0.0);

  static WeightFunction from_function(const Grid& grid, const PointFn& f, std::string label);
  static WeightFunction constant(Index n, double value, std::string label = "const");

  const Vector& values() const { return values_; }
  double lower_bound() const { return lower_bound_; }
  const std::string& label() const { return label_; }
  Index size() const { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }

 private:
  Vector values_;
  double lower_bound_ = 0.0;
  std::string label_;
};

// weights[i] proportional to density(x_i) * volume_i. Throws
// DegenerateMeasureError when all mass vanishes.
DiscreteMeasure discretize_density(const PointFn& density, const Grid& grid);

// 1/2 + (eps / (2c)) V. If P(V) <= eps V + c then P(Vbar) <= eps Vbar + 1/2.
WeightFunction rescale_weight(const WeightFunction& V, double eps, double c);

// V_rho = 1/2 + rho V.
WeightFunction rho_weight(const WeightFunction& V, double rho);

// sum_i |mu1_i - mu2_i| V_i.
double weighted_norm_diff(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                          const WeightFunction& V);

// (1/2) sum_i |mu1_i - mu2_i|.
double total_variation(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2);

void require_same_size(Index a, Index b, const char* what);

}  // namespace kc
