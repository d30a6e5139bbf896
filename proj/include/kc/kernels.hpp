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

// Row-stochastic kernels on grids, their algebra, and constructors for the
// example model families (interval mixtures, the arcsine chain, the
// half-line chain, iterated random functions, Euler-Langevin steps and
// two-block Gibbs samplers).

#include <functional>
#include <string>
#include <vector>

#include "kc/measures.hpp"
#include "kc/semidistance.hpp"

namespace kc {

struct KernelDiagnostics {
  // Largest per-row mass that fell outside the window and was clamped onto a
  // boundary cell.
  double max_clamped_fraction = 0.0;
  // How rows were obtained: "exact", "erf", "atoms", "quadrature", ...
  std::string integration;
  bool truncation_warning() const { return max_clamped_fraction > 1e-3; }
};

class KernelMatrix {
 public:
  KernelMatrix() = default;
  // Validates non-negativity and unit row sums within 1e-10.
  KernelMatrix(Matrix rows, std::string model_tag, KernelDiagnostics diagnostics = {});

  // Clips tiny negatives and divides every row by its sum.
  static KernelMatrix normalized(Matrix rows, std::string model_tag,
                                 KernelDiagnostics diagnostics = {});
  static KernelMatrix identity(Index n);

  const Matrix& matrix() const { return rows_; }
  Index size() const { return rows_.rows(); }
  const std::string& model_tag() const { return model_tag_; }
  const KernelDiagnostics& diagnostics() const { return diagnostics_; }
  double operator()(Index i, Index j) const { return rows_(i, j); }
  Vector row(Index i) const { return rows_.row(i).transpose(); }

 private:
  Matrix rows_;
  std::string model_tag_;
  KernelDiagnostics diagnostics_;
};

DiscreteMeasure left_action(const DiscreteMeasure& mu, const KernelMatrix& P);
Vector right_action(const KernelMatrix& P, const Vector& f);

// P_n by repeated squaring; P_0 is the identity.
KernelMatrix power(const KernelMatrix& P, int n);

// K L.
KernelMatrix compose(const KernelMatrix& K, const KernelMatrix& L);

// max_i P(V)_i / V_i.
double op_norm_V(const KernelMatrix& P, const WeightFunction& V);

// max_i K(W)_i / V_i.
double op_norm_VW(const KernelMatrix& K, const WeightFunction& V, const WeightFunction& W);

// ---- model families -------------------------------------------------------

// Row x is x Q(x, .) + (1 - x) nu; grid on (0,1).
KernelMatrix unit_interval_kernel(const KernelMatrix& Q, const DiscreteMeasure& nu,
                                  const Grid& grid);

// Density 1/(2x) on (0,x] and 1/(2(1-x)) on (x,1), integrated exactly over
// cells. Grid must discretize open_interval(0,1).
KernelMatrix arcsine_kernel(const Grid& grid);

// (delta/2) Uniform(0,x] + (delta/2) (x + |N(0,1)|) + (1 - delta) Weibull with
// shape 1 + gamma, all integrated exactly over cells. The first and last cells
// absorb the mass below and above the window.
KernelMatrix halfline_kernel(double delta, double gamma, const Grid& grid);

// Probability that the Weibull law with density (1+gamma) z^gamma exp(-z^(1+gamma))
// falls in [lo, hi].
double weibull_mass(double gamma, double lo, double hi);

using PointMap = std::function<std::vector<double>(std::span<const double>)>;

// F_Z(x) = F(x) + Z with Z drawn from a finite set of displacement atoms.
// On 1-D grids a positive noise_spacing spreads each atom uniformly over its
// displacement cell, so rows integrate a piecewise-constant noise density.
struct IrfModel {
  PointMap F;
  std::vector<std::vector<double>> noise_points;
  Vector noise_weights;
  double noise_spacing = 0.0;
  std::string tag = "irf";
};

// Midpoint discretization of N(0, sigma^2) on [-width sigma, width sigma];
// sigma = 0 gives the atom at 0.
void set_gaussian_noise(IrfModel& model, double sigma, int atoms = 401, double width = 8.0);

// Row x gets the noise mass of {z : F(x) + z in cell j}; mass outside the
// window is clamped to the nearest boundary cell and counted.
KernelMatrix irf_kernel(const IrfModel& model, const Grid& grid);

struct LangevinModel {
  std::function<double(double)> grad_U;
  double gamma = 1.0;
  double sigma = 1.0;
  double h = 0.1;
};

// One Euler-Maruyama step: N(x - gamma U'(x) h, sigma^2 h) integrated over
// cells with error functions; boundary cells absorb the tails. sigma = 0 gives
// the point mass at the mean. 1-D grids only.
KernelMatrix langevin_kernel(const LangevinModel& model, const Grid& grid);

}  // namespace kc
