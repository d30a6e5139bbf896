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

// Pairwise cost functions on grid points: the discrete metric, weighted
// discrete metrics, their rescaled and interpolated variants, and geometric
// costs (power, exponential and boundary-aware metrics).

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "kc/measures.hpp"

namespace kc {

using Matrix = Eigen::MatrixXd;

// Costs above this size are never materialized as a dense matrix.
inline constexpr Index kMaxMaterializedSize = 4096;

class CostFunction {
 public:
  using Fn = std::function<double(Index, Index)>;

  CostFunction() = default;
  CostFunction(Index n, Fn fn, std::string label, bool symmetric = true);

  double operator()(Index i, Index j) const {
    return dense_ ? (*dense_)(i, j) : fn_(i, j);
  }

  Index size() const { return n_; }
  const std::string& label() const { return label_; }
  bool symmetric() const { return symmetric_; }

  // Set when the cost has the form 1{i != j} (U_i + U_j); transport then has
  // the closed form sum_i |mu1_i - mu2_i| U_i.
  const std::optional<Vector>& discrete_weights() const { return discrete_weights_; }
  CostFunction& set_discrete_weights(Vector U);

  // Copy backed by a dense matrix when size() <= kMaxMaterializedSize,
  // otherwise a plain copy.
  CostFunction materialized() const;
  bool is_materialized() const { return dense_ != nullptr; }

  // Dense block cost(rows[a], cols[b]).
  Matrix block(const std::vector<Index>& rows, const std::vector<Index>& cols) const;

 private:
  Index n_ = 0;
  Fn fn_;
  std::string label_;
  bool symmetric_ = true;
  std::optional<Vector> discrete_weights_;
  std::shared_ptr<const Matrix> dense_;
};

// 1{x != y}.
CostFunction discrete_metric(Index n);

// 1{x != y} (V(x) + V(y)).
CostFunction weighted_discrete(const WeightFunction& V);

// V(x) + V(y) on every pair, diagonal included. Not a semi-distance; used as
// the level function of pairs.
CostFunction pair_weight(const WeightFunction& V);

struct RhoFamily {
  WeightFunction V_rho;     // 1/2 + rho V
  CostFunction varpi_rho;   // 1 + rho (V(x) + V(y)), diagonal included
  CostFunction phi_rho;     // 1{x != y} varpi_rho
};

RhoFamily rho_family(const WeightFunction& V, double rho);

// kappa^iota * varpi_rho^(1 - iota) off the diagonal, 0 on it.
CostFunction kappa_interp(const CostFunction& kappa, const WeightFunction& V, double rho,
                          double iota);

// phi + psi.
CostFunction additive_cost(const CostFunction& phi, const CostFunction& psi);

// a * phi for a > 0.
CostFunction scaled_cost(const CostFunction& phi, double a);

// phi^p for p > 0.
CostFunction power_cost(const CostFunction& phi, double p);

// 2 (exp(delta |x - y| / 2) - 1).
CostFunction exp_cost(double delta, const Grid& grid);

// |x - y|^p.
CostFunction power_metric(double p, const Grid& grid);

// Complete metric adapted to the domain:
//   open interval (a,b): |1/(x-a) - 1/(y-a)|^iota + |1/(b-x) - 1/(b-y)|^iota
//   half-line:           |1/x - 1/y|^iota + |x - y|
//   box:                 |1/d(x) - 1/d(y)|^iota + |x - y|^iota, d = distance
//                        to the boundary
// Throws SingularCostError if a grid point sits on the boundary.
CostFunction boundary_metric(double iota, const Grid& grid);

// Dense cost from an explicit matrix.
CostFunction matrix_cost(Matrix m, std::string label);

struct CostReport {
  // max_{i != j} phi(i,j) / (V(i) + V(j)); exact for the grid, a lower bound
  // for the continuum norm.
  double max_ratio = 0.0;
  Index ratio_i = -1;
  Index ratio_j = -1;
  bool zero_diagonal = true;
  bool positive_off_diagonal = true;
  bool symmetric = true;
  Index violations = 0;

  bool axioms_hold() const { return zero_diagonal && positive_off_diagonal; }
};

CostReport validate_cost(const CostFunction& phi, const WeightFunction& V);

}  // namespace kc
