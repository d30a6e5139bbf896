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

// Kantorovich semi-distances between discrete measures: an exact
// transportation simplex, closed forms for weighted discrete metrics, a
// brute-force vertex enumeration oracle and duality checks.

#include <string>
#include <vector>

#include "kc/measures.hpp"
#include "kc/semidistance.hpp"

namespace kc {

struct PlanEntry {
  Index i;
  Index j;
  double mass;
};

// Sparse coupling of two measures on n1 and n2 points.
struct TransportPlan {
  Index n1 = 0;
  Index n2 = 0;
  std::vector<PlanEntry> entries;

  Vector row_sums() const;
  Vector col_sums() const;
  Matrix dense() const;
  double cost(const CostFunction& phi) const;
};

enum class SolverTag { kLp, kClosedFormV, kClosedFormTv, kBruteForce };

const char* solver_tag_name(SolverTag tag);

struct TransportResult {
  double value = 0.0;
  TransportPlan plan;
  SolverTag solver = SolverTag::kLp;
  int iterations = 0;
};

struct SimplexOptions {
  // Reduced costs above -tolerance * max|cost| count as non-negative.
  double tolerance = 1e-12;
  int max_iterations = 0;  // 0 picks 50 (m + n)^2 + 1000
};

// Dense transportation problem: min <C, X> subject to X 1 = supply,
// X^T 1 = demand, X >= 0. The totals must agree to 1e-9; demand is rescaled to
// the supply total before solving.
struct DenseTransportSolution {
  double value = 0.0;
  std::vector<PlanEntry> basis;  // local (row, col) indices with their flows
  int iterations = 0;
};

DenseTransportSolution solve_transportation(const Matrix& cost, const Vector& supply,
                                            const Vector& demand,
                                            const SimplexOptions& options = {});

// Exact D_phi(mu1, mu2) by the transportation simplex on the supports.
TransportResult kantorovich(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                            const CostFunction& phi, const SimplexOptions& options = {});

// Enumerates every spanning-tree basis of the support graph; m * n <= 16.
TransportResult kantorovich_bruteforce(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                       const CostFunction& phi);

// ||mu1 - mu2||_V with a plan that keeps the common mass in place.
TransportResult vnorm_closed_form(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                  const WeightFunction& V);

TransportResult tv_closed_form(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2);

// Closed form when phi carries discrete weights, simplex otherwise.
TransportResult transport_distance(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                   const CostFunction& phi);

// Value only; avoids building a plan on the closed-form path.
double transport_value(const Vector& mu1, const Vector& mu2, const CostFunction& phi);

// max_{i != j} |f_i - f_j| / (V_i + V_j).
double osc_V(const Vector& f, const WeightFunction& V);

struct DualCheck {
  double primal = 0.0;             // ||mu1 - mu2||_V
  double best_lower_bound = 0.0;   // max_j |(mu1 - mu2)(f_j)| / osc_V(f_j)
  Index best_trial = -1;
  Index violations = 0;            // trials with |(mu1 - mu2)(f)| > osc_V(f) primal
  Index skipped_constant = 0;
};

DualCheck dual_gap_check(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                         const WeightFunction& V, const std::vector<Vector>& trials);

}  // namespace kc
