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

#include "kc/transport.hpp"

#include <algorithm>
#include <cmath>

#include "kc/error.hpp"

namespace kc {
namespace {

std::vector<Index> support(const Vector& w) {
  std::vector<Index> s;
  for (Index i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) s.push_back(i);
  return s;
}

// Common mass stays on the diagonal; the excess of mu1 is matched to the
// excess of mu2 in index order.
TransportPlan diagonal_first_plan(const Vector& a, const Vector& b) {
  TransportPlan plan{a.size(), b.size(), {}};
  std::vector<std::pair<Index, double>> out, in;
  for (Index i = 0; i < a.size(); ++i) {
    const double common = std::min(a[i], b[i]);
    if (common > 0.0) plan.entries.push_back({i, i, common});
    if (a[i] > b[i]) out.emplace_back(i, a[i] - b[i]);
    if (b[i] > a[i]) in.emplace_back(i, b[i] - a[i]);
  }
  std::size_t p = 0, q = 0;
  while (p < out.size() && q < in.size()) {
    const double m = std::min(out[p].second, in[q].second);
    if (m > 0.0) plan.entries.push_back({out[p].first, in[q].first, m});
    out[p].second -= m;
    in[q].second -= m;
    if (out[p].second <= 0.0) ++p;
    else ++q;
  }
  // Rounding can leave a sliver on one side; attach it to the last match.
  for (; p < out.size(); ++p)
    if (out[p].second > 0.0 && !in.empty())
      plan.entries.push_back({out[p].first, in.back().first, out[p].second});
  for (; q < in.size(); ++q)
    if (in[q].second > 0.0 && !out.empty())
      plan.entries.push_back({out.back().first, in[q].first, in[q].second});
  return plan;
}

void check_totals(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  require_same_size(mu1.size(), mu2.size(), "transport");
  if (std::abs(mu1.weights().sum() - mu2.weights().sum()) > 1e-9)
    throw MarginalMismatchError("transport marginals have different total mass");
}

}  // namespace

const char* solver_tag_name(SolverTag tag) {
  switch (tag) {
    case SolverTag::kLp: return "lp";
    case SolverTag::kClosedFormV: return "closed_form_V";
    case SolverTag::kClosedFormTv: return "closed_form_tv";
    case SolverTag::kBruteForce: return "brute_force";
  }
  return "unknown";
}

Vector TransportPlan::row_sums() const {
  Vector r = Vector::Zero(n1);
  for (const auto& e : entries) r[e.i] += e.mass;
  return r;
}

Vector TransportPlan::col_sums() const {
  Vector c = Vector::Zero(n2);
  for (const auto& e : entries) c[e.j] += e.mass;
  return c;
}

Matrix TransportPlan::dense() const {
  Matrix m = Matrix::Zero(n1, n2);
  for (const auto& e : entries) m(e.i, e.j) += e.mass;
  return m;
}

double TransportPlan::cost(const CostFunction& phi) const {
  double total = 0.0;
  for (const auto& e : entries) total += e.mass * phi(e.i, e.j);
  return total;
}

TransportResult kantorovich(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                            const CostFunction& phi, const SimplexOptions& options) {
  check_totals(mu1, mu2);
  require_same_size(mu1.size(), phi.size(), "kantorovich");
  const auto rows = support(mu1.weights());
  const auto cols = support(mu2.weights());
  Vector a(static_cast<Index>(rows.size())), b(static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) a[static_cast<Index>(k)] = mu1[rows[k]];
  for (std::size_t k = 0; k < cols.size(); ++k) b[static_cast<Index>(k)] = mu2[cols[k]];
  const auto sol = solve_transportation(phi.block(rows, cols), a, b, options);
  TransportResult result;
  result.solver = SolverTag::kLp;
  result.iterations = sol.iterations;
  result.plan = {mu1.size(), mu2.size(), {}};
  for (const auto& e : sol.basis)
    if (e.mass > 0.0)
      result.plan.entries.push_back(
          {rows[static_cast<std::size_t>(e.i)], cols[static_cast<std::size_t>(e.j)], e.mass});
  result.value = sol.value;
  return result;
}

TransportResult vnorm_closed_form(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                  const WeightFunction& V) {
  check_totals(mu1, mu2);
  TransportResult result;
  result.solver = SolverTag::kClosedFormV;
  result.value = weighted_norm_diff(mu1, mu2, V);
  result.plan = diagonal_first_plan(mu1.weights(), mu2.weights());
  return result;
}

TransportResult tv_closed_form(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  check_totals(mu1, mu2);
  TransportResult result;
  result.solver = SolverTag::kClosedFormTv;
  result.value = total_variation(mu1, mu2);
  result.plan = diagonal_first_plan(mu1.weights(), mu2.weights());
  return result;
}

TransportResult transport_distance(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                   const CostFunction& phi) {
  require_same_size(mu1.size(), phi.size(), "transport_distance");
  if (const auto& U = phi.discrete_weights()) {
    if (U->isConstant(0.5)) return tv_closed_form(mu1, mu2);
    return vnorm_closed_form(mu1, mu2, WeightFunction(*U, phi.label()));
  }
  return kantorovich(mu1, mu2, phi);
}

double transport_value(const Vector& mu1, const Vector& mu2, const CostFunction& phi) {
  if (const auto& U = phi.discrete_weights())
    return ((mu1 - mu2).cwiseAbs().array() * U->array()).sum();
  return kantorovich(DiscreteMeasure(mu1), DiscreteMeasure(mu2), phi).value;
}

double osc_V(const Vector& f, const WeightFunction& V) {
  require_same_size(f.size(), V.size(), "osc_V");
  double best = 0.0;
  for (Index i = 0; i < f.size(); ++i)
    for (Index j = i + 1; j < f.size(); ++j)
      best = std::max(best, std::abs(f[i] - f[j]) / (V[i] + V[j]));
  return best;
}

DualCheck dual_gap_check(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                         const WeightFunction& V, const std::vector<Vector>& trials) {
  check_totals(mu1, mu2);
  DualCheck check;
  check.primal = weighted_norm_diff(mu1, mu2, V);
  const Vector diff = mu1.weights() - mu2.weights();
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const Vector& f = trials[t];
    require_same_size(f.size(), V.size(), "dual_gap_check");
    const double osc = osc_V(f, V);
    if (osc == 0.0) {
      ++check.skipped_constant;
      continue;
    }
    const double pairing = std::abs(diff.dot(f));
    if (pairing > osc * check.primal + 1e-12 * (1.0 + f.cwiseAbs().maxCoeff()))
      ++check.violations;
    const double lower = pairing / osc;
    if (lower > check.best_lower_bound) {
      check.best_lower_bound = lower;
      check.best_trial = static_cast<Index>(t);
    }
  }
  return check;
}

}  // namespace kc
