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

// Brute-force transport oracle: every vertex of the transportation polytope
// is the unique solution of a spanning-tree basis of the complete bipartite
// support graph. Enumerating all (m + n - 1)-edge subsets is exponential and
// only meant for cross-checking the simplex on tiny supports.

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "kc/error.hpp"
#include "kc/transport.hpp"

namespace kc {
namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

// Flows on a spanning tree by repeatedly peeling a leaf: the flow on a
// leaf's only remaining edge equals the leaf's remaining mass.
std::vector<double> solve_tree(const std::vector<std::pair<int, int>>& edges, int m,
                               std::vector<double> mass) {
  const int nodes = static_cast<int>(mass.size());
  std::vector<int> degree(static_cast<std::size_t>(nodes), 0);
  for (const auto& [r, c] : edges) {
    ++degree[static_cast<std::size_t>(r)];
    ++degree[static_cast<std::size_t>(m + c)];
  }
  std::vector<double> flow(edges.size(), 0.0);
  std::vector<char> done(edges.size(), 0);
  for (std::size_t step = 0; step < edges.size(); ++step) {
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (done[k]) continue;
      const int a = edges[k].first, b = m + edges[k].second;
      int leaf = -1, other = -1;
      if (degree[static_cast<std::size_t>(a)] == 1) {
        leaf = a;
        other = b;
      } else if (degree[static_cast<std::size_t>(b)] == 1) {
        leaf = b;
        other = a;
      } else {
        continue;
      }
      flow[k] = mass[static_cast<std::size_t>(leaf)];
      mass[static_cast<std::size_t>(other)] -= flow[k];
      mass[static_cast<std::size_t>(leaf)] = 0.0;
      --degree[static_cast<std::size_t>(a)];
      --degree[static_cast<std::size_t>(b)];
      done[k] = 1;
      break;
    }
  }
  return flow;
}

}  // namespace

TransportResult kantorovich_bruteforce(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                       const CostFunction& phi) {
  require_same_size(mu1.size(), mu2.size(), "kantorovich_bruteforce");
  require_same_size(mu1.size(), phi.size(), "kantorovich_bruteforce");
  if (std::abs(mu1.weights().sum() - mu2.weights().sum()) > 1e-9)
    throw MarginalMismatchError("transport marginals have different total mass");
  std::vector<Index> rows, cols;
  for (Index i = 0; i < mu1.size(); ++i)
    if (mu1[i] > 0.0) rows.push_back(i);
  for (Index j = 0; j < mu2.size(); ++j)
    if (mu2[j] > 0.0) cols.push_back(j);
  const int m = static_cast<int>(rows.size()), n = static_cast<int>(cols.size());
  if (m * n > 16) throw OracleLimitError("brute-force transport needs m*n <= 16");

  const int edges_total = m * n;
  const int basis_size = m + n - 1;
  std::vector<double> mass;
  for (Index r : rows) mass.push_back(mu1[r]);
  for (Index c : cols) mass.push_back(mu2[c]);

  TransportResult best;
  best.solver = SolverTag::kBruteForce;
  best.value = std::numeric_limits<double>::infinity();
  std::set<std::vector<long long>> seen;
  for (unsigned mask = 0; mask < (1u << edges_total); ++mask) {
    if (std::popcount(mask) != basis_size) continue;
    std::vector<std::pair<int, int>> edges;
    UnionFind uf(m + n);
    bool tree = true;
    for (int e = 0; e < edges_total && tree; ++e) {
      if (!(mask >> e & 1u)) continue;
      edges.emplace_back(e / n, e % n);
      tree = uf.unite(e / n, m + e % n);
    }
    if (!tree) continue;
    const auto flow = solve_tree(edges, m, mass);
    bool feasible = true;
    for (double f : flow) feasible = feasible && f >= -1e-12;
    if (!feasible) continue;

    std::vector<long long> key(static_cast<std::size_t>(edges_total), 0);
    double value = 0.0;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const double f = std::max(flow[k], 0.0);
      key[static_cast<std::size_t>(edges[k].first * n + edges[k].second)] =
          std::llround(f * 1e12);
      value += f * phi(rows[static_cast<std::size_t>(edges[k].first)],
                       cols[static_cast<std::size_t>(edges[k].second)]);
    }
    if (!seen.insert(key).second) continue;
    ++best.iterations;
    if (value < best.value) {
      best.value = value;
      best.plan = {mu1.size(), mu2.size(), {}};
      for (std::size_t k = 0; k < edges.size(); ++k)
        if (flow[k] > 0.0)
          best.plan.entries.push_back({rows[static_cast<std::size_t>(edges[k].first)],
                                       cols[static_cast<std::size_t>(edges[k].second)],
                                       flow[k]});
    }
  }
  return best;
}

}  // namespace kc
