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

// Transportation simplex (the network simplex specialised to complete
// bipartite graphs). The basis is a spanning tree on row and column nodes;
// potentials come from one traversal of the tree and pricing scans all
// non-basic cells.

#include <algorithm>
#include <cmath>
#include <limits>

#include "kc/error.hpp"
#include "kc/transport.hpp"

namespace kc {
namespace {

struct Cell {
  Index r;
  Index c;
  double flow;
};

// North-west corner rule. Produces exactly m + n - 1 cells (some possibly
// with zero flow) forming a spanning tree. On sorted 1-D supports with a
// Monge cost the result is already optimal.
std::vector<Cell> north_west_corner(const Vector& a, const Vector& b) {
  const Index m = a.size(), n = b.size();
  Vector ra = a, rb = b;
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(m + n - 1));
  Index i = 0, j = 0;
  while (true) {
    const double x = std::max(0.0, std::min(ra[i], rb[j]));
    cells.push_back({i, j, x});
    ra[i] -= x;
    rb[j] -= x;
    if (i == m - 1 && j == n - 1) break;
    if (i == m - 1) ++j;
    else if (j == n - 1) ++i;
    else if (ra[i] <= rb[j]) ++i;
    else ++j;
  }
  return cells;
}

class TreeBasis {
 public:
  TreeBasis(Index m, Index n, std::vector<Cell> cells)
      : m_(m), n_(n), cells_(std::move(cells)) {}

  std::vector<Cell>& cells() { return cells_; }

  // u_r + v_c = C(r, c) on every basic cell, u_0 = 0.
  void potentials(const Matrix& C, Vector& u, Vector& v) {
    build_adjacency();
    u.setZero(m_);
    v.setZero(n_);
    std::vector<char> seen(static_cast<std::size_t>(m_ + n_), 0);
    std::vector<Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const Index node = stack.back();
      stack.pop_back();
      for (std::size_t k : adj_[static_cast<std::size_t>(node)]) {
        const Cell& e = cells_[k];
        const Index other = node < m_ ? m_ + e.c : e.r;
        if (seen[static_cast<std::size_t>(other)]) continue;
        seen[static_cast<std::size_t>(other)] = 1;
        if (node < m_) v[e.c] = C(e.r, e.c) - u[e.r];
        else u[e.r] = C(e.r, e.c) - v[e.c];
        stack.push_back(other);
      }
    }
  }

  // Basic cells on the tree path from row r to column c, ordered from the
  // column end. Uses the adjacency built by the last potentials() call.
  std::vector<std::size_t> path(Index r, Index c) {
    const std::size_t total = static_cast<std::size_t>(m_ + n_);
    std::vector<std::ptrdiff_t> parent_edge(total, -1);
    std::vector<char> seen(total, 0);
    std::vector<Index> stack{r};
    seen[static_cast<std::size_t>(r)] = 1;
    const Index target = m_ + c;
    while (!stack.empty()) {
      const Index node = stack.back();
      stack.pop_back();
      if (node == target) break;
      for (std::size_t k : adj_[static_cast<std::size_t>(node)]) {
        const Cell& e = cells_[k];
        const Index other = node < m_ ? m_ + e.c : e.r;
        if (seen[static_cast<std::size_t>(other)]) continue;
        seen[static_cast<std::size_t>(other)] = 1;
        parent_edge[static_cast<std::size_t>(other)] = static_cast<std::ptrdiff_t>(k);
        stack.push_back(other);
      }
    }
    std::vector<std::size_t> edges;
    Index node = target;
    while (node != r) {
      const auto k = static_cast<std::size_t>(parent_edge[static_cast<std::size_t>(node)]);
      edges.push_back(k);
      const Cell& e = cells_[k];
      node = node < m_ ? m_ + e.c : e.r;
    }
    return edges;
  }

 private:
  void build_adjacency() {
    adj_.assign(static_cast<std::size_t>(m_ + n_), {});
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      adj_[static_cast<std::size_t>(cells_[k].r)].push_back(k);
      adj_[static_cast<std::size_t>(m_ + cells_[k].c)].push_back(k);
    }
  }

  Index m_;
  Index n_;
  std::vector<Cell> cells_;
  std::vector<std::vector<std::size_t>> adj_;
};

}  // namespace

DenseTransportSolution solve_transportation(const Matrix& cost, const Vector& supply,
                                            const Vector& demand,
                                            const SimplexOptions& options) {
  const Index m = supply.size(), n = demand.size();
  if (m == 0 || n == 0) throw ConfigError("transportation problem with an empty side");
  if (cost.rows() != m || cost.cols() != n)
    throw GridMismatchError("cost block does not match the marginals");
  if (!cost.allFinite()) throw SingularCostError("transportation cost is not finite");
  const double sa = supply.sum(), sb = demand.sum();
  if (std::abs(sa - sb) > 1e-9)
    throw MarginalMismatchError("supply and demand totals differ beyond 1e-9");
  const Vector b = demand * (sa / sb);

  TreeBasis tree(m, n, north_west_corner(supply, b));
  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double tol = options.tolerance * scale;
  const int cap = options.max_iterations > 0
                      ? options.max_iterations
                      : static_cast<int>(50 * (m + n) * (m + n) + 1000);

  Vector u, v;
  int iterations = 0;
  int degenerate_run = 0;
  while (true) {
    tree.potentials(cost, u, v);
    // Dantzig pricing; Bland's first-improving rule after a long degenerate
    // run so the method cannot cycle.
    const bool bland = degenerate_run > 2 * (m + n);
    Index er = -1, ec = -1;
    double best = -tol;
    for (Index r = 0; r < m && !(bland && er >= 0); ++r) {
      for (Index c = 0; c < n; ++c) {
        const double d = cost(r, c) - u[r] - v[c];
        if (d < best) {
          best = d;
          er = r;
          ec = c;
          if (bland) break;
        }
      }
    }
    if (er < 0) break;
    if (++iterations > cap) throw Error("transportation simplex exceeded its iteration limit");

    const auto edges = tree.path(er, ec);
    auto& cells = tree.cells();
    // Edges alternate -, +, -, ... starting next to the entering column.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = edges.front();
    for (std::size_t t = 0; t < edges.size(); t += 2) {
      const Cell& e = cells[edges[t]];
      const double f = e.flow;
      const Index key = e.r * n + e.c;
      const Index leave_key = cells[leave].r * n + cells[leave].c;
      if (f < theta || (f == theta && key < leave_key)) {
        theta = f;
        leave = edges[t];
      }
    }
    theta = std::max(theta, 0.0);
    degenerate_run = theta > 0.0 ? 0 : degenerate_run + 1;
    for (std::size_t t = 0; t < edges.size(); ++t) {
      Cell& e = cells[edges[t]];
      e.flow += (t % 2 == 0) ? -theta : theta;
    }
    cells[leave] = {er, ec, theta};
  }

  DenseTransportSolution sol;
  sol.iterations = iterations;
  for (auto& e : tree.cells()) {
    const double f = std::max(e.flow, 0.0);
    sol.basis.push_back({e.r, e.c, f});
    sol.value += f * cost(e.r, e.c);
  }
  return sol;
}

}  // namespace kc
