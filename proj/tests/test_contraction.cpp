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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kc/contraction.hpp"
#include "kc/error.hpp"
#include "kc/specs.hpp"
#include "kc/transport.hpp"
#include "oracles.hpp"

using namespace kc;
using doctest::Approx;

namespace {

PointMap affine(double a, double b) {
  return [a, b](std::span<const double> x) { return std::vector<double>{a * x[0] + b}; };
}

}  // namespace

TEST_CASE("dobrushin examples") {
  const auto P = kct::two_state();
  const auto phi0 = discrete_metric(2);
  const auto b = dobrushin(P, phi0, phi0);
  CHECK(b.value == Approx(0.7).epsilon(1e-12));
  CHECK(b.n_pairs == 1);
  kc::CounterRng rng(3);
  const auto c = matrix_cost(kct::random_cost_matrix(5, rng), "c");
  CHECK(dobrushin(KernelMatrix::identity(5), c, c).value == Approx(1.0));
  const KernelMatrix same(Matrix::Constant(4, 4, 0.25), "same");
  CHECK(dobrushin(same, discrete_metric(4), discrete_metric(4)).value == Approx(0.0));
}

TEST_CASE("dobrushin equals the exhaustive pair maximum") {
  kc::CounterRng rng(18);
  for (int t = 0; t < 20; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(8));
    const auto P = kct::random_kernel(n, rng, 0.6);
    const auto psi = matrix_cost(kct::random_cost_matrix(n, rng), "psi");
    const auto phi = matrix_cost(kct::random_cost_matrix(n, rng), "phi");
    double best = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double d = kantorovich(DiscreteMeasure(P.row(i)), DiscreteMeasure(P.row(j)), phi).value;
        best = std::max(best, d / psi(i, j));
      }
    CHECK(dobrushin(P, psi, phi).value == Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("dirac-pair reduction on random measures") {
  kc::CounterRng rng(5);
  for (int t = 0; t < 10; ++t) {
    const Index n = 3 + static_cast<Index>(rng.below(8));
    const auto P = kct::random_kernel(n, rng, 0.5);
    const auto V = kct::random_weight(n, rng);
    const auto psi = weighted_discrete(V);
    const auto phi = matrix_cost(kct::random_cost_matrix(n, rng), "phi");
    const auto beta = dobrushin(P, psi, phi);
    const auto pairs = random_measure_pairs(n, 50, 100 + static_cast<std::uint64_t>(t));
    const auto check = dobrushin_measure_check(P, psi, phi, beta, pairs);
    CHECK(check.violations == 0);
    CHECK(check.max_excess <= 1e-9);
    CHECK(std::abs(check.witness_gap) <= 1e-9);
    const auto m = kct::random_measure(n, rng);
    const auto zero = dobrushin_measure_check(P, psi, phi, beta, {{m, m}});
    CHECK(zero.violations == 0);
    CHECK(std::abs(zero.max_excess) <= 1e-12);
  }
}

TEST_CASE("dirac-pair reduction on shipped models") {
  for (const char* tag : {"arcsine", "half_line", "irf"}) {
    CAPTURE(tag);
    const auto m = build_model({{"model", tag}, {"n", 40}});
    const auto psi = weighted_discrete(m.V);
    const auto beta = dobrushin(m.P, psi, psi);
    const auto check =
        dobrushin_measure_check(m.P, psi, psi, beta, random_measure_pairs(40, 100, 9, 5));
    CHECK(check.violations == 0);
  }
}

TEST_CASE("axiom guard") {
  Matrix bad = Matrix::Ones(2, 2);
  bad.diagonal().setZero();
  bad(0, 1) = 0.0;
  CHECK_THROWS_AS(pair_ratio(kct::two_state(), matrix_cost(bad, "bad"), discrete_metric(2), 0, 1),
                  AxiomViolationError);
}

TEST_CASE("explicit constants") {
  const auto b = theorem1_bounds(0.5, 0.5, 4.0, 1.0, 0.5);
  CHECK(std::abs(b.r_eps - 2.0) <= 1e-12);
  CHECK(std::abs(b.delta - 0.1) <= 1e-12);
  CHECK(std::abs(b.rho - 1.0 / 24.0) <= 1e-12);
  CHECK(std::abs(b.bound_re3 - 0.975) <= 1e-12);
  CHECK(std::abs(b.bound_reupsilon - std::sqrt(0.975)) <= 1e-12);
  CHECK(std::abs(b.bound_reupsilon - 0.9874209) <= 1e-7);
  CHECK(std::abs(b.bound_pregibbs - 0.950625) <= 1e-12);

  const auto far = theorem1_bounds(0.5, 0.5, 1e12, 1.0, 0.5);
  CHECK(far.delta == Approx(0.5 / 2.5).epsilon(1e-9));

  CHECK_THROWS_AS(theorem1_bounds(0.5, 0.5, 2.0, 1.0, 0.5), OutOfRangeError);
  CHECK_THROWS_AS(theorem1_bounds(0.5, 0.5, 3.0, 3.5, 0.5), OutOfRangeError);
  CHECK_THROWS_AS(theorem1_bounds(1.0, 0.5, 4.0, 1.0, 0.5), OutOfRangeError);
  CHECK_THROWS_AS(theorem1_bounds(0.5, 0.0, 4.0, 1.0, 0.5), OutOfRangeError);
  CHECK_THROWS_AS(theorem1_bounds(0.5, 0.5, 4.0, 1.0, 1.0), OutOfRangeError);
}

TEST_CASE("bound sweep") {
  const AlphaMap alpha = [](double r) -> std::optional<double> {
    if (r > 50) return std::nullopt;
    return 1.0 / r;
  };
  const auto rs = geometric_sweep(1.0, 100.0, 9);
  CHECK(rs.size() == 9);
  CHECK(rs.front() == Approx(1.0));
  CHECK(rs.back() == Approx(100.0));
  const auto sweep = sweep_theorem_bounds(0.5, alpha, 1.5, rs, 0.5);
  CHECK(sweep.reports.size() + sweep.skipped.size() == rs.size());
  REQUIRE(sweep.best_re3 >= 0);
  for (const auto& r : sweep.reports) {
    CHECK(r.r > 2.0);
    CHECK(sweep.reports[static_cast<std::size_t>(sweep.best_re3)].bound_re3 <= r.bound_re3);
    CHECK(r.bound_re3 < 1.0);
  }
}

TEST_CASE("comparison suite") {
  const auto P = kct::two_state();
  const auto phi0 = discrete_metric(2);
  const auto rep = comparison_suite(P, phi0, phi0, 3.0, 0.5);
  CHECK(rep.worst_slack() >= -1e-9);
  bool saw_scaling = false, saw_power = false;
  for (const auto& it : rep.items) {
    if (it.name == "scaling") {
      saw_scaling = true;
      CHECK(it.lhs == Approx(0.7));
      CHECK(it.equality);
    }
    if (it.name == "power") {
      saw_power = true;
      CHECK(it.lhs <= std::sqrt(0.7) + 1e-9);
      CHECK(it.rhs == Approx(0.8366600).epsilon(1e-7));
    }
  }
  CHECK(saw_scaling);
  CHECK(saw_power);
  CHECK(dobrushin(P, scaled_cost(phi0, 3), scaled_cost(phi0, 3)).value == Approx(0.7));

  kc::CounterRng rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto K = kct::random_kernel(3, rng);
    const auto c = matrix_cost(kct::random_cost_matrix(3, rng), "c");
    CHECK(product_check(K, K, c, c, c).slack() >= -1e-9);
  }
}

TEST_CASE("semigroup submultiplicativity") {
  kc::CounterRng rng(66);
  for (int t = 0; t < 15; ++t) {
    const Index n = 3 + static_cast<Index>(rng.below(6));
    const auto P = kct::random_kernel(n, rng, 0.5);
    const auto phi = weighted_discrete(kct::random_weight(n, rng));
    const int a = 1 + static_cast<int>(rng.below(3)), b = 1 + static_cast<int>(rng.below(3));
    CHECK(dobrushin(power(P, a + b), phi, phi).value <=
          dobrushin(power(P, a), phi, phi).value * dobrushin(power(P, b), phi, phi).value + 1e-9);
  }
}

TEST_CASE("two-state decay is exactly geometric") {
  const auto P = kct::two_state();
  const auto spec = kct::chain_spectrum(P.matrix());
  CHECK(spec.lambda2 == Approx(0.7).epsilon(1e-12));
  const auto d = decay_curve(P, DiscreteMeasure::dirac(2, 0), DiscreteMeasure::dirac(2, 1),
                             discrete_metric(2), WeightFunction::constant(2, 1.0), 30);
  REQUIRE(d.samples.size() == 31);
  for (const auto& s : d.samples)
    CHECK(std::abs(s.d_phi - std::pow(spec.lambda2, s.n)) <= 1e-12);
  REQUIRE(d.fit.valid);
  CHECK(d.fit.lambda == Approx(0.7).epsilon(1e-9));

  const auto z = decay_curve(P, DiscreteMeasure::dirac(2, 0), DiscreteMeasure::dirac(2, 0),
                             discrete_metric(2), WeightFunction::constant(2, 1.0), 10);
  for (const auto& s : z.samples) CHECK(s.d_phi == 0.0);
  CHECK_FALSE(z.fit.valid);
}

TEST_CASE("decay fit") {
  std::vector<double> d;
  for (int n = 0; n <= 30; ++n) d.push_back(3.0 * std::pow(0.8, n) + (n < 5 ? 1.0 : 0.0));
  const auto f = fit_decay(d);
  REQUIRE(f.valid);
  CHECK(f.lambda == Approx(0.8).epsilon(1e-9));
  CHECK(f.prefactor == Approx(3.0).epsilon(1e-6));
  CHECK(f.burn_in >= 5);
  CHECK(f.r_squared >= 0.999);
}

TEST_CASE("arcsine decay and rate consistency") {
  const auto m = build_model({{"model", "arcsine"}, {"n", 100}});
  const auto phiV = weighted_discrete(m.V);
  const auto d = decay_curve(m.P, DiscreteMeasure::dirac(100, 2), DiscreteMeasure::dirac(100, 97),
                             phiV, m.V, 30);
  REQUIRE(d.fit.valid);
  CHECK(d.fit.lambda < 1.0);
  CHECK(d.fit.r_squared >= 0.99);
  CHECK(d.fit.lambda <= dobrushin(m.P, phiV, phiV).value + 1e-6);
}

TEST_CASE("invariant measure") {
  const auto r = invariant_measure(kct::two_state(), 1e-13);
  CHECK(r.converged);
  CHECK(r.unique);
  CHECK(std::abs(r.pi[0] - 2.0 / 3.0) <= 1e-10);
  CHECK(std::abs(r.pi[1] - 1.0 / 3.0) <= 1e-10);
  const auto oracle = kct::chain_spectrum(kct::two_state().matrix());
  CHECK((r.pi.weights() - oracle.pi).cwiseAbs().maxCoeff() <= 1e-10);

  Matrix ds(3, 3);
  ds << 0.2, 0.3, 0.5, 0.5, 0.2, 0.3, 0.3, 0.5, 0.2;
  const auto u = invariant_measure(KernelMatrix(ds, "ds"));
  for (Index i = 0; i < 3; ++i) CHECK(u.pi[i] == Approx(1.0 / 3.0));

  const auto id = invariant_measure(KernelMatrix::identity(4));
  CHECK_FALSE(id.unique);
}

TEST_CASE("invariant measure contraction on shipped models") {
  for (const char* tag : {"arcsine", "half_line", "irf"}) {
    CAPTURE(tag);
    const auto m = build_model({{"model", tag}, {"n", 60}});
    const auto inv = invariant_measure(m.P, 1e-13);
    REQUIRE(inv.converged);
    const auto fixed = left_action(inv.pi, power(m.P, 5));
    CHECK(kantorovich(fixed, inv.pi, weighted_discrete(m.V)).value <= 1e-9);
    const auto d = decay_curve(m.P, DiscreteMeasure::dirac(60, 0), inv.pi, discrete_metric(60),
                               m.V, 30);
    for (std::size_t k = static_cast<std::size_t>(d.fit_V.burn_in) + 1; k < d.samples.size(); ++k)
      CHECK(d.samples[k].d_V <= d.samples[k - 1].d_V + 1e-12);
  }
}

TEST_CASE("continuous-time rates") {
  CHECK(continuous_time_rate(0.5, 0.8, 1.0, 1.0).rate == Approx(0.4462871).epsilon(1e-7));
  CHECK(continuous_time_rate(0.3, std::exp(-0.3), 1.0, 1.0).rate == Approx(1.0).epsilon(1e-12));
  const auto c = continuous_time_rate(1.0, 0.5, 2.0, 1.0);
  CHECK(c.prefactor == Approx(4.0));
  CHECK(c.bound(0.0) == Approx(4.0));
}

TEST_CASE("wasserstein constants") {
  CHECK(wasserstein_constant(WeightType::kPolynomial, 2) == Approx(0.5));
  CHECK(wasserstein_constant(WeightType::kExponential, 2, 1.0) == Approx(0.25));
  CHECK(wasserstein_constant(WeightType::kPolynomial, 1) == Approx(1.0));
  const Grid g = build_grid(Domain::open_interval(-3, 3), 30);
  const auto V = WeightFunction::from_function(g, [](auto x) { return 0.5 + x[0] * x[0]; }, "q");
  CHECK(grid_wasserstein_constant(g, V, 2) >= 0.5 - 1e-12);
}

TEST_CASE("fixed points") {
  const auto a = fixed_point(affine(0.5, 1.0), {10.0});
  REQUIRE(a.converged);
  CHECK(a.y_star[0] == Approx(2.0).epsilon(1e-10));
  CHECK(a.rate == Approx(0.5).epsilon(0.01));
  const auto z = fixed_point(affine(0.5, 0.0), {3.0});
  REQUIRE(z.converged);
  CHECK(std::abs(z.y_star[0]) <= 1e-10);
  CHECK(z.rate == Approx(0.5).epsilon(0.01));
  const auto id = fixed_point(affine(1.0, 0.0), {1.0});
  CHECK_FALSE(id.converged);
  CHECK(!id.message.empty());
}

TEST_CASE("deterministic map certificate") {
  const Grid g = build_grid(Domain::open_interval(-10, 10), 200);
  const auto cert = certify_deterministic_map(affine(0.5, 1.0), g, 0.5, {5.0, 20.0, 100.0});
  CHECK(cert.ok);
  CHECK(cert.drift.valid());
  for (const auto& c : cert.contraction) CHECK(c.alpha > 0.0);
}
