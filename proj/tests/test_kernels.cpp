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

#include "kc/certify.hpp"
#include "kc/error.hpp"
#include "kc/gibbs.hpp"
#include "kc/kernels.hpp"
#include "oracles.hpp"

using namespace kc;
using doctest::Approx;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

void check_stochastic(const KernelMatrix& P) {
  CHECK(P.matrix().minCoeff() >= 0.0);
  CHECK((P.matrix().rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
}

WeightFunction quad_weight(const Grid& g) {
  return WeightFunction::from_function(g, [](auto x) { return 0.5 + x[0] * x[0]; }, "quad");
}

WeightFunction arcsine_weight(const Grid& g, double iota) {
  return WeightFunction::from_function(
      g, [iota](auto x) { return std::pow(x[0], -iota) + std::pow(1 - x[0], -iota); }, "W");
}

}  // namespace

TEST_CASE("actions and powers on the two-state chain") {
  const auto P = kct::two_state();
  const auto m = left_action(DiscreteMeasure(vec({0.5, 0.5})), P);
  CHECK(m[0] == Approx(0.55));
  CHECK(m[1] == Approx(0.45));
  const auto d = left_action(DiscreteMeasure::dirac(2, 1), P);
  CHECK(d[0] == Approx(0.2));

  const auto P2 = power(P, 2);
  CHECK(P2(0, 0) == Approx(0.83));
  CHECK(P2(0, 1) == Approx(0.17));
  CHECK(P2(1, 0) == Approx(0.34));
  CHECK(P2(1, 1) == Approx(0.66));
  CHECK(power(P, 0).matrix().isIdentity());
  CHECK((power(P, 1).matrix() - P.matrix()).norm() == 0.0);

  const Vector one = right_action(P, Vector::Ones(2));
  CHECK((one.array() - 1.0).abs().maxCoeff() <= 1e-15);
  const Vector col = right_action(P, vec({0, 1}));
  CHECK(col[0] == Approx(0.1));
  CHECK(col[1] == Approx(0.8));
}

TEST_CASE("uniform 3-state chain") {
  const KernelMatrix U(Matrix::Constant(3, 3, 1.0 / 3.0), "uniform");
  const WeightFunction V(vec({1, 2, 4}));
  const Vector PV = right_action(U, V.values());
  for (Index i = 0; i < 3; ++i) CHECK(PV[i] == Approx(7.0 / 3.0));
  CHECK(op_norm_V(U, V) == Approx(7.0 / 3.0));
  CHECK(op_norm_V(KernelMatrix::identity(3), V) == Approx(1.0));
  kc::CounterRng rng(1);
  CHECK(op_norm_V(kct::random_kernel(5, rng), WeightFunction::constant(5, 3.0)) == Approx(1.0));
  const auto u = left_action(DiscreteMeasure::uniform(3), U);
  for (Index i = 0; i < 3; ++i) CHECK(u[i] == Approx(1.0 / 3.0));
  CHECK(op_norm_VW(U, V, V) == Approx(op_norm_V(U, V)));
  const WeightFunction V2(2.0 * V.values());
  CHECK(op_norm_VW(KernelMatrix::identity(3), V, V2) == Approx(2.0));
}

TEST_CASE("semigroup and submultiplicativity on random kernels") {
  kc::CounterRng rng(42);
  for (int t = 0; t < 50; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(15));
    const auto P = kct::random_kernel(n, rng, rng.uniform(0.2, 1.0));
    const int a = static_cast<int>(rng.below(6)), b = static_cast<int>(rng.below(6));
    CHECK((power(P, a + b).matrix() - compose(power(P, a), power(P, b)).matrix())
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
    const auto K = kct::random_kernel(n, rng), L = kct::random_kernel(n, rng);
    const auto V = kct::random_weight(n, rng), W = kct::random_weight(n, rng);
    CHECK(op_norm_V(compose(K, L), V) <= op_norm_VW(K, V, W) * op_norm_VW(L, W, V) + 1e-12);
  }
}

TEST_CASE("unit interval mixture kernel") {
  const Grid g = build_grid(Domain::open_interval(0, 1), 4);
  const KernelMatrix Q(Matrix::Constant(4, 4, 0.25), "unif");
  const auto P = unit_interval_kernel(Q, DiscreteMeasure::uniform(4), g);
  check_stochastic(P);
  for (Index j = 0; j < 4; ++j) CHECK(P(1, j) == Approx(0.25));  // x = 0.375

  Vector nu = vec({0.1, 0.2, 0.3, 0.4});
  Matrix rows(4, 4);
  for (Index i = 0; i < 4; ++i) rows.row(i) = nu.transpose();
  const auto Pn = unit_interval_kernel(KernelMatrix(rows, "nu"), DiscreteMeasure(nu), g);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) CHECK(Pn(i, j) == Approx(nu[j]));

  // Rows approach nu as x goes to zero.
  const Grid fine = build_grid(Domain::open_interval(0, 1), 1000);
  const auto Pf = unit_interval_kernel(KernelMatrix::identity(1000), DiscreteMeasure::uniform(1000),
                                       fine);
  CHECK((Pf.row(0).array() - 1e-3).abs().maxCoeff() <= 1e-3);
}

TEST_CASE("arcsine kernel") {
  const Grid g = build_grid(Domain::open_interval(0, 1), 1001);
  REQUIRE(g.x(500) == Approx(0.5));
  const auto P = arcsine_kernel(g);
  check_stochastic(P);
  const Vector PW = right_action(P, arcsine_weight(g, 0.25).values());
  CHECK(PW[500] == Approx(8.0 / 3.0).epsilon(2e-3));
}

TEST_CASE("arcsine drift identity on the continuum") {
  for (double iota : {0.25, 0.4}) {
    auto f = [iota](double x) { return (1.0 / x) * (1.0 - std::pow(1.0 - x, 1.0 - iota)); };
    for (int k = 1; k <= 10; ++k) {
      const double x = k / 11.0;
      const double V = std::pow(x, -iota) + std::pow(1 - x, -iota);
      const double lhs = 2 * (1 - iota) * kct::arcsine_PV_quadrature(x, iota);
      CHECK(std::abs(lhs - (V + f(x) + f(1 - x))) <= 1e-6);
    }
  }
  // Grid kernel against the continuum at interior points.
  const Grid g = build_grid(Domain::open_interval(0, 1), 400);
  const Vector PW = right_action(arcsine_kernel(g), arcsine_weight(g, 0.25).values());
  for (Index i = 40; i < 360; i += 40) {
    const double cont = kct::arcsine_PV_quadrature(g.x(i), 0.25);
    CHECK(std::abs(PW[i] - cont) / cont <= 5e-3);
  }
}

TEST_CASE("arcsine drift ratio approaches 1/(2(1-iota)) at the boundary") {
  const double iota = 0.25;
  const Grid g = build_grid(Domain::open_interval(0, 1), 400);
  const auto P = arcsine_kernel(g);
  const auto W = arcsine_weight(g, iota);
  const Vector PW = right_action(P, W.values());
  const double ratio = PW[0] / W[0];
  CHECK(ratio == Approx(1.0 / (2.0 * (1.0 - iota))).epsilon(0.03));
  const auto cert = certify_drift(P, W);
  CHECK(cert.valid());
  CHECK(cert.eps < 1.0);
}

TEST_CASE("half-line kernel") {
  const Grid g = build_grid(Domain::half_line(0.01, 10), 200);
  const auto P = halfline_kernel(0.5, 1.0, g);
  check_stochastic(P);

  const auto P0 = halfline_kernel(0.0, 1.0, g);
  Vector w(200);
  // Boundary cells absorb the truncated mass: [0, hi) and [lo, inf).
  for (Index j = 0; j < 200; ++j)
    w[j] = weibull_mass(1.0, j == 0 ? 0.0 : g.cell_lo(j, 0),
                        j == 199 ? INFINITY : g.cell_hi(j, 0));
  w /= w.sum();
  for (Index i = 0; i < 200; i += 37)
    CHECK((P0.row(i) - w).cwiseAbs().maxCoeff() <= 1e-12);

  const double iota = 0.3, delta = 0.5;
  const auto W = WeightFunction::from_function(
      g, [iota](auto x) { return std::pow(x[0], -iota) + x[0]; }, "W");
  const double eps_paper = 0.5 * delta * (1 + 1 / (1 - iota));
  const auto cert = certify_drift(P, W);
  CHECK(cert.valid());
  CHECK(cert.eps <= eps_paper + 0.02);
}

TEST_CASE("iterated random function kernel") {
  const Grid g = build_grid(Domain::open_interval(-10, 10), 200);
  IrfModel det;
  det.F = [](std::span<const double> x) { return std::vector<double>{0.5 * x[0]}; };
  det.noise_points = {{0.0}};
  det.noise_weights = vec({1.0});
  const auto D = irf_kernel(det, g);
  check_stochastic(D);
  for (Index i = 0; i < 200; i += 17) {
    const double y = 0.5 * g.x(i);
    CHECK(D(i, g.locate(std::span<const double>(&y, 1))) == 1.0);
  }

  IrfModel id = det;
  id.F = [](std::span<const double> x) { return std::vector<double>{x[0]}; };
  CHECK(irf_kernel(id, g).matrix().isIdentity());

  IrfModel noisy = det;
  set_gaussian_noise(noisy, 1.0);
  const auto P = irf_kernel(noisy, g);
  check_stochastic(P);
  const auto V = quad_weight(g);
  // E(0.5x + Z)^2 = 0.25 x^2 + 1, so P(V) - 0.5 V = 1.25 - 0.25 x^2 <= 1.25.
  const auto c = certify_drift_at(P, V, 0.5);
  CHECK(c.c == Approx(1.25).epsilon(0.02));
  CHECK(c.residual <= 1e-12);
}

TEST_CASE("euler langevin kernel") {
  const Grid g = build_grid(Domain::open_interval(-8, 8), 400);
  LangevinModel m;
  m.grad_U = [](double x) { return x; };
  const auto Q = langevin_kernel(m, g);
  check_stochastic(Q);
  for (Index i = 100; i < 300; i += 25) {
    double mean = 0.0;
    for (Index j = 0; j < 400; ++j) mean += Q(i, j) * g.x(j);
    CHECK(mean == Approx((1 - m.h) * g.x(i)).epsilon(1e-3));
  }
  const auto V = quad_weight(g);
  CHECK(certify_drift(Q, V).eps <= 1.0 / 1.1 + 0.02);

  const Grid g5 = build_grid(Domain::open_interval(-2, 2), 5);
  LangevinModel jump = m;
  jump.sigma = 0.0;
  jump.h = 1.0;
  const auto J = langevin_kernel(jump, g5);
  for (Index i = 0; i < 5; ++i) CHECK(J(i, 2) == Approx(1.0));
}

TEST_CASE("gibbs pair against a direct construction") {
  kc::CounterRng rng(2024);
  for (int t = 0; t < 10; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(8));
    const auto model = kct::random_gibbs_model(n, rng);
    const auto pair = build_gibbs_pair(model);
    check_stochastic(pair.M);
    check_stochastic(pair.K);
    check_stochastic(pair.L);
    // Direct: M(y,x) = exp(-m(y,x)) nu(x); K is the nu_h-reversal of M; L
    // reweights M by d nu_g / d(nu_h M).
    Vector nu_h(n), nu_g(n), q = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
      nu_h[i] = std::exp(-model.h[i]) * model.nu[i];
      nu_g[i] = std::exp(-model.g[i]) * model.nu[i];
    }
    for (Index y = 0; y < n; ++y)
      for (Index x = 0; x < n; ++x) q[x] += nu_h[y] * std::exp(-model.m(y, x)) * model.nu[x];
    for (Index x = 0; x < n; ++x)
      for (Index y = 0; y < n; ++y) {
        const double K = nu_h[y] * std::exp(-model.m(y, x)) * model.nu[x] / q[x];
        CHECK(std::abs(pair.K(x, y) - K) <= 1e-12);
      }
    for (Index y = 0; y < n; ++y) {
      Vector row(n);
      for (Index x = 0; x < n; ++x) row[x] = std::exp(-model.m(y, x)) * model.nu[x] * nu_g[x] / q[x];
      row /= row.sum();
      CHECK((pair.L.row(y) - row).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const auto a = left_action(left_action(DiscreteMeasure(nu_h), pair.M), pair.K);
    CHECK(kct::tv_oracle(a.weights(), nu_h) <= 1e-9);
    const auto b = left_action(left_action(DiscreteMeasure(nu_g), pair.K), pair.L);
    CHECK(kct::tv_oracle(b.weights(), nu_g) <= 1e-9);

    // Pointwise Lyapunov inequalities, evaluated here from raw quantities.
    const double delta = model.delta;
    for (Index x = 0; x < n; ++x) {
      double KW = 0.0, LV = 0.0;
      for (Index y = 0; y < n; ++y) {
        KW += pair.K(x, y) * std::exp(delta * model.h[y]);
        LV += pair.L(x, y) * std::exp(delta * model.g[y]);
      }
      CHECK(std::exp(-delta * model.g[x]) * KW <=
            pair.c_delta_h * std::exp(-pair.g_delta[x]) * (1 + 1e-12));
      CHECK(std::exp(-delta * model.h[x]) * LV <=
            pair.c_delta_g * std::exp(-pair.h_delta[x]) * (1 + 1e-12));
    }
    CHECK(gibbs_lyapunov_check(model, pair).holds());
  }
}

TEST_CASE("gibbs constant potential") {
  const Index n = 5;
  Vector nu = Vector::Ones(n);
  kc::CounterRng rng(6);
  Vector g(n), h(n);
  for (Index i = 0; i < n; ++i) {
    g[i] = rng.uniform(0, 2);
    h[i] = rng.uniform(0, 2);
  }
  const auto model = GibbsModel::normalized(nu, g, h, Matrix::Zero(n, n), 0.25);
  const auto pair = build_gibbs_pair(model);
  for (Index y = 0; y < n; ++y)
    for (Index x = 0; x < n; ++x) CHECK(pair.M(y, x) == Approx(1.0 / n));
  for (Index x = 0; x < n; ++x) CHECK((pair.K.row(x) - pair.nu_h).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gibbs model invariants are enforced") {
  kc::CounterRng rng(3);
  auto model = kct::random_gibbs_model(4, rng);
  model.g[0] += 1.0;
  CHECK_THROWS_AS(build_gibbs_pair(model), ModelInvariantError);
}

TEST_CASE("shipped constructors produce stochastic kernels") {
  const Grid u = build_grid(Domain::open_interval(0, 1), 60);
  check_stochastic(arcsine_kernel(u));
  check_stochastic(halfline_kernel(0.3, 2.0, build_grid(Domain::half_line(0.01, 10), 60)));
  const Grid r = build_grid(Domain::open_interval(-4, 4), 60);
  check_stochastic(build_gibbs_pair(quadratic_gibbs_model(r, 1, 1, 0.2, 0.4)).K);
  LangevinModel dw;
  dw.grad_U = [](double x) { return x * x * x - x; };
  check_stochastic(langevin_kernel(dw, build_grid(Domain::open_interval(-3, 3), 80)));
}
