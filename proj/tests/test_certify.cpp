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

#include <algorithm>
#include <cmath>

#include "kc/certify.hpp"
#include "kc/error.hpp"
#include "kc/gibbs.hpp"
#include "kc/specs.hpp"
#include "kc/transport.hpp"
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

// Independent re-check of a drift certificate from the raw kernel.
double drift_excess(const KernelMatrix& P, const WeightFunction& V, double eps, double c) {
  double worst = -INFINITY;
  for (Index i = 0; i < P.size(); ++i) {
    double pv = 0.0;
    for (Index j = 0; j < P.size(); ++j) pv += P(i, j) * V[j];
    worst = std::max(worst, pv - eps * V[i] - c);
  }
  return worst;
}

}  // namespace

TEST_CASE("drift examples") {
  const KernelMatrix U(Matrix::Constant(3, 3, 1.0 / 3.0), "uniform");
  const WeightFunction V(vec({1, 2, 4}));
  const auto d = certify_drift_at(U, V, 0.5);
  CHECK(d.c == Approx(7.0 / 3.0 - 0.5).epsilon(1e-12));
  CHECK(d.residual <= 1e-12);

  const auto id = certify_drift_at(KernelMatrix::identity(3), V, 1 - 1e-6);
  CHECK(id.c <= 4e-6 + 1e-15);

  kc::CounterRng rng(4);
  const auto one = certify_drift_at(kct::random_kernel(6, rng), WeightFunction::constant(6, 1.0), 0.5);
  CHECK(one.c == Approx(0.5));
}

TEST_CASE("drift search re-verifies from raw data") {
  kc::CounterRng rng(10);
  for (int t = 0; t < 40; ++t) {
    const Index n = 3 + static_cast<Index>(rng.below(20));
    const auto P = kct::random_kernel(n, rng, 0.5);
    const auto V = kct::random_weight(n, rng, 0.5, 20);
    for (auto obj : {DriftObjective::kSmallSetLevel, DriftObjective::kMinC}) {
      DriftOptions opt;
      opt.objective = obj;
      const auto cert = certify_drift(P, V, opt);
      CHECK(cert.valid());
      CHECK(!cert.curve.empty());
      CHECK(drift_excess(P, V, cert.eps, cert.c) <= 1e-12);
      for (const auto& [e, c] : cert.curve) CHECK(drift_excess(P, V, e, c) <= 1e-12);
    }
  }
}

TEST_CASE("drift pair") {
  const Index n = 4;
  const WeightFunction V(vec({1, 2, 3, 5}));
  const auto id = KernelMatrix::identity(n);
  const auto pc = certify_drift_pair(id, id, V, V, 0.3);
  CHECK(pc.c0 == Approx(0.7 * 5.0));
  CHECK(pc.eps == 0.3 * 0.3);
  CHECK(pc.c == Approx(1.3 * pc.c0));

  kc::CounterRng rng(99);
  for (int t = 0; t < 10; ++t) {
    const auto model = kct::random_gibbs_model(3 + static_cast<Index>(rng.below(6)), rng);
    const auto pair = build_gibbs_pair(model);
    const auto c = certify_drift_pair_scan(pair.K, pair.L, pair.V, pair.W);
    CHECK(c.eps == c.eps0 * c.eps0);
    CHECK(drift_excess(compose(pair.K, pair.L), pair.V, c.eps, c.c) <= 1e-9);
    CHECK(c.product_residual <= 1e-9);
  }
}

TEST_CASE("minorization examples") {
  Matrix P3(3, 3);
  P3 << 0.5, 0.3, 0.2, 0.2, 0.3, 0.5, 0.1, 0.1, 0.8;
  const KernelMatrix P(P3, "p");
  const WeightFunction V(vec({1, 1, 10}));
  const auto c = minorization(P, V, 2.0);
  REQUIRE(c.ok);
  CHECK(c.alpha == Approx(0.7));
  CHECK(c.nu_r[0] == Approx(2.0 / 7.0));
  CHECK(c.nu_r[1] == Approx(3.0 / 7.0));
  CHECK(c.nu_r[2] == Approx(2.0 / 7.0));

  const WeightFunction V1(vec({1, 5, 10}));
  const auto single = minorization(P, V1, 2.0);
  CHECK(single.alpha == Approx(1.0));
  CHECK((single.nu_r - P.row(0)).cwiseAbs().maxCoeff() <= 1e-15);

  const auto id = minorization(KernelMatrix::identity(3), V, 2.0);
  CHECK_FALSE(id.ok);
  CHECK(id.alpha == 0.0);
}

TEST_CASE("local contraction examples") {
  const auto P = kct::two_state();
  const auto c = local_contraction(P, discrete_metric(2), WeightFunction::constant(2, 1.0), 100.0);
  REQUIRE(c.ok);
  CHECK(c.s == Approx(0.7));
  CHECK(c.alpha == Approx(0.3));

  const KernelMatrix same(Matrix::Constant(3, 3, 1.0 / 3.0), "same");
  const auto s = local_contraction(same, discrete_metric(3), WeightFunction::constant(3, 1.0), 10);
  CHECK(s.s == Approx(0.0));
  CHECK(s.alpha == Approx(kAlphaCap));

  const auto id = local_contraction(KernelMatrix::identity(3), discrete_metric(3),
                                    WeightFunction::constant(3, 1.0), 10);
  CHECK_FALSE(id.ok);
  CHECK(id.s == Approx(1.0));
  CHECK(id.witness_i >= 0);
}

TEST_CASE("local contraction dominates minorization and re-verifies") {
  kc::CounterRng rng(12);
  for (int t = 0; t < 40; ++t) {
    const Index n = 3 + static_cast<Index>(rng.below(10));
    const auto P = kct::random_kernel(n, rng, 0.7);
    const auto V = kct::random_weight(n, rng, 0.5, 10);
    const double r = rng.uniform(1.0, 21.0);
    const auto mn = minorization(P, V, r);
    const auto lc = local_contraction(P, discrete_metric(n), V, r);
    if (mn.ok && lc.n_pairs > 0) CHECK(lc.alpha >= std::min(mn.alpha, kAlphaCap) - 1e-12);
    // Re-check every sublevel pair against the certificate.
    if (lc.ok) {
      for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
          if (V[i] + V[j] > r) continue;
          const double tv = kct::tv_oracle(P.row(i), P.row(j));
          CHECK(tv <= (1 - lc.alpha) + 1e-9);
        }
    }
    // The profile agrees with the direct computation at the same level.
    const auto prof = LocalContractionProfile::build(P, discrete_metric(n), V);
    const auto at = prof.at(r);
    if (lc.n_pairs > 0) CHECK(at.s == Approx(lc.s).epsilon(1e-12));
  }
}

TEST_CASE("minorization succeeds on shipped models with positive densities") {
  for (const char* tag : {"arcsine", "half_line", "gibbs", "unit_interval_mixture"}) {
    CAPTURE(tag);
    Json spec = {{"model", tag}};
    if (std::string(tag) != "gibbs") spec["n"] = 80;
    const auto m = build_model(spec);
    std::vector<double> v(m.V.values().data(), m.V.values().data() + m.V.size());
    std::sort(v.begin(), v.end());
    const double r_min = v[1];
    const double r_max = v.back();
    for (int k = 0; k <= 10; ++k) {
      const double r = r_min * std::pow(r_max / r_min, k / 10.0);
      CHECK(minorization(m.P, m.V, r).alpha > 0.0);
    }
  }
}

TEST_CASE("iterated random function Lyapunov constructions") {
  const Grid g = build_grid(Domain::open_interval(-10, 10), 200);
  IrfModel model;
  model.F = [](std::span<const double> x) { return std::vector<double>{0.5 * x[0]}; };
  set_gaussian_noise(model, 1.0);
  const auto P = irf_kernel(model, g);
  IrfLyapunovOptions poly;
  poly.p = 2.0;
  const auto rep = irf_lyapunov(model, g, P, poly);
  CHECK(rep.hypfx.lambda == Approx(0.5));
  CHECK(rep.certifiable);
  CHECK(rep.prediction_holds);
  // The direct certificate at eps = 0.5 is sharper than the predicted one.
  CHECK(rep.predicted_eps >= 0.5);
  CHECK(rep.predicted_c >= certify_drift_at(P, rep.V, 0.5).c);

  IrfModel det = model;
  set_gaussian_noise(det, 0.0);
  const auto D = irf_kernel(det, g);
  IrfLyapunovOptions p1;
  p1.p = 1.0;
  const auto r1 = irf_lyapunov(det, g, D, p1);
  CHECK(r1.hypfx.lambda == Approx(0.5));
  // V = 1/2 + |x|: P(V) - V/2 = 1/4 up to rounding F(x) onto the grid.
  CHECK(certify_drift_at(D, r1.V, 0.5).c <= 0.25 + g.spacing(0));

  IrfModel bounded = model;
  bounded.noise_points = {{-1.0}, {0.0}, {1.0}};
  bounded.noise_weights = vec({0.25, 0.5, 0.25});
  bounded.noise_spacing = 0.0;
  IrfLyapunovOptions ex;
  ex.mode = IrfLyapunovMode::kExponential;
  ex.delta = 0.5;
  const auto re = irf_lyapunov(bounded, g, irf_kernel(bounded, g), ex);
  CHECK(re.check.residual <= 0.0);
  CHECK(re.certifiable);

  IrfModel expand = det;
  expand.F = [](std::span<const double> x) { return std::vector<double>{1.5 * x[0]}; };
  const auto bad = irf_lyapunov(expand, g, irf_kernel(expand, g), poly);
  CHECK_FALSE(bad.certifiable);
  CHECK(bad.hypfx.lambda >= 1.0);
}

TEST_CASE("generator drift check") {
  const Grid g = build_grid(Domain::open_interval(-8, 8), 300);
  const auto V = WeightFunction::from_function(g, [](auto x) { return 0.5 + x[0] * x[0]; }, "q");
  LangevinModel m;
  m.grad_U = [](double x) { return x; };
  m.sigma = 0.3;
  m.h = 0.1;
  const auto Q = langevin_kernel(m, g);
  const auto ok = generator_drift_check(Q, V, 1.0, 0.5 + m.sigma * m.sigma, m.h);
  CHECK(ok.passes);
  CHECK(ok.eps_h == Approx(1 / 1.1));
  const auto tiny = generator_drift_check(KernelMatrix::identity(g.size()), V, 1.0, 1.0, 1e-9);
  CHECK(tiny.passes);
  const auto bad = generator_drift_check(Q, V, 100.0, 0.5 + m.sigma * m.sigma, m.h);
  CHECK_FALSE(bad.passes);
  CHECK(bad.max_violation > 0.0);
}

TEST_CASE("gibbs minorization") {
  // Constant potential: the explicit constant for K is nu_h(C_W(r)).
  const Index n = 6;
  kc::CounterRng rng(7);
  Vector g(n), h(n);
  for (Index i = 0; i < n; ++i) {
    g[i] = rng.uniform(0, 2);
    h[i] = rng.uniform(0, 2);
  }
  const auto flat = GibbsModel::normalized(Vector::Ones(n), g, h, Matrix::Zero(n, n), 0.25);
  const auto fp = build_gibbs_pair(flat);
  const double r = fp.W.values().maxCoeff() * 0.9 + fp.W.values().minCoeff() * 0.1;
  const auto gm = gibbs_minorization(flat, fp, std::max(r, fp.V.values().minCoeff()));
  double mass = 0.0;
  for (Index y = 0; y < n; ++y)
    if (fp.W[y] <= gm.r) mass += fp.nu_h[y];
  CHECK(gm.alpha_h == Approx(mass).epsilon(1e-12));
  CHECK(gm.direct_K.alpha == Approx(1.0));

  for (int t = 0; t < 20; ++t) {
    const auto model = kct::random_gibbs_model(3 + static_cast<Index>(rng.below(8)), rng);
    const auto pair = build_gibbs_pair(model);
    const double lo = std::max(pair.V.values().minCoeff(), pair.W.values().minCoeff());
    const double hi = std::max(pair.V.values().maxCoeff(), pair.W.values().maxCoeff());
    for (int k = 0; k <= 5; ++k) {
      const auto res = gibbs_minorization(model, pair, lo + (hi - lo) * k / 5.0);
      CHECK(res.alpha <= res.alpha_direct + 1e-12);
      CHECK(res.alpha > 0.0);
    }
  }
  CHECK_THROWS_AS(gibbs_minorization(flat, fp, 1e-6), OutOfRangeError);
}
