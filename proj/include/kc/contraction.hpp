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

// Dobrushin coefficients over grid pairs, the explicit contraction bounds
// driven by drift and local contraction constants, comparison checks,
// decay measurement, invariant measures, continuous-time rates, Wasserstein
// transfer constants and the fixed-point application.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kc/certify.hpp"
#include "kc/kernels.hpp"
#include "kc/semidistance.hpp"

namespace kc {

// ---- Dobrushin coefficients -----------------------------------------------

// beta_{psi,phi}(P) = max over grid pairs x != y of
// D_phi(delta_x P, delta_y P) / psi(x, y). Exact for the discretized chain
// ("grid-exact"); a lower bound for a continuum coefficient.
struct ContractionEstimate {
  double value = 0.0;
  bool infinite = false;
  std::string psi_label;
  std::string phi_label;
  Index witness_i = -1;
  Index witness_j = -1;
  Index n_pairs = 0;
};

ContractionEstimate dobrushin(const KernelMatrix& P, const CostFunction& psi,
                              const CostFunction& phi);

// D_phi(delta_x P, delta_y P) / psi(x, y) for one pair.
double pair_ratio(const KernelMatrix& P, const CostFunction& psi, const CostFunction& phi,
                  Index i, Index j);

struct MeasureCheck {
  Index n_pairs = 0;
  Index violations = 0;
  // max over pairs of D_phi(mu1 P, mu2 P) - beta D_psi(mu1, mu2).
  double max_excess = -INFINITY;
  // Same quantity at the witness Dirac pair; zero up to rounding.
  double witness_gap = 0.0;
};

// Verifies D_phi(mu1 P, mu2 P) <= beta D_psi(mu1, mu2) + 1e-9 on the given
// pairs, and that the witness Dirac pair attains beta.
MeasureCheck dobrushin_measure_check(
    const KernelMatrix& P, const CostFunction& psi, const CostFunction& phi,
    const ContractionEstimate& beta,
    const std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>>& pairs);

// Random pairs of probability vectors, each supported on at least two points.
// support_size = 0 draws full-support Dirichlet(1) vectors.
std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> random_measure_pairs(
    Index n, int count, std::uint64_t seed, Index support_size = 0);

// ---- explicit bounds ------------------------------------------------------

struct BoundReport {
  double eps = 0.0;
  double c = 0.5;
  double r = 0.0;
  double r0 = 0.0;
  double alpha = 0.0;
  double iota = 0.5;
  double r_eps = 0.0;    // 1 / (1 - eps)
  double delta = 0.0;    // (1 - eps)/(2 + eps) (1 - r_eps / r)
  double rho = 0.0;      // alpha / ((1 + eps) 2 r)
  double bound_re3 = 0.0;        // 1 - delta alpha / 2, for phi_rho
  double bound_reupsilon = 0.0;  // (1 - alpha min(delta/2, alpha))^(1 - iota)
  // ||phi / phi_V|| must not exceed this for bound_re3cor to apply. It uses
  // bound_re3 in place of the measured coefficient, which only shrinks it.
  double re3cor_threshold = 0.0;
  double bound_re3cor = 0.0;     // 1 - (1 - bound_re3)^2
  std::optional<double> phi_ratio;
  bool re3cor_applicable = false;
  double bound_pregibbs = 0.0;   // bound_re3^2
};

// Requires eps in (0,1), alpha in (0,1), iota in [1/2, 1) and r > max(r_eps, r0)
// (OutOfRangeError otherwise). The drift certificate is assumed rescaled to
// c = 1/2.
BoundReport theorem1_bounds(double eps, double alpha, double r, double r0, double iota,
                            std::optional<double> phi_ratio = std::nullopt);

using AlphaMap = std::function<std::optional<double>(double)>;

struct BoundSweep {
  std::vector<BoundReport> reports;
  std::vector<double> skipped;  // r values outside the valid regime
  int best_re3 = -1;            // index into reports
  int best_reupsilon = -1;
};

BoundSweep sweep_theorem_bounds(double eps, const AlphaMap& alpha, double r0,
                                const std::vector<double>& rs, double iota);

// Geometric sweep lo, lo q, lo q^2, ... up to hi with `count` points.
std::vector<double> geometric_sweep(double lo, double hi, int count);

// ---- comparison principles -----------------------------------------------

struct ComparisonItem {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool equality = false;
  // rhs - lhs for inequalities lhs <= rhs, -|lhs - rhs| for equalities.
  double slack() const;
};

struct ComparisonReport {
  std::vector<ComparisonItem> items;
  double worst_slack() const;
};

// Checks on one kernel and two costs:
//   beta_{a phi} = beta_phi; beta_{phi^iota} <= beta_phi^iota;
//   a phi <= psi <= b phi => beta_phi <= (b/a) beta_psi;
//   varphi = min(phi, psi), t <= 1 - beta_psi => beta_{t varphi + psi} <= 1 - (1 - beta_psi)^2;
//   beta_{phi,psi}(P P) <= beta_{phi,psi}(P) beta_{psi,psi}(P).
ComparisonReport comparison_suite(const KernelMatrix& P, const CostFunction& phi,
                                  const CostFunction& psi, double scale, double iota);

// beta_{phi,psi}(K L) <= beta_{phi,varphi}(K) beta_{varphi,psi}(L).
ComparisonItem product_check(const KernelMatrix& K, const KernelMatrix& L,
                             const CostFunction& phi, const CostFunction& varphi,
                             const CostFunction& psi);

// ---- decay ----------------------------------------------------------------

struct DecayFit {
  bool valid = false;
  double lambda = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  int burn_in = 0;
  int n_used = 0;
};

// Least squares on log d_n over n >= burn_in, after truncating the curve at
// the first value below 1e-14. The burn-in is the first n from which the local
// log-slopes stay within 5% of the terminal slope, capped at half the curve.
DecayFit fit_decay(const std::vector<double>& d);

struct DecaySample {
  int n = 0;
  double d_phi = 0.0;
  double d_V = 0.0;
  double theorem_bound = NAN;
};

struct DecayResult {
  std::vector<DecaySample> samples;
  DecayFit fit;    // on d_phi
  DecayFit fit_V;  // on d_V
  bool truncated = false;  // d_phi fell below 1e-14 before the horizon
};

struct TheoremRate {
  double lambda = 1.0;
  double prefactor = 1.0;
};

DecayResult decay_curve(const KernelMatrix& P, const DiscreteMeasure& mu1,
                        const DiscreteMeasure& mu2, const CostFunction& phi,
                        const WeightFunction& V, int N,
                        std::optional<TheoremRate> theorem = std::nullopt);

// ---- invariant measure ----------------------------------------------------

struct InvariantResult {
  DiscreteMeasure pi;
  int iterations = 0;
  double residual = 0.0;  // ||pi P - pi||_tv
  bool converged = false;
  bool unique = false;    // random restarts agree within 10 tol
  double max_restart_tv = 0.0;
  std::string message;
};

InvariantResult invariant_measure(const KernelMatrix& P, double tol = 1e-12,
                                  int max_iter = 100000, std::uint64_t seed = 0,
                                  int restarts = 5);

// ---- continuous time ------------------------------------------------------

struct ContinuousRate {
  double rate = 0.0;       // -log(lambda_h) / h
  double prefactor = 0.0;  // iota c_h / lambda_h
  double bound(double t) const;
};

ContinuousRate continuous_time_rate(double h, double lambda_h, double c_h, double iota_const);

// ---- Wasserstein transfer -------------------------------------------------

enum class WeightType { kPolynomial, kExponential };

// 2^{-(p-1)_+} for V = 1/2 + |x|^p; delta^p / (2^{p-1} p!) for V = exp(delta |x|).
double wasserstein_constant(WeightType type, double p, double delta = 1.0);

// min over grid pairs of (V(x) + V(y)) / |x - y|^p.
double grid_wasserstein_constant(const Grid& grid, const WeightFunction& V, double p);

struct WassersteinCurve {
  double c_p = 0.0;
  double p = 1.0;
  std::vector<double> measured;        // W_p^p(mu1 P_n, mu2 P_n)
  std::vector<double> bound_from_norm; // ||mu1 P_n - mu2 P_n||_V / c_p
  std::vector<double> bound_from_fit;  // fitted V-norm curve / c_p
  bool dominated = false;              // measured <= bound_from_norm everywhere
};

WassersteinCurve wasserstein_from_vnorm(const KernelMatrix& P, const DiscreteMeasure& mu1,
                                        const DiscreteMeasure& mu2, const Grid& grid,
                                        const WeightFunction& V, double p, double c_p,
                                        const DecayFit& fit_V, int N);

// ---- fixed points ---------------------------------------------------------

struct FixedPointResult {
  std::vector<double> y_star;
  int iterations = 0;
  bool converged = false;
  double rate = NAN;
  double r_squared = NAN;
  double local_ratio = NAN;  // finite-difference Lipschitz ratio at y_star
  std::string message;
};

FixedPointResult fixed_point(const PointMap& F, std::vector<double> y0, double tol = 1e-12,
                             int max_iter = 10000);

// Drift and local contraction of the deterministic kernel x -> delta_{F(x)}
// with V = exp(delta |x|) / 2 and kappa = |x - y|, evaluated at the exact
// images F(x_i) rather than at their grid cells.
struct DeterministicCertificate {
  DriftCertificate drift;
  std::vector<LocalContractionCertificate> contraction;  // one per r
  bool ok = false;
};

DeterministicCertificate certify_deterministic_map(const PointMap& F, const Grid& grid,
                                                   double delta, const std::vector<double>& rs);

}  // namespace kc
