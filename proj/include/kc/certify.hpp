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

// Numerical certificates for the geometric drift condition P(V) <= eps V + c
// and for local minorization / local contraction on sublevel sets of V. All
// certificates are exact statements about the discretized kernel.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kc/gibbs.hpp"
#include "kc/kernels.hpp"
#include "kc/semidistance.hpp"

namespace kc {

// ---- drift ----------------------------------------------------------------

struct DriftCertificate {
  double eps = 0.0;
  double c = 0.0;
  std::string V_label;
  // max_i (P(V)_i - eps V_i - c); non-positive for a valid certificate.
  double residual = 0.0;
  // The (eps, c(eps)) frontier that was scanned.
  std::vector<std::pair<double, double>> curve;

  bool valid() const { return eps > 0.0 && eps < 1.0 && residual <= 1e-12; }
  // Level c / (1 - eps) beyond which V strictly decreases on average.
  double small_set_level() const { return c / (1.0 - eps); }
};

enum class DriftObjective {
  kSmallSetLevel,  // minimize c / (1 - eps)
  kMinC,           // minimize c
};

struct DriftOptions {
  std::vector<double> eps_grid;  // empty: 0.05, 0.10, ..., 0.95
  DriftObjective objective = DriftObjective::kSmallSetLevel;
  bool refine = true;
};

// c(eps) = max_i (P(V)_i - eps V_i)_+.
double drift_constant(const Vector& PV, const Vector& V, double eps);

// Certificate at one fixed eps.
DriftCertificate certify_drift_at(const KernelMatrix& P, const WeightFunction& V, double eps);

DriftCertificate certify_drift(const KernelMatrix& P, const WeightFunction& V,
                               const DriftOptions& options = {});

struct DriftPairCertificate {
  DriftCertificate K;  // K(W) <= eps0 V + c0
  DriftCertificate L;  // L(V) <= eps0 W + c0
  double eps0 = 0.0;
  double c0 = 0.0;
  double eps = 0.0;  // eps0^2
  double c = 0.0;    // (1 + eps0) c0
  // max_i (KL(V)_i - eps V_i - c), recomputed on the product kernel.
  double product_residual = 0.0;
};

DriftPairCertificate certify_drift_pair(const KernelMatrix& K, const KernelMatrix& L,
                                        const WeightFunction& V, const WeightFunction& W,
                                        double eps0);

// Scans eps0 over a grid and keeps the pair with the smallest small-set level
// of the combined certificate.
DriftPairCertificate certify_drift_pair_scan(const KernelMatrix& K, const KernelMatrix& L,
                                             const WeightFunction& V, const WeightFunction& W);

// ---- minorization and local contraction ----------------------------------

struct MinorizationCertificate {
  double r = 0.0;
  double alpha = 0.0;
  Vector nu_r;
  std::vector<Index> sublevel;
  bool ok = false;
  std::string message;
};

// alpha = sum_j min_{V_i <= r} P(i, j), nu_r = the normalized infimum row.
// Failures (empty sublevel, alpha = 0) are reported, not thrown.
MinorizationCertificate minorization(const KernelMatrix& P, const WeightFunction& V, double r);

struct LocalContractionCertificate {
  double r = 0.0;
  double alpha = 0.0;
  double s = 0.0;  // max ratio D_kappa(d_x P, d_y P) / kappa(x, y) over the sublevel pairs
  std::string kappa_label;
  Index witness_i = -1;
  Index witness_j = -1;
  Index n_pairs = 0;
  bool ok = false;
  bool heuristic = false;  // pairs were subsampled
  std::string message;
};

// alpha is capped at 1 - 1e-6 so that it stays inside (0, 1).
inline constexpr double kAlphaCap = 1.0 - 1e-6;

struct LocalContractionOptions {
  Index max_pairs = 0;  // 0: every pair; otherwise a random subsample
  std::uint64_t seed = 0;
};

LocalContractionCertificate local_contraction(const KernelMatrix& P, const CostFunction& kappa,
                                              const WeightFunction& V, double r,
                                              const LocalContractionOptions& options = {});

// Per-pair contraction ratios sorted by pair level V(x) + V(y), so that
// alpha(r) for any r is a lookup. The ordering is unchanged by increasing
// affine maps of V, so one profile serves every rescaling of V.
class LocalContractionProfile {
 public:
  static LocalContractionProfile build(const KernelMatrix& P, const CostFunction& kappa,
                                       const WeightFunction& V);

  // Smallest pair level; alpha(r) is undefined below it.
  double r0() const { return levels_.empty() ? INFINITY : levels_.front(); }
  Index n_pairs() const { return static_cast<Index>(levels_.size()); }
  // Certificate for the pairs with level <= r.
  LocalContractionCertificate at(double r) const;
  // Same pairs, levels mapped through level -> 1 + s level (V -> 1/2 + s V).
  LocalContractionProfile rescaled(double s) const;

  const std::string& kappa_label() const { return kappa_label_; }

 private:
  std::vector<double> levels_;
  std::vector<double> running_max_;
  std::vector<std::pair<Index, Index>> argmax_;
  std::string kappa_label_;
};

// ---- iterated random functions --------------------------------------------

struct HypFxFit {
  std::vector<double> x0;
  double lambda = 0.0;
  double c = 0.0;
  bool certifiable = false;  // lambda < 1
};

// Fits ||F(x) - F(x0)|| <= lambda ||x - x0|| + c on the grid: lambda is the
// largest ratio over the outer half of the grid (by distance to x0), c the
// largest remaining excess.
HypFxFit fit_hypfx(const PointMap& F, const Grid& grid, std::vector<double> x0);

enum class IrfLyapunovMode { kPolynomial, kExponential };

struct IrfLyapunovOptions {
  IrfLyapunovMode mode = IrfLyapunovMode::kPolynomial;
  double p = 2.0;       // polynomial exponent
  double delta = 0.5;   // exponential rate
  double eps = 0.5;     // target eps in exponential mode
  std::optional<HypFxFit> hypfx;  // fitted on the grid when absent
};

struct IrfLyapunovReport {
  bool certifiable = false;
  std::string message;
  HypFxFit hypfx;
  WeightFunction V;
  double predicted_eps = 0.0;
  double predicted_c = 0.0;
  // Constants of the construction.
  double c_lambda = 0.0;
  double c_lambda_p = 0.0;  // polynomial mode
  double r = 0.0;           // polynomial mode
  double a1 = 0.0;          // exponential mode
  // Grid certificate at the predicted eps.
  DriftCertificate check;
  bool prediction_holds = false;  // check.c <= predicted_c
};

IrfLyapunovReport irf_lyapunov(const IrfModel& model, const Grid& grid, const KernelMatrix& P,
                               const IrfLyapunovOptions& options = {});

// ---- continuous time ------------------------------------------------------

struct GeneratorDriftReport {
  double eps_h = 0.0;  // 1 / (1 + a0 h)
  double c_h = 0.0;    // a1 h
  double max_violation = 0.0;           // max_i Q_h(V)_i - eps_h V_i - c_h
  double max_relative_violation = 0.0;  // same divided by eps_h V_i + c_h
  Index worst = -1;
  double relative_slack = 1e-3;
  bool passes = false;
};

GeneratorDriftReport generator_drift_check(const KernelMatrix& Qh, const WeightFunction& V,
                                           double a0, double a1, double h,
                                           double relative_slack = 1e-3);

// ---- Gibbs ----------------------------------------------------------------

struct GibbsMinorization {
  double r = 0.0;
  // Constants from the explicit lower bounds on K and L.
  double a = 0.0;
  double b = 0.0;
  double alpha_h = 0.0;
  double alpha_g = 0.0;
  double alpha = 0.0;  // min(alpha_h, alpha_g)
  Vector nu_h_r;
  Vector nu_g_r;
  // Entrywise-infimum minorization of K on {V <= r} and L on {W <= r}.
  MinorizationCertificate direct_K;
  MinorizationCertificate direct_L;
  double alpha_direct = 0.0;
  bool ok = false;
  std::string message;
};

// Throws OutOfRangeError when {V <= r} or {W <= r} is empty.
GibbsMinorization gibbs_minorization(const GibbsModel& model, const GibbsPair& pair, double r);

}  // namespace kc
