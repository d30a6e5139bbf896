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

// Configuration-driven pipeline: build -> certify -> bounds -> beta -> decay
// -> report, with per-stage error isolation.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kc/certify.hpp"
#include "kc/contraction.hpp"
#include "kc/io.hpp"
#include "kc/specs.hpp"

namespace kc {

inline constexpr const char* kToolkitVersion = "0.3.0";

struct RSweepSpec {
  std::vector<double> values;  // explicit r values; overrides the range
  std::optional<double> lo;    // default: just above max(r_eps, r0)
  std::optional<double> hi;    // default: largest pair level
  int count = 12;
};

struct ExperimentConfig {
  Json model;
  Json weight;  // null: the model default
  std::string psi = "phiV";
  std::string phi = "phiV";
  std::string decay_cost = "phiV";
  RSweepSpec r_sweep;
  std::vector<double> eps_grid;
  double iota = 0.5;
  int horizon = 30;
  Json mu1;  // null: Dirac at the first grid point
  Json mu2;  // null: Dirac at the last grid point
  std::optional<std::filesystem::path> output_dir;
  std::uint64_t seed = 0;
  // The kappa_{iota,rho} check needs one transport LP per pair; it runs only
  // on grids up to this size.
  Index reupsilon_max_n = 60;
  Json raw;  // the config as read, echoed in the report
};

ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

// Drift and local contraction data after rescaling the drift to c = 1/2.
struct CertifiedModel {
  DriftCertificate drift;                  // on the model weight
  std::optional<DriftPairCertificate> pair;  // two-block models
  double eps = 0.0;    // eps entering the bounds (eps0 for two-block models)
  double scale = 0.0;  // s in Vbar = 1/2 + s V; 0 when V is kept
  WeightFunction Vbar;
  std::optional<WeightFunction> Wbar;
  LocalContractionProfile profile;  // phi0 on P, or on K for two-block models
  std::optional<LocalContractionProfile> profile_L;
  double r0 = 0.0;
  bool two_block = false;

  std::optional<double> alpha(double r) const;
  double r_eps() const { return 1.0 / (1.0 - eps); }
  // Largest pair level; alpha is constant beyond it.
  double max_level = 0.0;
};

CertifiedModel certify_model(const ModelBuild& model, const WeightFunction& V,
                             const std::vector<double>& eps_grid);

std::vector<double> sweep_values(const RSweepSpec& spec, const CertifiedModel& cert);

struct BetaCheck {
  double r = 0.0;
  double rho = 0.0;
  double measured = 0.0;  // beta_{phi_rho}(P)
  double bound = 0.0;     // bound_re3, or bound_pregibbs for two-block models
  std::optional<double> measured_reupsilon;
  double bound_reupsilon = 0.0;
  bool holds() const {
    return measured <= bound + 1e-6 &&
           (!measured_reupsilon || *measured_reupsilon <= bound_reupsilon + 1e-6);
  }
};

// beta_{phi_rho}(P) for the rescaled weight of `cert` at each report.
std::vector<BetaCheck> check_bounds(const ModelBuild& model, const CertifiedModel& cert,
                                    const std::vector<BoundReport>& reports,
                                    Index reupsilon_max_n);

// a, b with a varpi_V <= phi <= b varpi_V off the diagonal.
std::pair<double, double> equivalence_constants(const CostFunction& phi, const WeightFunction& V);

struct StageStatus {
  std::string name;
  bool ok = false;
  std::string error_type;
  std::string message;
  double wall_ms = 0.0;
};

struct RunReport {
  Json json;
  std::vector<StageStatus> stages;
  std::optional<ModelBuild> model;
  std::optional<CertifiedModel> cert;
  std::optional<BoundSweep> sweep;
  std::vector<BetaCheck> beta_checks;
  std::optional<ContractionEstimate> beta;
  std::optional<ContractionEstimate> beta_phiV;
  std::optional<DecayResult> decay;
  std::optional<WassersteinCurve> w1;
  std::optional<WassersteinCurve> w2;
  bool all_ok() const;
  const StageStatus* stage(const std::string& name) const;
};

RunReport run_experiment(const ExperimentConfig& config);

}  // namespace kc
