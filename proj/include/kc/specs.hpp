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

// JSON model, weight and cost specifications and the model catalog.

#include <optional>
#include <string>

#include "kc/gibbs.hpp"
#include "kc/io.hpp"
#include "kc/kernels.hpp"
#include "kc/semidistance.hpp"

namespace kc {

enum class WeightShape {
  kOther,
  kQuadratic,    // 1/2 + x^2
  kExponential,  // exp(delta |x|) up to an affine change
};

struct ModelBuild {
  std::string tag;
  Json params;  // the spec with defaults filled in
  std::optional<Grid> grid;
  KernelMatrix P;
  WeightFunction V;
  WeightShape shape = WeightShape::kOther;
  double shape_param = 0.0;
  std::optional<GibbsModel> gibbs;
  std::optional<GibbsPair> gibbs_pair;
  std::optional<IrfModel> irf;
  std::optional<LangevinModel> langevin;
};

// {"model": tag, ...parameters}; unknown tags and parameters are config errors.
ModelBuild build_model(const Json& spec);

// Weight override: {"kind": "quadratic" | "power" | "exp" | "arcsine" | "half_line" | "constant",
// ...}. Returns the model default when spec is null.
WeightFunction build_weight(const Json& spec, const ModelBuild& model);

// Cost strings: phi0, phiV, phiRho:<rho>, kappaInterp:<rho>:<iota>,
// expCost:<delta>, powerMetric:<p>, boundaryMetric:<iota>, and a+b for the
// additive combination of two costs.
CostFunction build_cost(const std::string& spec, const ModelBuild& model);

// Model tags with their parameter schemas and defaults.
Json model_catalog();

// Point maps for the fixed-point and IRF specs: {"kind": "linear", "a", "b"}
// gives a x + b; {"kind": "sin", "a", "b", "c"} gives a x + b + c sin(x).
PointMap build_point_map(const Json& spec);

}  // namespace kc
