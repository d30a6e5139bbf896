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


#include "kc/specs.hpp"

#include <cmath>
#include <sstream>

#include "kc/error.hpp"

namespace kc {
namespace {

Json defaults_for(const std::string& tag) {
  if (tag == "arcsine") return {{"n", 200}, {"iota", 0.25}};
  if (tag == "unit_interval_mixture")
    return {{"n", 100}, {"Q", "arcsine"}, {"nu_lo", 0.0}, {"nu_hi", 1.0}, {"iota", 0.25}};
  if (tag == "half_line")
    return {{"n", 200}, {"delta", 0.5}, {"gamma", 1.0}, {"iota", 0.3},
            {"x_min", 0.01}, {"x_max", 10.0}};
  if (tag == "irf")
    return {{"n", 200},  {"lo", -10.0},  {"hi", 10.0},
            {"map", {{"kind", "linear"}, {"a", 0.5}, {"b", 0.0}}},
            {"sigma", 1.0}, {"atoms", 401}};
  if (tag == "langevin")
    return {{"n", 200},     {"lo", -8.0},  {"hi", 8.0}, {"potential", "quadratic"},
            {"gamma", 1.0}, {"sigma", 1.0}, {"h", 0.1}};
  if (tag == "gibbs")
    return {{"n", 50}, {"lo", -4.0}, {"hi", 4.0}, {"a", 1.0},
            {"b", 1.0}, {"k", 0.2},  {"delta", 0.4}};
  if (tag == "two_state") return {{"p", 0.1}, {"q", 0.2}};
  throw ConfigError("unknown model '" + tag + "'");
}

const char* description_for(const std::string& tag) {
  if (tag == "arcsine") return "two-piece uniform kernel on (0,1) with arcsine-type invariant law";
  if (tag == "unit_interval_mixture") return "x Q(x,.) + (1-x) nu on (0,1)";
  if (tag == "half_line") return "Uniform(0,x] / half-Gaussian shift / Weibull mixture on (0,inf)";
  if (tag == "irf") return "iterated random function F(x) + Gaussian noise";
  if (tag == "langevin") return "Euler-Maruyama step of an overdamped Langevin diffusion";
  if (tag == "gibbs") return "two-block Gibbs sampler with quadratic potentials";
  if (tag == "two_state") return "two-state chain with flip probabilities p and q";
  return "";
}

Json merged(const Json& spec, const std::string& tag) {
  Json params = defaults_for(tag);
  for (auto it = spec.begin(); it != spec.end(); ++it) {
    if (it.key() == "model") continue;
    if (!params.contains(it.key()))
      throw ConfigError("model '" + tag + "' has no parameter '" + it.key() + "'");
    params[it.key()] = it.value();
  }
  return params;
}

double num(const Json& p, const char* key) {
  try {
    return p.at(key).get<double>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("parameter '") + key + "' must be a number");
  }
}

int count(const Json& p, const char* key) {
  const double v = num(p, key);
  if (v < 2 || v != std::floor(v)) throw ConfigError(std::string("'") + key + "' must be an integer >= 2");
  return static_cast<int>(v);
}

WeightFunction boundary_power_weight(const Grid& grid, double iota) {
  return WeightFunction::from_function(
      grid,
      [iota](std::span<const double> x) {
        return std::pow(x[0], -iota) + std::pow(1.0 - x[0], -iota);
      },
      "boundary_power");
}

WeightFunction half_line_weight(const Grid& grid, double iota) {
  return WeightFunction::from_function(
      grid, [iota](std::span<const double> x) { return std::pow(x[0], -iota) + x[0]; },
      "half_line");
}

WeightFunction power_weight(const Grid& grid, double p) {
  return WeightFunction::from_function(
      grid,
      [p](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return 0.5 + std::pow(std::sqrt(s), p);
      },
      p == 2.0 ? "quadratic" : "power");
}

WeightFunction exp_weight(const Grid& grid, double delta) {
  return WeightFunction::from_function(
      grid,
      [delta](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return std::exp(delta * std::sqrt(s));
      },
      "exp");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

double parse_param(const std::string& s, const std::string& whole) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric parameter in cost spec '" + whole + "'");
  }
}

const Grid& grid_of(const ModelBuild& model) {
  if (!model.grid) throw ConfigError("model has no grid");
  return *model.grid;
}

}  // namespace

PointMap build_point_map(const Json& spec) {
  const std::string kind = spec.value("kind", "linear");
  const double a = spec.value("a", 0.5);
  const double b = spec.value("b", 0.0);
  if (kind == "linear")
    return [a, b](std::span<const double> x) {
      std::vector<double> y(x.begin(), x.end());
      for (double& v : y) v = a * v + b;
      return y;
    };
  if (kind == "sin") {
    const double c = spec.value("c", 0.0);
    return [a, b, c](std::span<const double> x) {
      std::vector<double> y(x.begin(), x.end());
      for (double& v : y) v = a * v + b + c * std::sin(v);
      return y;
    };
  }
  throw ConfigError("unknown map kind '" + kind + "'");
}

ModelBuild build_model(const Json& spec) {
  if (!spec.is_object() || !spec.contains("model") || !spec["model"].is_string())
    throw ConfigError("model spec needs a string 'model' field");
  ModelBuild out;
  out.tag = spec["model"].get<std::string>();
  out.params = merged(spec, out.tag);
  const Json& p = out.params;

  if (out.tag == "arcsine") {
    out.grid = build_grid(Domain::open_interval(0.0, 1.0), count(p, "n"));
    out.P = arcsine_kernel(*out.grid);
    out.V = boundary_power_weight(*out.grid, num(p, "iota"));
  } else if (out.tag == "unit_interval_mixture") {
    out.grid = build_grid(Domain::open_interval(0.0, 1.0), count(p, "n"));
    const Grid& g = *out.grid;
    const std::string q = p.at("Q").get<std::string>();
    KernelMatrix Q;
    if (q == "arcsine") Q = arcsine_kernel(g);
    else if (q == "identity") Q = KernelMatrix::identity(g.size());
    else if (q == "uniform")
      Q = KernelMatrix(Matrix::Constant(g.size(), g.size(), 1.0 / static_cast<double>(g.size())),
                       "uniform");
    else throw ConfigError("Q must be arcsine, identity or uniform");
    const double lo = num(p, "nu_lo"), hi = num(p, "nu_hi");
    if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw ConfigError("need 0 <= nu_lo < nu_hi <= 1");
    Vector nu(g.size());
    for (Index i = 0; i < g.size(); ++i)
      nu[i] = std::max(0.0, std::min(hi, g.cell_hi(i, 0)) - std::max(lo, g.cell_lo(i, 0)));
    if (nu.sum() <= 0.0) throw ConfigError("nu support misses every grid cell");
    out.P = unit_interval_kernel(Q, DiscreteMeasure::normalized(nu), g);
    out.V = boundary_power_weight(g, num(p, "iota"));
  } else if (out.tag == "half_line") {
    out.grid = build_grid(Domain::half_line(num(p, "x_min"), num(p, "x_max")), count(p, "n"));
    out.P = halfline_kernel(num(p, "delta"), num(p, "gamma"), *out.grid);
    out.V = half_line_weight(*out.grid, num(p, "iota"));
  } else if (out.tag == "irf") {
    out.grid = build_grid(Domain::open_interval(num(p, "lo"), num(p, "hi")), count(p, "n"));
    IrfModel m;
    m.F = build_point_map(p.at("map"));
    m.tag = "irf";
    set_gaussian_noise(m, num(p, "sigma"), count(p, "atoms"));
    out.P = irf_kernel(m, *out.grid);
    out.irf = std::move(m);
    out.V = power_weight(*out.grid, 2.0);
    out.shape = WeightShape::kQuadratic;
    out.shape_param = 2.0;
  } else if (out.tag == "langevin") {
    out.grid = build_grid(Domain::open_interval(num(p, "lo"), num(p, "hi")), count(p, "n"));
    LangevinModel m;
    const std::string pot = p.at("potential").get<std::string>();
    if (pot == "quadratic") m.grad_U = [](double x) { return x; };
    else if (pot == "double_well") m.grad_U = [](double x) { return x * x * x - x; };
    else throw ConfigError("potential must be quadratic or double_well");
    m.gamma = num(p, "gamma");
    m.sigma = num(p, "sigma");
    m.h = num(p, "h");
    if (!(m.h > 0.0)) throw ConfigError("langevin step h must be positive");
    out.P = langevin_kernel(m, *out.grid);
    out.langevin = std::move(m);
    out.V = power_weight(*out.grid, 2.0);
    out.shape = WeightShape::kQuadratic;
    out.shape_param = 2.0;
  } else if (out.tag == "gibbs") {
    out.grid = build_grid(Domain::open_interval(num(p, "lo"), num(p, "hi")), count(p, "n"));
    out.gibbs = quadratic_gibbs_model(*out.grid, num(p, "a"), num(p, "b"), num(p, "k"),
                                      num(p, "delta"));
    out.gibbs_pair = build_gibbs_pair(*out.gibbs);
    out.P = compose(out.gibbs_pair->K, out.gibbs_pair->L);
    out.V = out.gibbs_pair->V;
  } else if (out.tag == "two_state") {
    const double a = num(p, "p"), b = num(p, "q");
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
      throw ConfigError("flip probabilities must lie in [0,1]");
    out.grid = build_grid(Domain::open_interval(0.0, 2.0), 2);
    Matrix m(2, 2);
    m << 1.0 - a, a, b, 1.0 - b;
    out.P = KernelMatrix(m, "two_state");
    out.V = WeightFunction::constant(2, 1.0, "one");
  }
  return out;
}

WeightFunction build_weight(const Json& spec, const ModelBuild& model) {
  if (spec.is_null()) return model.V;
  const Grid& g = grid_of(model);
  const std::string kind = spec.value("kind", "");
  if (kind == "quadratic") return power_weight(g, 2.0);
  if (kind == "power") return power_weight(g, spec.value("p", 2.0));
  if (kind == "exp") return exp_weight(g, spec.value("delta", 0.5));
  if (kind == "arcsine") return boundary_power_weight(g, spec.value("iota", 0.25));
  if (kind == "half_line") return half_line_weight(g, spec.value("iota", 0.3));
  if (kind == "constant")
    return WeightFunction::constant(g.size(), spec.value("value", 1.0), "const");
  throw ConfigError("unknown weight kind '" + kind + "'");
}

CostFunction build_cost(const std::string& spec, const ModelBuild& model) {
  if (const auto plus = spec.find('+'); plus != std::string::npos)
    return additive_cost(build_cost(spec.substr(0, plus), model),
                         build_cost(spec.substr(plus + 1), model));
  const auto parts = split(spec, ':');
  if (parts.empty()) throw ConfigError("empty cost spec");
  const std::string& name = parts[0];
  auto param = [&](std::size_t k) {
    if (parts.size() <= k) throw ConfigError("cost spec '" + spec + "' is missing a parameter");
    return parse_param(parts[k], spec);
  };
  const Index n = model.P.size();
  if (name == "phi0") return discrete_metric(n);
  if (name == "phiV") return weighted_discrete(model.V);
  if (name == "phiRho") return rho_family(model.V, param(1)).phi_rho;
  if (name == "kappaInterp")
    return kappa_interp(discrete_metric(n), model.V, param(1), param(2));
  if (name == "expCost") return exp_cost(param(1), grid_of(model));
  if (name == "powerMetric") return power_metric(param(1), grid_of(model));
  if (name == "boundaryMetric") return boundary_metric(param(1), grid_of(model));
  throw ConfigError("unknown cost '" + name + "'");
}

Json model_catalog() {
  Json cat = Json::array();
  for (const char* tag :
       {"arcsine", "unit_interval_mixture", "half_line", "irf", "langevin", "gibbs", "two_state"})
    cat.push_back({{"model", tag}, {"description", description_for(tag)},
                   {"parameters", defaults_for(tag)}});
  return cat;
}

}  // namespace kc
