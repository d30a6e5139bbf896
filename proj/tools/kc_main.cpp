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


// kc: command-line driver for the contraction toolkit.
//
// Exit codes: 0 success, 2 configuration error, 3 stage failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "kc/contraction.hpp"
#include "kc/error.hpp"
#include "kc/experiment.hpp"
#include "kc/io.hpp"
#include "kc/specs.hpp"
#include "kc/transport.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

// Inline JSON, a path to a JSON file, or a bare model tag.
kc::Json parse_spec(const std::string& text, const char* what) {
  if (text.empty()) throw kc::ConfigError(std::string("missing ") + what);
  if (text.front() == '{' || text.front() == '[') {
    try {
      return kc::Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw kc::ConfigError(std::string(what) + ": " + e.what());
    }
  }
  if (std::filesystem::exists(text)) return kc::read_json(text);
  return kc::Json{{"model", text}};
}

kc::Json parse_measure(const std::string& text) {
  if (text == "uniform") return "uniform";
  return parse_spec(text, "measure");
}

void emit(const kc::Json& j) { std::cout << j.dump(2) << '\n'; }

struct Options {
  std::string model;
  std::string weight;
  std::string psi = "phiV";
  std::string phi = "phiV";
  std::string cost = "phiV";
  std::string mu1, mu2;
  std::string out;
  std::string config;
  std::string alpha_file;
  std::string r_sweep;
  std::string f = R"({"kind":"linear","a":0.5,"b":1})";
  std::vector<double> y0{0.0};
  double eps = 0.5, r = 0.0, r0 = 0.0, iota = 0.5, alpha = 0.0;
  std::optional<double> phi_ratio;
  double tol = 1e-12, delta = 0.5, lo = -10.0, hi = 10.0;
  int n = 30, max_iter = 100000, grid_n = 200;
  std::uint64_t seed = 0;
  bool certify = false;
};

kc::ModelBuild load_model(const Options& o) { return kc::build_model(parse_spec(o.model, "--model")); }

kc::WeightFunction load_weight(const Options& o, const kc::ModelBuild& m) {
  if (o.weight.empty()) return kc::build_weight(kc::Json(), m);
  // A bare word names the weight kind.
  const bool bare = o.weight.front() != '{' && !std::filesystem::exists(o.weight);
  return kc::build_weight(bare ? kc::Json{{"kind", o.weight}} : parse_spec(o.weight, "--V"), m);
}

// "lo:hi:step" into the arithmetic sequence lo, lo + step, ... <= hi.
std::vector<double> parse_r_sweep(const std::string& text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(':', start), text.size());
    try {
      parts.push_back(std::stod(text.substr(start, end - start)));
    } catch (const std::exception&) {
      throw kc::ConfigError("--r-sweep expects lo:hi:step");
    }
    start = end + 1;
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || !(parts[1] >= parts[0]))
    throw kc::ConfigError("--r-sweep expects lo:hi:step with step > 0 and hi >= lo");
  std::vector<double> rs;
  for (int k = 0;; ++k) {
    const double r = parts[0] + k * parts[2];
    if (r > parts[1] * (1 + 1e-12)) break;
    rs.push_back(r);
  }
  return rs;
}

std::pair<kc::DiscreteMeasure, kc::DiscreteMeasure> load_pair(const Options& o,
                                                              const kc::ModelBuild& m) {
  const kc::Index n = m.P.size();
  auto mu1 = o.mu1.empty() ? kc::DiscreteMeasure::dirac(n, 0)
                           : kc::measure_from_json(parse_measure(o.mu1), *m.grid);
  auto mu2 = o.mu2.empty() ? kc::DiscreteMeasure::dirac(n, n - 1)
                           : kc::measure_from_json(parse_measure(o.mu2), *m.grid);
  return {std::move(mu1), std::move(mu2)};
}

int cmd_transport(const Options& o) {
  const auto m = load_model(o);
  const auto [mu1, mu2] = load_pair(o, m);
  const kc::CostFunction phi = kc::build_cost(o.cost, m).materialized();
  const auto res = kc::transport_distance(mu1, mu2, phi);
  if (!o.out.empty()) kc::write_csv(o.out, {"i", "j", "mass", "cost"}, kc::plan_rows(res.plan, phi));
  emit(kc::to_json(res));
  return 0;
}

int cmd_certify(const Options& o) {
  const auto m = load_model(o);
  const auto V = load_weight(o, m);
  kc::Json j;
  j["drift"] = kc::to_json(kc::certify_drift(m.P, V));
  if (o.r > 0.0) {
    j["local_contraction"] = kc::to_json(kc::local_contraction(m.P, kc::discrete_metric(m.P.size()), V, o.r));
    const auto mc = kc::minorization(m.P, V, o.r);
    j["minorization"] = {{"r", mc.r}, {"alpha", mc.alpha}, {"ok", mc.ok}, {"message", mc.message}};
  }
  if (!o.r_sweep.empty()) {
    const auto profile = kc::LocalContractionProfile::build(m.P, kc::discrete_metric(m.P.size()), V);
    std::vector<std::vector<double>> rows;
    kc::Json sweep = kc::Json::array();
    for (double r : parse_r_sweep(o.r_sweep)) {
      const auto c = profile.at(r);
      rows.push_back({r, c.ok ? c.alpha : 0.0});
      sweep.push_back(kc::to_json(c));
    }
    j["r_sweep"] = sweep;
    if (!o.out.empty()) kc::write_csv(o.out, {"r", "alpha"}, rows);
  }
  emit(j);
  return 0;
}

int cmd_bounds(const Options& o) {
  if (!o.alpha_file.empty()) {
    const auto rows = kc::read_csv(o.alpha_file);
    std::vector<std::pair<double, double>> table;
    for (const auto& row : rows) {
      if (row.size() < 2) throw kc::ConfigError("alpha file rows need r,alpha");
      table.emplace_back(row[0], row[1]);
    }
    std::sort(table.begin(), table.end());
    // alpha is non-increasing in r, so the next tabulated r above gives a valid value.
    kc::AlphaMap alpha = [table](double r) -> std::optional<double> {
      for (const auto& [rk, ak] : table)
        if (rk >= r) return ak;
      return std::nullopt;
    };
    if (o.r > 0.0) {
      const auto a = alpha(o.r);
      if (!a) throw kc::OutOfRangeError("r lies beyond the tabulated alpha values");
      emit(kc::to_json(kc::theorem1_bounds(o.eps, *a, o.r, o.r0, o.iota, o.phi_ratio)));
      return 0;
    }
    std::vector<double> rs;
    for (const auto& [rk, ak] : table) rs.push_back(rk);
    const auto sweep = kc::sweep_theorem_bounds(o.eps, alpha, o.r0, rs, o.iota);
    kc::Json arr = kc::Json::array();
    for (const auto& b : sweep.reports) arr.push_back(kc::to_json(b));
    kc::Json j{{"reports", arr}, {"skipped_r", sweep.skipped}};
    if (sweep.best_re3 >= 0) {
      j["best_re3_r"] = sweep.reports[static_cast<std::size_t>(sweep.best_re3)].r;
      j["best_reupsilon_r"] = sweep.reports[static_cast<std::size_t>(sweep.best_reupsilon)].r;
    }
    if (!o.out.empty())
      kc::write_csv(o.out, {"r", "alpha", "delta", "rho", "bound_re3", "bound_reupsilon", "bound_pregibbs"},
                    kc::sweep_rows(sweep.reports));
    emit(j);
    return 0;
  }
  emit(kc::to_json(kc::theorem1_bounds(o.eps, o.alpha, o.r, o.r0, o.iota, o.phi_ratio)));
  return 0;
}

int cmd_beta(const Options& o) {
  const auto m = load_model(o);
  emit(kc::to_json(kc::dobrushin(m.P, kc::build_cost(o.psi, m), kc::build_cost(o.phi, m))));
  return 0;
}

int cmd_decay(const Options& o) {
  const auto m = load_model(o);
  const auto V = load_weight(o, m);
  const auto [mu1, mu2] = load_pair(o, m);
  if (o.n < 5) throw kc::ConfigError("--n must be at least 5");
  const auto d = kc::decay_curve(m.P, mu1, mu2, kc::build_cost(o.phi, m), V, o.n);
  if (!o.out.empty()) kc::write_csv(o.out, {"n", "d_phi", "d_V", "theorem_bound"}, kc::decay_rows(d));
  emit({{"fit", kc::to_json(d.fit)}, {"fit_V", kc::to_json(d.fit_V)}, {"truncated", d.truncated},
        {"samples", d.samples.size()}});
  return 0;
}

int cmd_invariant(const Options& o) {
  const auto m = load_model(o);
  if (!(o.tol > 0.0)) throw kc::ConfigError("--tol must be positive");
  const auto res = kc::invariant_measure(m.P, o.tol, o.max_iter, o.seed);
  emit(kc::to_json(res));
  return res.converged ? 0 : kExitStage;
}

int cmd_fixpoint(const Options& o) {
  const kc::PointMap F = kc::build_point_map(parse_spec(o.f, "--f"));
  const auto res = kc::fixed_point(F, o.y0, o.tol, o.max_iter);
  kc::Json j = kc::to_json(res);
  if (o.certify) {
    const kc::Grid grid = kc::build_grid(kc::Domain::open_interval(o.lo, o.hi), o.grid_n);
    const auto cert = kc::certify_deterministic_map(F, grid, o.delta, kc::geometric_sweep(2.0, 1e3, 8));
    kc::Json lc = kc::Json::array();
    for (const auto& c : cert.contraction) lc.push_back(kc::to_json(c));
    j["certificate"] = {{"ok", cert.ok}, {"drift", kc::to_json(cert.drift)}, {"local_contraction", lc}};
  }
  emit(j);
  return res.converged ? 0 : kExitStage;
}

int cmd_run(const Options& o) {
  auto config = kc::load_config(o.config);
  if (!o.out.empty()) config.output_dir = o.out;
  const auto report = kc::run_experiment(config);
  if (!config.output_dir) emit(report.json);
  for (const auto& s : report.stages)
    std::cerr << s.name << ": " << (s.ok ? "ok" : s.error_type + ": " + s.message) << '\n';
  return report.all_ok() ? 0 : kExitStage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contraction certificates and Dobrushin coefficients for Markov kernels"};
  app.require_subcommand(1);
  Options o;

  auto model_opt = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "Model spec: tag, JSON file or inline JSON")->required();
  };

  auto* transport = app.add_subcommand("transport", "Optimal transport cost between two measures");
  model_opt(transport);
  transport->add_option("--mu1", o.mu1, "First measure (JSON); default Dirac at the first point");
  transport->add_option("--mu2", o.mu2, "Second measure (JSON); default Dirac at the last point");
  transport->add_option("--cost", o.cost, "Cost spec")->capture_default_str();
  transport->add_option("--out", o.out, "CSV file for the plan (i,j,mass,cost)");

  auto* certify = app.add_subcommand("certify", "Drift and local contraction certificates");
  model_opt(certify);
  certify->add_option("--V,--weight", o.weight, "Weight spec: kind or JSON; default from the model");
  certify->add_option("--r", o.r, "Level for the local contraction certificate");
  certify->add_option("--r-sweep", o.r_sweep, "Levels lo:hi:step for the alpha(r) table");
  certify->add_option("--out", o.out, "CSV file for the (r, alpha) table");

  auto* bounds = app.add_subcommand("bounds", "Explicit contraction bounds");
  bounds->add_option("--eps", o.eps, "Drift eps")->capture_default_str();
  bounds->add_option("--r", o.r, "Pair level r");
  bounds->add_option("--r0", o.r0, "Smallest admissible level")->capture_default_str();
  bounds->add_option("--alpha", o.alpha, "alpha(r)");
  bounds->add_option("--alpha-file", o.alpha_file, "CSV of (r, alpha) rows; sweeps every row when --r is absent");
  bounds->add_option("--iota", o.iota, "Interpolation exponent in [1/2,1)")->capture_default_str();
  bounds->add_option("--phi-ratio", o.phi_ratio, "||phi/phi_V|| for the corrected bound");
  bounds->add_option("--out", o.out, "CSV file for the sweep");

  auto* beta = app.add_subcommand("beta", "Dobrushin coefficient over grid pairs");
  model_opt(beta);
  beta->add_option("--psi", o.psi, "Input cost spec")->capture_default_str();
  beta->add_option("--phi", o.phi, "Output cost spec")->capture_default_str();

  auto* decay = app.add_subcommand("decay", "Decay curve and rate fit");
  model_opt(decay);
  decay->add_option("--phi", o.phi, "Cost spec")->capture_default_str();
  decay->add_option("--V,--weight", o.weight, "Weight spec: kind or JSON");
  decay->add_option("--n", o.n, "Horizon")->capture_default_str();
  decay->add_option("--mu1", o.mu1, "First initial measure (JSON)");
  decay->add_option("--mu2", o.mu2, "Second initial measure (JSON)");
  decay->add_option("--out", o.out, "CSV file (n,d_phi,d_V,theorem_bound)");

  auto* invariant = app.add_subcommand("invariant", "Invariant measure by power iteration");
  model_opt(invariant);
  invariant->add_option("--tol", o.tol, "Total variation tolerance")->capture_default_str();
  invariant->add_option("--max-iter", o.max_iter, "Iteration cap")->capture_default_str();
  invariant->add_option("--seed", o.seed, "Seed for the restart probe")->capture_default_str();

  auto* fixpoint = app.add_subcommand("fixpoint", "Fixed point of a contractive map");
  fixpoint->add_option("--f", o.f, "Map spec (JSON)")->capture_default_str();
  fixpoint->add_option("--y0", o.y0, "Starting point")->expected(1, 16);
  fixpoint->add_option("--tol", o.tol, "Step tolerance")->capture_default_str();
  fixpoint->add_option("--max-iter", o.max_iter, "Iteration cap")->capture_default_str();
  fixpoint->add_flag("--certify", o.certify, "Certify the deterministic kernel on a 1-D grid");
  fixpoint->add_option("--delta", o.delta, "Rate of the exponential weight")->capture_default_str();
  fixpoint->add_option("--lo", o.lo, "Grid lower end")->capture_default_str();
  fixpoint->add_option("--hi", o.hi, "Grid upper end")->capture_default_str();
  fixpoint->add_option("--grid-n", o.grid_n, "Grid size")->capture_default_str();

  auto* run = app.add_subcommand("run", "Full pipeline from a JSON config");
  run->add_option("--config", o.config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", o.out, "Output directory (overrides the config)");

  auto* list = app.add_subcommand("list-models", "Model tags and parameter schemas");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*transport) return cmd_transport(o);
    if (*certify) return cmd_certify(o);
    if (*bounds) return cmd_bounds(o);
    if (*beta) return cmd_beta(o);
    if (*decay) return cmd_decay(o);
    if (*invariant) return cmd_invariant(o);
    if (*fixpoint) return cmd_fixpoint(o);
    if (*run) return cmd_run(o);
    if (*list) {
      emit(kc::model_catalog());
      return 0;
    }
  } catch (const kc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
  return kExitConfig;
}
