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


#include "kc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include "kc/error.hpp"

namespace kc {
namespace {

double max_pair_level(const WeightFunction& V) {
  Vector v = V.values();
  std::sort(v.begin(), v.end(), std::greater<>());
  return v.size() >= 2 ? v[0] + v[1] : 2.0 * v[0];
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const OutOfRangeError*>(&e)) return "OutOfRangeError";
  if (dynamic_cast<const ModelInvariantError*>(&e)) return "ModelInvariantError";
  if (dynamic_cast<const AxiomViolationError*>(&e)) return "AxiomViolationError";
  if (dynamic_cast<const GridMismatchError*>(&e)) return "GridMismatchError";
  if (dynamic_cast<const MarginalMismatchError*>(&e)) return "MarginalMismatchError";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "std::exception";
}

// Runs one stage, recording its status and wall time; returns false on failure.
bool run_stage(RunReport& report, const std::string& name, const std::function<void(Json&)>& body) {
  StageStatus status;
  status.name = name;
  Json section;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(section);
    status.ok = true;
    section["status"] = "ok";
  } catch (const std::exception& e) {
    status.error_type = error_type(e);
    status.message = e.what();
    section = Json{{"status", "error"}, {"error_type", status.error_type}, {"message", status.message}};
  }
  status.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  section["wall_ms"] = status.wall_ms;
  report.json["stages"][name] = section;
  report.stages.push_back(status);
  return status.ok;
}

[[noreturn]] void skipped(const char* dependency) {
  throw Error(std::string("skipped: depends on failed stage '") + dependency + "'");
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "model", "weight", "costs", "decay_cost", "r_sweep", "eps_grid", "iota", "horizon",
      "mu1",   "mu2",    "output_dir", "seed", "reupsilon_max_n"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("unknown config key '" + it.key() + "'");
  ExperimentConfig c;
  c.raw = j;
  try {
    if (!j.contains("model")) throw ConfigError("config needs a 'model' section");
    c.model = j["model"];
    c.weight = j.value("weight", Json());
    if (j.contains("costs")) {
      c.psi = j["costs"].value("psi", c.psi);
      c.phi = j["costs"].value("phi", c.phi);
    }
    c.decay_cost = j.value("decay_cost", c.decay_cost);
    if (j.contains("r_sweep")) {
      const Json& r = j["r_sweep"];
      if (r.contains("values")) c.r_sweep.values = r["values"].get<std::vector<double>>();
      if (r.contains("lo")) c.r_sweep.lo = r["lo"].get<double>();
      if (r.contains("hi")) c.r_sweep.hi = r["hi"].get<double>();
      c.r_sweep.count = r.value("count", c.r_sweep.count);
    }
    if (j.contains("eps_grid")) c.eps_grid = j["eps_grid"].get<std::vector<double>>();
    c.iota = j.value("iota", c.iota);
    c.horizon = j.value("horizon", c.horizon);
    c.mu1 = j.value("mu1", Json());
    c.mu2 = j.value("mu2", Json());
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    c.seed = j.value("seed", std::uint64_t{0});
    c.reupsilon_max_n = j.value("reupsilon_max_n", c.reupsilon_max_n);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(c.iota >= 0.5 && c.iota < 1.0)) throw ConfigError("iota must lie in [1/2, 1)");
  if (c.horizon < 5) throw ConfigError("horizon must be at least 5");
  if (c.r_sweep.count < 1) throw ConfigError("r_sweep.count must be positive");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_json(path));
}

std::optional<double> CertifiedModel::alpha(double r) const {
  const auto a = profile.at(r);
  if (!a.ok) return std::nullopt;
  double out = a.alpha;
  if (profile_L) {
    const auto b = profile_L->at(r);
    if (!b.ok) return std::nullopt;
    out = std::min(out, b.alpha);
  }
  return out;
}

CertifiedModel certify_model(const ModelBuild& model, const WeightFunction& V,
                             const std::vector<double>& eps_grid) {
  CertifiedModel cert;
  DriftOptions opts;
  opts.eps_grid = eps_grid;
  const CostFunction tv = discrete_metric(model.P.size());
  if (model.gibbs_pair) {
    const GibbsPair& gp = *model.gibbs_pair;
    cert.two_block = true;
    cert.pair = certify_drift_pair_scan(gp.K, gp.L, gp.V, gp.W);
    cert.drift = certify_drift(model.P, gp.V, opts);
    const double eps0 = cert.pair->eps0, c0 = cert.pair->c0;
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw Error("no drift pair certificate with eps0 < 1");
    cert.eps = eps0;
    auto profile_K = LocalContractionProfile::build(gp.K, tv, gp.V);
    auto profile_L = LocalContractionProfile::build(gp.L, tv, gp.W);
    if (c0 > 0.5) {
      cert.scale = eps0 / (2.0 * c0);
      cert.Vbar = rescale_weight(gp.V, eps0, c0);
      cert.Wbar = rescale_weight(gp.W, eps0, c0);
      profile_K = profile_K.rescaled(cert.scale);
      profile_L = profile_L.rescaled(cert.scale);
    } else {
      cert.Vbar = gp.V;
      cert.Wbar = gp.W;
    }
    cert.profile = std::move(profile_K);
    cert.profile_L = std::move(profile_L);
    cert.r0 = std::max(cert.profile.r0(), cert.profile_L->r0());
    cert.max_level = std::max(max_pair_level(cert.Vbar), max_pair_level(*cert.Wbar));
    return cert;
  }
  cert.drift = certify_drift(model.P, V, opts);
  if (!cert.drift.valid()) throw Error("no drift certificate with eps < 1");
  cert.eps = cert.drift.eps;
  auto profile = LocalContractionProfile::build(model.P, tv, V);
  if (cert.drift.c > 0.5) {
    cert.scale = cert.drift.eps / (2.0 * cert.drift.c);
    cert.Vbar = rescale_weight(V, cert.drift.eps, cert.drift.c);
    profile = profile.rescaled(cert.scale);
  } else {
    cert.Vbar = V;
  }
  cert.profile = std::move(profile);
  cert.r0 = cert.profile.r0();
  cert.max_level = max_pair_level(cert.Vbar);
  return cert;
}

std::vector<double> sweep_values(const RSweepSpec& spec, const CertifiedModel& cert) {
  if (!spec.values.empty()) return spec.values;
  const double floor = std::max(cert.r_eps(), cert.r0);
  const double lo = spec.lo.value_or(floor * 1.02);
  const double hi = spec.hi.value_or(std::max(cert.max_level, lo * 1.5));
  return geometric_sweep(lo, std::max(hi, lo), spec.count);
}

std::vector<BetaCheck> check_bounds(const ModelBuild& model, const CertifiedModel& cert,
                                    const std::vector<BoundReport>& reports,
                                    Index reupsilon_max_n) {
  std::vector<BetaCheck> out;
  const Index n = model.P.size();
  for (const auto& b : reports) {
    BetaCheck chk;
    chk.r = b.r;
    chk.rho = b.rho;
    const CostFunction phi = rho_family(cert.Vbar, b.rho).phi_rho;
    chk.measured = dobrushin(model.P, phi, phi).value;
    chk.bound = cert.two_block ? b.bound_pregibbs : b.bound_re3;
    chk.bound_reupsilon = b.bound_reupsilon;
    if (!cert.two_block && n <= reupsilon_max_n) {
      const CostFunction k = kappa_interp(discrete_metric(n), cert.Vbar, b.rho, b.iota).materialized();
      chk.measured_reupsilon = dobrushin(model.P, k, k).value;
    }
    out.push_back(chk);
  }
  return out;
}

std::pair<double, double> equivalence_constants(const CostFunction& phi, const WeightFunction& V) {
  require_same_size(phi.size(), V.size(), "equivalence_constants");
  double a = INFINITY, b = 0.0;
  for (Index i = 0; i < V.size(); ++i)
    for (Index j = 0; j < V.size(); ++j)
      if (i != j) {
        const double q = phi(i, j) / (V[i] + V[j]);
        a = std::min(a, q);
        b = std::max(b, q);
      }
  return {a, b};
}

bool RunReport::all_ok() const {
  return std::all_of(stages.begin(), stages.end(), [](const StageStatus& s) { return s.ok; });
}

const StageStatus* RunReport::stage(const std::string& name) const {
  for (const auto& s : stages)
    if (s.name == name) return &s;
  return nullptr;
}

RunReport run_experiment(const ExperimentConfig& config) {
  RunReport report;
  report.json["toolkit_version"] = kToolkitVersion;
  report.json["rng"] = "splitmix64-counter";
  report.json["config"] = config.raw;
  report.json["stages"] = Json::object();
  const auto& out_dir = config.output_dir;

  WeightFunction V;
  DiscreteMeasure mu1, mu2;
  const bool built = run_stage(report, "build", [&](Json& s) {
    report.model = build_model(config.model);
    const ModelBuild& m = *report.model;
    V = build_weight(config.weight, m);
    require_same_size(V.size(), m.P.size(), "weight");
    mu1 = config.mu1.is_null() ? DiscreteMeasure::dirac(m.P.size(), 0)
                               : measure_from_json(config.mu1, *m.grid);
    mu2 = config.mu2.is_null() ? DiscreteMeasure::dirac(m.P.size(), m.P.size() - 1)
                               : measure_from_json(config.mu2, *m.grid);
    s["model"] = m.tag;
    s["parameters"] = m.params;
    s["kernel"] = m.P.model_tag();
    s["grid"] = to_json(*m.grid);
    s["weight"] = V.label();
    s["integration"] = m.P.diagnostics().integration;
    s["max_clamped_fraction"] = m.P.diagnostics().max_clamped_fraction;
    s["truncation_warning"] = m.P.diagnostics().truncation_warning();
  });

  const bool certified = run_stage(report, "certify", [&](Json& s) {
    if (!built) skipped("build");
    report.cert = certify_model(*report.model, V, config.eps_grid);
    const CertifiedModel& c = *report.cert;
    s["drift"] = to_json(c.drift);
    if (c.pair) s["drift_pair"] = to_json(*c.pair);
    s["eps"] = c.eps;
    s["scale"] = c.scale;
    s["rescaled_weight"] = c.Vbar.label();
    s["r0"] = c.r0;
    s["r_eps"] = c.r_eps();
    s["local_contraction_at_r0"] = to_json(c.profile.at(c.r0));
    const ModelBuild& m = *report.model;
    if (m.gibbs && m.gibbs_pair) {
      const auto lyap = gibbs_lyapunov_check(*m.gibbs, *m.gibbs_pair);
      s["gibbs_lyapunov"] = {{"min_slack_h2g", lyap.min_slack_h2g},
                             {"min_slack_g2h", lyap.min_slack_g2h},
                             {"holds", lyap.holds()}};
      s["c_delta_h"] = m.gibbs_pair->c_delta_h;
      s["c_delta_g"] = m.gibbs_pair->c_delta_g;
    }
    if (m.irf) {
      const auto irf = irf_lyapunov(*m.irf, *m.grid, m.P);
      s["irf_lyapunov"] = {{"certifiable", irf.certifiable},
                           {"message", irf.message},
                           {"predicted_eps", irf.predicted_eps},
                           {"predicted_c", irf.predicted_c},
                           {"grid_c", irf.check.c},
                           {"prediction_holds", irf.prediction_holds}};
    }
  });

  const bool bounded = run_stage(report, "bounds", [&](Json& s) {
    if (!certified) skipped("certify");
    const CertifiedModel& c = *report.cert;
    const auto rs = sweep_values(config.r_sweep, c);
    report.sweep = sweep_theorem_bounds(
        c.eps, [&c](double r) { return c.alpha(r); }, c.r0, rs, config.iota);
    const BoundSweep& sw = *report.sweep;
    s["skipped_r"] = sw.skipped;
    if (sw.reports.empty())
      throw OutOfRangeError("no r in the sweep exceeds max(r_eps, r0) = " +
                            format_double(std::max(c.r_eps(), c.r0)));
    Json arr = Json::array();
    for (const auto& b : sw.reports) arr.push_back(to_json(b));
    s["reports"] = arr;
    s["best_re3"] = to_json(sw.reports[static_cast<std::size_t>(sw.best_re3)]);
    s["best_reupsilon"] = to_json(sw.reports[static_cast<std::size_t>(sw.best_reupsilon)]);
    if (out_dir)
      write_csv(*out_dir / "r_sweep.csv",
                {"r", "alpha", "delta", "rho", "bound_re3", "bound_reupsilon", "bound_pregibbs"},
                sweep_rows(sw.reports));
  });

  run_stage(report, "beta", [&](Json& s) {
    if (!built) skipped("build");
    const ModelBuild& m = *report.model;
    report.beta = dobrushin(m.P, build_cost(config.psi, m), build_cost(config.phi, m));
    report.beta_phiV = dobrushin(m.P, weighted_discrete(V), weighted_discrete(V));
    s["beta"] = to_json(*report.beta);
    s["beta_phiV"] = to_json(*report.beta_phiV);
    if (!bounded) {
      s["bound_checks"] = "skipped: bounds stage failed";
      return;
    }
    report.beta_checks = check_bounds(m, *report.cert, report.sweep->reports, config.reupsilon_max_n);
    Json arr = Json::array();
    bool all = true;
    for (const auto& chk : report.beta_checks) {
      Json e{{"r", chk.r}, {"rho", chk.rho}, {"measured", chk.measured}, {"bound", chk.bound},
             {"holds", chk.holds()}};
      if (chk.measured_reupsilon) {
        e["measured_reupsilon"] = *chk.measured_reupsilon;
        e["bound_reupsilon"] = chk.bound_reupsilon;
      }
      all = all && chk.holds();
      arr.push_back(e);
    }
    s["bound_checks"] = arr;
    s["bounds_hold"] = all;
    s["bound_kind"] = report.cert->two_block ? "pregibbs" : "re3";
  });

  run_stage(report, "decay", [&](Json& s) {
    if (!built) skipped("build");
    const ModelBuild& m = *report.model;
    std::optional<TheoremRate> theorem;
    if (report.sweep && !report.sweep->reports.empty()) {
      const BoundReport& best = report.sweep->reports[static_cast<std::size_t>(report.sweep->best_re3)];
      const CostFunction phi_rho = rho_family(report.cert->Vbar, best.rho).phi_rho;
      const auto [a, b] = equivalence_constants(phi_rho, V);
      theorem = TheoremRate{report.cert->two_block ? best.bound_pregibbs : best.bound_re3, b / a};
      s["theorem_rate"] = {{"lambda", theorem->lambda}, {"prefactor", theorem->prefactor}};
    }
    report.decay = decay_curve(m.P, mu1, mu2, build_cost(config.decay_cost, m), V,
                               config.horizon, theorem);
    const DecayResult& d = *report.decay;
    s["cost"] = config.decay_cost;
    s["fit"] = to_json(d.fit);
    s["fit_V"] = to_json(d.fit_V);
    s["truncated"] = d.truncated;
    if (report.beta_phiV && d.fit_V.valid)
      s["lambda_fit_le_beta_phiV"] = d.fit_V.lambda <= report.beta_phiV->value + 1e-6;
    if (out_dir)
      write_csv(*out_dir / "decay.csv", {"n", "d_phi", "d_V", "theorem_bound"}, decay_rows(d));

    const double c1 = grid_wasserstein_constant(*m.grid, V, 1.0);
    report.w1 = wasserstein_from_vnorm(m.P, mu1, mu2, *m.grid, V, 1.0, c1, d.fit_V, config.horizon);
    s["wasserstein1"] = {{"c_p", c1}, {"mode", "grid_ratio"}, {"dominated", report.w1->dominated}};
    std::vector<std::string> header{"n", "w1", "w1_bound"};
    if (m.shape == WeightShape::kQuadratic) {
      const double c2 = wasserstein_constant(WeightType::kPolynomial, 2.0);
      report.w2 = wasserstein_from_vnorm(m.P, mu1, mu2, *m.grid, V, 2.0, c2, d.fit_V, config.horizon);
      s["wasserstein2"] = {{"c_p", c2}, {"mode", "polynomial"}, {"dominated", report.w2->dominated}};
      header.insert(header.end(), {"w2_pow2", "w2_pow2_bound"});
    }
    if (out_dir) {
      std::vector<std::vector<double>> rows;
      for (std::size_t k = 0; k < report.w1->measured.size(); ++k) {
        std::vector<double> row{static_cast<double>(k), report.w1->measured[k],
                                report.w1->bound_from_norm[k]};
        if (report.w2) row.insert(row.end(), {report.w2->measured[k], report.w2->bound_from_norm[k]});
        rows.push_back(row);
      }
      write_csv(*out_dir / "wasserstein.csv", header, rows);
    }
  });

  if (report.model && report.model->langevin) {
    run_stage(report, "continuous", [&](Json& s) {
      if (!bounded) skipped("bounds");
      const ModelBuild& m = *report.model;
      const LangevinModel& lm = *m.langevin;
      if (m.params.at("potential") != "quadratic" || lm.gamma < 0.5)
        throw ConfigError("generator bounds are available for the quadratic potential with gamma >= 1/2");
      const double a0 = 1.0, a1 = 0.5 + lm.sigma * lm.sigma;
      const auto gen = generator_drift_check(m.P, V, a0, a1, lm.h);
      s["generator"] = {{"eps_h", gen.eps_h}, {"c_h", gen.c_h},
                        {"max_relative_violation", gen.max_relative_violation},
                        {"passes", gen.passes}};
      double iota_const = 0.0;
      std::vector<KernelMatrix> partial;
      for (int k = 1; k <= 10; ++k) {
        LangevinModel sub = lm;
        sub.h = lm.h * k / 10.0;
        partial.push_back(langevin_kernel(sub, *m.grid));
        iota_const = std::max(iota_const, op_norm_V(partial.back(), V));
      }
      const BoundReport& best = report.sweep->reports[static_cast<std::size_t>(report.sweep->best_re3)];
      const auto [a, b] = equivalence_constants(rho_family(report.cert->Vbar, best.rho).phi_rho, V);
      const ContinuousRate rate = continuous_time_rate(lm.h, best.bound_re3, b / a, iota_const);
      s["iota_const"] = iota_const;
      s["c_h"] = b / a;
      s["lambda_h"] = best.bound_re3;
      s["rate"] = rate.rate;
      s["prefactor"] = rate.prefactor;
      // Times n h and n h + h/2; the half step applies Q_{h/2} after n full steps.
      const double v0 = weighted_norm_diff(mu1, mu2, V);
      const KernelMatrix& half = partial[4];
      Vector x = mu1.weights(), y = mu2.weights();
      std::vector<std::vector<double>> rows;
      bool dominated = true;
      for (int n = 0; n <= config.horizon; ++n) {
        for (int frac = 0; frac < 2; ++frac) {
          Vector xa = x, ya = y;
          if (frac == 1) {
            xa = (xa.transpose() * half.matrix()).transpose();
            ya = (ya.transpose() * half.matrix()).transpose();
          }
          const double t = (n + 0.5 * frac) * lm.h;
          const double measured = ((xa - ya).cwiseAbs().array() * V.values().array()).sum();
          const double bound = rate.bound(t) * v0;
          dominated = dominated && measured <= bound * (1.0 + 1e-9);
          rows.push_back({t, measured, bound});
        }
        x = (x.transpose() * m.P.matrix()).transpose();
        y = (y.transpose() * m.P.matrix()).transpose();
      }
      s["dominated"] = dominated;
      if (out_dir) write_csv(*out_dir / "continuous.csv", {"t", "d_V", "bound"}, rows);
    });
  }

  if (out_dir) write_text(*out_dir / "report.json", report.json.dump(2) + "\n");
  return report;
}

}  // namespace kc
