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


#include "kc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kc/error.hpp"

namespace kc {
namespace {

Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return nullptr;
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
    out << '\n';
  }
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      first = false;
      double probe;
      const auto r = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), probe);
      if (r.ec != std::errc()) {
        if (header) *header = cells;
        continue;
      }
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw ConfigError("non-numeric CSV cell '" + c + "' in " + path.string());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Json to_json(const Grid& grid) {
  Json j;
  j["domain"] = grid.domain().tag();
  j["dim"] = grid.dim();
  j["size"] = grid.size();
  j["lo"] = grid.domain().lo;
  j["hi"] = grid.domain().hi;
  std::vector<int> axes;
  for (int a = 0; a < grid.dim(); ++a) axes.push_back(grid.axis_size(a));
  j["n_per_axis"] = axes;
  Json points = Json::array();
  for (Index i = 0; i < grid.size(); ++i) {
    const auto p = grid.point(i);
    points.push_back(std::vector<double>(p.begin(), p.end()));
  }
  j["points"] = std::move(points);
  j["cell_volumes"] = std::vector<double>(grid.cell_volumes().begin(), grid.cell_volumes().end());
  return j;
}

Json to_json(const DiscreteMeasure& mu) {
  return Json{{"weights", std::vector<double>(mu.weights().begin(), mu.weights().end())}};
}

Json to_json(const DriftCertificate& c) {
  return Json{{"eps", c.eps},
              {"c", c.c},
              {"V", c.V_label},
              {"residual", number(c.residual)},
              {"small_set_level", number(c.small_set_level())},
              {"valid", c.valid()}};
}

Json to_json(const DriftPairCertificate& c) {
  return Json{{"eps0", c.eps0}, {"c0", c.c0},           {"eps", c.eps},
              {"c", c.c},       {"K", to_json(c.K)},    {"L", to_json(c.L)},
              {"product_residual", number(c.product_residual)}};
}

Json to_json(const LocalContractionCertificate& c) {
  return Json{{"r", number(c.r)},
              {"alpha", c.alpha},
              {"s", c.s},
              {"kappa", c.kappa_label},
              {"witness", {c.witness_i, c.witness_j}},
              {"n_pairs", c.n_pairs},
              {"ok", c.ok},
              {"heuristic", c.heuristic},
              {"message", c.message}};
}

Json to_json(const BoundReport& b) {
  Json j{{"eps", b.eps},
         {"c", b.c},
         {"r", b.r},
         {"r0", number(b.r0)},
         {"alpha", b.alpha},
         {"iota", b.iota},
         {"r_eps", b.r_eps},
         {"delta", b.delta},
         {"rho", b.rho},
         {"bound_re3", b.bound_re3},
         {"bound_reupsilon", b.bound_reupsilon},
         {"re3cor_threshold", b.re3cor_threshold},
         {"bound_re3cor", b.bound_re3cor},
         {"bound_pregibbs", b.bound_pregibbs}};
  if (b.phi_ratio) {
    j["phi_ratio"] = *b.phi_ratio;
    j["re3cor_applicable"] = b.re3cor_applicable;
  }
  return j;
}

Json to_json(const ContractionEstimate& e) {
  return Json{{"value", number(e.value)},
              {"infinite", e.infinite},
              {"psi", e.psi_label},
              {"phi", e.phi_label},
              {"witness", {e.witness_i, e.witness_j}},
              {"n_pairs", e.n_pairs},
              {"scope", "grid-exact"}};
}

Json to_json(const DecayFit& f) {
  if (!f.valid) return Json{{"valid", false}};
  return Json{{"valid", true},
              {"lambda", f.lambda},
              {"prefactor", f.prefactor},
              {"r_squared", f.r_squared},
              {"burn_in", f.burn_in},
              {"n_used", f.n_used}};
}

Json to_json(const InvariantResult& r) {
  return Json{{"converged", r.converged},
              {"unique", r.unique},
              {"iterations", r.iterations},
              {"residual", number(r.residual)},
              {"max_restart_tv", r.max_restart_tv},
              {"message", r.message},
              {"pi", to_json(r.pi)["weights"]}};
}

Json to_json(const FixedPointResult& r) {
  return Json{{"converged", r.converged},
              {"y_star", r.y_star},
              {"iterations", r.iterations},
              {"rate", number(r.rate)},
              {"r_squared", number(r.r_squared)},
              {"local_ratio", number(r.local_ratio)},
              {"message", r.message}};
}

Json to_json(const TransportResult& t) {
  return Json{{"value", t.value},
              {"solver_tag", solver_tag_name(t.solver)},
              {"iterations", t.iterations},
              {"plan_entries", t.plan.entries.size()}};
}

DiscreteMeasure measure_from_json(const Json& j, const Grid& grid) {
  const Index n = grid.size();
  if (j.is_string() && j.get<std::string>() == "uniform") return DiscreteMeasure::uniform(n);
  if (!j.is_object()) throw ConfigError("measure spec must be an object");
  if (j.contains("uniform")) return DiscreteMeasure::uniform(n);
  if (j.contains("dirac")) {
    const auto i = j["dirac"].get<Index>();
    if (i < 0 || i >= n) throw ConfigError("dirac index outside the grid");
    return DiscreteMeasure::dirac(n, i);
  }
  if (j.contains("dirac_x")) {
    std::vector<double> x = j["dirac_x"].is_array() ? j["dirac_x"].get<std::vector<double>>()
                                                    : std::vector<double>{j["dirac_x"].get<double>()};
    if (static_cast<int>(x.size()) != grid.dim()) throw ConfigError("dirac_x dimension mismatch");
    return DiscreteMeasure::dirac(n, grid.locate(x));
  }
  if (j.contains("weights")) {
    const auto w = j["weights"].get<std::vector<double>>();
    if (static_cast<Index>(w.size()) != n) throw GridMismatchError("measure weights length");
    return DiscreteMeasure::normalized(Eigen::Map<const Vector>(w.data(), n));
  }
  throw ConfigError("unrecognized measure spec");
}

std::vector<std::vector<double>> plan_rows(const TransportPlan& plan, const CostFunction& phi) {
  std::vector<std::vector<double>> rows;
  for (const auto& e : plan.entries)
    rows.push_back({static_cast<double>(e.i), static_cast<double>(e.j), e.mass, phi(e.i, e.j)});
  return rows;
}

std::vector<std::vector<double>> decay_rows(const DecayResult& d) {
  std::vector<std::vector<double>> rows;
  for (const auto& s : d.samples)
    rows.push_back({static_cast<double>(s.n), s.d_phi, s.d_V, s.theorem_bound});
  return rows;
}

std::vector<std::vector<double>> sweep_rows(const std::vector<BoundReport>& reports) {
  std::vector<std::vector<double>> rows;
  for (const auto& b : reports)
    rows.push_back({b.r, b.alpha, b.delta, b.rho, b.bound_re3, b.bound_reupsilon,
                    b.bound_pregibbs});
  return rows;
}

void write_kernel_csv(const std::filesystem::path& path, const KernelMatrix& P) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  for (Index j = 0; j < P.size(); ++j) header.push_back("p" + std::to_string(j));
  for (Index i = 0; i < P.size(); ++i) {
    const Vector r = P.row(i);
    rows.emplace_back(r.begin(), r.end());
  }
  write_csv(path, header, rows);
}

}  // namespace kc
