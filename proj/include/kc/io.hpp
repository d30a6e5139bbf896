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

// JSON and CSV conversion for grids, measures, certificates and curves.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kc/certify.hpp"
#include "kc/contraction.hpp"
#include "kc/measures.hpp"
#include "kc/transport.hpp"

namespace kc {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form; the basis of byte-identical CSVs.
std::string format_double(double x);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* header = nullptr);

void write_text(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);

Json to_json(const Grid& grid);
Json to_json(const DiscreteMeasure& mu);
Json to_json(const DriftCertificate& c);
Json to_json(const DriftPairCertificate& c);
Json to_json(const LocalContractionCertificate& c);
Json to_json(const BoundReport& b);
Json to_json(const ContractionEstimate& e);
Json to_json(const DecayFit& f);
Json to_json(const InvariantResult& r);
Json to_json(const FixedPointResult& r);
Json to_json(const TransportResult& t);

// {"uniform": true}, {"dirac": i}, {"dirac_x": x} (nearest grid point) or
// {"weights": [...]} (normalized).
DiscreteMeasure measure_from_json(const Json& j, const Grid& grid);

std::vector<std::vector<double>> plan_rows(const TransportPlan& plan, const CostFunction& phi);
std::vector<std::vector<double>> decay_rows(const DecayResult& d);
std::vector<std::vector<double>> sweep_rows(const std::vector<BoundReport>& reports);
void write_kernel_csv(const std::filesystem::path& path, const KernelMatrix& P);

}  // namespace kc
