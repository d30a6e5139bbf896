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

#include <cmath>

#include "kc/error.hpp"
#include "kc/kernels.hpp"

namespace kc {

KernelMatrix::KernelMatrix(Matrix rows, std::string model_tag, KernelDiagnostics diagnostics)
    : rows_(std::move(rows)),
      model_tag_(std::move(model_tag)),
      diagnostics_(std::move(diagnostics)) {
  if (rows_.rows() == 0 || rows_.rows() != rows_.cols())
    throw ConfigError("kernel matrix must be square and non-empty");
  if (!rows_.allFinite()) throw ConfigError("kernel matrix has non-finite entries");
  if ((rows_.array() < 0.0).any()) throw ConfigError("kernel matrix has negative entries");
  const Vector sums = rows_.rowwise().sum();
  if (((sums.array() - 1.0).abs() > 1e-10).any())
    throw ConfigError("kernel rows must sum to 1 within 1e-10");
}

KernelMatrix KernelMatrix::normalized(Matrix rows, std::string model_tag,
                                      KernelDiagnostics diagnostics) {
  rows = rows.cwiseMax(0.0);
  for (Index i = 0; i < rows.rows(); ++i) {
    const double s = rows.row(i).sum();
    if (!(s > 0.0)) throw DegenerateMeasureError("kernel row with zero mass");
    rows.row(i) /= s;
  }
  return KernelMatrix(std::move(rows), std::move(model_tag), std::move(diagnostics));
}

KernelMatrix KernelMatrix::identity(Index n) {
  return KernelMatrix(Matrix::Identity(n, n), "identity", {0.0, "exact"});
}

DiscreteMeasure left_action(const DiscreteMeasure& mu, const KernelMatrix& P) {
  require_same_size(mu.size(), P.size(), "left_action");
  Vector w = P.matrix().transpose() * mu.weights();
  return DiscreteMeasure::normalized(w.cwiseMax(0.0));
}

Vector right_action(const KernelMatrix& P, const Vector& f) {
  require_same_size(f.size(), P.size(), "right_action");
  return P.matrix() * f;
}

KernelMatrix power(const KernelMatrix& P, int n) {
  if (n < 0) throw ConfigError("kernel power must be non-negative");
  Matrix result = Matrix::Identity(P.size(), P.size());
  Matrix base = P.matrix();
  for (int k = n; k > 0; k >>= 1) {
    if (k & 1) result = result * base;
    if (k > 1) base = base * base;
  }
  return KernelMatrix::normalized(std::move(result), P.model_tag() + "^" + std::to_string(n),
                                  P.diagnostics());
}

KernelMatrix compose(const KernelMatrix& K, const KernelMatrix& L) {
  require_same_size(K.size(), L.size(), "compose");
  return KernelMatrix::normalized(K.matrix() * L.matrix(), K.model_tag() + "*" + L.model_tag());
}

double op_norm_V(const KernelMatrix& P, const WeightFunction& V) {
  return op_norm_VW(P, V, V);
}

double op_norm_VW(const KernelMatrix& K, const WeightFunction& V, const WeightFunction& W) {
  require_same_size(K.size(), V.size(), "op_norm_VW");
  require_same_size(K.size(), W.size(), "op_norm_VW");
  return (right_action(K, W.values()).array() / V.values().array()).maxCoeff();
}

}  // namespace kc
