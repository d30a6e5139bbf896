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

// Two-block Gibbs samplers built from Boltzmann-Gibbs potentials: the
// transition M(y, dx) = exp(-m(y,x)) nu(dx), its conjugate K with respect to
// nu_h and the conjugate L of K with respect to nu_g.

#include "kc/kernels.hpp"
#include "kc/measures.hpp"

namespace kc {

struct GibbsModel {
  Vector nu;  // positive base weights on the grid
  Vector g;   // sum_x exp(-g(x)) nu(x) = 1
  Vector h;   // sum_y exp(-h(y)) nu(y) = 1
  Matrix m;   // m(y, x); sum_x exp(-m(y,x)) nu(x) = 1 for every y
  double delta = 0.25;

  Index size() const { return nu.size(); }
  // Throws ModelInvariantError when a normalization fails by more than 1e-9
  // or delta is outside (0, 1/2).
  void validate() const;

  // Shifts g, h and each row of m by the log-normalizer so that the model
  // invariants hold.
  static GibbsModel normalized(Vector nu, Vector g, Vector h, Matrix m, double delta);
};

// Counting base measure on a 1-D grid with g(x) = a x^2/2, h(y) = b y^2/2 and
// m(y, x) = k (y - x)^2 / 2, each shifted to be normalized.
GibbsModel quadratic_gibbs_model(const Grid& grid, double a, double b, double k, double delta);

struct GibbsPair {
  KernelMatrix M;
  KernelMatrix K;
  KernelMatrix L;
  Vector nu_g;     // exp(-g) nu
  Vector nu_h;     // exp(-h) nu
  Vector m_g;      // y -> sum_z nu_g(z) m(y, z)
  Vector m_h;      // x -> sum_z nu_h(z) m(z, x)
  Vector g_delta;  // delta g - m_h
  Vector h_delta;  // delta h - m_g
  double m_min = 0.0;
  double c_delta_h = 0.0;
  double c_delta_g = 0.0;
  WeightFunction V;  // exp(delta g)
  WeightFunction W;  // exp(delta h)
};

GibbsPair build_gibbs_pair(const GibbsModel& model);

struct GibbsLyapunovCheck {
  // min over grid points of c e^{-g_delta} - e^{-delta g} K(e^{delta h}),
  // relative to the right-hand side; likewise for L.
  double min_slack_h2g = 0.0;
  double min_slack_g2h = 0.0;
  bool holds() const { return min_slack_h2g >= -1e-12 && min_slack_g2h >= -1e-12; }
};

GibbsLyapunovCheck gibbs_lyapunov_check(const GibbsModel& model, const GibbsPair& pair);

}  // namespace kc
