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

#include <stdexcept>
#include <string>

namespace kc {

// Base class for every error raised by the toolkit. Callers that only care
// about "something in kc failed" catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user configuration: bad domain bounds, unknown labels, out of range
// parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A discretized density with zero total mass.
class DegenerateMeasureError : public Error {
 public:
  using Error::Error;
};

// Objects defined on different grids were combined.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

// Transport marginals whose total masses differ beyond tolerance.
class MarginalMismatchError : public Error {
 public:
  using Error::Error;
};

// The brute-force transport oracle refuses supports with m*n > 16.
class OracleLimitError : public Error {
 public:
  using Error::Error;
};

// A boundary metric was evaluated at a point on the domain boundary.
class SingularCostError : public Error {
 public:
  using Error::Error;
};

// A Gibbs model whose potentials are not normalized.
class ModelInvariantError : public Error {
 public:
  using Error::Error;
};

// A contraction bound was requested outside the regime where it is defined
// (r <= max(r_eps, r0)).
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// A cost violating the semi-distance axioms reached a solver.
class AxiomViolationError : public Error {
 public:
  using Error::Error;
};

}  // namespace kc
