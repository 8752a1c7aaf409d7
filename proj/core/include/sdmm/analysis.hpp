// Copyright 2026 The SDMM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sdmm/gasp.hpp"

// Closed-form complexity exponents for r = s = t = n, constant T and
// K = L = n^epsilon, with servers multiplying n x n matrices in O(n^omega).
namespace sdmm::analysis {

inline constexpr double kOmegaStandard = 3.0;
/// log2(7).
inline constexpr double kOmegaStrassen = 2.807354922057604;

struct Exponents {
  double user = 0;      // encoding and decoding: 2 + 2 eps
  double server = 0;    // omega - eps (omega - 1)
  double upload = 0;    // 2 + eps
  double download = 0;  // 2
  double total = 0;     // max(server, user)
};

/// Requires 0 <= epsilon <= 1 and omega >= 2 (UsageError otherwise).
Exponents predict_exponents(double epsilon, double omega);

struct Optimum {
  double epsilon = 0;  // (omega - 2) / (omega + 1)
  double total = 0;    // 4 - 6 / (omega + 1)
};

/// Requires 2 <= omega <= 3. Checks internally that the user and server
/// branches meet at the optimum.
Optimum optimize_epsilon(double omega);

struct TradeoffPoint {
  double omega = 0;
  double epsilon = 0;
  double user = 0;
  double server = 0;
  double total = 0;
};

/// User vs server exponent for a fixed omega over `points` evenly spaced
/// epsilons in [0, 1].
std::vector<TradeoffPoint> tradeoff_curve(double omega, std::size_t points = 101);
/// Optimal total exponent per omega.
std::vector<Optimum> optimum_curve(std::span<const double> omegas);

/// Both curves as CSV: curve,omega,epsilon,user_exponent,server_exponent,total_exponent.
void emit_tradeoff_curves(std::ostream& out, std::span<const double> omegas, std::size_t points = 101);

struct FieldSizeReport {
  std::size_t K = 0, L = 0, T = 0;
  FieldSizeBound bound;
  std::uint64_t prime = 0;  // smallest prime above bound.bound
};

FieldSizeReport field_size_report(std::size_t K, std::size_t L, std::size_t T);
void write_field_size_csv(std::ostream& out, const FieldSizeReport& r, bool header = true);

/// Ordinary least squares of y on x.
struct LineFit {
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // root-mean-square residual
};
LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace sdmm::analysis
