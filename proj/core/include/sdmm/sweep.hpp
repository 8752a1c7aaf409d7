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
#include <optional>
#include <string>
#include <vector>

#include "sdmm/analysis.hpp"
#include "sdmm/session.hpp"

namespace sdmm {

/// One n-sweep of square GASP sessions (r = s = t = n).
struct SweepSpec {
  std::vector<std::size_t> n_values;
  double epsilon = 0.0;
  /// Overrides K = L = round(n^epsilon).
  std::optional<std::size_t> fixed_k;
  /// standard (omega = 3) or strassen-block (omega = log2 7).
  ServerAlgorithm algorithm = ServerAlgorithm::standard;
  std::size_t strassen_cutoff = 64;
  std::size_t T = 1;
  std::size_t repetitions = 1;
  std::uint64_t seed = 1;
  /// Run independent n points on separate threads.
  bool parallel = false;

  /// n strictly increasing, 0 <= epsilon <= 1, repetitions >= 1.
  void validate() const;
  double omega() const;
};

/// K = L = max(1, round(n^epsilon)).
std::size_t realized_partition(std::size_t n, double epsilon);

struct SweepRow {
  std::size_t n = 0;
  std::size_t K = 0;
  bool failed = false;
  std::string error;
  CostReport report;
};

/// Fitted log-log slope for one phase and metric ("muls" or "ops" where ops
/// counts adds + muls + invs).
struct ExponentFit {
  std::string phase;
  std::string metric;
  analysis::LineFit fit;
  std::size_t points = 0;
  double predicted = 0;  // closed-form exponent for the sweep's epsilon and omega
  bool flagged = false;  // residual above the 0.02 power-law threshold
};

inline constexpr double kFitResidualThreshold = 0.02;

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;
  std::vector<ExponentFit> fits;

  const ExponentFit& fit(const std::string& phase, const std::string& metric) const;
};

SweepResult sweep(const SweepSpec& spec);

/// Session rows in the common CSV schema; failed points get a single
/// "failed" row.
void write_sweep_csv(std::ostream& out, const SweepResult& result, const CsvOptions& opts = {});
/// phase,metric,slope,intercept,residual,points,predicted,flagged
void write_fit_csv(std::ostream& out, const SweepResult& result);

}  // namespace sdmm
