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

#include "sdmm/sweep.hpp"

#include <cmath>
#include <ostream>
#include <thread>

namespace sdmm {
namespace {

SweepRow run_point(const SweepSpec& spec, std::size_t n) {
  SweepRow row;
  row.n = n;
  row.K = spec.fixed_k ? *spec.fixed_k : realized_partition(n, spec.epsilon);
  SessionConfig cfg;
  cfg.protocol = Protocol::gasp;
  cfg.params = {row.K, row.K, spec.T, n, n, n};
  cfg.algorithm = spec.algorithm;
  cfg.strassen_cutoff = spec.strassen_cutoff;
  cfg.seed = spec.seed;
  try {
    const auto code = resolve_code(cfg);
    cfg.code = code;
    const auto [a, b] = random_inputs(cfg);
    for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
      auto res = run_gasp_session(cfg, a, b);
      if (rep == 0) {
        row.report = std::move(res.report);
        continue;
      }
      // Counts are identical across repetitions; keep the fastest timings.
      auto keep_min = [](PhaseCost& acc, const PhaseCost& x) { acc.wall_ns = std::min(acc.wall_ns, x.wall_ns); };
      keep_min(row.report.encode, res.report.encode);
      keep_min(row.report.decode, res.report.decode);
      for (std::size_t i = 0; i < row.report.server.size(); ++i)
        keep_min(row.report.server[i], res.report.server[i]);
    }
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
  }
  return row;
}

void add_fit(SweepResult& res, const std::string& phase, const std::string& metric, double predicted,
             double (*extract)(const CostReport&)) {
  std::vector<double> x, y;
  for (const auto& r : res.rows) {
    if (r.failed) continue;
    const double v = extract(r.report);
    if (v <= 0) continue;
    x.push_back(std::log(static_cast<double>(r.n)));
    y.push_back(std::log(v));
  }
  if (x.size() < 3) return;
  ExponentFit f;
  f.phase = phase;
  f.metric = metric;
  f.fit = analysis::least_squares(x, y);
  f.points = x.size();
  f.predicted = predicted;
  f.flagged = f.fit.residual > kFitResidualThreshold;
  res.fits.push_back(std::move(f));
}

}  // namespace

void SweepSpec::validate() const {
  if (n_values.empty()) throw UsageError("sweep needs at least one n");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] == 0) throw UsageError("sweep n values must be >= 1");
    if (i > 0 && n_values[i] <= n_values[i - 1]) throw UsageError("sweep n values must be strictly increasing");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw UsageError("epsilon must lie in [0, 1]");
  if (repetitions == 0) throw UsageError("repetitions must be >= 1");
  if (T == 0) throw UsageError("T must be >= 1");
  if (fixed_k && *fixed_k == 0) throw UsageError("K must be >= 1");
}

double SweepSpec::omega() const {
  return algorithm == ServerAlgorithm::standard ? analysis::kOmegaStandard : analysis::kOmegaStrassen;
}

std::size_t realized_partition(std::size_t n, double epsilon) {
  const double k = std::round(std::pow(static_cast<double>(n), epsilon));
  return k < 1.0 ? 1 : static_cast<std::size_t>(k);
}

const ExponentFit& SweepResult::fit(const std::string& phase, const std::string& metric) const {
  for (const auto& f : fits)
    if (f.phase == phase && f.metric == metric) return f;
  throw UsageError("no fit for phase '" + phase + "' metric '" + metric + "'");
}

SweepResult sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult res;
  res.spec = spec;
  res.rows.resize(spec.n_values.size());
  if (spec.parallel) {
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < spec.n_values.size(); ++i)
      workers.emplace_back([&, i] { res.rows[i] = run_point(spec, spec.n_values[i]); });
    for (auto& w : workers) w.join();
  } else {
    for (std::size_t i = 0; i < spec.n_values.size(); ++i) res.rows[i] = run_point(spec, spec.n_values[i]);
  }

  const double eps = spec.fixed_k ? 0.0 : spec.epsilon;
  const auto pred = analysis::predict_exponents(eps, spec.omega());
  add_fit(res, "encode", "muls", pred.user, [](const CostReport& r) { return double(r.encode.ops.muls); });
  add_fit(res, "encode", "ops", pred.user, [](const CostReport& r) { return double(r.encode.ops.arithmetic()); });
  add_fit(res, "server", "muls", pred.server,
          [](const CostReport& r) { return double(r.heaviest_server().ops.muls); });
  add_fit(res, "server", "ops", pred.server,
          [](const CostReport& r) { return double(r.heaviest_server().ops.arithmetic()); });
  add_fit(res, "decode", "muls", pred.user, [](const CostReport& r) { return double(r.decode.ops.muls); });
  add_fit(res, "decode", "ops", pred.user, [](const CostReport& r) { return double(r.decode.ops.arithmetic()); });
  add_fit(res, "upload", "symbols", pred.upload, [](const CostReport& r) { return double(r.upload_symbols); });
  add_fit(res, "download", "symbols", pred.download,
          [](const CostReport& r) { return double(r.download_symbols); });
  return res;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, const CsvOptions& opts) {
  out << kCsvHeader << '\n';
  for (const auto& row : result.rows) {
    if (row.failed) {
      out << "gasp," << row.n << ',' << row.K << ',' << row.K << ',' << result.spec.T << ",0,"
          << result.spec.seed << ",failed,0,0,0,0,0,0,0\n";
      continue;
    }
    write_csv_rows(out, row.report, row.n, opts);
  }
}

void write_fit_csv(std::ostream& out, const SweepResult& result) {
  const auto old_precision = out.precision(10);
  out << "phase,metric,slope,intercept,residual,points,predicted,flagged\n";
  for (const auto& f : result.fits)
    out << f.phase << ',' << f.metric << ',' << f.fit.slope << ',' << f.fit.intercept << ',' << f.fit.residual
        << ',' << f.points << ',' << f.predicted << ',' << (f.flagged ? 1 : 0) << '\n';
  out.precision(old_precision);
}

}  // namespace sdmm
