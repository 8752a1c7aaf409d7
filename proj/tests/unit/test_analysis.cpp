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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sdmm/analysis.hpp"
#include "sdmm/sweep.hpp"

namespace sdmm {
namespace {

using analysis::optimize_epsilon;
using analysis::predict_exponents;

TEST(Predict, KnownPoints) {
  auto e = predict_exponents(0.25, 3.0);
  EXPECT_EQ(e.user, 2.5);
  EXPECT_EQ(e.server, 2.5);
  EXPECT_EQ(e.upload, 2.25);
  EXPECT_EQ(e.download, 2.0);
  EXPECT_EQ(e.total, 2.5);

  e = predict_exponents(0.0, analysis::kOmegaStrassen);
  EXPECT_EQ(e.user, 2.0);
  EXPECT_EQ(e.server, analysis::kOmegaStrassen);
  EXPECT_EQ(e.total, analysis::kOmegaStrassen);

  e = predict_exponents(1.0, 3.0);
  EXPECT_EQ(e.server, 1.0);
  EXPECT_EQ(e.total, 4.0);
}

TEST(Predict, RangeChecks) {
  EXPECT_THROW(predict_exponents(-0.1, 3.0), UsageError);
  EXPECT_THROW(predict_exponents(1.1, 3.0), UsageError);
  EXPECT_THROW(predict_exponents(0.5, 1.9), UsageError);
  EXPECT_THROW(predict_exponents(std::nan(""), 3.0), UsageError);
}

TEST(Optimize, ClosedForm) {
  auto o = optimize_epsilon(3.0);
  EXPECT_EQ(o.epsilon, 0.25);
  EXPECT_EQ(o.total, 2.5);
  o = optimize_epsilon(2.0);
  EXPECT_EQ(o.epsilon, 0.0);
  EXPECT_EQ(o.total, 2.0);
  o = optimize_epsilon(analysis::kOmegaStrassen);
  EXPECT_NEAR(o.epsilon, 0.2120, 1e-3);
  EXPECT_NEAR(o.total, 2.4240, 1e-3);
  EXPECT_THROW(optimize_epsilon(3.5), UsageError);
  EXPECT_THROW(optimize_epsilon(1.5), UsageError);
}

TEST(Optimize, BranchesMeetAndBeatTheGrid) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> omega(2.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double w = omega(gen);
    const auto o = optimize_epsilon(w);
    EXPECT_NEAR(2 + 2 * o.epsilon, o.epsilon + w - o.epsilon * w, 1e-12);
    EXPECT_NEAR(o.total, 2 + 2 * o.epsilon, 1e-12);
    for (const auto& p : analysis::tradeoff_curve(w, 101)) EXPECT_LE(o.total, p.total + 1e-12);
  }
}

TEST(Tradeoff, CurvesPassThroughKnownValues) {
  const auto curve = analysis::tradeoff_curve(3.0);
  ASSERT_EQ(curve.size(), 101u);
  EXPECT_EQ(curve.front().epsilon, 0.0);
  EXPECT_EQ(curve.back().epsilon, 1.0);
  EXPECT_EQ(curve[25].user, 2.5);
  EXPECT_EQ(curve[25].server, 2.5);

  const std::vector<double> omegas{2.0, 3.0};
  const auto best = analysis::optimum_curve(omegas);
  EXPECT_EQ(best[0].total, 2.0);
  EXPECT_EQ(best[1].total, 2.5);

  std::ostringstream os;
  analysis::emit_tradeoff_curves(os, omegas);
  const std::string csv = os.str();
  EXPECT_EQ(csv.rfind("curve,omega,epsilon,user_exponent,server_exponent,total_exponent\n", 0), 0u);
  EXPECT_NE(csv.find("A,3,0.25,2.5,2.5,2.5\n"), std::string::npos);
  EXPECT_NE(csv.find("B,3,0.25,2.5,2.5,2.5\n"), std::string::npos);
  EXPECT_NE(csv.find("B,2,0,2,2,2\n"), std::string::npos);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  EXPECT_EQ(lines, 1u + 2u * 101u + 2u);
  EXPECT_THROW(analysis::tradeoff_curve(3.0, 1), UsageError);
}

TEST(FieldSizeReport, Rows) {
  std::ostringstream os;
  analysis::write_field_size_csv(os, analysis::field_size_report(2, 2, 1));
  EXPECT_EQ(os.str(), "K,L,T,N,W,J,binom,bound,prime\n2,2,1,8,8,29,8,493,499\n");
  const auto r = analysis::field_size_report(1, 1, 1);
  EXPECT_EQ(r.bound.bound, 21u);
  EXPECT_EQ(r.prime, 23u);
  EXPECT_EQ(analysis::field_size_report(2, 2, 2).prime, 8779u);
  EXPECT_THROW(analysis::field_size_report(40, 40, 30), ParameterTooLargeError);
}

TEST(LeastSquares, ExactLineAndResidual) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  const auto f = analysis::least_squares(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.residual, 0.0, 1e-12);
  const std::vector<double> noisy{0, 1, 0, 1};
  EXPECT_GT(analysis::least_squares(x, noisy).residual, 0.4);
  EXPECT_THROW(analysis::least_squares(std::vector<double>{1, 1}, std::vector<double>{1, 2}), UsageError);
  EXPECT_THROW(analysis::least_squares(std::vector<double>{1}, std::vector<double>{1}), UsageError);
}

TEST(Sweep, RealizedPartition) {
  EXPECT_EQ(realized_partition(16, 0.25), 2u);
  EXPECT_EQ(realized_partition(81, 0.25), 3u);
  EXPECT_EQ(realized_partition(256, 0.25), 4u);
  EXPECT_EQ(realized_partition(100, 0.0), 1u);
  EXPECT_EQ(realized_partition(2, 0.1), 1u);
}

TEST(Sweep, SpecValidation) {
  SweepSpec spec;
  EXPECT_THROW(spec.validate(), UsageError);
  spec.n_values = {8, 8};
  EXPECT_THROW(spec.validate(), UsageError);
  spec.n_values = {8, 16};
  spec.epsilon = 1.5;
  EXPECT_THROW(spec.validate(), UsageError);
  spec.epsilon = 0.5;
  spec.repetitions = 0;
  EXPECT_THROW(spec.validate(), UsageError);
  spec.repetitions = 1;
  EXPECT_NO_THROW(spec.validate());
  EXPECT_EQ(spec.omega(), 3.0);
}

TEST(Sweep, StandardServerSlopeIsCubic) {
  SweepSpec spec;
  spec.n_values = {8, 16, 32, 64};
  const auto res = sweep(spec);
  ASSERT_EQ(res.rows.size(), 4u);
  const auto& fit = res.fit("server", "muls");
  EXPECT_NEAR(fit.fit.slope, 3.0, 0.05);
  EXPECT_EQ(fit.points, 4u);
  EXPECT_FALSE(fit.flagged);
  EXPECT_EQ(fit.predicted, 3.0);
  EXPECT_THROW(res.fit("server", "bogus"), UsageError);
}

TEST(Sweep, StrassenServerSlope) {
  SweepSpec spec;
  spec.n_values = {8, 16, 32, 64};
  spec.algorithm = ServerAlgorithm::strassen_block;
  spec.strassen_cutoff = 1;
  const auto res = sweep(spec);
  EXPECT_NEAR(res.fit("server", "muls").fit.slope, std::log2(7.0), 0.05);
  EXPECT_DOUBLE_EQ(res.fit("server", "muls").predicted, std::log2(7.0));
}

TEST(Sweep, PartitionedEncodeSlope) {
  SweepSpec spec;
  spec.n_values = {16, 81, 256};
  spec.epsilon = 0.25;
  const auto res = sweep(spec);
  for (const auto& row : res.rows) {
    ASSERT_FALSE(row.failed) << row.error;
    const auto& p = row.report.params;
    EXPECT_EQ(row.report.decode.ops.muls, p.K * p.L * row.report.servers * p.block_rows() * p.block_cols());
  }
  EXPECT_EQ(res.rows[1].K, 3u);
  EXPECT_NEAR(res.fit("encode", "ops").fit.slope, 2.5, 0.15);
  EXPECT_NEAR(res.fit("server", "muls").fit.slope, 2.5, 0.15);
}

TEST(Sweep, DeterministicBytesAndParallelAgreement) {
  SweepSpec spec;
  spec.n_values = {4, 8, 12};
  spec.epsilon = 0.5;
  spec.T = 2;
  spec.repetitions = 2;
  auto csv = [](const SweepResult& r) {
    std::ostringstream os;
    write_sweep_csv(os, r);
    write_fit_csv(os, r);
    return os.str();
  };
  const auto first = csv(sweep(spec));
  EXPECT_EQ(csv(sweep(spec)), first);
  spec.parallel = true;
  EXPECT_EQ(csv(sweep(spec)), first);
  EXPECT_EQ(first.rfind(kCsvHeader, 0), 0u);
  EXPECT_NE(first.find("phase,metric,slope,intercept,residual,points,predicted,flagged\n"), std::string::npos);
}

TEST(Sweep, ConstructionFailureMarksRowAndSkipsFit) {
  SweepSpec spec;
  spec.n_values = {4, 8, 16};
  spec.fixed_k = 40;
  spec.T = 30;
  const auto res = sweep(spec);
  for (const auto& row : res.rows) {
    EXPECT_TRUE(row.failed);
    EXPECT_FALSE(row.error.empty());
  }
  EXPECT_TRUE(res.fits.empty());
  std::ostringstream os;
  write_sweep_csv(os, res);
  EXPECT_NE(os.str().find("gasp,4,40,40,30,0,1,failed,"), std::string::npos) << os.str();
}

}  // namespace
}  // namespace sdmm
