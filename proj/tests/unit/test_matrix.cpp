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
#include <fstream>
#include <sstream>

#include "sdmm/matrix.hpp"

namespace sdmm {
namespace {

// Independent triple-loop oracle on plain integers.
MatrixF naive_product(const MatrixF& a, const MatrixF& b) {
  MatrixF c(a.rows(), b.cols(), a.modulus());
  const u128 p = a.modulus();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      u128 acc = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc = (acc + u128(a(i, k)) * b(k, j)) % p;
      c(i, j) = static_cast<std::uint64_t>(acc);
    }
  return c;
}

TEST(MatrixF, ConstructionValidates) {
  EXPECT_THROW(MatrixF(2, 2, 7, {1, 2, 3}), UsageError);
  EXPECT_THROW(MatrixF(1, 2, 7, {1, 7}), UsageError);
  const MatrixF m(2, 2, 7, {1, 2, 3, 4});
  EXPECT_EQ(m(1, 0), 3u);
  EXPECT_FALSE(m.is_zero());
  EXPECT_TRUE(MatrixF::zero(3, 2, 7).is_zero());
}

TEST(MatMulStandard, IdentityIsNeutral) {
  PrimeField f(499);
  SeededRandomSource rng(1);
  const auto m = MatrixF::random(3, 3, f, rng);
  EXPECT_EQ(mat_mul_standard(MatrixF::identity(3, 499), m, f), m);
  EXPECT_EQ(mat_mul_standard(m, MatrixF::identity(3, 499), f), m);
}

TEST(MatMulStandard, OneByOneInF7) {
  PrimeField f(7);
  const auto c = mat_mul_standard(MatrixF(1, 1, 7, {2}), MatrixF(1, 1, 7, {3}), f);
  EXPECT_EQ(c, MatrixF(1, 1, 7, {6}));
}

TEST(MatMulStandard, MatchesNaiveOracleAndCountsExactly) {
  PrimeField f(499);
  SeededRandomSource rng(2);
  const auto a = MatrixF::random(4, 5, f, rng);
  const auto b = MatrixF::random(5, 3, f, rng);
  f.reset_counter();
  const auto c = mat_mul_standard(a, b, f);
  EXPECT_EQ(c, naive_product(a, b));
  EXPECT_EQ(f.counter(), (OpCounter{4 * 4 * 3, 4 * 5 * 3, 0, 0}));
}

TEST(MatMulStandard, ShapeMismatchThrows) {
  PrimeField f(7);
  EXPECT_THROW(mat_mul_standard(MatrixF(2, 3, 7), MatrixF(2, 3, 7), f), UsageError);
  EXPECT_THROW(mat_mul_standard(MatrixF(2, 2, 7), MatrixF(2, 2, 11), f), UsageError);
}

TEST(MatMulStrassen, SevenMultiplicationsPerLevel) {
  PrimeField f(499);
  SeededRandomSource rng(3);
  for (std::size_t m = 1; m <= 4; ++m) {
    const std::size_t n = std::size_t{1} << m;
    const auto a = MatrixF::random(n, n, f, rng);
    const auto b = MatrixF::random(n, n, f, rng);
    f.reset_counter();
    const auto c = mat_mul_strassen(a, b, f, 1);
    EXPECT_EQ(f.counter().muls, static_cast<std::uint64_t>(std::pow(7.0, double(m)) + 0.5)) << n;
    EXPECT_EQ(c, naive_product(a, b));
  }
}

TEST(MatMulStrassen, EquivalentToStandardOnRandomInstances) {
  PrimeField f(499);
  SeededRandomSource rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 11;  // includes non powers of two
    const auto a = MatrixF::random(n, n, f, rng);
    const auto b = MatrixF::random(n, n, f, rng);
    const std::size_t cutoff = 1 + trial % 3;
    EXPECT_EQ(mat_mul_strassen(a, b, f, cutoff), mat_mul_standard(a, b, f)) << n;
  }
}

TEST(MatMulStrassen, RejectsNonSquare) {
  PrimeField f(7);
  EXPECT_THROW(mat_mul_strassen(MatrixF(2, 3, 7), MatrixF(3, 2, 7), f), UsageError);
}

TEST(Multiply, StrassenPathHandlesRectangularInputs) {
  PrimeField f(499);
  SeededRandomSource rng(5);
  const auto a = MatrixF::random(3, 5, f, rng);
  const auto b = MatrixF::random(5, 2, f, rng);
  EXPECT_EQ(multiply(a, b, f, {MultiplyAlgorithm::strassen, 1}), naive_product(a, b));
}

TEST(BlockSplit, DegenerateSplitEqualsInner) {
  PrimeField f(499);
  SeededRandomSource rng(6);
  const auto a = MatrixF::random(4, 4, f, rng);
  const auto b = MatrixF::random(4, 4, f, rng);
  f.reset_counter();
  const auto direct = mat_mul_standard(a, b, f);
  const auto direct_ops = f.counter();
  f.reset_counter();
  EXPECT_EQ(block_split_multiply(a, b, 1, f, {}), direct);
  EXPECT_EQ(f.counter(), direct_ops);
}

TEST(BlockSplit, AccumulationAddsBeyondInnerProducts) {
  PrimeField f(499);
  SeededRandomSource rng(7);
  // F is (n/K) x n, G is n x (n/K), n = 4, K = 2.
  const auto fm = MatrixF::random(2, 4, f, rng);
  const auto gm = MatrixF::random(4, 2, f, rng);
  f.reset_counter();
  const auto c = block_split_multiply(fm, gm, 2, f, {});
  const auto ops = f.counter();
  EXPECT_EQ(c, naive_product(fm, gm));
  // Two inner 2x2x2 products cost 2 * (4 adds, 8 muls); the split adds 4.
  EXPECT_EQ(ops.muls, 16u);
  EXPECT_EQ(ops.adds, 2u * 4u + 4u);
}

TEST(BlockSplit, StrassenInnerCostsKTimesSevenToTheM) {
  PrimeField f(499);
  SeededRandomSource rng(8);
  for (std::size_t n : {16u, 32u, 64u}) {
    const std::size_t K = 2;
    const auto fm = MatrixF::random(n / K, n, f, rng);
    const auto gm = MatrixF::random(n, n / K, f, rng);
    f.reset_counter();
    const auto c = block_split_multiply(fm, gm, K, f, {MultiplyAlgorithm::strassen, 1});
    const double expected = K * std::pow(double(n / K), std::log2(7.0));
    EXPECT_EQ(f.counter().muls, static_cast<std::uint64_t>(std::llround(expected))) << n;
    if (n == 16) EXPECT_EQ(c, naive_product(fm, gm));
  }
}

TEST(BlockSplit, UnevenInnerDimensionIsPadded) {
  PrimeField f(499);
  SeededRandomSource rng(9);
  const auto fm = MatrixF::random(3, 7, f, rng);
  const auto gm = MatrixF::random(7, 2, f, rng);
  EXPECT_EQ(block_split_multiply(fm, gm, 3, f, {}), naive_product(fm, gm));
  EXPECT_EQ(block_split_multiply(fm, gm, 3, f, {MultiplyAlgorithm::strassen, 1}), naive_product(fm, gm));
  EXPECT_THROW(block_split_multiply(fm, gm, 0, f, {}), UsageError);
}

TEST(Oracle, AllAlgorithmsAgreeAcrossShapeClasses) {
  PrimeField f(499);
  SeededRandomSource rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const std::size_t k = 1 + trial % 3;
    const auto a = MatrixF::random(n, n, f, rng);
    const auto b = MatrixF::random(n, n, f, rng);
    const auto ref = mat_mul_standard(a, b, f);
    EXPECT_EQ(mat_mul_strassen(a, b, f, 2), ref);
    EXPECT_EQ(block_split_multiply(a, b, k, f, {}), ref);
    EXPECT_EQ(block_split_multiply(a, b, k, f, {MultiplyAlgorithm::strassen, 1}), ref);
  }
}

TEST(Partition, SingleBlockIsIdentity) {
  PrimeField f(499);
  SeededRandomSource rng(11);
  const auto a = MatrixF::random(3, 2, f, rng);
  const auto rows = partition_rows(a, 1);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], a);
  const auto cols = partition_cols(a, 1);
  ASSERT_EQ(cols.size(), 1u);
  EXPECT_EQ(cols[0], a);
}

TEST(Partition, EvenRowSplitReassembles) {
  const MatrixF a(4, 2, 7, {1, 2, 3, 4, 5, 6, 0, 1});
  const auto blocks = partition_rows(a, 2);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0], MatrixF(2, 2, 7, {1, 2, 3, 4}));
  EXPECT_EQ(vstack(blocks), a);
}

TEST(Partition, UnevenRowSplitPadsWithZeros) {
  const MatrixF a(3, 2, 7, {1, 2, 3, 4, 5, 6});
  const auto blocks = partition_rows(a, 2);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[1], MatrixF(2, 2, 7, {5, 6, 0, 0}));
  const auto stacked = vstack(blocks);
  EXPECT_EQ(stacked.rows(), 4u);
  EXPECT_EQ(stacked.cropped(3, 2), a);
}

TEST(Partition, ColumnSplitReassembles) {
  const MatrixF b(2, 3, 7, {1, 2, 3, 4, 5, 6});
  const auto blocks = partition_cols(b, 2);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[1], MatrixF(2, 2, 7, {3, 0, 6, 0}));
  EXPECT_EQ(hstack(blocks).cropped(2, 3), b);
}

TEST(Partition, ZeroPartsRejected) {
  const MatrixF a(2, 2, 7);
  EXPECT_THROW(partition_rows(a, 0), UsageError);
  EXPECT_THROW(partition_cols(a, 0), UsageError);
}

TEST(Padding, IsTransparentToTheProduct) {
  PrimeField f(499);
  SeededRandomSource rng(12);
  const auto a = MatrixF::random(3, 5, f, rng);
  const auto b = MatrixF::random(5, 2, f, rng);
  const auto padded = mat_mul_standard(a.padded(4, 6), b.padded(6, 4), f);
  EXPECT_EQ(padded.cropped(3, 2), mat_mul_standard(a, b, f));
}

TEST(Inverse, InvertsAndDetectsSingular) {
  PrimeField f(7);
  const MatrixF v(3, 3, 7, {1, 1, 1, 1, 2, 4, 1, 3, 2});
  const auto inv = inverse(v, f);
  ASSERT_TRUE(inv.has_value());
  EXPECT_EQ(mat_mul_standard(v, *inv, f), MatrixF::identity(3, 7));
  EXPECT_FALSE(inverse(MatrixF(2, 2, 7, {1, 2, 2, 4}), f).has_value());
}

TEST(MatrixIo, RoundTripsAndReadsFixture) {
  PrimeField f(499);
  SeededRandomSource rng(13);
  const auto m = MatrixF::random(3, 4, f, rng);
  std::stringstream ss;
  write_matrix(ss, m);
  EXPECT_EQ(read_matrix(ss), m);

  std::ifstream in(SDMM_FIXTURE_DIR "/a_2x3_f7.txt");
  ASSERT_TRUE(in);
  EXPECT_EQ(read_matrix(in), MatrixF(2, 3, 7, {1, 2, 3, 4, 5, 6}));
}

TEST(MatrixIo, MalformedInputRejected) {
  std::istringstream short_data("2 2 7\n1 2 3\n");
  EXPECT_THROW(read_matrix(short_data), UsageError);
  std::istringstream out_of_range("1 1 7\n9\n");
  EXPECT_THROW(read_matrix(out_of_range), UsageError);
  std::istringstream not_prime("1 1 8\n1\n");
  EXPECT_THROW(read_matrix(not_prime), UsageError);
}

}  // namespace
}  // namespace sdmm
