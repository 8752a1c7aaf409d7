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

#include <array>
#include <map>
#include <stdexcept>
#include <vector>

#include "sdmm/ff.hpp"

namespace sdmm {
namespace {

TEST(Primality, SmallAndLarge) {
  EXPECT_FALSE(is_prime(0));
  EXPECT_FALSE(is_prime(1));
  EXPECT_TRUE(is_prime(2));
  EXPECT_TRUE(is_prime(7));
  EXPECT_FALSE(is_prime(493));  // 17 * 29
  EXPECT_TRUE(is_prime(499));
  EXPECT_TRUE(is_prime(8779));
  EXPECT_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
  EXPECT_TRUE(is_prime(2305843009213693951ULL));  // 2^61 - 1
  EXPECT_FALSE(is_prime(2305843009213693953ULL));
}

TEST(Primality, NextPrimeIsStrictlyAbove) {
  EXPECT_EQ(next_prime_above(21), 23u);
  EXPECT_EQ(next_prime_above(493), 499u);
  EXPECT_EQ(next_prime_above(23), 29u);
  EXPECT_EQ(next_prime_above(8778), 8779u);
  EXPECT_THROW(next_prime_above(kMaxModulus), ParameterTooLargeError);
}

TEST(PrimeField, RejectsCompositeAndOversizedModuli) {
  EXPECT_THROW(PrimeField(1), UsageError);
  EXPECT_THROW(PrimeField(9), UsageError);
  EXPECT_THROW(PrimeField(kMaxModulus + 2), UsageError);
  EXPECT_NO_THROW(PrimeField(2305843009213693951ULL));
}

TEST(PrimeField, SmallExamplesInF7) {
  PrimeField f(7);
  EXPECT_EQ(f.add(f.elem(3), f.elem(5)).residue, 1u);
  EXPECT_EQ(f.mul(f.elem(3), f.elem(5)).residue, 1u);
  EXPECT_EQ(f.sub(f.elem(3), f.elem(5)).residue, 5u);
  EXPECT_EQ(f.neg(f.elem(3)).residue, 4u);
  for (std::uint64_t x = 0; x < 7; ++x) EXPECT_EQ(f.mul(f.zero(), f.elem(x)).residue, 0u);
  EXPECT_EQ(f.inv(f.elem(3)).residue, 5u);
  EXPECT_EQ(f.inv(f.elem(1)).residue, 1u);
}

TEST(PrimeField, InverseInF499AndOfZero) {
  PrimeField f(499);
  EXPECT_EQ(f.inv(f.elem(2)).residue, 250u);
  EXPECT_THROW(f.inv(f.zero()), DomainError);
}

TEST(PrimeField, InverseMatchesBruteForce) {
  PrimeField f(7);
  for (std::uint64_t a = 1; a < 7; ++a) {
    std::uint64_t brute = 0;
    for (std::uint64_t b = 1; b < 7; ++b)
      if (a * b % 7 == 1) brute = b;
    EXPECT_EQ(f.inv(f.elem(a)).residue, brute);
  }
}

TEST(PrimeField, MismatchedFieldsAreUsageErrors) {
  PrimeField f7(7);
  PrimeField f11(11);
  EXPECT_THROW(f7.add(f7.elem(1), f11.elem(1)), UsageError);
  EXPECT_THROW(f7.mul(FieldElem{9, 7}, f7.elem(1)), UsageError);
  EXPECT_THROW(f7.inv(f11.elem(3)), UsageError);
}

TEST(PrimeField, PowMatchesRepeatedMultiplication) {
  PrimeField f(499);
  std::uint64_t acc = 1;
  for (std::uint64_t e = 0; e < 30; ++e) {
    EXPECT_EQ(f.pow(f.elem(17), e).residue, acc);
    acc = acc * 17 % 499;
  }
  EXPECT_EQ(f.pow(f.elem(5), 498).residue, 1u);  // Fermat
}

TEST(PrimeField, LargeModulusProductsUseWideIntermediates) {
  const std::uint64_t p = 2305843009213693951ULL;
  PrimeField f(p);
  const auto a = f.elem(p - 1);
  EXPECT_EQ(f.mul(a, a).residue, 1u);  // (-1)^2
  EXPECT_EQ(f.add(a, a).residue, p - 2);
  EXPECT_EQ(f.mul(f.inv(f.elem(123456789)), f.elem(123456789)).residue, 1u);
}

TEST(OpCounter, CountsEachCategoryExactly) {
  PrimeField f(499);
  const auto before = f.counter();
  for (int i = 0; i < 13; ++i) f.add(f.elem(i), f.elem(2));
  for (int i = 0; i < 4; ++i) f.sub(f.elem(i), f.elem(2));
  for (int i = 0; i < 9; ++i) f.mul(f.elem(i), f.elem(3));
  f.inv(f.elem(5));
  SeededRandomSource rng(1);
  for (int i = 0; i < 6; ++i) f.sample(rng);
  const auto d = f.counter() - before;
  EXPECT_EQ(d, (OpCounter{17, 9, 1, 6}));
  EXPECT_EQ(d.arithmetic(), 27u);
  EXPECT_EQ(d.total(), 33u);
  f.reset_counter();
  EXPECT_EQ(f.counter(), OpCounter{});
}

TEST(OpCounter, PowCountsOnlyMultiplications) {
  PrimeField f(499);
  f.pow(f.elem(3), 13);  // 1101b
  EXPECT_EQ(f.counter().adds, 0u);
  EXPECT_GT(f.counter().muls, 0u);
  EXPECT_LE(f.counter().muls, 2u * 4u);
}

TEST(FieldAxioms, RandomTriples) {
  for (std::uint64_t p : {7ULL, 499ULL}) {
    PrimeField f(p);
    SeededRandomSource rng(p);
    for (int i = 0; i < 10000; ++i) {
      const auto a = f.sample(rng), b = f.sample(rng), c = f.sample(rng);
      EXPECT_EQ(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
      EXPECT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
      EXPECT_EQ(f.add(a, b), f.add(b, a));
      EXPECT_EQ(f.mul(a, b), f.mul(b, a));
      EXPECT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
      EXPECT_EQ(f.add(a, f.neg(a)), f.zero());
      if (a.residue != 0) EXPECT_EQ(f.mul(a, f.inv(a)), f.one());
    }
  }
}

TEST(Sampling, SameSeedSameSequence) {
  PrimeField f(7);
  SeededRandomSource r1(42), r2(42), r3(43);
  std::vector<std::uint64_t> s1, s2, s3;
  for (int i = 0; i < 100; ++i) {
    s1.push_back(f.sample(r1).residue);
    s2.push_back(f.sample(r2).residue);
    s3.push_back(f.sample(r3).residue);
  }
  EXPECT_EQ(s1, s2);
  EXPECT_NE(s1, s3);
  for (auto v : s1) EXPECT_LT(v, 7u);
}

TEST(Sampling, ChiSquareInF7) {
  PrimeField f(7);
  SeededRandomSource rng(2026);
  constexpr int kDraws = 100000;
  std::array<int, 7> counts{};
  for (int i = 0; i < kDraws; ++i) ++counts[f.sample(rng).residue];
  const double expected = kDraws / 7.0;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // Upper 0.001 quantile of chi-square with 6 degrees of freedom.
  EXPECT_LT(chi2, 22.458);
}

// Enumerable source: yields every value of a b-bit word in a fixed cycle.
template <unsigned Bits>
struct CyclingSource {
  static constexpr unsigned word_bits = Bits;
  std::uint64_t state = 0;
  std::uint64_t next() { return state++ % (std::uint64_t{1} << Bits); }
};

TEST(Sampling, RejectionIsExactlyUniformForThreeBitSource) {
  // One full cycle of the 3-bit source accepts 0..4 exactly once and rejects
  // 5, 6, 7, so 500 samples consume 99 full cycles plus the words 0..4.
  CyclingSource<3> src;
  std::map<std::uint64_t, int> hist;
  for (int i = 0; i < 5 * 100; ++i) ++hist[sample_residue(src, 5)];
  ASSERT_EQ(hist.size(), 5u);
  for (const auto& [v, c] : hist) EXPECT_EQ(c, 100) << v;
  EXPECT_EQ(src.state, 8u * 99u + 5u);
}

// Yields one fixed word, then refuses: the sampler must accept or ask again.
struct SingleWordSource {
  static constexpr unsigned word_bits = 3;
  std::uint64_t w;
  bool used = false;
  std::uint64_t next() {
    if (used) throw std::runtime_error("rejected");
    used = true;
    return w;
  }
};

TEST(Sampling, AcceptedWordsMapUniformlyForThreeBitSource) {
  std::array<int, 5> per_residue{};
  int accepted = 0;
  for (std::uint64_t w = 0; w < 8; ++w) {
    SingleWordSource src{w};
    try {
      ++per_residue[sample_residue(src, 5)];
      ++accepted;
    } catch (const std::runtime_error&) {
    }
  }
  EXPECT_EQ(accepted, 5);
  for (int c : per_residue) EXPECT_EQ(c, 1);
}

TEST(Sampling, BitsInF2AreUnbiased) {
  // With a 64-bit source p = 2 divides 2^64, so nothing is rejected and each
  // word maps to its low bit: half of all words give 0, half give 1. Check the
  // same on an enumerable 4-bit source.
  CyclingSource<4> src;
  std::array<int, 2> counts{};
  for (int i = 0; i < 16; ++i) ++counts[sample_residue(src, 2)];
  EXPECT_EQ(counts[0], 8);
  EXPECT_EQ(counts[1], 8);
  EXPECT_EQ(src.state, 16u);

  PrimeField f(2);
  SeededRandomSource rng(5);
  int ones = 0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) ones += static_cast<int>(f.sample(rng).residue);
  EXPECT_NEAR(ones / double(kDraws), 0.5, 0.01);
}

TEST(Sampling, ModulusLargerThanSourceRangeIsRejected) {
  CyclingSource<3> src;
  EXPECT_THROW(sample_residue(src, 11), UsageError);
}

}  // namespace
}  // namespace sdmm
