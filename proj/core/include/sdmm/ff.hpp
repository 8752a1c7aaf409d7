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

#include <cstdint>
#include <limits>
#include <random>

#include "sdmm/errors.hpp"

namespace sdmm {

__extension__ using u128 = unsigned __int128;
__extension__ using i128 = __int128;

/// Exact operation tallies for one party. One counted operation corresponds to
/// one unit of the per-operation field cost; weights are applied at report
/// time, never here.
struct OpCounter {
  std::uint64_t adds = 0;  // additions and subtractions
  std::uint64_t muls = 0;
  std::uint64_t invs = 0;
  std::uint64_t rand_draws = 0;

  std::uint64_t arithmetic() const { return adds + muls + invs; }
  std::uint64_t total() const { return adds + muls + invs + rand_draws; }

  OpCounter& operator+=(const OpCounter& o) {
    adds += o.adds;
    muls += o.muls;
    invs += o.invs;
    rand_draws += o.rand_draws;
    return *this;
  }
  friend OpCounter operator+(OpCounter a, const OpCounter& b) { return a += b; }
  friend OpCounter operator-(const OpCounter& a, const OpCounter& b) {
    return {a.adds - b.adds, a.muls - b.muls, a.invs - b.invs,
            a.rand_draws - b.rand_draws};
  }
  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

/// Largest admissible modulus is below 2^62 so products fit in 128 bits with
/// headroom.
inline constexpr std::uint64_t kMaxModulus = (std::uint64_t{1} << 62) - 1;

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::uint64_t n);

/// Smallest prime strictly greater than `bound`. Throws ParameterTooLargeError
/// when that prime would exceed kMaxModulus.
std::uint64_t next_prime_above(std::uint64_t bound);

/// An element of F_p. Carries its modulus so operations across different
/// fields are detected.
struct FieldElem {
  std::uint64_t residue = 0;
  std::uint64_t modulus = 0;

  friend bool operator==(const FieldElem&, const FieldElem&) = default;
};

/// Seeded 64-bit source. Every random element in the library comes from one of
/// these, so a seed pins an entire session.
class SeededRandomSource {
 public:
  static constexpr unsigned word_bits = 64;

  explicit SeededRandomSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Independent child stream, for handing one source to each party.
  SeededRandomSource fork() { return SeededRandomSource(engine_() ^ 0x9e3779b97f4a7c15ULL); }

 private:
  std::mt19937_64 engine_;
};

/// Uniform residue in [0, p) by rejection from a source producing
/// `Source::word_bits`-bit words. Words in the final partial copy of [0, p)
/// are rejected, so the result is exactly uniform whenever the source is.
template <typename Source>
std::uint64_t sample_residue(Source& source, std::uint64_t p) {
  constexpr unsigned bits = Source::word_bits;
  static_assert(bits >= 1 && bits <= 64);
  if (p == 0) throw UsageError("sample_residue: modulus must be positive");
  if constexpr (bits == 64) {
    // 2^64 mod p computed without overflow.
    const std::uint64_t rem = (std::uint64_t{0} - p) % p;
    const std::uint64_t limit = std::uint64_t{0} - rem;  // 2^64 - rem (wraps to 0 if rem = 0)
    for (;;) {
      const std::uint64_t w = source.next();
      if (rem == 0 || w < limit) return w % p;
    }
  } else {
    const std::uint64_t range = std::uint64_t{1} << bits;
    if (p > range) throw UsageError("sample_residue: modulus exceeds source range");
    const std::uint64_t limit = range - range % p;
    for (;;) {
      const std::uint64_t w = source.next() & (range - 1);
      if (w < limit) return w % p;
    }
  }
}

/// Prime field F_p with an operation counter owned by one party.
///
/// All arithmetic goes through a PrimeField so that every operation is
/// tallied. The `raw_*` kernels operate on canonical residues directly and
/// are what the matrix routines use in their inner loops; they count exactly
/// like their FieldElem counterparts but skip the cross-field check.
class PrimeField {
 public:
  explicit PrimeField(std::uint64_t modulus);

  std::uint64_t modulus() const { return p_; }

  FieldElem elem(std::uint64_t value) const { return {value % p_, p_}; }
  FieldElem zero() const { return {0, p_}; }
  FieldElem one() const { return {1 % p_, p_}; }

  FieldElem add(FieldElem a, FieldElem b) {
    check(a, b);
    return {raw_add(a.residue, b.residue), p_};
  }
  FieldElem sub(FieldElem a, FieldElem b) {
    check(a, b);
    return {raw_sub(a.residue, b.residue), p_};
  }
  FieldElem mul(FieldElem a, FieldElem b) {
    check(a, b);
    return {raw_mul(a.residue, b.residue), p_};
  }
  FieldElem neg(FieldElem a) {
    check(a);
    return {raw_sub(0, a.residue), p_};
  }
  FieldElem inv(FieldElem a) {
    check(a);
    return {raw_inv(a.residue), p_};
  }
  /// Square-and-multiply; each square and each multiply is counted.
  FieldElem pow(FieldElem a, std::uint64_t e) {
    check(a);
    return {raw_pow(a.residue, e), p_};
  }
  FieldElem sample(SeededRandomSource& rng) { return {raw_sample(rng), p_}; }

  std::uint64_t raw_add(std::uint64_t a, std::uint64_t b) {
    ++counter_.adds;
    const std::uint64_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t raw_sub(std::uint64_t a, std::uint64_t b) {
    ++counter_.adds;
    return a >= b ? a - b : a + p_ - b;
  }
  std::uint64_t raw_mul(std::uint64_t a, std::uint64_t b) {
    ++counter_.muls;
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % p_);
  }
  std::uint64_t raw_inv(std::uint64_t a);
  std::uint64_t raw_pow(std::uint64_t base, std::uint64_t e);
  std::uint64_t raw_sample(SeededRandomSource& rng) {
    ++counter_.rand_draws;
    return sample_residue(rng, p_);
  }

  const OpCounter& counter() const { return counter_; }
  /// Only between sessions; counters are monotone within one.
  void reset_counter() { counter_ = {}; }

 private:
  void check(FieldElem a) const {
    if (a.modulus != p_ || a.residue >= p_)
      throw UsageError("field element does not belong to F_" + std::to_string(p_));
  }
  void check(FieldElem a, FieldElem b) const {
    check(a);
    check(b);
  }

  std::uint64_t p_;
  OpCounter counter_;
};

}  // namespace sdmm
