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

#include "sdmm/ff.hpp"

#include <array>
#include <string>

namespace sdmm {
namespace {


std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::array<std::uint64_t, 12> kBases = {2,  3,  5,  7,  11, 13,
                                                          17, 19, 23, 29, 31, 37};
  for (std::uint64_t p : kBases) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : kBases) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t next_prime_above(std::uint64_t bound) {
  for (std::uint64_t c = bound + 1; c <= kMaxModulus; ++c) {
    if (is_prime(c)) return c;
  }
  throw ParameterTooLargeError("no prime above " + std::to_string(bound) +
                               " fits the 62-bit modulus budget");
}

PrimeField::PrimeField(std::uint64_t modulus) : p_(modulus) {
  if (modulus > kMaxModulus)
    throw ParameterTooLargeError("modulus " + std::to_string(modulus) + " exceeds 62 bits");
  if (!is_prime(modulus)) throw UsageError("modulus " + std::to_string(modulus) + " is not prime");
}

std::uint64_t PrimeField::raw_inv(std::uint64_t a) {
  if (a % p_ == 0) throw DomainError("inverse of zero in F_" + std::to_string(p_));
  ++counter_.invs;
  // Extended Euclid on signed 128-bit to avoid intermediate overflow.
  i128 old_r = static_cast<i128>(a % p_), r = p_;
  i128 old_s = 1, s = 0;
  while (r != 0) {
    const i128 q = old_r / r;
    const i128 tr = old_r - q * r;
    old_r = r;
    r = tr;
    const i128 ts = old_s - q * s;
    old_s = s;
    s = ts;
  }
  i128 x = old_s % static_cast<i128>(p_);
  if (x < 0) x += p_;
  return static_cast<std::uint64_t>(x);
}

std::uint64_t PrimeField::raw_pow(std::uint64_t base, std::uint64_t e) {
  if (e == 0) return 1 % p_;
  // Left-to-right: the leading bit costs nothing; every further bit costs a
  // square plus, when set, a multiply.
  unsigned top = 63;
  while (((e >> top) & 1) == 0) --top;
  std::uint64_t r = base % p_;
  for (int i = static_cast<int>(top) - 1; i >= 0; --i) {
    r = raw_mul(r, r);
    if ((e >> i) & 1) r = raw_mul(r, base);
  }
  return r;
}

}  // namespace sdmm
