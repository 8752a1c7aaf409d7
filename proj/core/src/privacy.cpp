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

#include <map>
#include <sstream>

#include "sdmm/gasp.hpp"

namespace sdmm {
namespace {


// Increments a mixed-radix counter with every digit in [0, q). Returns false
// after wrapping back to all zeros.
bool next_assignment(std::vector<std::uint64_t>& digits, std::uint64_t q) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < q) return true;
    digits[i] = 0;
  }
  return false;
}

std::string format_values(const std::vector<std::uint64_t>& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

// One polynomial side of the check. The party's polynomial has `data_blocks`
// input blocks followed by T random blocks, each of `block` entries, with
// coefficient table `powers` (N x (data_blocks + T)). `scatter` maps a
// flat input to its data blocks (zero padding included).
struct Side {
  const char* name;
  std::size_t input_len;
  std::size_t data_blocks;
  std::size_t block;
  const MatrixF* powers;
  std::vector<std::vector<std::uint64_t>> (*scatter)(const std::vector<std::uint64_t>&,
                                                     const GaspParams&);
};

std::vector<std::vector<std::uint64_t>> scatter_a(const std::vector<std::uint64_t>& a,
                                                  const GaspParams& p) {
  const std::size_t bh = p.block_rows();
  std::vector<std::vector<std::uint64_t>> blocks(p.K, std::vector<std::uint64_t>(bh * p.s, 0));
  for (std::size_t i = 0; i < p.r; ++i)
    for (std::size_t j = 0; j < p.s; ++j) blocks[i / bh][(i % bh) * p.s + j] = a[i * p.s + j];
  return blocks;
}

std::vector<std::vector<std::uint64_t>> scatter_b(const std::vector<std::uint64_t>& b,
                                                  const GaspParams& p) {
  const std::size_t bw = p.block_cols();
  std::vector<std::vector<std::uint64_t>> blocks(p.L, std::vector<std::uint64_t>(p.s * bw, 0));
  for (std::size_t i = 0; i < p.s; ++i)
    for (std::size_t j = 0; j < p.t; ++j) blocks[j / bw][i * bw + (j % bw)] = b[i * p.t + j];
  return blocks;
}

using Histogram = std::map<std::vector<std::uint64_t>, std::uint64_t>;

Histogram view_distribution(const Side& side, const GaspParams& p, std::size_t T, std::uint64_t q,
                            std::span<const std::size_t> subset,
                            const std::vector<std::uint64_t>& input) {
  const auto data = side.scatter(input, p);
  const auto& pw = *side.powers;
  // Deterministic part of each colluder's share.
  std::vector<std::uint64_t> base(subset.size() * side.block, 0);
  for (std::size_t c = 0; c < subset.size(); ++c)
    for (std::size_t k = 0; k < side.data_blocks; ++k)
      for (std::size_t e = 0; e < side.block; ++e)
        base[c * side.block + e] = static_cast<std::uint64_t>(
            (base[c * side.block + e] + static_cast<u128>(pw(subset[c], k)) * data[k][e]) % q);

  Histogram hist;
  std::vector<std::uint64_t> rnd(T * side.block, 0);
  std::vector<std::uint64_t> view(base.size());
  do {
    view = base;
    for (std::size_t c = 0; c < subset.size(); ++c)
      for (std::size_t t = 0; t < T; ++t)
        for (std::size_t e = 0; e < side.block; ++e) {
          auto& v = view[c * side.block + e];
          v = static_cast<std::uint64_t>(
              (v + static_cast<u128>(pw(subset[c], side.data_blocks + t)) * rnd[t * side.block + e]) % q);
        }
    ++hist[view];
  } while (next_assignment(rnd, q));
  return hist;
}

u128 checked_pow(std::uint64_t q, std::size_t e, u128 cap) {
  u128 r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    r *= q;
    if (r > cap) return cap + 1;
  }
  return r;
}

}  // namespace

PrivacyVerdict verify_privacy_bruteforce(const GaspCode& code, std::size_t colluders,
                                         std::uint64_t cap) {
  const auto& p = code.params();
  const std::uint64_t q = code.modulus();
  const std::size_t n = code.points().size();
  if (colluders == 0 || colluders > n)
    throw UsageError("colluding set size must be in [1, N]");

  const Side sides[2] = {
      {"f", p.r * p.s, p.K, p.block_rows() * p.s, &code.alpha_powers(), scatter_a},
      {"g", p.s * p.t, p.L, p.s * p.block_cols(), &code.beta_powers(), scatter_b},
  };

  // Subset count times the per-subset enumeration of both sides.
  u128 subsets = 1;
  for (std::size_t i = 0; i < colluders; ++i) subsets = subsets * (n - i) / (i + 1);
  u128 total = 0;
  for (const auto& side : sides)
    total += checked_pow(q, side.input_len + p.T * side.block, cap);
  total *= subsets;
  if (total > cap)
    throw UsageError("privacy enumeration exceeds the cap of " + std::to_string(cap) + " cases");

  // R and S are drawn independently, so the colluders' joint view factors into
  // an f part depending on (A, R) and a g part depending on (B, S). The joint
  // distributions for two inputs agree iff both factors agree.
  PrivacyVerdict verdict;
  verdict.passed = true;
  for_each_subset(n, colluders, [&](std::span<const std::size_t> subset) {
    for (const auto& side : sides) {
      const auto per_input = static_cast<std::uint64_t>(checked_pow(q, p.T * side.block, cap));
      std::vector<std::uint64_t> input(side.input_len, 0);
      const Histogram reference = view_distribution(side, p, p.T, q, subset, input);
      verdict.cases += per_input;
      while (next_assignment(input, q)) {
        const Histogram h = view_distribution(side, p, p.T, q, subset, input);
        verdict.cases += per_input;
        if (h != reference) {
          std::vector<std::uint64_t> servers(subset.begin(), subset.end());
          verdict.passed = false;
          verdict.counterexample = std::string("servers ") + format_values(servers) + ": " +
                                   side.name + "-share distribution for input " +
                                   format_values(input) + " differs from the all-zero input";
          return false;
        }
      }
    }
    return true;
  });
  return verdict;
}

}  // namespace sdmm
