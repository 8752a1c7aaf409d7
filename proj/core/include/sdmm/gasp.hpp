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
#include <span>
#include <string>
#include <vector>

#include "sdmm/ff.hpp"
#include "sdmm/matrix.hpp"

namespace sdmm {

/// Partitioning, collusion and shape parameters of one product A (r x s)
/// times B (s x t).
struct GaspParams {
  std::size_t K = 1;
  std::size_t L = 1;
  std::size_t T = 1;
  std::size_t r = 1;
  std::size_t s = 1;
  std::size_t t = 1;

  void validate() const;
  std::size_t block_rows() const { return ceil_div(r, K); }
  std::size_t block_cols() const { return ceil_div(t, L); }
  std::size_t padded_r() const { return K * block_rows(); }
  std::size_t padded_t() const { return L * block_cols(); }

  friend bool operator==(const GaspParams&, const GaspParams&) = default;
};

struct ExponentVectors {
  std::vector<std::uint64_t> alpha;  // K + T entries
  std::vector<std::uint64_t> beta;   // L + T entries
};

/// alpha = (0, 1, ..., K-1, KL, ..., KL+T-1),
/// beta  = (0, K, ..., K(L-1), KL, KL+K, ..., KL+(T-1)K).
/// Useful products land on 0..KL-1 and the largest table entry is
/// 2KL + (T-1)(K+1).
ExponentVectors gasp_exponents(std::size_t K, std::size_t L, std::size_t T);

/// 2KL + (T-1)(K+1).
std::uint64_t gasp_max_degree(std::size_t K, std::size_t L, std::size_t T);

/// Table of pairwise sums alpha_i + beta_j together with the distinct
/// exponents of h = f * g.
struct DegreeTable {
  std::size_t K = 0;
  std::size_t L = 0;
  std::size_t T = 0;
  std::vector<std::uint64_t> alpha;
  std::vector<std::uint64_t> beta;
  std::vector<std::vector<std::uint64_t>> table;  // (K+T) x (L+T)
  std::vector<std::uint64_t> exponents;           // sorted, distinct

  std::size_t N() const { return exponents.size(); }
  std::uint64_t max_entry() const { return exponents.empty() ? 0 : exponents.back(); }
  /// Position of exponent `e` in `exponents`; throws if absent.
  std::size_t exponent_index(std::uint64_t e) const;
  std::uint64_t useful_exponent(std::size_t k, std::size_t l) const { return alpha[k] + beta[l]; }
};

/// Builds the table and checks that the KL useful sums are exactly
/// {0, ..., KL-1}, each occupying only its own cell, and KL <= N <= (K+T)(L+T).
/// Throws ConstructionError on violation.
DegreeTable build_degree_table(std::span<const std::uint64_t> alpha,
                               std::span<const std::uint64_t> beta, std::size_t T);

struct FieldSizeBound {
  std::size_t N = 0;
  std::uint64_t W = 0;      // largest table entry
  std::uint64_t J = 0;      // sum of exponents of h
  std::uint64_t binom = 0;  // C(N, T)
  std::uint64_t bound = 0;  // (2 C(N,T) + 1) * J; any prime above it suffices
};

/// Exact integer evaluation. Throws ParameterTooLargeError if the bound does
/// not fit below the 62-bit modulus cap.
FieldSizeBound required_field_size(const DegreeTable& dt, std::size_t T);

struct CodeOptions {
  /// Accept moduli at or below the sufficiency bound as long as
  /// point verification still succeeds.
  bool allow_small_field = false;
  std::size_t max_point_retries = 1000;
};

/// Evaluation points with the precomputed interpolation inverse.
struct EvalPoints {
  std::vector<std::uint64_t> points;
  MatrixF interp_inverse;  // inverse of V[n][j] = a_n^{exponents[j]}
  std::size_t attempts = 0;
};

/// Checks distinctness and non-zeroness (UsageError) and then the two
/// algebraic conditions: the generalized Vandermonde over the exponents of h
/// is invertible, and for every T-subset of points both T x T matrices of
/// random-term powers are invertible. Returns the interpolation inverse, or
/// nullopt if an algebraic condition fails.
std::optional<MatrixF> verify_eval_points(PrimeField& field, const DegreeTable& dt,
                                          std::span<const std::uint64_t> points);

/// Randomized search with full verification. Throws PointSearchError after
/// `max_retries` failed candidates.
EvalPoints choose_eval_points(PrimeField& field, const DegreeTable& dt, SeededRandomSource& rng,
                              std::size_t max_retries = 1000);

/// An immutable, verified GASP code over one prime field. Power tables of the
/// evaluation points are precomputed at construction; their cost is kept in
/// `setup_ops()` and never charged to an encoding session.
class GaspCode {
 public:
  /// Picks points at random. `modulus` = 0 selects the smallest prime above
  /// the sufficiency bound.
  static GaspCode construct(const GaspParams& params, std::uint64_t modulus,
                            SeededRandomSource& rng, const CodeOptions& opts = {});
  /// Pins the points; throws ConstructionError if they fail verification.
  static GaspCode with_points(const GaspParams& params, std::uint64_t modulus,
                              std::vector<std::uint64_t> points, const CodeOptions& opts = {});
  /// Like with_points, but with caller-supplied exponent vectors (descriptor
  /// files may carry an alternative assignment; it is validated, not trusted).
  static GaspCode from_exponents(const GaspParams& params, const ExponentVectors& exps,
                                 std::uint64_t modulus, std::vector<std::uint64_t> points,
                                 const CodeOptions& opts = {});
  /// Skips every check. Only meant for building adversarial codes in tests;
  /// the interpolation inverse is left empty when V is singular.
  static GaspCode unverified(const GaspParams& params, std::uint64_t modulus,
                             std::vector<std::uint64_t> points);

  /// Smallest prime above the sufficiency bound for `params`.
  static std::uint64_t auto_modulus(const GaspParams& params);

  const GaspParams& params() const { return params_; }
  const DegreeTable& table() const { return table_; }
  std::uint64_t modulus() const { return modulus_; }
  std::size_t N() const { return table_.N(); }
  const std::vector<std::uint64_t>& points() const { return points_; }
  const MatrixF& interp_inverse() const { return interp_inverse_; }
  /// a_n^{alpha_i}: N x (K+T). a_n^{beta_j}: N x (L+T).
  const MatrixF& alpha_powers() const { return alpha_pow_; }
  const MatrixF& beta_powers() const { return beta_pow_; }
  const OpCounter& setup_ops() const { return setup_ops_; }
  /// Muls spent on the alpha/beta power tables alone.
  std::uint64_t power_table_muls() const { return power_table_muls_; }
  std::size_t search_attempts() const { return attempts_; }

 private:
  GaspCode() = default;
  static GaspCode assemble(const GaspParams& params, DegreeTable table, std::uint64_t modulus,
                           std::vector<std::uint64_t> points, MatrixF interp_inverse,
                           PrimeField& setup);

  GaspParams params_;
  DegreeTable table_;
  std::uint64_t modulus_ = 0;
  std::vector<std::uint64_t> points_;
  MatrixF interp_inverse_;
  MatrixF alpha_pow_;
  MatrixF beta_pow_;
  OpCounter setup_ops_;
  std::uint64_t power_table_muls_ = 0;
  std::size_t attempts_ = 0;
};

struct SharePair {
  MatrixF f;  // f(a_n): block_rows x s
  MatrixF g;  // g(a_n): s x block_cols
};

/// The T random blocks hidden in each polynomial.
struct EncodingRandomness {
  std::vector<MatrixF> r;  // shape of A_k
  std::vector<MatrixF> s;  // shape of B_l
};

EncodingRandomness draw_randomness(const GaspCode& code, PrimeField& field,
                                   SeededRandomSource& rng);

/// One share pair per server. Per point, f costs (K+T) bs muls and
/// (K+T-1) bs adds (b = block_rows), g likewise with (L+T) and s c.
std::vector<SharePair> gasp_encode(const MatrixF& a, const MatrixF& b, const GaspCode& code,
                                   PrimeField& field, const EncodingRandomness& randomness);
std::vector<SharePair> gasp_encode(const MatrixF& a, const MatrixF& b, const GaspCode& code,
                                   PrimeField& field, SeededRandomSource& rng);

enum class ServerAlgorithm { standard, strassen_block };

std::string to_string(ServerAlgorithm a);
ServerAlgorithm parse_server_algorithm(const std::string& name);

/// h(a_n) = f(a_n) g(a_n). The strassen_block path splits the inner dimension
/// into ceil(s / max(rows, cols)) square-ish chunks and multiplies each with
/// Strassen; for r = s = t = n and K = L that is K chunks of (n/K) x (n/K).
MatrixF server_multiply(const MatrixF& f_share, const MatrixF& g_share, PrimeField& field,
                        ServerAlgorithm algorithm, std::size_t strassen_cutoff = 64);

/// Interpolates the KL useful coefficients of h from all N shares and
/// reassembles A*B with padding stripped. Costs KL N bc muls and
/// KL (N-1) bc adds.
MatrixF gasp_decode(std::span<const MatrixF> h_shares, const GaspCode& code, PrimeField& field);

struct PrivacyVerdict {
  bool passed = false;
  std::uint64_t cases = 0;
  std::string counterexample;
};

/// Exhaustive T-privacy check: for every `colluders`-subset of servers,
/// the distribution of everything they receive (over all randomness) must be
/// identical for every input. Throws UsageError when the enumeration would
/// exceed `cap` cases.
PrivacyVerdict verify_privacy_bruteforce(const GaspCode& code, std::size_t colluders,
                                         std::uint64_t cap = std::uint64_t{1} << 28);

/// Code descriptor: K L T r s t modulus alpha... beta... points..., one token
/// each.
std::vector<std::uint64_t> code_descriptor_tokens(const GaspCode& code);
GaspCode code_from_descriptor_tokens(std::span<const std::uint64_t> tokens,
                                     const CodeOptions& opts = {});
void write_code_descriptor(std::ostream& out, const GaspCode& code);
GaspCode read_code_descriptor(std::istream& in, const CodeOptions& opts = {});

/// Calls `fn` with each size-k subset of {0, ..., n-1} in lexicographic order.
/// Stops early when `fn` returns false.
template <typename Fn>
bool for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return true;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    if (!fn(std::span<const std::size_t>(idx))) return false;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace sdmm
