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
#include <utility>
#include <vector>

#include "sdmm/ff.hpp"
#include "sdmm/matrix.hpp"

// Private Oracle Querying: the servers precompute every product A*B for
// A in F_q^{r x s}, B in F_q^{s x t} and the user retrieves one of them with a
// two-server, non-colluding PIR (q and q + e_i).
namespace sdmm::poq {

struct Shape {
  std::uint64_t q = 2;
  std::size_t r = 1;
  std::size_t s = 1;
  std::size_t t = 1;

  /// M = q^{s(r+t)}; throws ParameterTooLargeError if it overflows 64 bits.
  std::uint64_t file_count() const;
  std::size_t file_len() const { return r * t; }

  friend bool operator==(const Shape&, const Shape&) = default;
};

inline constexpr std::uint64_t kDefaultElementCap = std::uint64_t{1} << 26;

/// Mixed-radix index of (A, B): row-major entries of A then of B, read as
/// base-q digits with the most significant first.
std::uint64_t index_of(const MatrixF& a, const MatrixF& b);
/// Inverse of index_of.
std::pair<MatrixF, MatrixF> pair_at(std::uint64_t index, const Shape& shape);

class OracleDatabase {
 public:
  OracleDatabase(Shape shape, std::vector<std::uint64_t> files);

  const Shape& shape() const { return shape_; }
  std::uint64_t file_count() const { return count_; }
  std::size_t file_len() const { return shape_.file_len(); }
  std::span<const std::uint64_t> file(std::uint64_t i) const;
  std::span<const std::uint64_t> flat() const { return files_; }

 private:
  Shape shape_;
  std::uint64_t count_;
  std::vector<std::uint64_t> files_;
};

/// Every product in canonical index order. Throws ParameterTooLargeError
/// naming M when M * rt exceeds `element_cap`.
OracleDatabase build_database(PrimeField& field, std::size_t r, std::size_t s, std::size_t t,
                              std::uint64_t element_cap = kDefaultElementCap);

struct QueryPair {
  std::vector<std::uint64_t> server1;  // q
  std::vector<std::uint64_t> server2;  // q + E_i
};

/// Draws q uniformly over F^{M rt} (M rt rand_draws) and flips in the
/// indicator block of file i (rt adds).
QueryPair pir_query(std::uint64_t index, std::uint64_t file_count, std::size_t file_len,
                    PrimeField& field, SeededRandomSource& rng);
/// Same but with a caller-chosen mask q.
QueryPair pir_query_with_mask(std::uint64_t index, std::uint64_t file_count, std::size_t file_len,
                              PrimeField& field, std::vector<std::uint64_t> mask);

/// Per-coordinate inner product: out[j] = sum_i D[i][j] * query[i rt + j].
/// M rt muls and (M-1) rt adds.
std::vector<std::uint64_t> pir_respond(const OracleDatabase& db, std::span<const std::uint64_t> query,
                                       PrimeField& field);

/// unflatten(resp2 - resp1) as an r x t matrix.
MatrixF pir_decode(std::span<const std::uint64_t> resp1, std::span<const std::uint64_t> resp2,
                   std::size_t r, std::size_t t, PrimeField& field);

/// (N - T) / N. Only N = 2, T = 1 is implemented; the formula is reported for
/// any N > T.
double download_rate(std::size_t servers, std::size_t colluders);

/// Header "q r s t M" then one file per line, decimal residues.
void write_database(std::ostream& out, const OracleDatabase& db);
OracleDatabase read_database(std::istream& in);

}  // namespace sdmm::poq
