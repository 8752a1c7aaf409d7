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
#include <vector>

#include "sdmm/ff.hpp"

namespace sdmm {

/// Dense row-major matrix over F_p. Stores canonical residues; the modulus
/// travels with the matrix so arithmetic against the wrong field is caught.
class MatrixF {
 public:
  MatrixF() = default;
  MatrixF(std::size_t rows, std::size_t cols, std::uint64_t modulus);
  MatrixF(std::size_t rows, std::size_t cols, std::uint64_t modulus,
          std::vector<std::uint64_t> residues);

  static MatrixF zero(std::size_t rows, std::size_t cols, std::uint64_t modulus) {
    return MatrixF(rows, cols, modulus);
  }
  static MatrixF identity(std::size_t n, std::uint64_t modulus);
  /// Entries drawn uniformly through `field` (counted as rand_draws).
  static MatrixF random(std::size_t rows, std::size_t cols, PrimeField& field,
                        SeededRandomSource& rng);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  std::uint64_t modulus() const { return modulus_; }
  bool empty() const { return data_.empty(); }

  std::uint64_t operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::uint64_t& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  FieldElem elem(std::size_t i, std::size_t j) const { return {(*this)(i, j), modulus_}; }
  void set(std::size_t i, std::size_t j, FieldElem v);

  std::span<const std::uint64_t> data() const { return data_; }
  std::span<std::uint64_t> data() { return data_; }

  /// Copy of the h x w window starting at (r0, c0); parts outside the matrix
  /// read as zero.
  MatrixF block(std::size_t r0, std::size_t c0, std::size_t h, std::size_t w) const;
  /// Writes `src` with its top-left corner at (r0, c0), clipping at the edges.
  void paste(const MatrixF& src, std::size_t r0, std::size_t c0);

  MatrixF padded(std::size_t rows, std::size_t cols) const { return block(0, 0, rows, cols); }
  MatrixF cropped(std::size_t rows, std::size_t cols) const;

  bool is_zero() const;

  friend bool operator==(const MatrixF&, const MatrixF&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::uint64_t modulus_ = 0;
  std::vector<std::uint64_t> data_;
};

enum class MultiplyAlgorithm { standard, strassen };

struct MultiplyOptions {
  MultiplyAlgorithm algorithm = MultiplyAlgorithm::standard;
  /// Strassen falls back to the standard product at sides <= cutoff.
  std::size_t strassen_cutoff = 64;
};

/// Triple-loop product: r*s*t muls and r*(s-1)*t adds, exactly.
MatrixF mat_mul_standard(const MatrixF& a, const MatrixF& b, PrimeField& field);

/// Strassen's seven-product recursion on square inputs. Non power-of-two sides
/// are zero-padded to the next power of two. With cutoff 1 and side 2^m the
/// count of muls is exactly 7^m.
MatrixF mat_mul_strassen(const MatrixF& a, const MatrixF& b, PrimeField& field,
                         std::size_t cutoff = 64);

MatrixF multiply(const MatrixF& a, const MatrixF& b, PrimeField& field,
                 const MultiplyOptions& opts);

/// Computes F*G as sum_i F_i * G_i, where F is split into `k` column blocks
/// and G into matching row blocks (inner dimension zero-padded to a multiple
/// of k). Adds exactly (k-1)*rows(F)*cols(G) accumulation additions on top of
/// the inner products. Strassen inner products on non-square blocks pad each
/// block to a square.
MatrixF block_split_multiply(const MatrixF& f, const MatrixF& g, std::size_t k,
                             PrimeField& field, const MultiplyOptions& inner);

/// K row blocks of ceil(r/K) rows each; the input is zero-padded to
/// K*ceil(r/K) rows first.
std::vector<MatrixF> partition_rows(const MatrixF& a, std::size_t k);
/// L column blocks of ceil(t/L) columns each.
std::vector<MatrixF> partition_cols(const MatrixF& b, std::size_t l);

MatrixF vstack(std::span<const MatrixF> blocks);
MatrixF hstack(std::span<const MatrixF> blocks);

/// Gauss-Jordan inverse of a square matrix; nullopt when singular.
std::optional<MatrixF> inverse(const MatrixF& m, PrimeField& field);

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

/// Fixture text format: "rows cols modulus" then row-major decimal residues.
MatrixF read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const MatrixF& m);

}  // namespace sdmm
