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

#include "sdmm/matrix.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

namespace sdmm {
namespace {

void require_same_field(const MatrixF& m, const PrimeField& field, const char* what) {
  if (m.modulus() != field.modulus())
    throw UsageError(std::string(what) + ": matrix over F_" + std::to_string(m.modulus()) +
                     " used with F_" + std::to_string(field.modulus()));
}

MatrixF add_counted(const MatrixF& a, const MatrixF& b, PrimeField& field) {
  MatrixF out(a.rows(), a.cols(), a.modulus());
  auto x = a.data();
  auto y = b.data();
  auto z = out.data();
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = field.raw_add(x[i], y[i]);
  return out;
}

MatrixF sub_counted(const MatrixF& a, const MatrixF& b, PrimeField& field) {
  MatrixF out(a.rows(), a.cols(), a.modulus());
  auto x = a.data();
  auto y = b.data();
  auto z = out.data();
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = field.raw_sub(x[i], y[i]);
  return out;
}

void accumulate(MatrixF& acc, const MatrixF& x, PrimeField& field) {
  auto z = acc.data();
  auto y = x.data();
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = field.raw_add(z[i], y[i]);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// a, b square with power-of-two side.
MatrixF strassen_rec(const MatrixF& a, const MatrixF& b, PrimeField& field, std::size_t cutoff) {
  const std::size_t n = a.rows();
  if (n <= cutoff || n == 1) return mat_mul_standard(a, b, field);
  const std::size_t h = n / 2;

  const MatrixF a11 = a.block(0, 0, h, h), a12 = a.block(0, h, h, h);
  const MatrixF a21 = a.block(h, 0, h, h), a22 = a.block(h, h, h, h);
  const MatrixF b11 = b.block(0, 0, h, h), b12 = b.block(0, h, h, h);
  const MatrixF b21 = b.block(h, 0, h, h), b22 = b.block(h, h, h, h);

  const MatrixF m1 = strassen_rec(add_counted(a11, a22, field), add_counted(b11, b22, field), field, cutoff);
  const MatrixF m2 = strassen_rec(add_counted(a21, a22, field), b11, field, cutoff);
  const MatrixF m3 = strassen_rec(a11, sub_counted(b12, b22, field), field, cutoff);
  const MatrixF m4 = strassen_rec(a22, sub_counted(b21, b11, field), field, cutoff);
  const MatrixF m5 = strassen_rec(add_counted(a11, a12, field), b22, field, cutoff);
  const MatrixF m6 = strassen_rec(sub_counted(a21, a11, field), add_counted(b11, b12, field), field, cutoff);
  const MatrixF m7 = strassen_rec(sub_counted(a12, a22, field), add_counted(b21, b22, field), field, cutoff);

  MatrixF c11 = add_counted(sub_counted(add_counted(m1, m4, field), m5, field), m7, field);
  MatrixF c12 = add_counted(m3, m5, field);
  MatrixF c21 = add_counted(m2, m4, field);
  MatrixF c22 = add_counted(add_counted(sub_counted(m1, m2, field), m3, field), m6, field);

  MatrixF c(n, n, a.modulus());
  c.paste(c11, 0, 0);
  c.paste(c12, 0, h);
  c.paste(c21, h, 0);
  c.paste(c22, h, h);
  return c;
}

}  // namespace

MatrixF::MatrixF(std::size_t rows, std::size_t cols, std::uint64_t modulus)
    : rows_(rows), cols_(cols), modulus_(modulus), data_(rows * cols, 0) {}

MatrixF::MatrixF(std::size_t rows, std::size_t cols, std::uint64_t modulus,
                 std::vector<std::uint64_t> residues)
    : rows_(rows), cols_(cols), modulus_(modulus), data_(std::move(residues)) {
  if (data_.size() != rows * cols)
    throw UsageError("matrix data length " + std::to_string(data_.size()) + " != " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  for (auto& v : data_) {
    if (v >= modulus_) throw UsageError("matrix entry " + std::to_string(v) + " not reduced mod " +
                                        std::to_string(modulus_));
  }
}

MatrixF MatrixF::identity(std::size_t n, std::uint64_t modulus) {
  MatrixF m(n, n, modulus);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1 % modulus;
  return m;
}

MatrixF MatrixF::random(std::size_t rows, std::size_t cols, PrimeField& field,
                        SeededRandomSource& rng) {
  MatrixF m(rows, cols, field.modulus());
  for (auto& v : m.data_) v = field.raw_sample(rng);
  return m;
}

void MatrixF::set(std::size_t i, std::size_t j, FieldElem v) {
  if (v.modulus != modulus_ || v.residue >= modulus_)
    throw UsageError("element does not belong to the matrix field");
  (*this)(i, j) = v.residue;
}

MatrixF MatrixF::block(std::size_t r0, std::size_t c0, std::size_t h, std::size_t w) const {
  MatrixF out(h, w, modulus_);
  for (std::size_t i = 0; i < h && r0 + i < rows_; ++i) {
    const std::size_t ncopy = c0 < cols_ ? std::min(w, cols_ - c0) : 0;
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>((r0 + i) * cols_ + c0), ncopy,
                out.data_.begin() + static_cast<std::ptrdiff_t>(i * w));
  }
  return out;
}

void MatrixF::paste(const MatrixF& src, std::size_t r0, std::size_t c0) {
  for (std::size_t i = 0; i < src.rows_ && r0 + i < rows_; ++i) {
    for (std::size_t j = 0; j < src.cols_ && c0 + j < cols_; ++j) {
      (*this)(r0 + i, c0 + j) = src(i, j);
    }
  }
}

MatrixF MatrixF::cropped(std::size_t rows, std::size_t cols) const {
  if (rows > rows_ || cols > cols_) throw UsageError("crop larger than matrix");
  return block(0, 0, rows, cols);
}

bool MatrixF::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](std::uint64_t v) { return v == 0; });
}

MatrixF mat_mul_standard(const MatrixF& a, const MatrixF& b, PrimeField& field) {
  if (a.cols() != b.rows())
    throw UsageError("mat_mul: shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  require_same_field(a, field, "mat_mul");
  require_same_field(b, field, "mat_mul");
  const std::size_t r = a.rows(), s = a.cols(), t = b.cols();
  MatrixF c(r, t, field.modulus());
  if (s == 0) return c;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < t; ++j) {
      std::uint64_t acc = field.raw_mul(a(i, 0), b(0, j));
      for (std::size_t k = 1; k < s; ++k) acc = field.raw_add(acc, field.raw_mul(a(i, k), b(k, j)));
      c(i, j) = acc;
    }
  }
  return c;
}

MatrixF mat_mul_strassen(const MatrixF& a, const MatrixF& b, PrimeField& field,
                         std::size_t cutoff) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.cols() != b.rows())
    throw UsageError("mat_mul_strassen: inputs must be square and of equal side");
  require_same_field(a, field, "mat_mul_strassen");
  require_same_field(b, field, "mat_mul_strassen");
  const std::size_t n = a.rows();
  if (n == 0) return MatrixF(0, 0, field.modulus());
  const std::size_t m = next_pow2(n);
  if (m == n) return strassen_rec(a, b, field, std::max<std::size_t>(cutoff, 1));
  return strassen_rec(a.padded(m, m), b.padded(m, m), field, std::max<std::size_t>(cutoff, 1))
      .cropped(n, n);
}

MatrixF multiply(const MatrixF& a, const MatrixF& b, PrimeField& field,
                 const MultiplyOptions& opts) {
  if (opts.algorithm == MultiplyAlgorithm::standard) return mat_mul_standard(a, b, field);
  if (a.rows() == a.cols() && b.rows() == b.cols() && a.cols() == b.rows())
    return mat_mul_strassen(a, b, field, opts.strassen_cutoff);
  if (a.cols() != b.rows()) throw UsageError("multiply: shape mismatch");
  const std::size_t d = std::max({a.rows(), a.cols(), b.cols()});
  return mat_mul_strassen(a.padded(d, d), b.padded(d, d), field, opts.strassen_cutoff)
      .cropped(a.rows(), b.cols());
}

MatrixF block_split_multiply(const MatrixF& f, const MatrixF& g, std::size_t k,
                             PrimeField& field, const MultiplyOptions& inner) {
  if (k == 0) throw UsageError("block_split_multiply: k must be positive");
  if (f.cols() != g.rows()) throw UsageError("block_split_multiply: shape mismatch");
  const std::size_t w = ceil_div(f.cols(), k);
  MatrixF acc;
  for (std::size_t i = 0; i < k; ++i) {
    MatrixF part = multiply(f.block(0, i * w, f.rows(), w), g.block(i * w, 0, w, g.cols()),
                            field, inner);
    if (i == 0) {
      acc = std::move(part);
    } else {
      accumulate(acc, part, field);
    }
  }
  return acc;
}

std::vector<MatrixF> partition_rows(const MatrixF& a, std::size_t k) {
  if (k == 0) throw UsageError("partition_rows: K must be positive");
  const std::size_t h = ceil_div(a.rows(), k);
  std::vector<MatrixF> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(a.block(i * h, 0, h, a.cols()));
  return out;
}

std::vector<MatrixF> partition_cols(const MatrixF& b, std::size_t l) {
  if (l == 0) throw UsageError("partition_cols: L must be positive");
  const std::size_t w = ceil_div(b.cols(), l);
  std::vector<MatrixF> out;
  out.reserve(l);
  for (std::size_t j = 0; j < l; ++j) out.push_back(b.block(0, j * w, b.rows(), w));
  return out;
}

MatrixF vstack(std::span<const MatrixF> blocks) {
  if (blocks.empty()) return {};
  std::size_t rows = 0;
  for (const auto& b : blocks) {
    if (b.cols() != blocks[0].cols()) throw UsageError("vstack: column mismatch");
    rows += b.rows();
  }
  MatrixF out(rows, blocks[0].cols(), blocks[0].modulus());
  std::size_t r = 0;
  for (const auto& b : blocks) {
    out.paste(b, r, 0);
    r += b.rows();
  }
  return out;
}

MatrixF hstack(std::span<const MatrixF> blocks) {
  if (blocks.empty()) return {};
  std::size_t cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != blocks[0].rows()) throw UsageError("hstack: row mismatch");
    cols += b.cols();
  }
  MatrixF out(blocks[0].rows(), cols, blocks[0].modulus());
  std::size_t c = 0;
  for (const auto& b : blocks) {
    out.paste(b, 0, c);
    c += b.cols();
  }
  return out;
}

std::optional<MatrixF> inverse(const MatrixF& m, PrimeField& field) {
  if (m.rows() != m.cols()) throw UsageError("inverse: matrix is not square");
  require_same_field(m, field, "inverse");
  const std::size_t n = m.rows();
  MatrixF a = m;
  MatrixF inv = MatrixF::identity(n, m.modulus());
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a(pivot, col) == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(pivot, j), a(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    const std::uint64_t scale = field.raw_inv(a(col, col));
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) = field.raw_mul(a(col, j), scale);
      inv(col, j) = field.raw_mul(inv(col, j), scale);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a(i, col) == 0) continue;
      const std::uint64_t factor = a(i, col);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) = field.raw_sub(a(i, j), field.raw_mul(factor, a(col, j)));
        inv(i, j) = field.raw_sub(inv(i, j), field.raw_mul(factor, inv(col, j)));
      }
    }
  }
  return inv;
}

MatrixF read_matrix(std::istream& in) {
  std::size_t rows = 0, cols = 0;
  std::uint64_t modulus = 0;
  if (!(in >> rows >> cols >> modulus)) throw UsageError("matrix file: bad header");
  if (modulus > kMaxModulus || !is_prime(modulus))
    throw UsageError("matrix file: modulus " + std::to_string(modulus) + " is not a supported prime");
  std::vector<std::uint64_t> v(rows * cols);
  for (auto& x : v) {
    if (!(in >> x)) throw UsageError("matrix file: truncated data");
  }
  return MatrixF(rows, cols, modulus, std::move(v));
}

void write_matrix(std::ostream& out, const MatrixF& m) {
  out << m.rows() << ' ' << m.cols() << ' ' << m.modulus() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
}

}  // namespace sdmm
