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

#include "sdmm/poq.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace sdmm::poq {
namespace {

std::uint64_t checked_pow(std::uint64_t q, std::uint64_t e) {
  u128 r = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    r *= q;
    if (r > UINT64_MAX)
      throw ParameterTooLargeError("file count q^{s(r+t)} = " + std::to_string(q) + "^" +
                                   std::to_string(e) + " overflows 64 bits");
  }
  return static_cast<std::uint64_t>(r);
}

}  // namespace

std::uint64_t Shape::file_count() const { return checked_pow(q, s * (r + t)); }

std::uint64_t index_of(const MatrixF& a, const MatrixF& b) {
  if (a.cols() != b.rows()) throw UsageError("index_of: inner dimensions differ");
  if (a.modulus() != b.modulus()) throw UsageError("index_of: matrices over different fields");
  const std::uint64_t q = a.modulus();
  // Fails loudly if the index space itself does not fit.
  (void)Shape{q, a.rows(), a.cols(), b.cols()}.file_count();
  std::uint64_t idx = 0;
  for (auto v : a.data()) idx = idx * q + v;
  for (auto v : b.data()) idx = idx * q + v;
  return idx;
}

std::pair<MatrixF, MatrixF> pair_at(std::uint64_t index, const Shape& shape) {
  const std::uint64_t m = shape.file_count();
  if (index >= m) throw UsageError("pair index " + std::to_string(index) + " >= M = " + std::to_string(m));
  MatrixF a(shape.r, shape.s, shape.q), b(shape.s, shape.t, shape.q);
  auto bd = b.data();
  for (std::size_t i = bd.size(); i-- > 0;) {
    bd[i] = index % shape.q;
    index /= shape.q;
  }
  auto ad = a.data();
  for (std::size_t i = ad.size(); i-- > 0;) {
    ad[i] = index % shape.q;
    index /= shape.q;
  }
  return {std::move(a), std::move(b)};
}

OracleDatabase::OracleDatabase(Shape shape, std::vector<std::uint64_t> files)
    : shape_(shape), count_(shape.file_count()), files_(std::move(files)) {
  if (files_.size() != count_ * shape_.file_len())
    throw UsageError("oracle database: expected " + std::to_string(count_ * shape_.file_len()) +
                     " elements, got " + std::to_string(files_.size()));
}

std::span<const std::uint64_t> OracleDatabase::file(std::uint64_t i) const {
  if (i >= count_) throw UsageError("file index out of range");
  return std::span<const std::uint64_t>(files_).subspan(i * file_len(), file_len());
}

OracleDatabase build_database(PrimeField& field, std::size_t r, std::size_t s, std::size_t t,
                              std::uint64_t element_cap) {
  if (r == 0 || s == 0 || t == 0) throw UsageError("build_database: dimensions must be >= 1");
  const Shape shape{field.modulus(), r, s, t};
  const std::uint64_t m = shape.file_count();
  const u128 elems = static_cast<u128>(m) * shape.file_len();
  if (elems > element_cap)
    throw ParameterTooLargeError("oracle database with M = " + std::to_string(m) + " files of length " +
                                 std::to_string(shape.file_len()) + " exceeds the cap of " +
                                 std::to_string(element_cap) + " elements");
  std::vector<std::uint64_t> files;
  files.reserve(static_cast<std::size_t>(elems));
  for (std::uint64_t i = 0; i < m; ++i) {
    auto [a, b] = pair_at(i, shape);
    const MatrixF prod = mat_mul_standard(a, b, field);
    files.insert(files.end(), prod.data().begin(), prod.data().end());
  }
  return OracleDatabase(shape, std::move(files));
}

QueryPair pir_query_with_mask(std::uint64_t index, std::uint64_t file_count, std::size_t file_len,
                              PrimeField& field, std::vector<std::uint64_t> mask) {
  if (index >= file_count)
    throw UsageError("pir_query: index " + std::to_string(index) + " out of range [0, " +
                     std::to_string(file_count) + ")");
  if (mask.size() != file_count * file_len) throw UsageError("pir_query: mask length != M*rt");
  QueryPair qp;
  qp.server2 = mask;
  for (std::size_t j = 0; j < file_len; ++j) {
    auto& v = qp.server2[index * file_len + j];
    v = field.raw_add(v, 1 % field.modulus());
  }
  qp.server1 = std::move(mask);
  return qp;
}

QueryPair pir_query(std::uint64_t index, std::uint64_t file_count, std::size_t file_len,
                    PrimeField& field, SeededRandomSource& rng) {
  if (index >= file_count)
    throw UsageError("pir_query: index " + std::to_string(index) + " out of range [0, " +
                     std::to_string(file_count) + ")");
  std::vector<std::uint64_t> mask(file_count * file_len);
  for (auto& v : mask) v = field.raw_sample(rng);
  return pir_query_with_mask(index, file_count, file_len, field, std::move(mask));
}

std::vector<std::uint64_t> pir_respond(const OracleDatabase& db, std::span<const std::uint64_t> query,
                                       PrimeField& field) {
  const std::uint64_t m = db.file_count();
  const std::size_t rt = db.file_len();
  if (query.size() != m * rt)
    throw UsageError("pir_respond: query length " + std::to_string(query.size()) + " != M*rt = " +
                     std::to_string(m * rt));
  if (db.shape().q != field.modulus()) throw UsageError("pir_respond: field mismatch");
  const auto d = db.flat();
  std::vector<std::uint64_t> out(rt, 0);
  for (std::size_t j = 0; j < rt; ++j) {
    std::uint64_t acc = field.raw_mul(d[j], query[j]);
    for (std::uint64_t i = 1; i < m; ++i)
      acc = field.raw_add(acc, field.raw_mul(d[i * rt + j], query[i * rt + j]));
    out[j] = acc;
  }
  return out;
}

MatrixF pir_decode(std::span<const std::uint64_t> resp1, std::span<const std::uint64_t> resp2,
                   std::size_t r, std::size_t t, PrimeField& field) {
  if (resp1.size() != r * t || resp2.size() != r * t)
    throw UsageError("pir_decode: responses must both have length rt = " + std::to_string(r * t));
  MatrixF out(r, t, field.modulus());
  auto o = out.data();
  for (std::size_t j = 0; j < o.size(); ++j) o[j] = field.raw_sub(resp2[j], resp1[j]);
  return out;
}

double download_rate(std::size_t servers, std::size_t colluders) {
  if (servers == 0 || colluders >= servers) throw UsageError("download_rate: need N > T");
  return static_cast<double>(servers - colluders) / static_cast<double>(servers);
}

void write_database(std::ostream& out, const OracleDatabase& db) {
  const auto& sh = db.shape();
  out << sh.q << ' ' << sh.r << ' ' << sh.s << ' ' << sh.t << ' ' << db.file_count() << '\n';
  for (std::uint64_t i = 0; i < db.file_count(); ++i) {
    const auto f = db.file(i);
    for (std::size_t j = 0; j < f.size(); ++j) out << (j ? " " : "") << f[j];
    out << '\n';
  }
}

OracleDatabase read_database(std::istream& in) {
  Shape sh;
  std::uint64_t m = 0;
  if (!(in >> sh.q >> sh.r >> sh.s >> sh.t >> m)) throw UsageError("database dump: bad header");
  if (m != sh.file_count()) throw UsageError("database dump: M does not equal q^{s(r+t)}");
  std::vector<std::uint64_t> files(m * sh.file_len());
  for (auto& v : files) {
    if (!(in >> v)) throw UsageError("database dump: truncated");
    if (v >= sh.q) throw UsageError("database dump: residue out of range");
  }
  return OracleDatabase(sh, std::move(files));
}

}  // namespace sdmm::poq
