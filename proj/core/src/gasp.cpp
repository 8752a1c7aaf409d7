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

#include "sdmm/gasp.hpp"

#include <algorithm>
#include <istream>
#include <iterator>
#include <ostream>
#include <set>

namespace sdmm {
namespace {


std::string shape_str(const MatrixF& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_shape(const MatrixF& m, std::size_t rows, std::size_t cols, std::uint64_t modulus,
                   const char* what) {
  if (m.rows() != rows || m.cols() != cols)
    throw UsageError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", got " + shape_str(m));
  if (m.modulus() != modulus)
    throw UsageError(std::string(what) + ": matrix over F_" + std::to_string(m.modulus()) +
                     ", code over F_" + std::to_string(modulus));
}

// Evaluates sum_i coef[i] * blocks[i] with the canonical cost: one mul per
// entry per term, one add per entry per term after the first.
MatrixF evaluate_combination(std::span<const MatrixF* const> blocks,
                             std::span<const std::uint64_t> coef, PrimeField& field) {
  MatrixF acc(blocks[0]->rows(), blocks[0]->cols(), field.modulus());
  auto out = acc.data();
  {
    auto src = blocks[0]->data();
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = field.raw_mul(coef[0], src[j]);
  }
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    auto src = blocks[i]->data();
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = field.raw_add(out[j], field.raw_mul(coef[i], src[j]));
  }
  return acc;
}

bool subset_matrices_invertible(PrimeField& field, const DegreeTable& dt,
                                std::span<const std::uint64_t> points) {
  // Exponents of the random terms of f and g.
  const std::span<const std::uint64_t> ra(dt.alpha.data() + dt.K, dt.T);
  const std::span<const std::uint64_t> rb(dt.beta.data() + dt.L, dt.T);
  const std::size_t n = points.size();
  MatrixF pa(n, dt.T, field.modulus()), pb(n, dt.T, field.modulus());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < dt.T; ++t) {
      pa(i, t) = field.raw_pow(points[i], ra[t]);
      pb(i, t) = field.raw_pow(points[i], rb[t]);
    }
  }
  return for_each_subset(n, dt.T, [&](std::span<const std::size_t> subset) {
    MatrixF ma(dt.T, dt.T, field.modulus()), mb(dt.T, dt.T, field.modulus());
    for (std::size_t i = 0; i < dt.T; ++i) {
      for (std::size_t t = 0; t < dt.T; ++t) {
        ma(i, t) = pa(subset[i], t);
        mb(i, t) = pb(subset[i], t);
      }
    }
    return inverse(ma, field).has_value() && inverse(mb, field).has_value();
  });
}

}  // namespace

void GaspParams::validate() const {
  if (K == 0 || L == 0 || T == 0) throw UsageError("GASP parameters K, L, T must be >= 1");
  if (r == 0 || s == 0 || t == 0) throw UsageError("matrix dimensions r, s, t must be >= 1");
}

ExponentVectors gasp_exponents(std::size_t K, std::size_t L, std::size_t T) {
  if (K == 0 || L == 0 || T == 0) throw UsageError("gasp_exponents: K, L, T must be >= 1");
  ExponentVectors ev;
  const std::uint64_t kl = static_cast<std::uint64_t>(K) * L;
  for (std::size_t k = 0; k < K; ++k) ev.alpha.push_back(k);
  for (std::size_t t = 0; t < T; ++t) ev.alpha.push_back(kl + t);
  for (std::size_t l = 0; l < L; ++l) ev.beta.push_back(static_cast<std::uint64_t>(K) * l);
  for (std::size_t t = 0; t < T; ++t) ev.beta.push_back(kl + static_cast<std::uint64_t>(K) * t);
  return ev;
}

std::uint64_t gasp_max_degree(std::size_t K, std::size_t L, std::size_t T) {
  return 2 * static_cast<std::uint64_t>(K) * L + static_cast<std::uint64_t>(T - 1) * (K + 1);
}

std::size_t DegreeTable::exponent_index(std::uint64_t e) const {
  auto it = std::lower_bound(exponents.begin(), exponents.end(), e);
  if (it == exponents.end() || *it != e)
    throw UsageError("exponent " + std::to_string(e) + " is not in the degree table");
  return static_cast<std::size_t>(it - exponents.begin());
}

DegreeTable build_degree_table(std::span<const std::uint64_t> alpha,
                               std::span<const std::uint64_t> beta, std::size_t T) {
  if (T == 0 || alpha.size() <= T || beta.size() <= T)
    throw UsageError("build_degree_table: need |alpha| = K+T and |beta| = L+T with K, L, T >= 1");
  DegreeTable dt;
  dt.T = T;
  dt.K = alpha.size() - T;
  dt.L = beta.size() - T;
  dt.alpha.assign(alpha.begin(), alpha.end());
  dt.beta.assign(beta.begin(), beta.end());
  std::set<std::uint64_t> distinct;
  dt.table.assign(alpha.size(), std::vector<std::uint64_t>(beta.size()));
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (std::size_t j = 0; j < beta.size(); ++j) {
      dt.table[i][j] = alpha[i] + beta[j];
      distinct.insert(dt.table[i][j]);
    }
  }
  dt.exponents.assign(distinct.begin(), distinct.end());

  const std::uint64_t kl = static_cast<std::uint64_t>(dt.K) * dt.L;
  std::vector<int> seen(kl, 0);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (std::size_t j = 0; j < beta.size(); ++j) {
      const std::uint64_t e = dt.table[i][j];
      const bool useful_cell = i < dt.K && j < dt.L;
      if (useful_cell && e >= kl)
        throw ConstructionError("useful product A_" + std::to_string(i) + "B_" + std::to_string(j) +
                                " has exponent " + std::to_string(e) + " outside 0.." +
                                std::to_string(kl - 1));
      if (e < kl) {
        if (!useful_cell)
          throw ConstructionError("exponent " + std::to_string(e) +
                                  " of a useful product collides with cell (" + std::to_string(i) +
                                  "," + std::to_string(j) + ")");
        if (++seen[e] > 1)
          throw ConstructionError("two useful products share exponent " + std::to_string(e));
      }
    }
  }
  const std::size_t n = dt.N();
  if (n < kl || n > alpha.size() * beta.size())
    throw ConstructionError("server count N = " + std::to_string(n) + " outside [KL, (K+T)(L+T)]");
  return dt;
}

FieldSizeBound required_field_size(const DegreeTable& dt, std::size_t T) {
  FieldSizeBound b;
  b.N = dt.N();
  b.W = dt.max_entry();
  const u128 cap = kMaxModulus;
  u128 j = 0;
  for (auto e : dt.exponents) j += e;
  if (j > cap) throw ParameterTooLargeError("exponent sum J exceeds the 62-bit budget");
  b.J = static_cast<std::uint64_t>(j);
  // C(N, T) by the multiplicative formula; each partial product is an exact
  // binomial coefficient.
  u128 c = 1;
  if (T > b.N) {
    c = 0;
  } else {
    const std::size_t k = std::min(T, b.N - T);
    for (std::size_t i = 1; i <= k; ++i) {
      c = c * (b.N - k + i) / i;
      if (c > cap)
        throw ParameterTooLargeError("C(" + std::to_string(b.N) + "," + std::to_string(T) +
                                     ") exceeds the 62-bit budget");
    }
  }
  b.binom = static_cast<std::uint64_t>(c);
  const u128 bound = (2 * c + 1) * j;
  if (bound >= cap)
    throw ParameterTooLargeError("field-size bound (2 C(N,T) + 1) J exceeds the 62-bit modulus cap");
  b.bound = static_cast<std::uint64_t>(bound);
  return b;
}

std::optional<MatrixF> verify_eval_points(PrimeField& field, const DegreeTable& dt,
                                          std::span<const std::uint64_t> points) {
  if (points.size() != dt.N())
    throw UsageError("expected " + std::to_string(dt.N()) + " evaluation points, got " +
                     std::to_string(points.size()));
  std::set<std::uint64_t> uniq;
  for (auto a : points) {
    if (a >= field.modulus()) throw UsageError("evaluation point not reduced mod p");
    if (a == 0) throw UsageError("evaluation points must be nonzero");
    if (!uniq.insert(a).second)
      throw UsageError("duplicate evaluation point " + std::to_string(a));
  }
  if (!subset_matrices_invertible(field, dt, points)) return std::nullopt;
  const std::size_t n = dt.N();
  MatrixF v(n, n, field.modulus());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) v(i, j) = field.raw_pow(points[i], dt.exponents[j]);
  }
  return inverse(v, field);
}

EvalPoints choose_eval_points(PrimeField& field, const DegreeTable& dt, SeededRandomSource& rng,
                              std::size_t max_retries) {
  const std::size_t n = dt.N();
  if (field.modulus() - 1 < n)
    throw PointSearchError("F_" + std::to_string(field.modulus()) + " has fewer than N = " +
                           std::to_string(n) + " nonzero elements");
  EvalPoints out;
  for (std::size_t attempt = 1; attempt <= max_retries; ++attempt) {
    std::vector<std::uint64_t> pts;
    std::set<std::uint64_t> used;
    while (pts.size() < n) {
      const std::uint64_t a = field.raw_sample(rng);
      if (a != 0 && used.insert(a).second) pts.push_back(a);
    }
    if (auto inv = verify_eval_points(field, dt, pts)) {
      out.points = std::move(pts);
      out.interp_inverse = std::move(*inv);
      out.attempts = attempt;
      return out;
    }
  }
  throw PointSearchError("no valid evaluation points after " + std::to_string(max_retries) +
                         " attempts over F_" + std::to_string(field.modulus()) + " (K=" +
                         std::to_string(dt.K) + ", L=" + std::to_string(dt.L) +
                         ", T=" + std::to_string(dt.T) + ", N=" + std::to_string(n) + ")");
}

namespace {

// Validates parameters and exponents, builds the table and resolves the
// modulus against the sufficiency bound.
struct Prepared {
  DegreeTable table;
  std::uint64_t modulus;
};

Prepared prepare(const GaspParams& params, const ExponentVectors& exps, std::uint64_t modulus,
                 const CodeOptions& opts) {
  params.validate();
  if (exps.alpha.size() != params.K + params.T || exps.beta.size() != params.L + params.T)
    throw UsageError("exponent vectors do not match K+T / L+T");
  Prepared p{build_degree_table(exps.alpha, exps.beta, params.T), modulus};
  if (params.T >= p.table.N()) throw ConstructionError("collusion threshold T must be below N");
  const auto bound = required_field_size(p.table, params.T);
  if (p.modulus == 0) p.modulus = next_prime_above(bound.bound);
  if (p.modulus <= bound.bound && !opts.allow_small_field)
    throw UsageError("modulus " + std::to_string(p.modulus) +
                     " is not above the sufficient field size " + std::to_string(bound.bound) +
                     " (use --allow-small-field to override)");
  return p;
}

}  // namespace

std::uint64_t GaspCode::auto_modulus(const GaspParams& params) {
  params.validate();
  const auto ev = gasp_exponents(params.K, params.L, params.T);
  const auto dt = build_degree_table(ev.alpha, ev.beta, params.T);
  return next_prime_above(required_field_size(dt, params.T).bound);
}

GaspCode GaspCode::assemble(const GaspParams& params, DegreeTable table, std::uint64_t modulus,
                            std::vector<std::uint64_t> points, MatrixF interp_inverse,
                            PrimeField& setup) {
  GaspCode code;
  code.params_ = params;
  code.table_ = std::move(table);
  code.modulus_ = modulus;
  code.points_ = std::move(points);
  code.interp_inverse_ = std::move(interp_inverse);

  const std::size_t n = code.points_.size();
  const std::uint64_t before = setup.counter().muls;
  code.alpha_pow_ = MatrixF(n, code.table_.alpha.size(), modulus);
  code.beta_pow_ = MatrixF(n, code.table_.beta.size(), modulus);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t a = code.points_[i] % modulus;
    for (std::size_t k = 0; k < code.table_.alpha.size(); ++k)
      code.alpha_pow_(i, k) = setup.raw_pow(a, code.table_.alpha[k]);
    for (std::size_t l = 0; l < code.table_.beta.size(); ++l)
      code.beta_pow_(i, l) = setup.raw_pow(a, code.table_.beta[l]);
  }
  code.power_table_muls_ = setup.counter().muls - before;
  code.setup_ops_ = setup.counter();
  return code;
}

GaspCode GaspCode::construct(const GaspParams& params, std::uint64_t modulus,
                             SeededRandomSource& rng, const CodeOptions& opts) {
  auto prep = prepare(params, gasp_exponents(params.K, params.L, params.T), modulus, opts);
  PrimeField setup(prep.modulus);
  auto ep = choose_eval_points(setup, prep.table, rng, opts.max_point_retries);
  GaspCode code = assemble(params, std::move(prep.table), prep.modulus, std::move(ep.points),
                           std::move(ep.interp_inverse), setup);
  code.attempts_ = ep.attempts;
  return code;
}

GaspCode GaspCode::from_exponents(const GaspParams& params, const ExponentVectors& exps,
                                  std::uint64_t modulus, std::vector<std::uint64_t> points,
                                  const CodeOptions& opts) {
  auto prep = prepare(params, exps, modulus, opts);
  PrimeField setup(prep.modulus);
  auto inv = verify_eval_points(setup, prep.table, points);
  if (!inv)
    throw ConstructionError("evaluation points fail decodability or T-privacy verification over F_" +
                            std::to_string(prep.modulus));
  return assemble(params, std::move(prep.table), prep.modulus, std::move(points), std::move(*inv),
                  setup);
}

GaspCode GaspCode::with_points(const GaspParams& params, std::uint64_t modulus,
                               std::vector<std::uint64_t> points, const CodeOptions& opts) {
  return from_exponents(params, gasp_exponents(params.K, params.L, params.T), modulus,
                        std::move(points), opts);
}

GaspCode GaspCode::unverified(const GaspParams& params, std::uint64_t modulus,
                              std::vector<std::uint64_t> points) {
  params.validate();
  const auto exps = gasp_exponents(params.K, params.L, params.T);
  DegreeTable table = build_degree_table(exps.alpha, exps.beta, params.T);
  PrimeField setup(modulus);
  MatrixF inv;
  if (points.size() == table.N()) {
    const std::size_t n = table.N();
    MatrixF v(n, n, modulus);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) v(i, j) = setup.raw_pow(points[i] % modulus, table.exponents[j]);
    if (auto maybe = inverse(v, setup)) inv = std::move(*maybe);
  }
  return assemble(params, std::move(table), modulus, std::move(points), std::move(inv), setup);
}

EncodingRandomness draw_randomness(const GaspCode& code, PrimeField& field,
                                   SeededRandomSource& rng) {
  const auto& p = code.params();
  EncodingRandomness out;
  for (std::size_t i = 0; i < p.T; ++i) out.r.push_back(MatrixF::random(p.block_rows(), p.s, field, rng));
  for (std::size_t i = 0; i < p.T; ++i) out.s.push_back(MatrixF::random(p.s, p.block_cols(), field, rng));
  return out;
}

std::vector<SharePair> gasp_encode(const MatrixF& a, const MatrixF& b, const GaspCode& code,
                                   PrimeField& field, const EncodingRandomness& randomness) {
  const auto& p = code.params();
  const std::uint64_t q = code.modulus();
  if (field.modulus() != q) throw UsageError("gasp_encode: field does not match code");
  require_shape(a, p.r, p.s, q, "gasp_encode A");
  require_shape(b, p.s, p.t, q, "gasp_encode B");
  if (randomness.r.size() != p.T || randomness.s.size() != p.T)
    throw UsageError("gasp_encode: need exactly T random blocks per polynomial");
  for (const auto& m : randomness.r) require_shape(m, p.block_rows(), p.s, q, "gasp_encode R");
  for (const auto& m : randomness.s) require_shape(m, p.s, p.block_cols(), q, "gasp_encode S");

  const auto a_blocks = partition_rows(a, p.K);
  const auto b_blocks = partition_cols(b, p.L);
  std::vector<const MatrixF*> f_terms, g_terms;
  for (const auto& m : a_blocks) f_terms.push_back(&m);
  for (const auto& m : randomness.r) f_terms.push_back(&m);
  for (const auto& m : b_blocks) g_terms.push_back(&m);
  for (const auto& m : randomness.s) g_terms.push_back(&m);

  const auto& ap = code.alpha_powers();
  const auto& bp = code.beta_powers();
  std::vector<SharePair> shares;
  shares.reserve(code.N());
  for (std::size_t n = 0; n < code.N(); ++n) {
    const std::span<const std::uint64_t> fc(ap.data().data() + n * ap.cols(), ap.cols());
    const std::span<const std::uint64_t> gc(bp.data().data() + n * bp.cols(), bp.cols());
    shares.push_back({evaluate_combination(f_terms, fc, field), evaluate_combination(g_terms, gc, field)});
  }
  return shares;
}

std::vector<SharePair> gasp_encode(const MatrixF& a, const MatrixF& b, const GaspCode& code,
                                   PrimeField& field, SeededRandomSource& rng) {
  return gasp_encode(a, b, code, field, draw_randomness(code, field, rng));
}

std::string to_string(ServerAlgorithm a) {
  return a == ServerAlgorithm::standard ? "standard" : "strassen-block";
}

ServerAlgorithm parse_server_algorithm(const std::string& name) {
  if (name == "standard") return ServerAlgorithm::standard;
  if (name == "strassen-block" || name == "strassen") return ServerAlgorithm::strassen_block;
  throw UsageError("unknown server algorithm '" + name + "' (standard | strassen-block)");
}

MatrixF server_multiply(const MatrixF& f_share, const MatrixF& g_share, PrimeField& field,
                        ServerAlgorithm algorithm, std::size_t strassen_cutoff) {
  if (f_share.cols() != g_share.rows())
    throw UsageError("server_multiply: shape mismatch " + shape_str(f_share) + " * " + shape_str(g_share));
  if (algorithm == ServerAlgorithm::standard) return mat_mul_standard(f_share, g_share, field);
  const std::size_t side = std::max<std::size_t>({f_share.rows(), g_share.cols(), 1});
  const std::size_t k = std::max<std::size_t>(ceil_div(f_share.cols(), side), 1);
  return block_split_multiply(f_share, g_share, k, field,
                              {MultiplyAlgorithm::strassen, strassen_cutoff});
}

MatrixF gasp_decode(std::span<const MatrixF> h_shares, const GaspCode& code, PrimeField& field) {
  const auto& p = code.params();
  const std::uint64_t q = code.modulus();
  if (field.modulus() != q) throw UsageError("gasp_decode: field does not match code");
  if (h_shares.size() != code.N())
    throw UsageError("gasp_decode: expected " + std::to_string(code.N()) + " shares, got " +
                     std::to_string(h_shares.size()));
  if (code.interp_inverse().empty()) throw UsageError("gasp_decode: code has no interpolation inverse");
  const std::size_t bh = p.block_rows(), bw = p.block_cols();
  for (const auto& h : h_shares) require_shape(h, bh, bw, q, "gasp_decode share");

  std::vector<const MatrixF*> terms;
  for (const auto& h : h_shares) terms.push_back(&h);
  const auto& inv = code.interp_inverse();
  const auto& dt = code.table();
  MatrixF product(p.padded_r(), p.padded_t(), q);
  for (std::size_t k = 0; k < p.K; ++k) {
    for (std::size_t l = 0; l < p.L; ++l) {
      const std::size_t row = dt.exponent_index(dt.useful_exponent(k, l));
      const std::span<const std::uint64_t> coef(inv.data().data() + row * inv.cols(), inv.cols());
      product.paste(evaluate_combination(terms, coef, field), k * bh, l * bw);
    }
  }
  return product.cropped(p.r, p.t);
}

std::vector<std::uint64_t> code_descriptor_tokens(const GaspCode& code) {
  const auto& p = code.params();
  std::vector<std::uint64_t> t = {p.K, p.L, p.T, p.r, p.s, p.t, code.modulus()};
  const auto& dt = code.table();
  t.insert(t.end(), dt.alpha.begin(), dt.alpha.end());
  t.insert(t.end(), dt.beta.begin(), dt.beta.end());
  t.insert(t.end(), code.points().begin(), code.points().end());
  return t;
}

GaspCode code_from_descriptor_tokens(std::span<const std::uint64_t> tokens, const CodeOptions& opts) {
  if (tokens.size() < 7) throw UsageError("code descriptor: truncated header");
  GaspParams p{tokens[0], tokens[1], tokens[2], tokens[3], tokens[4], tokens[5]};
  p.validate();
  const std::uint64_t modulus = tokens[6];
  const std::size_t na = p.K + p.T, nb = p.L + p.T;
  if (tokens.size() < 7 + na + nb) throw UsageError("code descriptor: truncated exponent vectors");
  ExponentVectors ev;
  ev.alpha.assign(tokens.begin() + 7, tokens.begin() + 7 + static_cast<std::ptrdiff_t>(na));
  ev.beta.assign(tokens.begin() + 7 + static_cast<std::ptrdiff_t>(na),
                 tokens.begin() + 7 + static_cast<std::ptrdiff_t>(na + nb));
  std::vector<std::uint64_t> pts(tokens.begin() + 7 + static_cast<std::ptrdiff_t>(na + nb), tokens.end());
  return GaspCode::from_exponents(p, ev, modulus, std::move(pts), opts);
}

void write_code_descriptor(std::ostream& out, const GaspCode& code) {
  for (auto v : code_descriptor_tokens(code)) out << v << '\n';
}

GaspCode read_code_descriptor(std::istream& in, const CodeOptions& opts) {
  std::vector<std::uint64_t> tokens{std::istream_iterator<std::uint64_t>(in),
                                    std::istream_iterator<std::uint64_t>()};
  if (!in.eof()) throw UsageError("code descriptor: non-numeric token");
  return code_from_descriptor_tokens(tokens, opts);
}

}  // namespace sdmm
