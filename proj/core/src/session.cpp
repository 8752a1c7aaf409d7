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

#include "sdmm/session.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

namespace sdmm {
namespace {

constexpr std::uint64_t kGaspTag = 1;
constexpr std::uint64_t kPoqTag = 2;

enum Purpose : std::uint64_t { kInputs = 1, kCodePoints = 2, kEncodeRandomness = 3, kPirMask = 4 };

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point start) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

std::vector<std::uint64_t> stats_payload(const PhaseCost& c) {
  return {c.ops.adds, c.ops.muls, c.ops.invs, c.ops.rand_draws, c.wall_ns};
}

PhaseCost phase_from(std::span<const std::uint64_t> v) {
  PhaseCost c;
  c.ops = {v[0], v[1], v[2], v[3]};
  c.wall_ns = v[4];
  return c;
}

// Server workers for one session, reachable through user-side channels.
class ServerPool {
 public:
  ServerPool(const SessionConfig& cfg, std::size_t count) {
    if (cfg.transport == TransportKind::socket && !cfg.connect.empty()) {
      if (cfg.connect.size() != count)
        throw UsageError("socket transport needs " + std::to_string(count) + " --connect endpoints, got " +
                         std::to_string(cfg.connect.size()));
      for (const auto& ep : cfg.connect) links_.push_back(connect_channel(ep));
      return;
    }
    errors_.resize(count);
    try {
      for (std::size_t i = 0; i < count; ++i) spawn(cfg.transport, i);
    } catch (...) {
      for (auto& l : listeners_) l->shutdown();
      for (auto& l : links_) l->close();
      join();
      throw;
    }
  }

  ~ServerPool() {
    for (auto& l : links_) l->close();
    join();
  }

  Channel& link(std::size_t i) { return *links_[i]; }
  std::size_t size() const { return links_.size(); }

  // Joins the workers and rethrows the first server-side failure, if any.
  void finish() {
    join();
    for (auto& e : errors_)
      if (e) std::rethrow_exception(e);
  }

  void abort() {
    for (auto& l : links_) l->close();
    finish();
  }

  void accumulate(CostReport& rep) const {
    for (const auto& l : links_) {
      const auto& s = l->stats();
      rep.upload_symbols += s.data_symbols_sent;
      rep.download_symbols += s.data_symbols_received;
      rep.upload_payload_bytes += s.data_payload_bytes_sent;
      rep.download_payload_bytes += s.data_payload_bytes_received;
      rep.control_bytes += s.control_bytes_sent + s.control_bytes_received;
    }
  }

 private:
  void join() {
    for (auto& w : workers_)
      if (w.joinable()) w.join();
  }

  void spawn(TransportKind transport, std::size_t i) {
    if (transport == TransportKind::inproc) {
      auto [user_end, server_end] = make_inproc_pair();
      links_.push_back(std::move(user_end));
      workers_.emplace_back([this, i, ch = std::move(server_end)]() mutable {
        try {
          serve_one_session(*ch);
        } catch (...) {
          errors_[i] = std::current_exception();
        }
        ch->close();
      });
      return;
    }
    auto listener = std::make_shared<SocketListener>(Endpoint{"127.0.0.1", 0});
    listeners_.push_back(listener);
    workers_.emplace_back([this, i, listener] {
      try {
        auto ch = listener->accept();
        serve_one_session(*ch);
      } catch (...) {
        errors_[i] = std::current_exception();
      }
    });
    links_.push_back(connect_channel(Endpoint{"127.0.0.1", listener->port()}));
  }

  std::vector<std::shared_ptr<SocketListener>> listeners_;
  std::vector<std::unique_ptr<Channel>> links_;
  std::vector<std::thread> workers_;
  std::vector<std::exception_ptr> errors_;
};

// Runs `body` against the pool; a failure on the user side reports the
// server's error when one caused it.
template <typename Body>
void with_pool(ServerPool& pool, Body&& body) {
  try {
    body();
  } catch (...) {
    auto user_error = std::current_exception();
    pool.abort();
    std::rethrow_exception(user_error);
  }
  pool.finish();
}

void serve_gasp(Channel& ch, std::span<const std::uint64_t> desc) {
  if (desc.size() < 3 + 7) throw ProtocolError("gasp descriptor truncated");
  const auto algorithm =
      desc[1] == 0 ? ServerAlgorithm::standard : ServerAlgorithm::strassen_block;
  const std::size_t cutoff = desc[2];
  const auto tok = desc.subspan(3);
  GaspParams p{tok[0], tok[1], tok[2], tok[3], tok[4], tok[5]};
  p.validate();
  PrimeField field(tok[6]);
  const std::size_t bh = p.block_rows(), bw = p.block_cols();

  Frame shares = ch.expect(MessageType::gasp_shares);
  if (shares.payload.size() != bh * p.s + p.s * bw)
    throw ProtocolError("gasp shares frame has " + std::to_string(shares.payload.size()) +
                        " elements, expected " + std::to_string(bh * p.s + p.s * bw));
  const auto mid = shares.payload.begin() + static_cast<std::ptrdiff_t>(bh * p.s);
  MatrixF f(bh, p.s, field.modulus(), std::vector<std::uint64_t>(shares.payload.begin(), mid));
  MatrixF g(p.s, bw, field.modulus(), std::vector<std::uint64_t>(mid, shares.payload.end()));

  const auto t0 = Clock::now();
  const MatrixF h = server_multiply(f, g, field, algorithm, cutoff);
  PhaseCost cost{field.counter(), elapsed_ns(t0)};

  ch.send({MessageType::gasp_result, std::vector<std::uint64_t>(h.data().begin(), h.data().end())});
  ch.send({MessageType::server_stats, stats_payload(cost)});
}

void serve_poq(Channel& ch, std::span<const std::uint64_t> desc) {
  if (desc.size() != 6) throw ProtocolError("poq descriptor must have 6 elements");
  PrimeField pre(desc[1]);
  const auto t0 = Clock::now();
  const auto db = poq::build_database(pre, desc[2], desc[3], desc[4], desc[5]);
  PhaseCost pre_cost{pre.counter(), elapsed_ns(t0)};

  Frame query = ch.expect(MessageType::poq_query);
  PrimeField field(desc[1]);
  const auto t1 = Clock::now();
  auto resp = poq::pir_respond(db, query.payload, field);
  PhaseCost cost{field.counter(), elapsed_ns(t1)};

  ch.send({MessageType::poq_response, std::move(resp)});
  auto stats = stats_payload(pre_cost);
  const auto more = stats_payload(cost);
  stats.insert(stats.end(), more.begin(), more.end());
  ch.send({MessageType::server_stats, std::move(stats)});
}

CostReport base_report(const SessionConfig& cfg, std::uint64_t modulus, std::size_t servers) {
  CostReport r;
  r.protocol = cfg.protocol;
  r.params = cfg.params;
  r.modulus = modulus;
  r.seed = *cfg.seed;
  r.servers = servers;
  return r;
}

}  // namespace

std::string to_string(Protocol p) { return p == Protocol::gasp ? "gasp" : "poq"; }
std::string to_string(TransportKind t) { return t == TransportKind::inproc ? "inproc" : "socket"; }

Protocol parse_protocol(const std::string& s) {
  if (s == "gasp") return Protocol::gasp;
  if (s == "poq") return Protocol::poq;
  throw UsageError("unknown protocol '" + s + "' (gasp | poq)");
}

TransportKind parse_transport(const std::string& s) {
  if (s == "inproc") return TransportKind::inproc;
  if (s == "socket") return TransportKind::socket;
  throw UsageError("unknown transport '" + s + "' (inproc | socket)");
}

void SessionConfig::validate() const {
  if (!seed) throw UsageError("session config needs a seed");
  if (params.r == 0 || params.s == 0 || params.t == 0) throw UsageError("dimensions must be >= 1");
  if (protocol == Protocol::gasp) {
    params.validate();
    if (code && !(code->params() == params))
      throw UsageError("pinned code parameters differ from the session parameters");
  } else {
    if (modulus == 0) throw UsageError("poq sessions need an explicit field size q");
    if (!is_prime(modulus)) throw UsageError("poq field size must be prime");
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
  // splitmix64 finalizer over (seed, purpose).
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (purpose + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t CostReport::server_phase_ns() const {
  std::uint64_t m = 0;
  for (const auto& s : server) m = std::max(m, s.wall_ns);
  return m;
}

const PhaseCost& CostReport::heaviest_server() const {
  static const PhaseCost kNone{};
  if (server.empty()) return kNone;
  return *std::max_element(server.begin(), server.end(), [](const PhaseCost& a, const PhaseCost& b) {
    return a.ops.arithmetic() < b.ops.arithmetic();
  });
}

OpCounter CostReport::modeled_compute() const {
  return encode.ops + heaviest_server().ops + decode.ops;
}

double CostReport::modeled_total(double z_q, double c_q) const {
  return z_q * static_cast<double>(modeled_compute().total()) +
         c_q * static_cast<double>(upload_symbols + download_symbols);
}

std::string CostReport::canonical() const {
  std::ostringstream os;
  auto put = [&](const char* name, const OpCounter& c) {
    os << name << '=' << c.adds << ',' << c.muls << ',' << c.invs << ',' << c.rand_draws << ';';
  };
  os << to_string(protocol) << ';' << params.K << ',' << params.L << ',' << params.T << ',' << params.r
     << ',' << params.s << ',' << params.t << ';' << modulus << ';' << seed << ';' << servers << ';';
  put("encode", encode.ops);
  for (const auto& p : preprocess) put("pre", p.ops);
  for (const auto& s : server) put("server", s.ops);
  put("decode", decode.ops);
  os << "up=" << upload_symbols << ";down=" << download_symbols << ";upb=" << upload_payload_bytes
     << ";downb=" << download_payload_bytes << ";ctl=" << control_bytes;
  return os.str();
}

std::pair<MatrixF, MatrixF> random_inputs(const SessionConfig& cfg) {
  cfg.validate();
  std::uint64_t q = cfg.modulus;
  if (cfg.protocol == Protocol::gasp) {
    if (cfg.code) q = cfg.code->modulus();
    else if (q == 0) q = GaspCode::auto_modulus(cfg.params);
  }
  PrimeField field(q);
  SeededRandomSource rng(derive_seed(*cfg.seed, kInputs));
  MatrixF a = MatrixF::random(cfg.params.r, cfg.params.s, field, rng);
  MatrixF b = MatrixF::random(cfg.params.s, cfg.params.t, field, rng);
  return {std::move(a), std::move(b)};
}

std::shared_ptr<const GaspCode> resolve_code(const SessionConfig& cfg) {
  cfg.validate();
  if (cfg.code) return cfg.code;
  SeededRandomSource rng(derive_seed(*cfg.seed, kCodePoints));
  return std::make_shared<const GaspCode>(
      GaspCode::construct(cfg.params, cfg.modulus, rng, cfg.code_options));
}

SessionResult run_gasp_session(const SessionConfig& cfg, const MatrixF& a, const MatrixF& b) {
  if (cfg.protocol != Protocol::gasp) throw UsageError("run_gasp_session: protocol is not gasp");
  auto code = resolve_code(cfg);
  const std::uint64_t q = code->modulus();
  const std::size_t n = code->N();
  CostReport rep = base_report(cfg, q, n);

  PrimeField enc(q), dec(q);
  SeededRandomSource rng(derive_seed(*cfg.seed, kEncodeRandomness));
  auto t0 = Clock::now();
  const auto shares = gasp_encode(a, b, *code, enc, rng);
  rep.encode = {enc.counter(), elapsed_ns(t0)};

  std::vector<std::uint64_t> desc = {kGaspTag, cfg.algorithm == ServerAlgorithm::standard ? 0u : 1u,
                                     cfg.strassen_cutoff};
  const auto tokens = code_descriptor_tokens(*code);
  desc.insert(desc.end(), tokens.begin(), tokens.end());

  std::vector<MatrixF> h;
  h.reserve(n);
  rep.server.resize(n);
  ServerPool pool(cfg, n);
  with_pool(pool, [&] {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::uint64_t> payload(shares[i].f.data().begin(), shares[i].f.data().end());
      payload.insert(payload.end(), shares[i].g.data().begin(), shares[i].g.data().end());
      pool.link(i).send({MessageType::code_descriptor, desc});
      pool.link(i).send({MessageType::gasp_shares, std::move(payload)});
    }
    const std::size_t bh = cfg.params.block_rows(), bw = cfg.params.block_cols();
    for (std::size_t i = 0; i < n; ++i) {
      Frame res = pool.link(i).expect(MessageType::gasp_result);
      if (res.payload.size() != bh * bw) throw ProtocolError("gasp result has the wrong size");
      h.emplace_back(bh, bw, q, std::move(res.payload));
      Frame st = pool.link(i).expect(MessageType::server_stats);
      if (st.payload.size() != 5) throw ProtocolError("malformed server stats");
      rep.server[i] = phase_from(st.payload);
    }
  });
  pool.accumulate(rep);

  t0 = Clock::now();
  MatrixF product = gasp_decode(h, *code, dec);
  rep.decode = {dec.counter(), elapsed_ns(t0)};
  return {std::move(product), std::move(rep), std::move(code)};
}

SessionResult run_poq_session(const SessionConfig& cfg, const MatrixF& a, const MatrixF& b) {
  if (cfg.protocol != Protocol::poq) throw UsageError("run_poq_session: protocol is not poq");
  cfg.validate();
  const std::uint64_t q = cfg.modulus;
  const poq::Shape shape{q, cfg.params.r, cfg.params.s, cfg.params.t};
  if (a.rows() != shape.r || a.cols() != shape.s || b.rows() != shape.s || b.cols() != shape.t ||
      a.modulus() != q || b.modulus() != q)
    throw UsageError("poq session inputs do not match the configured shape/field");
  const std::uint64_t m = shape.file_count();
  if (static_cast<u128>(m) * shape.file_len() > cfg.poq_element_cap)
    throw ParameterTooLargeError("oracle database with M = " + std::to_string(m) +
                                 " files exceeds the element cap");
  constexpr std::size_t kServers = 2;
  CostReport rep = base_report(cfg, q, kServers);

  PrimeField enc(q), dec(q);
  SeededRandomSource rng(derive_seed(*cfg.seed, kPirMask));
  auto t0 = Clock::now();
  const std::uint64_t index = poq::index_of(a, b);
  auto queries = poq::pir_query(index, m, shape.file_len(), enc, rng);
  rep.encode = {enc.counter(), elapsed_ns(t0)};

  const std::vector<std::uint64_t> desc = {kPoqTag, q, shape.r, shape.s, shape.t, cfg.poq_element_cap};
  std::vector<std::vector<std::uint64_t>> responses;
  rep.server.resize(kServers);
  rep.preprocess.resize(kServers);
  ServerPool pool(cfg, kServers);
  with_pool(pool, [&] {
    pool.link(0).send({MessageType::code_descriptor, desc});
    pool.link(0).send({MessageType::poq_query, std::move(queries.server1)});
    pool.link(1).send({MessageType::code_descriptor, desc});
    pool.link(1).send({MessageType::poq_query, std::move(queries.server2)});
    for (std::size_t i = 0; i < kServers; ++i) {
      responses.push_back(pool.link(i).expect(MessageType::poq_response).payload);
      Frame st = pool.link(i).expect(MessageType::server_stats);
      if (st.payload.size() != 10) throw ProtocolError("malformed server stats");
      rep.preprocess[i] = phase_from(std::span<const std::uint64_t>(st.payload).first(5));
      rep.server[i] = phase_from(std::span<const std::uint64_t>(st.payload).subspan(5));
    }
  });
  pool.accumulate(rep);

  t0 = Clock::now();
  MatrixF product = poq::pir_decode(responses[0], responses[1], shape.r, shape.t, dec);
  rep.decode = {dec.counter(), elapsed_ns(t0)};
  return {std::move(product), std::move(rep), nullptr};
}

SessionResult run_session(const SessionConfig& cfg, const MatrixF& a, const MatrixF& b) {
  return cfg.protocol == Protocol::gasp ? run_gasp_session(cfg, a, b) : run_poq_session(cfg, a, b);
}

void serve_one_session(Channel& channel) {
  const Frame desc = channel.expect(MessageType::code_descriptor);
  if (desc.payload.empty()) throw ProtocolError("empty session descriptor");
  switch (desc.payload[0]) {
    case kGaspTag:
      serve_gasp(channel, desc.payload);
      break;
    case kPoqTag:
      serve_poq(channel, desc.payload);
      break;
    default:
      throw ProtocolError("unknown protocol tag " + std::to_string(desc.payload[0]));
  }
}

void write_csv_rows(std::ostream& out, const CostReport& rep, std::size_t n, const CsvOptions& opts) {
  const auto& p = rep.params;
  const bool gasp = rep.protocol == Protocol::gasp;
  auto row = [&](const std::string& phase, const OpCounter& c, std::uint64_t wall) {
    out << to_string(rep.protocol) << ',' << n << ',' << (gasp ? p.K : 0) << ',' << (gasp ? p.L : 0)
        << ',' << (gasp ? p.T : 1) << ',' << rep.modulus << ',' << rep.seed << ',' << phase << ','
        << c.adds << ',' << c.muls << ',' << c.invs << ',' << c.rand_draws << ',' << rep.upload_symbols
        << ',' << rep.download_symbols << ',' << (opts.timing ? wall : 0) << '\n';
  };
  row("encode", rep.encode.ops, rep.encode.wall_ns);
  if (!rep.preprocess.empty()) {
    const auto& heavy = *std::max_element(
        rep.preprocess.begin(), rep.preprocess.end(),
        [](const PhaseCost& a, const PhaseCost& b) { return a.ops.arithmetic() < b.ops.arithmetic(); });
    std::uint64_t wall = 0;
    for (const auto& pc : rep.preprocess) wall = std::max(wall, pc.wall_ns);
    row("preprocess", heavy.ops, wall);
  }
  row("server", rep.heaviest_server().ops, rep.server_phase_ns());
  if (opts.per_server) {
    for (std::size_t i = 0; i < rep.server.size(); ++i)
      row("server[" + std::to_string(i) + "]", rep.server[i].ops, rep.server[i].wall_ns);
  }
  row("decode", rep.decode.ops, rep.decode.wall_ns);
  row("total", rep.modeled_compute(), rep.encode.wall_ns + rep.server_phase_ns() + rep.decode.wall_ns);
}

}  // namespace sdmm
