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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdmm/gasp.hpp"
#include "sdmm/matrix.hpp"
#include "sdmm/poq.hpp"
#include "sdmm/transport.hpp"

namespace sdmm {

enum class Protocol { gasp, poq };
enum class TransportKind { inproc, socket };

std::string to_string(Protocol p);
std::string to_string(TransportKind t);
Protocol parse_protocol(const std::string& s);
TransportKind parse_transport(const std::string& s);

struct SessionConfig {
  Protocol protocol = Protocol::gasp;
  /// K, L, T are ignored for poq; r, s, t are used by both.
  GaspParams params;
  /// gasp: 0 picks the smallest prime above the field-size bound.
  /// poq: the field size q; must be set.
  std::uint64_t modulus = 0;
  ServerAlgorithm algorithm = ServerAlgorithm::standard;
  std::size_t strassen_cutoff = 64;
  std::optional<std::uint64_t> seed;
  TransportKind transport = TransportKind::inproc;
  /// Socket transport: one endpoint per server. Empty spawns local servers on
  /// ephemeral loopback ports.
  std::vector<Endpoint> connect;
  CodeOptions code_options;
  /// Pins the code instead of searching for points from the seed.
  std::shared_ptr<const GaspCode> code;
  std::uint64_t poq_element_cap = poq::kDefaultElementCap;

  /// Throws UsageError when inconsistent (missing seed, zero dims, ...).
  void validate() const;
};

struct PhaseCost {
  OpCounter ops;
  std::uint64_t wall_ns = 0;
};

/// Everything measured in one session. Counts are exact and deterministic
/// for a given config; wall-clock fields are informational.
struct CostReport {
  Protocol protocol = Protocol::gasp;
  GaspParams params;
  std::uint64_t modulus = 0;
  std::uint64_t seed = 0;
  std::size_t servers = 0;

  PhaseCost encode;
  std::vector<PhaseCost> server;      // one per server, compute phase
  std::vector<PhaseCost> preprocess;  // poq database build, one per server
  PhaseCost decode;

  std::uint64_t upload_symbols = 0;
  std::uint64_t download_symbols = 0;
  std::uint64_t upload_payload_bytes = 0;
  std::uint64_t download_payload_bytes = 0;
  std::uint64_t control_bytes = 0;

  /// Servers run in parallel: the phase lasts as long as the slowest one.
  std::uint64_t server_phase_ns() const;
  /// Server with the largest arithmetic count (first on ties).
  const PhaseCost& heaviest_server() const;
  /// encode + heaviest server + decode, in counted operations.
  OpCounter modeled_compute() const;
  /// Weighted total: z_q per counted operation (randomness included), c_q per
  /// transmitted symbol.
  double modeled_total(double z_q = 1.0, double c_q = 1.0) const;
  /// Count-only serialization (no wall-clock), for byte-exact comparisons.
  std::string canonical() const;
};

struct SessionResult {
  MatrixF product;
  CostReport report;
  std::shared_ptr<const GaspCode> code;  // gasp only
};

/// Uniform A (r x s) and B (s x t) from the config seed.
std::pair<MatrixF, MatrixF> random_inputs(const SessionConfig& cfg);

/// Code the session would use: cfg.code if pinned, else constructed from the
/// seed.
std::shared_ptr<const GaspCode> resolve_code(const SessionConfig& cfg);

SessionResult run_gasp_session(const SessionConfig& cfg, const MatrixF& a, const MatrixF& b);
SessionResult run_poq_session(const SessionConfig& cfg, const MatrixF& a, const MatrixF& b);
SessionResult run_session(const SessionConfig& cfg, const MatrixF& a, const MatrixF& b);

/// Server side of one session over `channel`: configuration from the
/// descriptor frame, then either one GASP share product or one PIR answer.
void serve_one_session(Channel& channel);

/// Deterministic sub-seed for one purpose of a session.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose);

inline constexpr const char* kCsvHeader =
    "protocol,n,K,L,T,modulus,seed,phase,adds,muls,invs,rand_draws,upload_symbols,"
    "download_symbols,wall_ns";

struct CsvOptions {
  bool timing = false;      // write measured wall_ns instead of 0
  bool per_server = false;  // one extra row per server
};

/// Rows encode, [preprocess,] server, decode, total (plus server[i] rows if
/// requested). Every row repeats the session's symbol counts. `n` fills the
/// n column.
void write_csv_rows(std::ostream& out, const CostReport& report, std::size_t n,
                    const CsvOptions& opts = {});

}  // namespace sdmm
