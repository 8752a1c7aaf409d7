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

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>

#include "sdmm/wire.hpp"

namespace sdmm {

/// Per-endpoint traffic tallies. `data_symbols_*` counts payload elements of
/// data frames only, so data_payload_bytes_* == 8 * data_symbols_* always.
struct LinkStats {
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_received = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t data_symbols_sent = 0;
  std::uint64_t data_symbols_received = 0;
  std::uint64_t data_payload_bytes_sent = 0;
  std::uint64_t data_payload_bytes_received = 0;
  std::uint64_t control_bytes_sent = 0;
  std::uint64_t control_bytes_received = 0;
};

/// A bidirectional, ordered, reliable frame channel between two parties.
class Channel {
 public:
  virtual ~Channel() = default;

  void send(const Frame& frame);
  /// Blocks for the next frame. Throws FramingError if the peer closes
  /// mid-frame or before one arrives.
  Frame recv();
  /// recv() and require a type; throws ProtocolError otherwise.
  Frame expect(MessageType type);

  const LinkStats& stats() const { return stats_; }
  virtual void close() = 0;

 protected:
  virtual void write_bytes(std::span<const std::uint8_t> bytes) = 0;
  /// Fills `out` completely or throws FramingError.
  virtual void read_bytes(std::span<std::uint8_t> out) = 0;

 private:
  LinkStats stats_;
};

/// Two connected in-memory endpoints. Bytes still go through the frame codec
/// so accounting matches the socket transport exactly.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair();

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// "host:port".
  static Endpoint parse(const std::string& text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

/// TCP listener; port 0 binds an ephemeral port.
class SocketListener {
 public:
  explicit SocketListener(const Endpoint& where);
  ~SocketListener();
  SocketListener(const SocketListener&) = delete;
  SocketListener& operator=(const SocketListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<Channel> accept();
  /// Unblocks a pending accept(), which then throws ProtocolError.
  void shutdown();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

std::unique_ptr<Channel> connect_channel(const Endpoint& where);

}  // namespace sdmm
