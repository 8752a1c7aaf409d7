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
#include <span>
#include <vector>

#include "sdmm/errors.hpp"

namespace sdmm {

// Frame layout, all integers big-endian:
//   magic u32 = 0x53444D4D | version u8 = 0x01 | type u8 |
//   element count u64 | count x u64 residues
enum class MessageType : std::uint8_t {
  gasp_shares = 0x01,
  gasp_result = 0x02,
  poq_query = 0x03,
  poq_response = 0x04,
  code_descriptor = 0x05,
  server_stats = 0x06,  // control: per-server op counters after a session
};

inline constexpr std::uint32_t kFrameMagic = 0x53444D4D;
inline constexpr std::uint8_t kFrameVersion = 0x01;
inline constexpr std::size_t kFrameHeaderBytes = 14;
/// Upper bound on elements per frame accepted from the wire.
inline constexpr std::uint64_t kMaxFrameElements = std::uint64_t{1} << 30;

/// Shares, results, queries and responses carry field symbols; descriptor
/// and stats frames are control traffic and are not counted as symbols.
constexpr bool is_data_frame(MessageType t) {
  return t == MessageType::gasp_shares || t == MessageType::gasp_result ||
         t == MessageType::poq_query || t == MessageType::poq_response;
}

struct Frame {
  MessageType type = MessageType::gasp_shares;
  std::vector<std::uint64_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct FrameHeader {
  MessageType type;
  std::uint64_t count;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);

/// Validates magic, version and type. Throws ProtocolError on bad
/// magic/version/type and FramingError on an oversized count.
FrameHeader parse_frame_header(std::span<const std::uint8_t> header);

/// Decodes exactly one frame occupying all of `bytes`. Truncated or
/// over-long input throws FramingError.
Frame decode_frame(std::span<const std::uint8_t> bytes);

}  // namespace sdmm
