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

#include "sdmm/wire.hpp"

#include <string>

namespace sdmm {
namespace {

void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = bytes - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_be(std::span<const std::uint8_t> in, std::size_t off, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v = (v << 8) | in[off + static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderBytes + 8 * frame.payload.size());
  put_be(out, kFrameMagic, 4);
  out.push_back(kFrameVersion);
  out.push_back(static_cast<std::uint8_t>(frame.type));
  put_be(out, frame.payload.size(), 8);
  for (auto v : frame.payload) put_be(out, v, 8);
  return out;
}

FrameHeader parse_frame_header(std::span<const std::uint8_t> header) {
  if (header.size() < kFrameHeaderBytes) throw FramingError("frame header truncated");
  const auto magic = static_cast<std::uint32_t>(get_be(header, 0, 4));
  if (magic != kFrameMagic) throw ProtocolError("bad frame magic");
  if (header[4] != kFrameVersion)
    throw ProtocolError("unsupported frame version " + std::to_string(header[4]));
  const std::uint8_t type = header[5];
  if (type < 0x01 || type > 0x06) throw ProtocolError("unknown message type " + std::to_string(type));
  const std::uint64_t count = get_be(header, 6, 8);
  if (count > kMaxFrameElements) throw FramingError("frame element count too large");
  return {static_cast<MessageType>(type), count};
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  const FrameHeader h = parse_frame_header(bytes);
  if (bytes.size() != kFrameHeaderBytes + 8 * h.count)
    throw FramingError("frame body holds " + std::to_string(bytes.size() - kFrameHeaderBytes) +
                       " bytes, header announces " + std::to_string(8 * h.count));
  Frame f{h.type, std::vector<std::uint64_t>(h.count)};
  for (std::uint64_t i = 0; i < h.count; ++i) f.payload[i] = get_be(bytes, kFrameHeaderBytes + 8 * i, 8);
  return f;
}

}  // namespace sdmm
