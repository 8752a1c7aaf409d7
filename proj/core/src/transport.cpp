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

#include "sdmm/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

namespace sdmm {

void Channel::send(const Frame& frame) {
  const auto bytes = encode_frame(frame);
  write_bytes(bytes);
  ++stats_.frames_sent;
  stats_.bytes_sent += bytes.size();
  if (is_data_frame(frame.type)) {
    stats_.data_symbols_sent += frame.payload.size();
    stats_.data_payload_bytes_sent += bytes.size() - kFrameHeaderBytes;
  } else {
    stats_.control_bytes_sent += bytes.size();
  }
}

Frame Channel::recv() {
  std::vector<std::uint8_t> buf(kFrameHeaderBytes);
  read_bytes(buf);
  const FrameHeader h = parse_frame_header(buf);
  buf.resize(kFrameHeaderBytes + 8 * h.count);
  read_bytes(std::span<std::uint8_t>(buf).subspan(kFrameHeaderBytes));
  Frame f = decode_frame(buf);
  ++stats_.frames_received;
  stats_.bytes_received += buf.size();
  if (is_data_frame(f.type)) {
    stats_.data_symbols_received += f.payload.size();
    stats_.data_payload_bytes_received += buf.size() - kFrameHeaderBytes;
  } else {
    stats_.control_bytes_received += buf.size();
  }
  return f;
}

Frame Channel::expect(MessageType type) {
  Frame f = recv();
  if (f.type != type)
    throw ProtocolError("expected message type " + std::to_string(static_cast<int>(type)) +
                        ", got " + std::to_string(static_cast<int>(f.type)));
  return f;
}

namespace {

struct Pipe {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> bytes;
  bool closed = false;
};

class InprocChannel final : public Channel {
 public:
  InprocChannel(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~InprocChannel() override { close(); }

  void close() override {
    for (auto* p : {in_.get(), out_.get()}) {
      std::lock_guard lock(p->mu);
      p->closed = true;
      p->cv.notify_all();
    }
  }

 protected:
  void write_bytes(std::span<const std::uint8_t> bytes) override {
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw FramingError("inproc channel closed");
    out_->bytes.insert(out_->bytes.end(), bytes.begin(), bytes.end());
    out_->cv.notify_all();
  }

  void read_bytes(std::span<std::uint8_t> out) override {
    std::unique_lock lock(in_->mu);
    in_->cv.wait(lock, [&] { return in_->bytes.size() >= out.size() || in_->closed; });
    if (in_->bytes.size() < out.size()) throw FramingError("inproc channel closed mid-frame");
    std::copy_n(in_->bytes.begin(), out.size(), out.begin());
    in_->bytes.erase(in_->bytes.begin(), in_->bytes.begin() + static_cast<std::ptrdiff_t>(out.size()));
  }

 private:
  std::shared_ptr<Pipe> in_;
  std::shared_ptr<Pipe> out_;
};

class SocketChannel final : public Channel {
 public:
  explicit SocketChannel(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~SocketChannel() override { close(); }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 protected:
  void write_bytes(std::span<const std::uint8_t> bytes) override {
    std::size_t off = 0;
    while (off < bytes.size()) {
      const ssize_t n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw FramingError(std::string("socket send failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  void read_bytes(std::span<std::uint8_t> out) override {
    std::size_t off = 0;
    while (off < out.size()) {
      const ssize_t n = ::recv(fd_, out.data() + off, out.size() - off, 0);
      if (n == 0) throw FramingError("peer closed the connection mid-frame");
      if (n < 0) {
        if (errno == EINTR) continue;
        throw FramingError(std::string("socket recv failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

 private:
  int fd_;
};

addrinfo* resolve(const Endpoint& where, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(where.port);
  const int rc = ::getaddrinfo(where.host.empty() ? nullptr : where.host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0) throw UsageError("cannot resolve " + where.str() + ": " + ::gai_strerror(rc));
  return res;
}

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair() {
  auto a_to_b = std::make_shared<Pipe>();
  auto b_to_a = std::make_shared<Pipe>();
  return {std::make_unique<InprocChannel>(b_to_a, a_to_b), std::make_unique<InprocChannel>(a_to_b, b_to_a)};
}

Endpoint Endpoint::parse(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw UsageError("endpoint '" + text + "' is not host:port");
  Endpoint e;
  e.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  try {
    const unsigned long v = std::stoul(port);
    if (v > 65535) throw std::out_of_range("port");
    e.port = static_cast<std::uint16_t>(v);
  } catch (const std::exception&) {
    throw UsageError("endpoint '" + text + "' has an invalid port");
  }
  return e;
}

SocketListener::SocketListener(const Endpoint& where) {
  addrinfo* res = resolve(where, true);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0) {
    ::freeaddrinfo(res);
    throw ProtocolError(std::string("socket() failed: ") + std::strerror(errno));
  }
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const int rc = ::bind(fd_, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0 || ::listen(fd_, 16) != 0) {
    const std::string err = std::strerror(errno);
    ::close(fd_);
    throw ProtocolError("cannot listen on " + where.str() + ": " + err);
  }
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

SocketListener::~SocketListener() {
  if (fd_ >= 0) ::close(fd_);
}

void SocketListener::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

std::unique_ptr<Channel> SocketListener::accept() {
  for (;;) {
    const int c = ::accept(fd_, nullptr, nullptr);
    if (c >= 0) return std::make_unique<SocketChannel>(c);
    if (errno != EINTR) throw ProtocolError(std::string("accept failed: ") + std::strerror(errno));
  }
}

std::unique_ptr<Channel> connect_channel(const Endpoint& where) {
  addrinfo* res = resolve(where, false);
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw ProtocolError(std::string("socket() failed: ") + std::strerror(errno));
  }
  const int rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0) {
    const std::string err = std::strerror(errno);
    ::close(fd);
    throw ProtocolError("cannot connect to " + where.str() + ": " + err);
  }
  return std::make_unique<SocketChannel>(fd);
}

}  // namespace sdmm
