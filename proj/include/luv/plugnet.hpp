// Copyright 2026 The LUV Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Smart-plug driver for the light channels.
//
// Wire format, both directions: 4-byte big-endian payload length, then the
// payload under an autokey XOR cipher (initial key 171, key <- previous
// ciphertext byte). Payloads are JSON:
//   on/off : {"system":{"set_relay_state":{"state":1}}}
//   query  : {"system":{"get_sysinfo":{}}}
// A bundled loopback MockPlugServer speaks the same protocol.

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "luv/core.hpp"

namespace luv {

class TransportError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class DeviceError : public Error {
 public:
  DeviceError(const std::string& what, int code) : Error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

inline constexpr std::uint8_t kAutokeyInitial = 171;
inline constexpr int kDefaultPlugPort = 9999;
inline constexpr std::uint32_t kMaxFramePayload = 1u << 20;

inline std::vector<std::uint8_t> autokey_encrypt(std::span<const std::uint8_t> plain) {
  std::vector<std::uint8_t> out(plain.size());
  std::uint8_t key = kAutokeyInitial;
  for (std::size_t i = 0; i < plain.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(plain[i] ^ key);
    key = out[i];
  }
  return out;
}

inline std::vector<std::uint8_t> autokey_decrypt(std::span<const std::uint8_t> cipher) {
  std::vector<std::uint8_t> out(cipher.size());
  std::uint8_t key = kAutokeyInitial;
  for (std::size_t i = 0; i < cipher.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(cipher[i] ^ key);
    key = cipher[i];
  }
  return out;
}

/// Length prefix + encrypted payload.
inline std::vector<std::uint8_t> encode_frame(const std::string& plaintext) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(plaintext.data());
  const std::vector<std::uint8_t> body = autokey_encrypt({p, plaintext.size()});
  const auto n = static_cast<std::uint32_t>(body.size());
  std::vector<std::uint8_t> frame(4 + body.size());
  for (int i = 0; i < 4; ++i) frame[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(n >> (24 - 8 * i));
  std::copy(body.begin(), body.end(), frame.begin() + 4);
  return frame;
}

inline std::uint32_t read_be32(const std::uint8_t* p) noexcept {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

/// Inverse of encode_frame. Throws ProtocolError if the length prefix does
/// not match the bytes present.
inline std::string decode_frame(std::span<const std::uint8_t> frame) {
  if (frame.size() < 4) throw ProtocolError("frame shorter than length prefix");
  const std::uint32_t n = read_be32(frame.data());
  if (frame.size() - 4 != n) throw ProtocolError("frame length prefix mismatch");
  const auto plain = autokey_decrypt(frame.subspan(4));
  return {plain.begin(), plain.end()};
}

struct PlugEndpoint {
  std::string host;
  int port = kDefaultPlugPort;
  std::string identity;

  void validate() const {
    if (host.empty()) throw InvalidArgument("plug host must not be empty");
    if (port < 1 || port > 65535) throw InvalidArgument("plug port must lie in [1,65535]");
  }
  std::string key() const { return host + ":" + std::to_string(port); }
};

enum class RelayState { kOff = 0, kOn = 1 };

inline const char* to_string(RelayState s) noexcept { return s == RelayState::kOn ? "on" : "off"; }

inline std::string relay_command(RelayState s) {
  return nlohmann::json{{"system", {{"set_relay_state", {{"state", static_cast<int>(s)}}}}}}.dump();
}

inline std::string sysinfo_command() {
  return nlohmann::json{{"system", {{"get_sysinfo", nlohmann::json::object()}}}}.dump();
}

namespace detail {

/// Owning socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { reset(); }

  int fd() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

using Clock = std::chrono::steady_clock;

inline int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left > 0 ? static_cast<int>(left) : 0;
}

/// Blocks until fd is ready for `events` or the deadline passes.
inline bool wait_fd(int fd, short events, Clock::time_point deadline) {
  for (;;) {
    pollfd pfd{fd, events, 0};
    const int rc = ::poll(&pfd, 1, remaining_ms(deadline));
    if (rc > 0) return true;
    if (rc == 0) return false;
    if (errno != EINTR) return false;
  }
}

inline Socket connect_tcp(const PlugEndpoint& ep, Clock::time_point deadline) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(ep.port);
  if (const int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw TransportError("cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, &::freeaddrinfo);
  std::string last_error = "no address";
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
    if (!s) continue;
    ::fcntl(s.fd(), F_SETFL, ::fcntl(s.fd(), F_GETFL) | O_NONBLOCK);
    if (::connect(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0) return s;
    if (errno != EINPROGRESS) {
      last_error = std::strerror(errno);
      continue;
    }
    if (!wait_fd(s.fd(), POLLOUT, deadline)) throw TransportError("connect to " + ep.key() + " timed out");
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err == 0) return s;
    last_error = std::strerror(err);
  }
  throw TransportError("connect to " + ep.key() + " failed: " + last_error);
}

inline void send_all(int fd, std::span<const std::uint8_t> bytes, Clock::time_point deadline) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n > 0) {
      sent += static_cast<std::size_t>(n);
    } else if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR)) {
      if (!wait_fd(fd, POLLOUT, deadline)) throw TransportError("send timed out");
    } else {
      throw TransportError(std::string("send failed: ") + std::strerror(errno));
    }
  }
}

/// Reads exactly out.size() bytes. Returns the count read before EOF.
inline std::size_t recv_exact(int fd, std::span<std::uint8_t> out, Clock::time_point deadline) {
  std::size_t got = 0;
  while (got < out.size()) {
    const ssize_t n = ::recv(fd, out.data() + got, out.size() - got, 0);
    if (n > 0) {
      got += static_cast<std::size_t>(n);
    } else if (n == 0) {
      return got;
    } else if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) {
      if (!wait_fd(fd, POLLIN, deadline)) throw TransportError("read timed out");
    } else {
      throw TransportError(std::string("recv failed: ") + std::strerror(errno));
    }
  }
  return got;
}

/// Reads one frame and returns the decrypted payload; nullopt on clean EOF
/// before any byte.
inline std::optional<std::string> read_frame(int fd, Clock::time_point deadline) {
  std::uint8_t header[4];
  const std::size_t h = recv_exact(fd, header, deadline);
  if (h == 0) return std::nullopt;
  if (h < 4) throw ProtocolError("truncated frame header");
  const std::uint32_t n = read_be32(header);
  if (n > kMaxFramePayload) throw ProtocolError("frame length " + std::to_string(n) + " exceeds limit");
  std::vector<std::uint8_t> body(n);
  if (recv_exact(fd, body, deadline) != n) throw ProtocolError("truncated frame payload");
  const auto plain = autokey_decrypt(body);
  return std::string(plain.begin(), plain.end());
}

/// One mutex per endpoint so commands to the same plug never interleave.
inline std::mutex& endpoint_mutex(const std::string& key) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::unique_ptr<std::mutex>> registry;
  std::lock_guard lock(registry_mutex);
  auto& slot = registry[key];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

}  // namespace detail

/// Sends one command and returns the parsed reply.
inline nlohmann::json plug_transact(const PlugEndpoint& ep, const std::string& command,
                                    std::chrono::milliseconds timeout) {
  ep.validate();
  std::lock_guard lock(detail::endpoint_mutex(ep.key()));
  const auto deadline = detail::Clock::now() + timeout;
  detail::Socket s = detail::connect_tcp(ep, deadline);
  detail::send_all(s.fd(), encode_frame(command), deadline);
  const auto reply = detail::read_frame(s.fd(), deadline);
  if (!reply) throw ProtocolError("connection closed without reply");
  try {
    return nlohmann::json::parse(*reply);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("reply is not valid JSON");
  }
}

namespace detail {

inline const nlohmann::json& reply_section(const nlohmann::json& reply, const char* method) {
  if (!reply.is_object() || !reply.contains("system") || !reply["system"].is_object() ||
      !reply["system"].contains(method) || !reply["system"][method].is_object()) {
    throw ProtocolError(std::string("reply lacks system.") + method);
  }
  const auto& sec = reply["system"][method];
  if (!sec.contains("err_code") || !sec["err_code"].is_number_integer()) {
    throw ProtocolError(std::string("reply lacks system.") + method + ".err_code");
  }
  const int code = sec["err_code"].get<int>();
  if (code != 0) {
    throw DeviceError("device error " + std::to_string(code) + ": " + sec.value("err_msg", std::string{}), code);
  }
  return sec;
}

}  // namespace detail

inline void set_relay(const PlugEndpoint& ep, RelayState state,
                      std::chrono::milliseconds timeout = std::chrono::milliseconds(2000)) {
  detail::reply_section(plug_transact(ep, relay_command(state), timeout), "set_relay_state");
}

inline RelayState query_state(const PlugEndpoint& ep,
                              std::chrono::milliseconds timeout = std::chrono::milliseconds(2000)) {
  const nlohmann::json reply = plug_transact(ep, sysinfo_command(), timeout);
  const auto& sec = detail::reply_section(reply, "get_sysinfo");
  if (!sec.contains("relay_state") || !sec["relay_state"].is_number_integer()) {
    throw ProtocolError("sysinfo reply lacks relay_state");
  }
  const int v = sec["relay_state"].get<int>();
  if (v != 0 && v != 1) throw ProtocolError("relay_state out of range");
  return v == 1 ? RelayState::kOn : RelayState::kOff;
}

// ---------------------------------------------------------------------------
// Loopback mock device

/// In-process plug that speaks the wire protocol on 127.0.0.1. Starts off.
class MockPlugServer {
 public:
  enum class Fault {
    kNone,
    kGarbage,         // well-framed reply whose payload is not JSON
    kTruncatedFrame,  // header announces more bytes than are sent
    kDeviceError,     // err_code -3
    kSilent,          // never replies
  };

  explicit MockPlugServer(int port = 0) {
    listener_ = detail::Socket(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!listener_) throw TransportError("mock plug: socket() failed");
    const int one = 1;
    ::setsockopt(listener_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::bind(listener_.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      throw TransportError("mock plug: bind failed on port " + std::to_string(port));
    }
    ::listen(listener_.fd(), 16);
    socklen_t len = sizeof(addr);
    ::getsockname(listener_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    worker_ = std::thread([this] { serve(); });
  }

  MockPlugServer(const MockPlugServer&) = delete;
  MockPlugServer& operator=(const MockPlugServer&) = delete;

  ~MockPlugServer() {
    stop_ = true;
    if (worker_.joinable()) worker_.join();
  }

  int port() const noexcept { return port_; }
  PlugEndpoint endpoint() const { return {"127.0.0.1", port_, "mock"}; }

  RelayState relay_state() const noexcept { return relay_on_ ? RelayState::kOn : RelayState::kOff; }
  void set_fault(Fault f) noexcept { fault_ = f; }
  int request_count() const noexcept { return requests_; }

 private:
  void serve() {
    while (!stop_) {
      pollfd pfd{listener_.fd(), POLLIN, 0};
      if (::poll(&pfd, 1, 50) <= 0) continue;
      detail::Socket conn(::accept4(listener_.fd(), nullptr, nullptr, SOCK_CLOEXEC | SOCK_NONBLOCK));
      if (!conn) continue;
      try {
        handle(conn.fd());
      } catch (const Error&) {
        // Client misbehaved or vanished; drop the connection.
      }
    }
  }

  void handle(int fd) {
    using namespace std::chrono_literals;
    for (;;) {
      const auto req = detail::read_frame(fd, detail::Clock::now() + 2s);
      if (!req) return;
      ++requests_;
      const Fault fault = fault_;
      if (fault == Fault::kSilent) {
        // Hold the connection open until the client gives up.
        std::uint8_t sink[64];
        detail::recv_exact(fd, sink, detail::Clock::now() + 5s);
        return;
      }
      std::string reply;
      if (fault == Fault::kGarbage) {
        reply = "\x01garbage, not json";
      } else {
        reply = respond(*req, fault == Fault::kDeviceError);
      }
      auto frame = encode_frame(reply);
      if (fault == Fault::kTruncatedFrame) frame.resize(4 + (frame.size() - 4) / 2);
      detail::send_all(fd, frame, detail::Clock::now() + 2s);
      if (fault == Fault::kTruncatedFrame) return;
    }
  }

  std::string respond(const std::string& request, bool device_error) {
    nlohmann::json req;
    try {
      req = nlohmann::json::parse(request);
    } catch (const nlohmann::json::exception&) {
      return R"({"system":{"err_code":-1,"err_msg":"json decode error"}})";
    }
    const int code = device_error ? -3 : 0;
    const auto& sys = req.value("system", nlohmann::json::object());
    if (sys.contains("set_relay_state")) {
      if (!device_error) relay_on_ = sys["set_relay_state"].value("state", 0) != 0;
      return nlohmann::json{{"system", {{"set_relay_state", {{"err_code", code}}}}}}.dump();
    }
    if (sys.contains("get_sysinfo")) {
      return nlohmann::json{{"system",
                             {{"get_sysinfo",
                               {{"alias", "luv-mock"}, {"model", "MOCK(US)"}, {"relay_state", relay_on_ ? 1 : 0},
                                {"err_code", code}}}}}}
          .dump();
    }
    return R"({"system":{"err_code":-2,"err_msg":"module not support"}})";
  }

  detail::Socket listener_;
  int port_ = 0;
  std::thread worker_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> relay_on_{false};
  std::atomic<Fault> fault_{Fault::kNone};
  std::atomic<int> requests_{0};
};

}  // namespace luv
