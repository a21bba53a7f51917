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

#include <gtest/gtest.h>

#include <chrono>

#include "luv/plugnet.hpp"
#include "test_support.hpp"

namespace luv {
namespace {

using namespace std::chrono_literals;
using testing::Gen;
using Bytes = std::vector<std::uint8_t>;

TEST(Autokey, KnownVectors) {
  EXPECT_EQ(autokey_encrypt(Bytes{0x00}), Bytes{0xAB});
  EXPECT_EQ(autokey_encrypt(Bytes{0x7B}), Bytes{0xD0});
  EXPECT_EQ(autokey_encrypt(Bytes{0x00, 0x00}), (Bytes{0xAB, 0xAB}));
  EXPECT_EQ(autokey_decrypt(Bytes{0xD0}), Bytes{0x7B});
  EXPECT_TRUE(autokey_encrypt(Bytes{}).empty());
}

// Each ciphertext byte is the plaintext byte xor the previous ciphertext byte.
TEST(Autokey, ChainsOnCiphertext) {
  Gen g(1);
  Bytes plain(64);
  for (auto& b : plain) b = g.byte();
  const Bytes c = autokey_encrypt(plain);
  EXPECT_EQ(c[0], plain[0] ^ kAutokeyInitial);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_EQ(c[i], plain[i] ^ c[i - 1]);
}

TEST(Autokey, RoundTripsRandomMessages) {
  Gen g(2);
  for (int i = 0; i < 1000; ++i) {
    Bytes msg(static_cast<std::size_t>(g.integer(0, 300)));
    for (auto& b : msg) b = g.byte();
    ASSERT_EQ(autokey_decrypt(autokey_encrypt(msg)), msg);
  }
}

TEST(Frame, EncodesLengthBigEndian) {
  const Bytes f = encode_frame(std::string(300, 'x'));
  ASSERT_EQ(f.size(), 304u);
  EXPECT_EQ(f[0], 0);
  EXPECT_EQ(f[1], 0);
  EXPECT_EQ(f[2], 1);
  EXPECT_EQ(f[3], 44);
  EXPECT_EQ(decode_frame(f), std::string(300, 'x'));
}

TEST(Frame, TruncatedFrameIsProtocolError) {
  Bytes f = encode_frame(R"({"system":{"get_sysinfo":{}}})");
  f.pop_back();
  EXPECT_THROW(decode_frame(f), ProtocolError);
  EXPECT_THROW(decode_frame(Bytes{0, 0}), ProtocolError);
}

TEST(PlugEndpoint, Validation) {
  EXPECT_THROW((PlugEndpoint{"", 9999, ""}.validate()), InvalidArgument);
  EXPECT_THROW((PlugEndpoint{"h", 0, ""}.validate()), InvalidArgument);
  EXPECT_THROW((PlugEndpoint{"h", 70000, ""}.validate()), InvalidArgument);
  EXPECT_NO_THROW((PlugEndpoint{"h", 9999, ""}.validate()));
}

TEST(MockPlug, OnOffQueryTransitions) {
  MockPlugServer mock;
  const auto ep = mock.endpoint();
  EXPECT_EQ(query_state(ep), RelayState::kOff);
  set_relay(ep, RelayState::kOn);
  EXPECT_EQ(mock.relay_state(), RelayState::kOn);
  EXPECT_EQ(query_state(ep), RelayState::kOn);
  set_relay(ep, RelayState::kOn);
  EXPECT_EQ(query_state(ep), RelayState::kOn);
  set_relay(ep, RelayState::kOff);
  EXPECT_EQ(query_state(ep), RelayState::kOff);
  EXPECT_EQ(mock.request_count(), 7);
}

TEST(MockPlug, TruncatedReplyIsProtocolError) {
  MockPlugServer mock;
  mock.set_fault(MockPlugServer::Fault::kTruncatedFrame);
  EXPECT_THROW(query_state(mock.endpoint(), 1000ms), ProtocolError);
  mock.set_fault(MockPlugServer::Fault::kNone);
  EXPECT_EQ(query_state(mock.endpoint()), RelayState::kOff);
}

TEST(MockPlug, GarbageReplyIsProtocolError) {
  MockPlugServer mock;
  mock.set_fault(MockPlugServer::Fault::kGarbage);
  EXPECT_THROW(set_relay(mock.endpoint(), RelayState::kOn, 1000ms), ProtocolError);
}

TEST(MockPlug, DeviceErrorCarriesCode) {
  MockPlugServer mock;
  mock.set_fault(MockPlugServer::Fault::kDeviceError);
  try {
    set_relay(mock.endpoint(), RelayState::kOn, 1000ms);
    FAIL() << "expected DeviceError";
  } catch (const DeviceError& e) {
    EXPECT_EQ(e.code(), -3);
  }
  EXPECT_EQ(mock.relay_state(), RelayState::kOff);
}

TEST(MockPlug, SilentDeviceTimesOut) {
  MockPlugServer mock;
  mock.set_fault(MockPlugServer::Fault::kSilent);
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(query_state(mock.endpoint(), 200ms), TransportError);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 2s);
}

TEST(MockPlug, ClosedPortIsTransportError) {
  int port = 0;
  {
    MockPlugServer mock;
    port = mock.port();
  }
  EXPECT_THROW(query_state({"127.0.0.1", port, ""}, 500ms), TransportError);
}

}  // namespace
}  // namespace luv
