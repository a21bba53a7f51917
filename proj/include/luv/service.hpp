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

// HTTP control service for live calibration.
//
//   GET  /api/frame?light=std|uv&exposure=E   -> image/png
//   POST /api/preview    profile, or {"profile": ..., "frame_png_base64": ...}
//                        -> {mask_png_base64, per_class_pixel_counts, keypoints}
//   GET  /api/profile/{name}, PUT /api/profile/{name}
//   POST /api/sweep      {"exposures": [...], "profile"?: ...} -> {best, scores, all_zero}
//   POST /api/plug/{uv|ambient}  {"state": "on"|"off"} -> {state}
//   POST /api/capture    -> {sample_id}
//
// Requests that touch the camera or lights run one at a time. Previews of a
// cached or supplied frame only read shared state and run concurrently.

#include <sys/socket.h>

#include <atomic>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>

#include "httplib.h"

#include "luv/capture.hpp"
#include "luv/config.hpp"
#include "luv/datastore.hpp"
#include "luv/maskgen.hpp"
#include "luv/png.hpp"
#include "luv/serialize.hpp"

namespace luv {

inline std::string base64_encode(const Bytes& data) {
  return httplib::detail::base64_encode(std::string(data.begin(), data.end()));
}

inline Bytes base64_decode(const std::string& text) {
  static constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  Bytes out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const auto pos = kAlphabet.find(c);
    if (pos == std::string_view::npos) throw InvalidArgument("invalid base64");
    acc = (acc << 6) | static_cast<std::uint32_t>(pos);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

/// Mask PNG plus per-class pixel counts; the payload of /api/preview.
inline Json preview_payload(const LabelSet& labels, const CalibrationProfile& profile) {
  Json counts = Json::object();
  for (const auto& c : profile.classes) counts[std::to_string(c.class_id)] = 0;
  for (std::uint8_t v : labels.mask.data()) {
    if (v) counts[std::to_string(v)] = counts.value(std::to_string(v), 0) + 1;
  }
  return Json{{"mask_png_base64", base64_encode(encode_png(labels.mask))},
              {"per_class_pixel_counts", counts},
              {"keypoints", labels.keypoints}};
}

class LuvService {
 public:
  explicit LuvService(AppConfig cfg) : cfg_(std::move(cfg)), hw_(build_hardware(cfg_)) {
    profile_ = resolve_profile(cfg_, hw_);
    profile_dir_ = std::filesystem::path(cfg_.dataset_root) / "profiles";
    routes();
  }

  ~LuvService() { stop(); }
  LuvService(const LuvService&) = delete;
  LuvService& operator=(const LuvService&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Throws IoError if the port cannot be bound.
  int start(const std::string& host = "127.0.0.1", int port = -1) {
    if (port < 0) port = cfg_.port;
    // SO_REUSEPORT would let a second server share a busy port.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
    });
    if (port == 0) {
      port_ = server_.bind_to_any_port(host);
      if (port_ < 0) throw IoError("cannot bind " + host);
    } else {
      if (!server_.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
      port_ = port;
    }
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  /// Blocks serving requests on the calling thread.
  void run(const std::string& host = "127.0.0.1") {
    start(host);
    if (thread_.joinable()) thread_.join();
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const noexcept { return port_; }
  Hardware& hardware() noexcept { return hw_; }

 private:
  using Req = httplib::Request;
  using Res = httplib::Response;

  static void send_json(Res& res, const Json& j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }
  static void send_error(Res& res, int status, const std::string& msg) { send_json(res, {{"error", msg}}, status); }

  /// Maps exceptions to status codes: bad input 400, device or network 502,
  /// anything else 500.
  template <typename F>
  static void guarded(Res& res, F&& body) {
    try {
      body();
    } catch (const InvalidArgument& e) {
      send_error(res, 400, e.what());
    } catch (const Json::exception& e) {
      send_error(res, 400, e.what());
    } catch (const TransportError& e) {
      send_error(res, 502, e.what());
    } catch (const ProtocolError& e) {
      send_error(res, 502, e.what());
    } catch (const DeviceError& e) {
      send_error(res, 502, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  }

  CalibrationProfile active_profile() const {
    std::shared_lock lock(state_mu_);
    return profile_;
  }

  /// Grabs one UV frame at the profile's exposure and caches it. Caller
  /// holds mutation_mu_.
  ImageRGB grab_uv_locked(const CalibrationProfile& p) {
    detail::RestGuard guard(hw_.rig);
    hw_.rig.uv_mode();
    hw_.rig.sleep(std::chrono::milliseconds(hw_.rig.settle_ms(p)));
    hw_.camera->set_exposure(p.uv_exposure);
    ImageRGB img = hw_.camera->grab();
    guard.release();
    std::unique_lock lock(state_mu_);
    uv_frame_ = img;
    return img;
  }

  void routes() {
    server_.Get("/api/frame", [this](const Req& req, Res& res) {
      guarded(res, [&] {
        const std::string light = req.has_param("light") ? req.get_param_value("light") : "std";
        if (light != "std" && light != "uv") throw InvalidArgument("light must be std or uv");
        double exposure = active_profile().uv_exposure;
        if (req.has_param("exposure")) {
          const std::string e = req.get_param_value("exposure");
          std::size_t used = 0;
          try {
            exposure = std::stod(e, &used);
          } catch (const std::exception&) {
            used = 0;
          }
          if (used == 0 || used != e.size()) throw InvalidArgument("exposure must be a number");
        }
        if (exposure < kMinExposure || exposure > kMaxExposure) throw InvalidArgument("exposure out of range");
        ImageRGB img;
        {
          std::lock_guard lock(mutation_mu_);
          detail::RestGuard guard(hw_.rig);
          if (light == "uv") {
            hw_.rig.uv_mode();
          } else {
            hw_.rig.standard_mode();
          }
          hw_.rig.sleep(std::chrono::milliseconds(hw_.rig.settle_ms(active_profile())));
          hw_.camera->set_exposure(exposure);
          img = hw_.camera->grab();
          guard.release();
          if (light == "uv") {
            std::unique_lock lock2(state_mu_);
            uv_frame_ = img;
          }
        }
        const Bytes png = encode_png(img);
        res.status = 200;
        res.set_content(std::string(png.begin(), png.end()), "image/png");
      });
    });

    server_.Post("/api/preview", [this](const Req& req, Res& res) {
      guarded(res, [&] {
        const Json body = parse_json(req.body);
        const bool wrapped = body.contains("profile");
        const CalibrationProfile profile = (wrapped ? body.at("profile") : body).get<CalibrationProfile>();
        std::optional<ImageRGB> frame;
        if (wrapped && body.contains("frame_png_base64")) {
          frame = decode_png_rgb(base64_decode(body.at("frame_png_base64").get<std::string>()));
        } else {
          std::shared_lock lock(state_mu_);
          frame = uv_frame_;
        }
        if (!frame) {
          std::lock_guard lock(mutation_mu_);
          frame = grab_uv_locked(profile);
        }
        send_json(res, preview_payload(extract_labels(*frame, profile), profile));
      });
    });

    server_.Get(R"(/api/profile/([A-Za-z0-9_.-]+))", [this](const Req& req, Res& res) {
      guarded(res, [&] {
        const std::string name = req.matches[1];
        const auto path = profile_dir_ / (name + ".json");
        if (!std::filesystem::exists(path)) {
          if (name == active_profile().name) {
            send_json(res, Json(active_profile()));
            return;
          }
          send_error(res, 404, "no profile " + name);
          return;
        }
        send_json(res, Json(load_profile(path.string())));
      });
    });

    server_.Put(R"(/api/profile/([A-Za-z0-9_.-]+))", [this](const Req& req, Res& res) {
      guarded(res, [&] {
        const std::string name = req.matches[1];
        validate_sample_id(name);
        CalibrationProfile p = parse_json(req.body).get<CalibrationProfile>();
        if (p.name != name) throw InvalidArgument("profile name '" + p.name + "' does not match path '" + name + "'");
        std::lock_guard lock(mutation_mu_);
        std::filesystem::create_directories(profile_dir_);
        atomic_write(profile_dir_ / (name + ".json"), Json(p).dump(2) + "\n");
        {
          std::unique_lock lock2(state_mu_);
          profile_ = p;
        }
        send_json(res, Json(p));
      });
    });

    server_.Post("/api/sweep", [this](const Req& req, Res& res) {
      guarded(res, [&] {
        const Json body = parse_json(req.body);
        const auto exposures = body.at("exposures").get<std::vector<double>>();
        const CalibrationProfile profile =
            body.contains("profile") ? body.at("profile").get<CalibrationProfile>() : active_profile();
        SweepResult r;
        {
          std::lock_guard lock(mutation_mu_);
          r = sweep_exposures(*hw_.camera, hw_.rig, profile, exposures);
        }
        Json scores = Json::array();
        for (const auto& [e, s] : r.scores) scores.push_back({{"exposure", e}, {"score", s}});
        send_json(res, {{"best", r.best}, {"scores", scores}, {"all_zero", r.all_zero}});
      });
    });

    server_.Post(R"(/api/plug/([A-Za-z0-9_-]+))", [this](const Req& req, Res& res) {
      guarded(res, [&] {
        const std::string channel = req.matches[1];
        std::shared_ptr<LightChannel> ch;
        if (channel == "uv") ch = hw_.rig.uv;
        if (channel == "ambient") ch = hw_.rig.ambient;
        if (!ch) {
          send_error(res, 404, "no light channel " + channel);
          return;
        }
        const Json body = parse_json(req.body);
        if (!body.is_object() || !body.contains("state") || !body.at("state").is_string()) {
          throw InvalidArgument("body must be {\"state\": \"on\"|\"off\"}");
        }
        const std::string state = body.at("state").get<std::string>();
        if (state != "on" && state != "off") throw InvalidArgument("state must be on or off");
        std::lock_guard lock(mutation_mu_);
        ch->set(state == "on" ? RelayState::kOn : RelayState::kOff);
        send_json(res, {{"state", to_string(ch->state())}});
      });
    });

    server_.Post("/api/capture", [this](const Req&, Res& res) {
      guarded(res, [&] {
        std::lock_guard lock(mutation_mu_);
        if (!writer_) writer_ = std::make_unique<DatasetWriter>(cfg_.dataset_root);
        const CalibrationProfile profile = active_profile();
        writer_->write_profile(profile);
        std::string id;
        do {
          id = "cap" + std::to_string(next_capture_++);
        } while (writer_->contains(id));
        PairedSample s = capture_pair(*hw_.camera, hw_.rig, profile, id);
        const auto t0 = detail::SteadyClock::now();
        s.labels = extract_labels(s.uv_images, profile);
        s.timing.label_seconds = detail::seconds_since(t0);
        writer_->write_sample(s, profile.name);
        {
          std::unique_lock lock2(state_mu_);
          uv_frame_ = s.uv_images.front().image;
        }
        send_json(res, {{"sample_id", id}});
      });
    });
  }

  AppConfig cfg_;
  Hardware hw_;
  CalibrationProfile profile_;
  std::filesystem::path profile_dir_;
  std::optional<ImageRGB> uv_frame_;
  std::unique_ptr<DatasetWriter> writer_;
  int next_capture_ = 0;

  std::mutex mutation_mu_;              // camera, lights, dataset
  mutable std::shared_mutex state_mu_;  // profile_, uv_frame_
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace luv
