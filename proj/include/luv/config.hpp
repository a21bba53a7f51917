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

// Application configuration and the camera / rig it describes.
//
// Example:
//   {
//     "dataset_root": "data",
//     "profile": "profiles/lab.json",
//     "camera": {"kind": "sim", "scene": "mixed", "width": 640, "height": 480},
//     "rig": {"kind": "plug", "uv": {"host": "10.0.0.7"}, "settle_delay_ms": 300},
//     "port": 8080,
//     "seed": 7
//   }

#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>

#include "luv/capture.hpp"
#include "luv/serialize.hpp"
#include "luv/synthscene.hpp"

namespace luv {

struct CameraConfig {
  std::string kind = "sim";  // sim | replay
  std::string replay_dir;
  SceneKind scene = SceneKind::kMixed;
  int width = 640;
  int height = 480;
  double noise_sigma = 0.0;
};

struct RigConfig {
  std::string kind = "sim";  // sim | plug
  std::optional<PlugEndpoint> uv;
  std::optional<PlugEndpoint> ambient;
  std::optional<int> settle_delay_ms;
};

struct AppConfig {
  std::string dataset_root = "luv-data";
  std::string profile_path;  // empty: the simulated scene's companion profile
  CameraConfig camera;
  RigConfig rig;
  int port = 8080;
  std::uint64_t seed = 0;

  void validate() const {
    if (camera.kind != "sim" && camera.kind != "replay") throw InvalidArgument("camera.kind must be sim or replay");
    if (camera.kind == "replay" && camera.replay_dir.empty()) throw InvalidArgument("replay camera needs replay_dir");
    if (camera.width < 1 || camera.height < 1) throw InvalidArgument("camera size must be positive");
    if (rig.kind != "sim" && rig.kind != "plug") throw InvalidArgument("rig.kind must be sim or plug");
    if (rig.kind == "plug") {
      if (!rig.uv) throw InvalidArgument("plug rig needs a uv endpoint");
      rig.uv->validate();
      if (rig.ambient) rig.ambient->validate();
    }
    if (rig.settle_delay_ms && *rig.settle_delay_ms < 0) throw InvalidArgument("settle_delay_ms must be >= 0");
    if (port < 0 || port > 65535) throw InvalidArgument("port out of range");
  }
};

inline PlugEndpoint endpoint_from_json(const Json& j) {
  PlugEndpoint ep;
  ep.host = j.at("host").get<std::string>();
  ep.port = j.value("port", kDefaultPlugPort);
  ep.identity = j.value("identity", std::string{});
  ep.validate();
  return ep;
}

inline AppConfig config_from_json(const Json& j) {
  AppConfig c;
  try {
    c.dataset_root = j.value("dataset_root", c.dataset_root);
    c.profile_path = j.value("profile", c.profile_path);
    c.port = j.value("port", c.port);
    c.seed = j.value("seed", c.seed);
    if (j.contains("camera")) {
      const Json& cj = j.at("camera");
      c.camera.kind = cj.value("kind", c.camera.kind);
      c.camera.replay_dir = cj.value("replay_dir", c.camera.replay_dir);
      if (cj.contains("scene")) c.camera.scene = parse_scene_kind(cj.at("scene").get<std::string>());
      c.camera.width = cj.value("width", c.camera.width);
      c.camera.height = cj.value("height", c.camera.height);
      c.camera.noise_sigma = cj.value("noise_sigma", c.camera.noise_sigma);
    }
    if (j.contains("rig")) {
      const Json& rj = j.at("rig");
      c.rig.kind = rj.value("kind", c.rig.kind);
      if (rj.contains("uv")) c.rig.uv = endpoint_from_json(rj.at("uv"));
      if (rj.contains("ambient")) c.rig.ambient = endpoint_from_json(rj.at("ambient"));
      if (rj.contains("settle_delay_ms")) c.rig.settle_delay_ms = rj.at("settle_delay_ms").get<int>();
    }
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("invalid config: ") + e.what());
  }
  c.validate();
  return c;
}

/// Reads the file named by LUV_CONFIG, or returns defaults when unset.
inline AppConfig load_config_from_env() {
  const char* path = std::getenv("LUV_CONFIG");
  if (!path || !*path) return AppConfig{};
  try {
    return config_from_json(read_json_file(path));
  } catch (const IoError&) {
    throw InvalidArgument(std::string("config file not readable: ") + path);
  }
}

/// Camera, rig and scene built from a config. The simulated camera observes
/// the rig's channels.
struct Hardware {
  LightRig rig;
  std::unique_ptr<CameraPort> camera;
  SimCamera* sim = nullptr;  // set when the camera is simulated
};

inline Hardware build_hardware(const AppConfig& cfg) {
  cfg.validate();
  Hardware hw;
  if (cfg.rig.kind == "sim") {
    hw.rig = make_sim_rig();
  } else {
    hw.rig.uv = std::make_shared<PlugChannel>(*cfg.rig.uv);
    if (cfg.rig.ambient) hw.rig.ambient = std::make_shared<PlugChannel>(*cfg.rig.ambient);
  }
  if (cfg.rig.settle_delay_ms) hw.rig.settle_delay_ms = cfg.rig.settle_delay_ms;
  if (cfg.camera.kind == "sim") {
    auto cam = std::make_unique<SimCamera>(
        make_scene(cfg.camera.scene, cfg.camera.width, cfg.camera.height, cfg.seed, cfg.camera.noise_sigma),
        hw.rig.uv, hw.rig.ambient);
    hw.sim = cam.get();
    hw.camera = std::move(cam);
  } else {
    hw.camera = std::make_unique<ReplayCamera>(cfg.camera.replay_dir);
  }
  return hw;
}

/// The configured profile, or the simulated scene's companion profile.
inline CalibrationProfile resolve_profile(const AppConfig& cfg, const Hardware& hw) {
  if (!cfg.profile_path.empty()) return load_profile(cfg.profile_path);
  if (hw.sim) return companion_profile(hw.sim->scene(), "sim");
  throw InvalidArgument("no profile configured");
}

}  // namespace luv
