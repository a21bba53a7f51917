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

// Paired standard/UV capture with switched lights, exposure sweeps and
// labeling sessions.
//
// Rest state of the rig is ambient on, UV off. Every operation here leaves
// the rig in that state, including when it fails.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "luv/colorops.hpp"
#include "luv/core.hpp"
#include "luv/datastore.hpp"
#include "luv/maskgen.hpp"
#include "luv/plugnet.hpp"
#include "luv/png.hpp"
#include "luv/synthscene.hpp"

namespace luv {

class CameraPort {
 public:
  virtual ~CameraPort() = default;
  virtual void set_exposure(double exposure) = 0;
  virtual void set_white_balance(double kelvin) = 0;
  virtual ImageRGB grab() = 0;
};

class LightChannel {
 public:
  virtual ~LightChannel() = default;
  virtual void set(RelayState s) = 0;
  /// Last acknowledged state.
  virtual RelayState state() const = 0;
};

/// In-memory channel. fail_on_call(k) makes the k-th subsequent set() throw
/// TransportError without changing state.
class SimulatedChannel : public LightChannel {
 public:
  explicit SimulatedChannel(RelayState initial = RelayState::kOff) : state_(initial) {}

  void set(RelayState s) override {
    ++calls_;
    if (fail_at_ && calls_ == *fail_at_) {
      fail_at_.reset();
      throw TransportError("simulated channel failure");
    }
    state_ = s;
  }
  RelayState state() const override { return state_; }

  void fail_on_call(int k) { fail_at_ = calls_ + k; }
  int calls() const noexcept { return calls_; }

 private:
  RelayState state_;
  int calls_ = 0;
  std::optional<int> fail_at_;
};

class PlugChannel : public LightChannel {
 public:
  explicit PlugChannel(PlugEndpoint ep, std::chrono::milliseconds timeout = std::chrono::milliseconds(2000))
      : ep_(std::move(ep)), timeout_(timeout) {
    ep_.validate();
  }

  void set(RelayState s) override {
    set_relay(ep_, s, timeout_);
    state_ = s;
  }
  RelayState state() const override { return state_; }
  const PlugEndpoint& endpoint() const noexcept { return ep_; }

 private:
  PlugEndpoint ep_;
  std::chrono::milliseconds timeout_;
  RelayState state_ = RelayState::kOff;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

struct LightRig {
  std::shared_ptr<LightChannel> uv;
  std::shared_ptr<LightChannel> ambient;  // null when room light is not switchable
  /// Overrides the profile's settle delay when set.
  std::optional<int> settle_delay_ms;
  Sleeper sleep = real_sleep;

  void validate() const {
    if (!uv) throw InvalidArgument("light rig needs a UV channel");
    if (settle_delay_ms && *settle_delay_ms < 0) throw InvalidArgument("settle_delay must be >= 0");
  }

  int settle_ms(const CalibrationProfile& p) const { return settle_delay_ms.value_or(p.settle_delay_ms); }

  void standard_mode() {
    uv->set(RelayState::kOff);
    if (ambient) ambient->set(RelayState::kOn);
  }
  void uv_mode() {
    if (ambient) ambient->set(RelayState::kOff);
    uv->set(RelayState::kOn);
  }
  /// Best effort: every channel is attempted even if one fails; the first
  /// failure is rethrown.
  void rest() {
    std::exception_ptr first;
    try {
      uv->set(RelayState::kOff);
    } catch (...) {
      first = std::current_exception();
    }
    if (ambient) {
      try {
        ambient->set(RelayState::kOn);
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
  }
  bool at_rest() const {
    return uv->state() == RelayState::kOff && (!ambient || ambient->state() == RelayState::kOn);
  }
};

/// Rig of simulated channels that starts at rest and does not really sleep.
inline LightRig make_sim_rig() {
  LightRig rig;
  rig.uv = std::make_shared<SimulatedChannel>(RelayState::kOff);
  rig.ambient = std::make_shared<SimulatedChannel>(RelayState::kOn);
  rig.sleep = [](std::chrono::milliseconds) {};
  return rig;
}

/// Renders the scene under whichever lights the rig currently has on.
class SimCamera : public CameraPort {
 public:
  SimCamera(SceneSpec scene, std::shared_ptr<const LightChannel> uv, std::shared_ptr<const LightChannel> ambient = {})
      : scene_(std::move(scene)), uv_(std::move(uv)), ambient_(std::move(ambient)) {}

  void set_exposure(double e) override {
    if (e < kMinExposure || e > kMaxExposure) throw InvalidArgument("exposure out of device range");
    exposure_ = e;
  }
  void set_white_balance(double k) override { white_balance_ = k; }

  ImageRGB grab() override {
    ++grabs_;
    if (uv_ && uv_->state() == RelayState::kOn) return render_uv(scene_, exposure_);
    if (!ambient_ || ambient_->state() == RelayState::kOn) return render_standard(scene_, exposure_);
    return render_standard(scene_, 0.0);
  }

  void set_scene(SceneSpec s) { scene_ = std::move(s); }
  const SceneSpec& scene() const noexcept { return scene_; }
  double exposure() const noexcept { return exposure_; }
  double white_balance() const noexcept { return white_balance_; }
  int grabs() const noexcept { return grabs_; }

 private:
  SceneSpec scene_;
  std::shared_ptr<const LightChannel> uv_;
  std::shared_ptr<const LightChannel> ambient_;
  double exposure_ = 50.0;
  double white_balance_ = 4600.0;
  int grabs_ = 0;
};

/// Plays back PNG files in name order, one per grab.
class ReplayCamera : public CameraPort {
 public:
  explicit ReplayCamera(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("replay directory not found: " + dir.string());
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      if (e.path().extension() == ".png") files_.push_back(e.path());
    }
    std::sort(files_.begin(), files_.end());
    if (files_.empty()) throw IoError("no PNG files in " + dir.string());
  }
  explicit ReplayCamera(std::vector<std::filesystem::path> files) : files_(std::move(files)) {}

  void set_exposure(double e) override { exposure_ = e; }
  void set_white_balance(double) override {}
  ImageRGB grab() override {
    if (next_ >= files_.size()) throw IoError("replay sequence exhausted");
    return read_png_rgb(files_[next_++].string());
  }
  double exposure() const noexcept { return exposure_; }

 private:
  std::vector<std::filesystem::path> files_;
  std::size_t next_ = 0;
  double exposure_ = 0.0;
};

namespace detail {

/// Returns the rig to rest when leaving scope by exception.
class RestGuard {
 public:
  explicit RestGuard(LightRig& rig) : rig_(rig) {}
  RestGuard(const RestGuard&) = delete;
  RestGuard& operator=(const RestGuard&) = delete;
  ~RestGuard() {
    if (armed_) {
      try {
        rig_.rest();
      } catch (...) {
      }
    }
  }
  void release() {
    armed_ = false;
    rig_.rest();
  }

 private:
  LightRig& rig_;
  bool armed_ = true;
};

using SteadyClock = std::chrono::steady_clock;

inline double seconds_since(SteadyClock::time_point t0) {
  return std::chrono::duration<double>(SteadyClock::now() - t0).count();
}

}  // namespace detail

/// Standard image at std_exposure, then UV at each bracket exposure in
/// ascending order. An empty bracket falls back to the profile's uv_bracket,
/// then to uv_exposure alone. Lights are switched between the two and the
/// rig settles after each switch.
inline PairedSample capture_pair(CameraPort& camera, LightRig& rig, const CalibrationProfile& profile,
                                 std::string sample_id, std::vector<double> bracket = {}) {
  rig.validate();
  profile.validate();
  if (bracket.empty()) bracket = profile.uv_bracket;
  if (bracket.empty()) bracket.push_back(profile.uv_exposure);
  std::sort(bracket.begin(), bracket.end());
  const auto settle = std::chrono::milliseconds(rig.settle_ms(profile));

  PairedSample s;
  s.sample_id = std::move(sample_id);
  const auto t0 = detail::SteadyClock::now();
  detail::RestGuard guard(rig);
  camera.set_white_balance(profile.white_balance);

  rig.standard_mode();
  rig.sleep(settle);
  s.timing.phases.emplace_back("std_lights", detail::seconds_since(t0));
  camera.set_exposure(profile.std_exposure);
  s.std_image = camera.grab();
  s.timing.phases.emplace_back("std_capture", detail::seconds_since(t0));

  rig.uv_mode();
  rig.sleep(settle);
  s.timing.phases.emplace_back("uv_lights", detail::seconds_since(t0));
  for (double e : bracket) {
    camera.set_exposure(e);
    s.uv_images.push_back({e, camera.grab()});
  }
  s.timing.phases.emplace_back("uv_capture", detail::seconds_since(t0));

  guard.release();
  s.timing.capture_seconds = detail::seconds_since(t0);
  s.timing.phases.emplace_back("restored", s.timing.capture_seconds);
  s.validate();
  return s;
}

/// Pixels, summed over classes, that fall in the class band with
/// 0.2 <= V <= 0.98.
inline std::int64_t exposure_score(const ImageRGB& uv, const CalibrationProfile& profile) {
  const HsvPlane hsv = image_to_hsv(uv);
  std::int64_t score = 0;
  for (const auto& c : profile.classes) {
    for (const auto& p : hsv.data()) {
      if (p.v >= 0.2f && p.v <= 0.98f && in_band(p, c.band)) ++score;
    }
  }
  return score;
}

struct SweepResult {
  double best = 0.0;
  std::vector<std::pair<double, std::int64_t>> scores;  // in candidate order
  bool all_zero = false;
};

inline SweepResult sweep_exposures(CameraPort& camera, LightRig& rig, const CalibrationProfile& profile,
                                   std::span<const double> candidates) {
  if (candidates.empty()) throw InvalidArgument("sweep needs at least one exposure");
  rig.validate();
  profile.validate();
  SweepResult r;
  detail::RestGuard guard(rig);
  camera.set_white_balance(profile.white_balance);
  rig.uv_mode();
  rig.sleep(std::chrono::milliseconds(rig.settle_ms(profile)));
  for (double e : candidates) {
    camera.set_exposure(e);
    r.scores.emplace_back(e, exposure_score(camera.grab(), profile));
  }
  guard.release();
  std::int64_t top = -1;
  for (const auto& [e, s] : r.scores) {
    if (s > top || (s == top && e < r.best)) {
      top = s;
      r.best = e;
    }
  }
  r.all_zero = top == 0;
  return r;
}

struct SessionSummary {
  int requested = 0;
  std::vector<std::string> ids;
  std::vector<std::string> failures;
  double mean_capture_seconds = 0.0;
  double mean_label_seconds = 0.0;
};

inline void to_json(Json& j, const SessionSummary& s) {
  j = Json{{"requested", s.requested},
           {"succeeded", s.ids.size()},
           {"ids", s.ids},
           {"failures", s.failures},
           {"mean_capture_seconds", s.mean_capture_seconds},
           {"mean_label_seconds", s.mean_label_seconds}};
}

/// Called before each capture with the sample index.
using Randomizer = std::function<void(int index)>;

struct SessionOptions {
  int n = 1;
  std::string id_prefix = "s";
  std::vector<double> bracket;
  Randomizer randomizer;
};

/// randomize -> capture_pair -> extract_labels -> persist, n times. Failed
/// samples are recorded and skipped; the session throws if more than half
/// fail.
inline SessionSummary collect_session(CameraPort& camera, LightRig& rig, const CalibrationProfile& profile,
                                      DatasetWriter& sink, const SessionOptions& opt) {
  if (opt.n < 1) throw InvalidArgument("session needs n >= 1");
  profile.validate();
  sink.write_profile(profile);
  SessionSummary sum;
  sum.requested = opt.n;
  double cap_total = 0.0, label_total = 0.0;
  for (int i = 0; i < opt.n; ++i) {
    std::string id = opt.id_prefix + std::to_string(i);
    for (int k = 1; sink.contains(id); ++k) id = opt.id_prefix + std::to_string(i) + "_" + std::to_string(k);
    try {
      if (opt.randomizer) opt.randomizer(i);
      PairedSample s = capture_pair(camera, rig, profile, id, opt.bracket);
      const auto t0 = detail::SteadyClock::now();
      s.labels = extract_labels(s.uv_images, profile);
      s.timing.label_seconds = detail::seconds_since(t0);
      sink.write_sample(s, profile.name);
      cap_total += s.timing.capture_seconds;
      label_total += s.timing.label_seconds;
      sum.ids.push_back(id);
    } catch (const std::exception& e) {
      sum.failures.push_back(id + ": " + e.what());
    }
  }
  if (!sum.ids.empty()) {
    sum.mean_capture_seconds = cap_total / static_cast<double>(sum.ids.size());
    sum.mean_label_seconds = label_total / static_cast<double>(sum.ids.size());
  }
  if (2 * sum.failures.size() > static_cast<std::size_t>(opt.n)) {
    throw Error("session failed: " + std::to_string(sum.failures.size()) + " of " + std::to_string(opt.n) +
                " samples failed; first: " + sum.failures.front());
  }
  return sum;
}

}  // namespace luv
