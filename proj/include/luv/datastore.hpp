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

// Dataset directory layout:
//
//   manifest.jsonl              one JSON record per sample
//   profiles/<name>.json        calibration profiles
//   images/<id>_std.png         standard-light image
//   images/<id>_uv_<e>.png      UV image at exposure e
//   labels/<id>_mask.png        class-index mask, 8-bit gray
//   labels/<id>_kp.json         keypoints
//
// Every file is written to a temporary name, synced and renamed. The
// manifest is rewritten the same way after the sample's files are in place,
// so a manifest line never names a file that is missing or partial.

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "luv/core.hpp"
#include "luv/png.hpp"
#include "luv/serialize.hpp"

namespace luv {

namespace fs = std::filesystem;

struct UvRef {
  double exposure = 0.0;
  std::string path;  // relative to the dataset root
  bool operator==(const UvRef&) const = default;
};

struct ManifestRecord {
  std::string id;
  std::string std_path;
  std::vector<UvRef> uv;
  std::string profile;
  double t_capture = 0.0;
  double t_label = 0.0;
  std::string created_at;
  std::optional<std::string> mask_path;
  std::optional<std::string> keypoints_path;
  std::vector<std::pair<std::string, double>> phases;

  bool labeled() const noexcept { return mask_path.has_value(); }
  bool operator==(const ManifestRecord&) const = default;
};

inline void to_json(Json& j, const ManifestRecord& r) {
  Json uv = Json::array();
  for (const auto& u : r.uv) uv.push_back({{"exposure", u.exposure}, {"path", u.path}});
  Json phases = Json::array();
  for (const auto& [name, t] : r.phases) phases.push_back({{"phase", name}, {"t", t}});
  j = Json{{"id", r.id},          {"std", r.std_path},   {"uv", uv},
           {"profile", r.profile}, {"t_capture", r.t_capture}, {"t_label", r.t_label},
           {"created_at", r.created_at}, {"phases", phases}};
  if (r.mask_path) j["mask"] = *r.mask_path;
  if (r.keypoints_path) j["keypoints"] = *r.keypoints_path;
}

inline void from_json(const Json& j, ManifestRecord& r) {
  ManifestRecord out;
  out.id = j.at("id").get<std::string>();
  out.std_path = j.at("std").get<std::string>();
  for (const auto& u : j.at("uv")) out.uv.push_back({u.at("exposure").get<double>(), u.at("path").get<std::string>()});
  out.profile = j.at("profile").get<std::string>();
  out.t_capture = j.at("t_capture").get<double>();
  out.t_label = j.at("t_label").get<double>();
  out.created_at = j.at("created_at").get<std::string>();
  if (j.contains("mask")) out.mask_path = j.at("mask").get<std::string>();
  if (j.contains("keypoints")) out.keypoints_path = j.at("keypoints").get<std::string>();
  if (j.contains("phases")) {
    for (const auto& p : j.at("phases")) out.phases.emplace_back(p.at("phase").get<std::string>(), p.at("t").get<double>());
  }
  if (out.uv.empty()) throw InvalidArgument("record has no UV images");
  r = std::move(out);
}

/// Ids become file names: [A-Za-z0-9_.-]+, not starting with '.'.
inline void validate_sample_id(const std::string& id) {
  const bool ok = !id.empty() && id.front() != '.' && std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
           c == '.';
  });
  if (!ok) throw InvalidArgument("invalid sample id '" + id + "'");
}

/// Shortest decimal that round-trips, for exposure file names.
inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline void write_all_fd(int fd, const void* data, std::size_t n, const std::string& path) {
  const auto* p = static_cast<const char*>(data);
  while (n > 0) {
    const ssize_t k = ::write(fd, p, n);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw IoError("write failed: " + path);
    }
    p += k;
    n -= static_cast<std::size_t>(k);
  }
}

}  // namespace detail

/// Called at each commit point with its name; throwing from it simulates the
/// writer dying there.
using CommitHook = std::function<void(std::string_view point)>;

/// Writes `data` to `path` via a synced temporary and rename.
inline void atomic_write(const fs::path& path, std::string_view data, const CommitHook& hook = {}) {
  const fs::path tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("cannot create " + tmp.string());
  try {
    if (hook) hook("open");
    const std::size_t half = data.size() / 2;
    detail::write_all_fd(fd, data.data(), half, tmp.string());
    if (hook) hook("partial");
    detail::write_all_fd(fd, data.data() + half, data.size() - half, tmp.string());
    if (::fsync(fd) != 0) throw IoError("fsync failed: " + tmp.string());
    if (hook) hook("synced");
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("rename failed: " + path.string());
  if (hook) hook("renamed");
}

inline void atomic_write(const fs::path& path, const Bytes& data, const CommitHook& hook = {}) {
  atomic_write(path, std::string_view(reinterpret_cast<const char*>(data.data()), data.size()), hook);
}

struct Dataset {
  fs::path root;
  std::vector<ManifestRecord> records;
  /// id -> relative paths that are named in the manifest but absent.
  std::map<std::string, std::vector<std::string>> missing;

  const ManifestRecord& find(const std::string& id) const {
    for (const auto& r : records) {
      if (r.id == id) return r;
    }
    throw InvalidArgument("no sample '" + id + "' in " + root.string());
  }
};

inline std::vector<std::string> record_files(const ManifestRecord& r) {
  std::vector<std::string> files{r.std_path};
  for (const auto& u : r.uv) files.push_back(u.path);
  if (r.mask_path) files.push_back(*r.mask_path);
  if (r.keypoints_path) files.push_back(*r.keypoints_path);
  return files;
}

/// Parses the manifest. A malformed line throws naming its line number.
/// Missing files are collected per record; with `require_files` any missing
/// file throws, listing the affected records.
inline Dataset read_dataset(const fs::path& root, bool require_files = true) {
  Dataset ds{root, {}, {}};
  const fs::path manifest = root / "manifest.jsonl";
  std::ifstream in(manifest);
  if (!in) throw IoError("no manifest at " + manifest.string());
  std::string line;
  std::set<std::string> ids;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ManifestRecord rec;
    try {
      rec = Json::parse(line).get<ManifestRecord>();
    } catch (const std::exception& e) {
      throw InvalidArgument(manifest.string() + ":" + std::to_string(lineno) + ": malformed record: " + e.what());
    }
    if (!ids.insert(rec.id).second) {
      throw InvalidArgument(manifest.string() + ":" + std::to_string(lineno) + ": duplicate id " + rec.id);
    }
    for (const auto& f : record_files(rec)) {
      if (!fs::exists(root / f)) ds.missing[rec.id].push_back(f);
    }
    ds.records.push_back(std::move(rec));
  }
  if (require_files && !ds.missing.empty()) {
    std::string msg = "dataset " + root.string() + " has records with missing files:";
    for (const auto& [id, files] : ds.missing) {
      msg += "\n  " + id + ":";
      for (const auto& f : files) msg += " " + f;
    }
    throw InvalidArgument(msg);
  }
  return ds;
}

inline PairedSample load_sample(const Dataset& ds, const ManifestRecord& r) {
  PairedSample s;
  s.sample_id = r.id;
  s.std_image = read_png_rgb((ds.root / r.std_path).string());
  for (const auto& u : r.uv) s.uv_images.push_back({u.exposure, read_png_rgb((ds.root / u.path).string())});
  if (r.mask_path) {
    LabelSet labels{read_png_gray((ds.root / *r.mask_path).string()), {}};
    if (r.keypoints_path) {
      labels.keypoints = read_json_file((ds.root / *r.keypoints_path).string()).get<std::vector<Keypoint>>();
    }
    s.labels = std::move(labels);
  }
  s.timing.capture_seconds = r.t_capture;
  s.timing.label_seconds = r.t_label;
  s.timing.phases = r.phases;
  return s;
}

inline PairedSample load_sample(const Dataset& ds, const std::string& id) { return load_sample(ds, ds.find(id)); }

inline std::optional<CalibrationProfile> load_dataset_profile(const Dataset& ds, const std::string& name) {
  const fs::path p = ds.root / "profiles" / (name + ".json");
  if (!fs::exists(p)) return std::nullopt;
  return load_profile(p.string());
}

/// Single writer per root. Existing manifest records are loaded on open so
/// ids stay unique across sessions.
class DatasetWriter {
 public:
  explicit DatasetWriter(fs::path root, CommitHook hook = {}) : root_(std::move(root)), hook_(std::move(hook)) {
    std::error_code ec;
    for (const char* sub : {"", "profiles", "images", "labels"}) {
      fs::create_directories(root_ / sub, ec);
      if (ec) throw IoError("cannot create " + (root_ / sub).string() + ": " + ec.message());
    }
    const fs::path manifest = root_ / "manifest.jsonl";
    if (fs::exists(manifest)) {
      std::ifstream in(manifest);
      std::stringstream ss;
      ss << in.rdbuf();
      manifest_text_ = ss.str();
      if (!manifest_text_.empty() && manifest_text_.back() != '\n') manifest_text_ += '\n';
      for (const auto& r : read_dataset(root_, false).records) ids_.insert(r.id);
    }
  }

  const fs::path& root() const noexcept { return root_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool contains(const std::string& id) const { return ids_.count(id) != 0; }

  void write_profile(const CalibrationProfile& profile) {
    profile.validate();
    validate_sample_id(profile.name);
    atomic_write(root_ / "profiles" / (profile.name + ".json"), Json(profile).dump(2) + "\n");
  }

  ManifestRecord write_sample(const PairedSample& s, const std::string& profile_name) {
    s.validate();
    validate_sample_id(s.sample_id);
    if (contains(s.sample_id)) throw InvalidArgument("duplicate sample id " + s.sample_id);

    ManifestRecord rec;
    rec.id = s.sample_id;
    rec.profile = profile_name;
    rec.t_capture = s.timing.capture_seconds;
    rec.t_label = s.timing.label_seconds;
    rec.phases = s.timing.phases;
    rec.created_at = utc_timestamp();

    rec.std_path = "images/" + s.sample_id + "_std.png";
    put(rec.std_path, encode_png(s.std_image));
    std::set<std::string> uv_names;
    for (const auto& uv : s.uv_images) {
      UvRef ref{uv.exposure, "images/" + s.sample_id + "_uv_" + format_number(uv.exposure) + ".png"};
      if (!uv_names.insert(ref.path).second) throw InvalidArgument("repeated UV exposure in sample " + s.sample_id);
      put(ref.path, encode_png(uv.image));
      rec.uv.push_back(std::move(ref));
    }
    if (s.labels) {
      rec.mask_path = "labels/" + s.sample_id + "_mask.png";
      put(*rec.mask_path, encode_png(s.labels->mask));
      rec.keypoints_path = "labels/" + s.sample_id + "_kp.json";
      const std::string kp = Json(s.labels->keypoints).dump() + "\n";
      atomic_write(root_ / *rec.keypoints_path, kp, hook_);
    }

    if (hook_) hook_("files_done");
    std::string next = manifest_text_ + Json(rec).dump() + "\n";
    atomic_write(root_ / "manifest.jsonl", next, hook_);
    manifest_text_ = std::move(next);
    ids_.insert(rec.id);
    return rec;
  }

 private:
  void put(const std::string& rel, const Bytes& data) { atomic_write(root_ / rel, data, hook_); }

  fs::path root_;
  CommitHook hook_;
  std::string manifest_text_;
  std::set<std::string> ids_;
};

// ---------------------------------------------------------------------------
// Run-length encoding, uncompressed COCO style: column-major runs starting
// with a (possibly empty) run of zeros.

inline std::vector<std::uint32_t> rle_encode(const BinaryMask& m) {
  std::vector<std::uint32_t> counts;
  bool cur = false;
  std::uint32_t run = 0;
  for (int x = 0; x < m.width(); ++x) {
    for (int y = 0; y < m.height(); ++y) {
      const bool v = m(x, y) != 0;
      if (v != cur) {
        counts.push_back(run);
        run = 0;
        cur = v;
      }
      ++run;
    }
  }
  counts.push_back(run);
  return counts;
}

inline BinaryMask rle_decode(std::span<const std::uint32_t> counts, int width, int height) {
  BinaryMask m(width, height);
  std::size_t pos = 0;
  const std::size_t total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::uint8_t v = 0;
  for (std::uint32_t c : counts) {
    if (pos + c > total) throw InvalidArgument("RLE counts exceed mask size");
    for (std::uint32_t i = 0; i < c; ++i, ++pos) {
      m(static_cast<int>(pos / static_cast<std::size_t>(height)), static_cast<int>(pos % static_cast<std::size_t>(height))) = v;
    }
    v ^= 1;
  }
  if (pos != total) throw InvalidArgument("RLE counts do not cover the mask");
  return m;
}

struct CocoExport {
  Json annotations;
  std::vector<std::string> warnings;
};

/// One annotation file for the whole dataset. Region classes become RLE
/// segmentations; keypoint-mode classes become keypoint annotations only.
/// Unlabeled samples are skipped with a warning.
inline CocoExport export_coco_like(const Dataset& ds) {
  CocoExport out;
  Json images = Json::array(), anns = Json::array(), cats = Json::array();
  std::map<int, ClassSpec> classes;
  std::map<std::string, std::optional<CalibrationProfile>> profiles;
  auto profile_for = [&](const std::string& name) -> const std::optional<CalibrationProfile>& {
    auto it = profiles.find(name);
    if (it == profiles.end()) it = profiles.emplace(name, load_dataset_profile(ds, name)).first;
    return it->second;
  };
  int image_id = 0, ann_id = 0;
  for (const auto& rec : ds.records) {
    if (!rec.labeled()) {
      out.warnings.push_back("sample " + rec.id + " has no labels; skipped");
      continue;
    }
    const PairedSample s = load_sample(ds, rec);
    ++image_id;
    images.push_back({{"id", image_id},
                      {"file_name", rec.std_path},
                      {"sample_id", rec.id},
                      {"width", s.std_image.width()},
                      {"height", s.std_image.height()}});
    std::set<int> keypoint_classes;
    if (const auto& prof = profile_for(rec.profile)) {
      for (const auto& c : prof->classes) {
        classes.emplace(c.class_id, c);
        if (c.keypoint_mode) keypoint_classes.insert(c.class_id);
      }
    } else {
      out.warnings.push_back("profile '" + rec.profile + "' for sample " + rec.id + " not found");
    }
    const Mask& mask = s.labels->mask;
    std::set<int> present;
    for (std::uint8_t v : mask.data()) {
      if (v) present.insert(v);
    }
    for (int k : present) {
      if (keypoint_classes.count(k)) continue;
      BinaryMask bin(mask.width(), mask.height());
      int u0 = mask.width(), v0 = mask.height(), u1 = -1, v1 = -1;
      std::int64_t area = 0;
      for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
          if (mask(x, y) != k) continue;
          bin(x, y) = 1;
          ++area;
          u0 = std::min(u0, x);
          v0 = std::min(v0, y);
          u1 = std::max(u1, x);
          v1 = std::max(v1, y);
        }
      }
      anns.push_back({{"id", ++ann_id},
                      {"image_id", image_id},
                      {"category_id", k},
                      {"segmentation", {{"counts", rle_encode(bin)}, {"size", {mask.height(), mask.width()}}}},
                      {"area", area},
                      {"bbox", {u0, v0, u1 - u0 + 1, v1 - v0 + 1}},
                      {"iscrowd", 1}});
    }
    std::map<int, Json> kp_by_class;
    for (const auto& kp : s.labels->keypoints) {
      Json& flat = kp_by_class[kp.class_id];
      if (flat.is_null()) flat = Json::array();
      flat.push_back(kp.u);
      flat.push_back(kp.v);
      flat.push_back(2);
    }
    for (auto& [k, flat] : kp_by_class) {
      const std::size_t n = flat.size() / 3;
      anns.push_back({{"id", ++ann_id},
                      {"image_id", image_id},
                      {"category_id", k},
                      {"keypoints", std::move(flat)},
                      {"num_keypoints", n},
                      {"iscrowd", 0}});
    }
  }
  for (const auto& [id, c] : classes) {
    cats.push_back({{"id", id}, {"name", c.name}, {"keypoint_mode", c.keypoint_mode}});
  }
  out.annotations = {{"images", images}, {"annotations", anns}, {"categories", cats}};
  return out;
}

}  // namespace luv
