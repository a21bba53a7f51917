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

// JSON mapping of the core value types. from_json validates, so a decoded
// value always satisfies its invariants.

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "luv/core.hpp"

namespace luv {

using Json = nlohmann::json;

NLOHMANN_JSON_SERIALIZE_ENUM(PaintType, {
    {PaintType::kLacquer, "lacquer"},
    {PaintType::kDye, "dye"},
    {PaintType::kWaterBased, "water_based"},
    {PaintType::kNaturalFluorescence, "natural_fluorescence"},
})

inline void to_json(Json& j, const HSVBand& b) {
  j = Json{{"hue_min", b.hue_min}, {"hue_max", b.hue_max}, {"sat_min", b.sat_min},
           {"sat_max", b.sat_max}, {"val_min", b.val_min}, {"val_max", b.val_max}};
}

inline void from_json(const Json& j, HSVBand& b) {
  b = HSVBand(j.at("hue_min").get<double>(), j.at("hue_max").get<double>(),
              j.at("sat_min").get<double>(), j.at("sat_max").get<double>(),
              j.at("val_min").get<double>(), j.at("val_max").get<double>());
}

inline void to_json(Json& j, const ClassSpec& c) {
  j = Json{{"class_id", c.class_id},
           {"name", c.name},
           {"band", c.band},
           {"min_area", c.min_area},
           {"morphology_open_radius", c.morphology_open_radius},
           {"morphology_close_radius", c.morphology_close_radius},
           {"paint_type", c.paint_type},
           {"keypoint_mode", c.keypoint_mode}};
}

inline void from_json(const Json& j, ClassSpec& c) {
  ClassSpec out;
  out.class_id = j.at("class_id").get<int>();
  out.name = j.value("name", std::string{});
  out.band = j.at("band").get<HSVBand>();
  out.min_area = j.value("min_area", std::int64_t{10});
  out.morphology_open_radius = j.value("morphology_open_radius", 1);
  out.morphology_close_radius = j.value("morphology_close_radius", 1);
  out.paint_type = j.value("paint_type", PaintType::kLacquer);
  out.keypoint_mode = j.value("keypoint_mode", false);
  out.validate();
  c = std::move(out);
}

inline void to_json(Json& j, const CalibrationProfile& p) {
  j = Json{{"name", p.name},
           {"classes", p.classes},
           {"uv_exposure", p.uv_exposure},
           {"std_exposure", p.std_exposure},
           {"white_balance", p.white_balance},
           {"settle_delay_ms", p.settle_delay_ms},
           {"uv_bracket", p.uv_bracket}};
}

inline void from_json(const Json& j, CalibrationProfile& p) {
  CalibrationProfile out;
  out.name = j.at("name").get<std::string>();
  out.classes = j.at("classes").get<std::vector<ClassSpec>>();
  out.uv_exposure = j.value("uv_exposure", 50.0);
  out.std_exposure = j.value("std_exposure", 50.0);
  out.white_balance = j.value("white_balance", 4600.0);
  out.settle_delay_ms = j.value("settle_delay_ms", 250);
  out.uv_bracket = j.value("uv_bracket", std::vector<double>{});
  out.validate();
  p = std::move(out);
}

inline void to_json(Json& j, const Keypoint& k) {
  j = Json{{"class_id", k.class_id}, {"u", k.u}, {"v", k.v}, {"area", k.area}};
}

inline void from_json(const Json& j, Keypoint& k) {
  k.class_id = j.at("class_id").get<int>();
  k.u = j.at("u").get<double>();
  k.v = j.at("v").get<double>();
  k.area = j.value("area", std::int64_t{0});
}

inline void to_json(Json& j, const TimingRecord& t) {
  Json phases = Json::array();
  for (const auto& [name, at] : t.phases) phases.push_back({{"phase", name}, {"t", at}});
  j = Json{{"capture_seconds", t.capture_seconds}, {"label_seconds", t.label_seconds}, {"phases", phases}};
}

inline void from_json(const Json& j, TimingRecord& t) {
  TimingRecord out;
  out.capture_seconds = j.at("capture_seconds").get<double>();
  out.label_seconds = j.at("label_seconds").get<double>();
  if (j.contains("phases")) {
    for (const auto& p : j.at("phases")) {
      out.phases.emplace_back(p.at("phase").get<std::string>(), p.at("t").get<double>());
    }
  }
  out.validate();
  t = std::move(out);
}

/// Parses JSON text, mapping parse failures to InvalidArgument.
inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

inline CalibrationProfile load_profile(const std::string& path) {
  const Json j = read_json_file(path);
  try {
    return j.get<CalibrationProfile>();
  } catch (const Json::exception& e) {
    throw InvalidArgument("invalid profile " + path + ": " + e.what());
  }
}

}  // namespace luv
