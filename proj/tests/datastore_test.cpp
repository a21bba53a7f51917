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

#include <fstream>
#include <memory>

#include "luv/datastore.hpp"
#include "test_support.hpp"

namespace luv {
namespace {

using testing::Gen;
using testing::TempDir;

CalibrationProfile bench_profile() {
  CalibrationProfile p;
  p.name = "bench";
  ClassSpec corner;
  corner.class_id = 1;
  corner.name = "corner";
  corner.keypoint_mode = true;
  corner.band = HSVBand(40, 70, 0.5, 1, 0.3, 1);
  ClassSpec cable;
  cable.class_id = 2;
  cable.name = "cable";
  cable.band = HSVBand(100, 140, 0.5, 1, 0.3, 1);
  p.classes = {corner, cable};
  return p;
}

PairedSample random_sample(Gen& g, const std::string& id, bool labeled = true) {
  PairedSample s;
  s.sample_id = id;
  s.std_image = g.image(23, 17);
  s.uv_images = {{12.5, g.image(23, 17)}, {50, g.image(23, 17)}};
  if (labeled) {
    LabelSet labels{Mask(23, 17), {}};
    for (auto& v : labels.mask.data()) v = g.coin(0.3) ? 2 : 0;
    labels.keypoints = {{1, g.uniform(0, 22), g.uniform(0, 16), 14}, {1, 1.0 / 3.0, 2.0 / 7.0, 9}};
    s.labels = std::move(labels);
  }
  s.timing.capture_seconds = g.uniform(0.5, 2.0);
  s.timing.label_seconds = g.uniform(0.05, 0.2);
  s.timing.phases = {{"std_lights", 0.0}, {"uv_capture", g.uniform()}};
  return s;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

TEST(SampleId, Validation) {
  EXPECT_NO_THROW(validate_sample_id("cap_01-a.b"));
  for (const char* bad : {"", ".hidden", "../x", "a/b", "sp ace"}) {
    EXPECT_THROW(validate_sample_id(bad), InvalidArgument) << bad;
  }
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(50), "50");
  EXPECT_EQ(format_number(12.5), "12.5");
  EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(ManifestRecord, JsonRoundTrip) {
  ManifestRecord r;
  r.id = "a";
  r.std_path = "images/a_std.png";
  r.uv = {{50, "images/a_uv_50.png"}};
  r.profile = "bench";
  r.t_capture = 1.25;
  r.t_label = 0.125;
  r.created_at = "2026-01-01T00:00:00Z";
  r.phases = {{"std_lights", 0.0}};
  const Json j = r;
  EXPECT_FALSE(j.contains("mask"));
  EXPECT_EQ(j.get<ManifestRecord>(), r);
  r.mask_path = "labels/a_mask.png";
  EXPECT_EQ(Json(r).get<ManifestRecord>(), r);
}

TEST(AtomicWrite, ReplacesWholeFileOrNothing) {
  TempDir dir("atomic");
  const fs::path p = dir.path() / "f.txt";
  atomic_write(p, std::string_view("old contents"));
  EXPECT_THROW(atomic_write(p, std::string_view("new contents that never land"),
                            [](std::string_view pt) {
                              if (pt == "partial") throw IoError("injected");
                            }),
               IoError);
  std::ifstream in(p);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, "old contents");
  std::vector<std::string> seen;
  atomic_write(p, std::string_view("x"), [&](std::string_view pt) { seen.emplace_back(pt); });
  EXPECT_EQ(seen, (std::vector<std::string>{"open", "partial", "synced", "renamed"}));
}

TEST(Dataset, RoundTripIsBitIdentical) {
  TempDir dir("ds");
  Gen g(1);
  const auto a = random_sample(g, "a"), b = random_sample(g, "b", false);
  {
    DatasetWriter w(dir.path());
    w.write_profile(bench_profile());
    const auto rec = w.write_sample(a, "bench");
    EXPECT_EQ(rec.uv[0].path, "images/a_uv_12.5.png");
    w.write_sample(b, "bench");
    EXPECT_EQ(w.size(), 2u);
  }
  const Dataset ds = read_dataset(dir.path());
  ASSERT_EQ(ds.records.size(), 2u);
  EXPECT_TRUE(ds.records[0].labeled());
  EXPECT_FALSE(ds.records[1].labeled());
  EXPECT_EQ(load_sample(ds, "a"), a);
  EXPECT_EQ(load_sample(ds, "b"), b);
  EXPECT_EQ(load_dataset_profile(ds, "bench"), bench_profile());
  EXPECT_FALSE(load_dataset_profile(ds, "nope").has_value());
  EXPECT_THROW(ds.find("zzz"), InvalidArgument);
}

TEST(Dataset, DuplicateIdRejectedAcrossSessions) {
  TempDir dir("dup");
  Gen g(2);
  {
    DatasetWriter w(dir.path());
    w.write_sample(random_sample(g, "a"), "bench");
    EXPECT_THROW(w.write_sample(random_sample(g, "a"), "bench"), InvalidArgument);
  }
  DatasetWriter again(dir.path());
  EXPECT_TRUE(again.contains("a"));
  EXPECT_THROW(again.write_sample(random_sample(g, "a"), "bench"), InvalidArgument);
  again.write_sample(random_sample(g, "b"), "bench");
  EXPECT_EQ(read_dataset(dir.path()).records.size(), 2u);
}

TEST(Dataset, MalformedLineNamesLineNumber) {
  TempDir dir("bad");
  Gen g(3);
  {
    DatasetWriter w(dir.path());
    w.write_sample(random_sample(g, "a"), "bench");
  }
  std::ifstream in(dir.path() / "manifest.jsonl");
  std::string first;
  std::getline(in, first);
  in.close();
  write_text(dir.path() / "manifest.jsonl", first + "\n{\"id\": \"b\", \"std\": 3}\n");
  try {
    read_dataset(dir.path());
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("manifest.jsonl:2: malformed record"), std::string::npos) << e.what();
  }
  write_text(dir.path() / "manifest.jsonl", first + "\n" + first + "\n");
  EXPECT_THROW(read_dataset(dir.path()), InvalidArgument);
}

TEST(Dataset, MissingMaskIsReported) {
  TempDir dir("missing");
  Gen g(4);
  {
    DatasetWriter w(dir.path());
    w.write_sample(random_sample(g, "a"), "bench");
    w.write_sample(random_sample(g, "b"), "bench");
  }
  fs::remove(dir.path() / "labels" / "b_mask.png");
  try {
    read_dataset(dir.path());
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("b: labels/b_mask.png"), std::string::npos) << e.what();
  }
  const Dataset lax = read_dataset(dir.path(), false);
  EXPECT_EQ(lax.records.size(), 2u);
  ASSERT_EQ(lax.missing.size(), 1u);
  EXPECT_EQ(lax.missing.at("b"), std::vector<std::string>{"labels/b_mask.png"});
}

TEST(Dataset, EmptyAndAbsentManifest) {
  TempDir dir("empty");
  EXPECT_THROW(read_dataset(dir.path()), IoError);
  write_text(dir.path() / "manifest.jsonl", "");
  EXPECT_TRUE(read_dataset(dir.path()).records.empty());
  write_text(dir.path() / "manifest.jsonl", "\n  \n");
  EXPECT_TRUE(read_dataset(dir.path()).records.empty());
}

// Kill the writer at every commit point of a second sample. The manifest must
// always parse, name only complete files, and hold either one or two records.
TEST(Dataset, FaultInjectionNeverCorruptsManifest) {
  Gen g(5);
  const auto first = random_sample(g, "first");
  const auto second = random_sample(g, "second");

  int total_points = 0;
  {
    TempDir probe("probe");
    DatasetWriter w(probe.path(), [&](std::string_view) { ++total_points; });
    w.write_sample(second, "bench");
  }
  ASSERT_GT(total_points, 10);

  for (int k = 0; k < total_points; ++k) {
    TempDir dir("fault");
    auto armed = std::make_shared<bool>(false);
    auto calls = std::make_shared<int>(0);
    std::string point;
    DatasetWriter w(dir.path(), [=, &point](std::string_view pt) {
      if (!*armed) return;
      if ((*calls)++ == k) {
        point = pt;
        throw IoError("injected crash");
      }
    });
    w.write_sample(first, "bench");
    *armed = true;
    EXPECT_THROW(w.write_sample(second, "bench"), IoError) << "k=" << k;

    const Dataset ds = read_dataset(dir.path());
    ASSERT_GE(ds.records.size(), 1u) << "k=" << k << " at " << point;
    ASSERT_LE(ds.records.size(), 2u);
    EXPECT_EQ(load_sample(ds, "first"), first);
    if (ds.records.size() == 2) {
      EXPECT_EQ(load_sample(ds, "second"), second) << "k=" << k << " at " << point;
    }
  }
}

TEST(Rle, HandExampleAndLeadingZeroRun) {
  BinaryMask m(2, 2, std::vector<std::uint8_t>{0, 1, 1, 1});
  EXPECT_EQ(rle_encode(m), (std::vector<std::uint32_t>{1, 3}));
  BinaryMask ones(2, 1, std::vector<std::uint8_t>{1, 0});
  EXPECT_EQ(rle_encode(ones), (std::vector<std::uint32_t>{0, 1, 1}));
  EXPECT_EQ(rle_encode(BinaryMask(3, 3)), (std::vector<std::uint32_t>{9}));
}

TEST(Rle, RoundTripsRandomMasks) {
  Gen g(6);
  for (int i = 0; i < 100; ++i) {
    const int w = g.integer(1, 30), h = g.integer(1, 30);
    const auto m = g.mask(w, h, g.uniform());
    const auto counts = rle_encode(m);
    std::uint64_t sum = 0;
    for (auto c : counts) sum += c;
    EXPECT_EQ(sum, static_cast<std::uint64_t>(w * h));
    EXPECT_EQ(rle_decode(counts, w, h), m);
  }
  EXPECT_THROW(rle_decode(std::vector<std::uint32_t>{2}, 2, 2), InvalidArgument);
  EXPECT_THROW(rle_decode(std::vector<std::uint32_t>{5}, 2, 2), InvalidArgument);
}

TEST(CocoExport, RegionAndKeypointAnnotations) {
  TempDir dir("coco");
  Gen g(7);
  {
    DatasetWriter w(dir.path());
    w.write_profile(bench_profile());
    w.write_sample(random_sample(g, "a"), "bench");
    w.write_sample(random_sample(g, "b"), "bench");
    w.write_sample(random_sample(g, "c", false), "bench");
  }
  const Dataset ds = read_dataset(dir.path());
  const CocoExport out = export_coco_like(ds);
  const Json& j = out.annotations;
  EXPECT_EQ(j["images"].size(), 2u);
  ASSERT_EQ(out.warnings.size(), 1u);
  EXPECT_NE(out.warnings[0].find("sample c"), std::string::npos);
  ASSERT_EQ(j["categories"].size(), 2u);
  EXPECT_EQ(j["categories"][0]["keypoint_mode"], true);

  int region = 0, keypoints = 0;
  for (const auto& a : j["annotations"]) {
    if (a.contains("segmentation")) {
      ++region;
      EXPECT_EQ(a["category_id"], 2);
      const auto counts = a["segmentation"]["counts"].get<std::vector<std::uint32_t>>();
      const BinaryMask decoded = rle_decode(counts, 23, 17);
      const Mask mask = load_sample(ds, a["image_id"] == 1 ? "a" : "b").labels->mask;
      for (std::size_t i = 0; i < mask.size(); ++i) EXPECT_EQ(decoded.data()[i], mask.data()[i] == 2);
    } else {
      ++keypoints;
      EXPECT_EQ(a["category_id"], 1);
      EXPECT_EQ(a["keypoints"].size(), 6u);
      EXPECT_EQ(a["num_keypoints"], 2);
    }
  }
  EXPECT_EQ(region, 2);
  EXPECT_EQ(keypoints, 2);
}

}  // namespace
}  // namespace luv
