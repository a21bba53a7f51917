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

// luv: capture, label, train and evaluate UV-fluorescence datasets.
//
// Exit status: 0 success, 1 runtime failure, 2 bad arguments or config.

#include <csignal>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "luv/capture.hpp"
#include "luv/clothsim.hpp"
#include "luv/config.hpp"
#include "luv/datastore.hpp"
#include "luv/evalkit.hpp"
#include "luv/foldpolicy.hpp"
#include "luv/maskgen.hpp"
#include "luv/plugnet.hpp"
#include "luv/png.hpp"
#include "luv/segmodel.hpp"
#include "luv/serialize.hpp"
#include "luv/service.hpp"
#include "luv/synthscene.hpp"

namespace {

namespace fs = std::filesystem;
using luv::Json;

/// Raised for problems found before any work starts; exits with 2.
class UsageError : public luv::Error {
 public:
  using luv::Error::Error;
};

struct Common {
  bool json = false;
};

void emit(const Common& c, const Json& j, const std::string& text) {
  if (c.json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << text;
  }
}

luv::CalibrationProfile require_profile(const std::string& path) {
  if (path.empty()) throw UsageError("a profile is required (--profile)");
  if (!fs::exists(path)) throw UsageError("profile not found: " + path);
  try {
    return luv::load_profile(path);
  } catch (const luv::Error& e) {
    throw UsageError(e.what());
  }
}

luv::AppConfig base_config() {
  try {
    return luv::load_config_from_env();
  } catch (const luv::Error& e) {
    throw UsageError(e.what());
  }
}

std::vector<luv::ExposedImage> read_uv_inputs(const std::vector<std::string>& paths, const std::vector<double>& exps) {
  if (paths.empty()) throw UsageError("at least one --uv image is required");
  if (!exps.empty() && exps.size() != paths.size()) throw UsageError("--exposure count must match --uv count");
  std::vector<luv::ExposedImage> out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (!fs::exists(paths[i])) throw UsageError("image not found: " + paths[i]);
    out.push_back({exps.empty() ? static_cast<double>(i) : exps[i], luv::read_png_rgb(paths[i])});
  }
  return out;
}

// ---------------------------------------------------------------------------

struct CaptureArgs {
  bool sim = false;
  int n = 1;
  std::string dataset;
  std::string profile;
  std::string scene = "mixed";
  int width = 0, height = 0;
  double noise = -1.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<double> bracket;
};

int cmd_capture(const Common& c, const CaptureArgs& a) {
  if (a.n < 1) throw UsageError("--n must be >= 1");
  luv::AppConfig cfg = base_config();
  if (a.sim) {
    cfg.camera.kind = "sim";
    cfg.rig.kind = "sim";
  }
  if (!a.dataset.empty()) cfg.dataset_root = a.dataset;
  if (!a.profile.empty()) cfg.profile_path = a.profile;
  if (a.width > 0) cfg.camera.width = a.width;
  if (a.height > 0) cfg.camera.height = a.height;
  if (a.noise >= 0.0) cfg.camera.noise_sigma = a.noise;
  if (a.seed_set) cfg.seed = a.seed;
  try {
    cfg.camera.scene = luv::parse_scene_kind(a.scene);
    cfg.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (!cfg.profile_path.empty()) require_profile(cfg.profile_path);

  luv::Hardware hw = luv::build_hardware(cfg);
  const luv::CalibrationProfile profile = luv::resolve_profile(cfg, hw);
  luv::DatasetWriter writer(cfg.dataset_root);
  luv::SessionOptions opt;
  opt.n = a.n;
  opt.bracket = a.bracket;
  if (hw.sim) {
    luv::SimCamera* cam = hw.sim;
    const luv::SceneSpec base = cam->scene();
    const std::uint64_t seed = cfg.seed;
    opt.randomizer = [cam, base, seed](int i) { cam->set_scene(luv::randomize(base, seed + static_cast<std::uint64_t>(i))); };
  }
  const luv::SessionSummary s = luv::collect_session(*hw.camera, hw.rig, profile, writer, opt);
  std::ostringstream text;
  text << "captured " << s.ids.size() << "/" << s.requested << " samples into " << cfg.dataset_root << "\n"
       << "mean capture " << s.mean_capture_seconds << " s, mean label " << s.mean_label_seconds << " s\n";
  for (const auto& f : s.failures) text << "failed: " << f << "\n";
  emit(c, Json(s), text.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct LabelArgs {
  std::string profile;
  std::vector<std::string> uv;
  std::vector<double> exposures;
  std::string out;
  std::string keypoints;
};

int cmd_label(const Common& c, const LabelArgs& a) {
  const luv::CalibrationProfile profile = require_profile(a.profile);
  const auto uv = read_uv_inputs(a.uv, a.exposures);
  const auto t0 = std::chrono::steady_clock::now();
  const luv::LabelSet labels = luv::extract_labels(uv, profile);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!a.out.empty()) luv::atomic_write(a.out, luv::encode_png(labels.mask));
  if (!a.keypoints.empty()) luv::atomic_write(a.keypoints, Json(labels.keypoints).dump() + "\n");
  Json j = luv::preview_payload(labels, profile);
  j.erase("mask_png_base64");
  j["label_seconds"] = secs;
  std::ostringstream text;
  for (const auto& [k, v] : j["per_class_pixel_counts"].items()) text << "class " << k << ": " << v << " px\n";
  text << labels.keypoints.size() << " keypoints\n";
  emit(c, j, text.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  bool sim = false;
  std::string profile;
  std::vector<double> exposures;
  std::string scene = "mixed";
  std::uint64_t seed = 0;
};

int cmd_sweep(const Common& c, const SweepArgs& a) {
  if (a.exposures.empty()) throw UsageError("--exposures needs at least one value");
  luv::AppConfig cfg = base_config();
  if (a.sim) {
    cfg.camera.kind = "sim";
    cfg.rig.kind = "sim";
    cfg.seed = a.seed;
  }
  if (!a.profile.empty()) cfg.profile_path = a.profile;
  try {
    cfg.camera.scene = luv::parse_scene_kind(a.scene);
    cfg.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (!cfg.profile_path.empty()) require_profile(cfg.profile_path);
  luv::Hardware hw = luv::build_hardware(cfg);
  const luv::CalibrationProfile profile = luv::resolve_profile(cfg, hw);
  const luv::SweepResult r = luv::sweep_exposures(*hw.camera, hw.rig, profile, a.exposures);
  Json scores = Json::array();
  std::ostringstream text;
  for (const auto& [e, s] : r.scores) {
    scores.push_back({{"exposure", e}, {"score", s}});
    text << "exposure " << e << ": " << s << "\n";
  }
  text << "best " << r.best << (r.all_zero ? " (all scores zero)" : "") << "\n";
  emit(c, {{"best", r.best}, {"scores", scores}, {"all_zero", r.all_zero}}, text.str());
  return 0;
}

// ---------------------------------------------------------------------------

std::vector<luv::TrainingSample> training_samples(const luv::Dataset& ds) {
  std::vector<luv::TrainingSample> out;
  for (const auto& r : ds.records) {
    if (!r.labeled()) continue;
    luv::PairedSample s = luv::load_sample(ds, r);
    out.push_back({r.id, std::move(s.std_image), std::move(s.labels->mask)});
  }
  return out;
}

struct TrainArgs {
  std::string dataset;
  std::string model;
  luv::TrainHyper hyper;
  int classes = 0;
};

int cmd_train(const Common& c, const TrainArgs& a) {
  if (a.dataset.empty() || !fs::exists(fs::path(a.dataset) / "manifest.jsonl")) {
    throw UsageError("dataset not found: " + a.dataset);
  }
  if (a.model.empty()) throw UsageError("--model output path is required");
  const luv::Dataset ds = luv::read_dataset(a.dataset);
  const auto samples = training_samples(ds);
  if (samples.empty()) throw luv::InvalidArgument("dataset has no labeled samples");
  int classes = a.classes;
  if (classes <= 0) {
    int top = 0;
    for (const auto& s : samples) {
      for (std::uint8_t v : s.labels.data()) top = std::max<int>(top, v);
    }
    classes = top + 1;
  }
  const luv::ModelParams m = luv::fit(samples, classes, a.hyper);
  luv::save_model(a.model, m);
  const double final_loss = m.loss_trace.empty() ? 0.0 : m.loss_trace.back();
  std::ostringstream text;
  text << "trained " << classes << "-class model on " << samples.size() << " samples, final loss " << final_loss
       << "\nwrote " << a.model << "\n";
  emit(c, {{"classes", classes}, {"samples", samples.size()}, {"final_loss", final_loss}, {"model", a.model}},
       text.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string ref;
  std::string model;
  double radius = 3.0;
};

std::vector<luv::LabeledItem> labeled_items(const luv::Dataset& ds) {
  std::vector<luv::LabeledItem> out;
  for (const auto& r : ds.records) {
    if (!r.labeled()) continue;
    luv::PairedSample s = luv::load_sample(ds, r);
    out.push_back({r.id, std::move(*s.labels), s.timing});
  }
  return out;
}

int cmd_eval(const Common& c, const EvalArgs& a) {
  auto require_dataset = [](const std::string& d) {
    if (d.empty() || !fs::exists(fs::path(d) / "manifest.jsonl")) throw UsageError("dataset not found: " + d);
  };
  require_dataset(a.ref);
  if (a.model.empty()) require_dataset(a.pred);
  const luv::Dataset ref_ds = luv::read_dataset(a.ref);
  const auto ref = labeled_items(ref_ds);
  std::vector<luv::LabeledItem> pred;
  if (!a.model.empty()) {
    if (!fs::exists(a.model)) throw UsageError("model not found: " + a.model);
    const luv::ModelParams m = luv::load_model(a.model);
    for (const auto& item : ref) {
      const luv::PairedSample s = luv::load_sample(ref_ds, item.id);
      const auto t0 = std::chrono::steady_clock::now();
      luv::LabelSet ls{luv::predict(m, s.std_image), {}};
      luv::TimingRecord t;
      t.label_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      pred.push_back({item.id, std::move(ls), t});
    }
  } else {
    pred = labeled_items(luv::read_dataset(a.pred));
  }

  std::set<int> region, keypoint_only;
  for (const auto& r : ref_ds.records) {
    if (auto p = luv::load_dataset_profile(ref_ds, r.profile)) {
      for (const auto& cls : p->classes) (cls.keypoint_mode ? keypoint_only : region).insert(cls.class_id);
    }
  }
  for (const auto& item : ref) {
    for (std::uint8_t v : item.labels.mask.data()) {
      if (v && !keypoint_only.count(v)) region.insert(v);
    }
  }
  const std::vector<int> classes(region.begin(), region.end());
  const luv::EvalReport rep = luv::compare_labelers(pred, ref, classes, a.radius);

  std::ostringstream text;
  text << "samples " << rep.sample_count << "\nmean IOU " << rep.mean_iou << "\n";
  for (const auto& [k, v] : rep.per_class_iou) text << "  class " << k << " IOU " << v << "\n";
  text << "keypoints matched " << rep.keypoints_matched << " precision " << rep.keypoint_precision << " recall "
       << rep.keypoint_recall << " mean distance " << rep.keypoint_mean_distance << " px\n";
  if (rep.spl) text << "SPL mean " << rep.spl->mean << " s\n";
  emit(c, luv::to_json(rep), text.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string out;
  std::string kind = "mixed";
  int n = 10;
  int width = 640, height = 480;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> bracket;
  bool ground_truth = false;
  bool unpainted = false;
};

int cmd_simulate(const Common& c, const SimulateArgs& a) {
  if (a.out.empty()) throw UsageError("--out is required");
  if (a.n < 1) throw UsageError("--n must be >= 1");
  if (a.width < 1 || a.height < 1) throw UsageError("--width and --height must be positive");
  luv::SceneKind kind;
  try {
    kind = luv::parse_scene_kind(a.kind);
  } catch (const luv::Error& e) {
    throw UsageError(e.what());
  }

  luv::DatasetWriter writer(a.out);
  const luv::SceneSpec base = luv::make_scene(kind, a.width, a.height, a.seed, a.noise);
  const luv::CalibrationProfile profile = luv::companion_profile(base, "synth");
  writer.write_profile(profile);
  double label_total = 0.0;
  for (int i = 0; i < a.n; ++i) {
    luv::SceneSpec spec = luv::randomize(base, a.seed + static_cast<std::uint64_t>(i));
    luv::PairedSample s;
    s.sample_id = "sim" + std::to_string(i);
    const luv::SceneSpec shown = a.unpainted ? luv::unpainted(spec) : spec;
    s.std_image = luv::render_standard(shown, profile.std_exposure);
    std::vector<double> exps = a.bracket.empty() ? std::vector<double>{profile.uv_exposure} : a.bracket;
    std::sort(exps.begin(), exps.end());
    for (double e : exps) s.uv_images.push_back({e, luv::render_uv(spec, e)});
    const auto t0 = std::chrono::steady_clock::now();
    s.labels = a.ground_truth ? luv::ground_truth(spec) : luv::extract_labels(s.uv_images, profile);
    s.timing.label_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    label_total += s.timing.label_seconds;
    writer.write_sample(s, profile.name);
  }
  std::ostringstream text;
  text << "wrote " << a.n << " samples to " << a.out << "\n";
  emit(c, {{"samples", a.n}, {"root", a.out}, {"mean_label_seconds", label_total / a.n}}, text.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct PlugArgs {
  std::string host;
  int port = luv::kDefaultPlugPort;
  std::string state;
  int timeout_ms = 2000;
};

int cmd_plug(const Common& c, const PlugArgs& a) {
  luv::PlugEndpoint ep{a.host, a.port, ""};
  try {
    ep.validate();
  } catch (const luv::Error& e) {
    throw UsageError(e.what());
  }
  if (a.state != "on" && a.state != "off" && a.state != "query") throw UsageError("--state must be on, off or query");
  const auto timeout = std::chrono::milliseconds(a.timeout_ms);
  if (a.state != "query") luv::set_relay(ep, a.state == "on" ? luv::RelayState::kOn : luv::RelayState::kOff, timeout);
  const luv::RelayState s = luv::query_state(ep, timeout);
  emit(c, {{"host", ep.host}, {"port", ep.port}, {"state", luv::to_string(s)}},
       ep.key() + " " + luv::to_string(s) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------

struct CostArgs {
  double setup = 0.0, price = 0.0, labels_per_image = 0.0;
};

int cmd_cost(const Common& c, const CostArgs& a) {
  std::int64_t n = 0;
  try {
    n = luv::cost_breakeven(a.setup, a.price, a.labels_per_image);
  } catch (const luv::InvalidArgument& e) {
    throw UsageError(e.what());
  }
  emit(c, {{"breakeven_images", n}, {"setup", a.setup}, {"price_per_label", a.price},
           {"labels_per_image", a.labels_per_image}},
       std::to_string(n) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------

struct PolicyArgs {
  int rollouts = 100;
  double width = 0.5, height = 0.7;
  std::uint64_t seed = 0;
  int budget = luv::kDefaultActionBudget;
};

int cmd_policy(const Common& c, const PolicyArgs& a) {
  if (a.rollouts < 1 || a.budget < 0) throw UsageError("--rollouts must be >= 1 and --budget >= 0");
  std::optional<luv::TowelSpec> towel;
  try {
    towel.emplace(a.width, a.height);
  } catch (const luv::Error& e) {
    throw UsageError(e.what());
  }
  std::vector<luv::Rollout> rollouts;
  Json records = Json::array();
  for (int i = 0; i < a.rollouts; ++i) {
    luv::CornerJitterCloth cloth(*towel, a.seed + static_cast<std::uint64_t>(i));
    luv::PolicyParams params;
    params.cloth_region_min = {-0.5 * a.width, -0.5 * a.height};
    params.cloth_region_max = {0.5 * a.width, 0.5 * a.height};
    auto identity = [](std::vector<luv::Vec2> corners) { return corners; };
    rollouts.push_back(luv::run_policy(identity, cloth, *towel, params, a.budget, a.seed * 7919 + i));
    records.push_back(luv::to_json(rollouts.back()));
  }
  const luv::RolloutSummary s = luv::summarize(rollouts);
  std::ostringstream text;
  text << "rollouts " << s.rollouts << ", smoothed " << s.smoothing_success_rate * 100.0 << "%, actions "
       << s.mean_actions << " +/- " << s.std_actions << "\n";
  emit(c,
       {{"rollouts", s.rollouts},
        {"smoothing_success_rate", s.smoothing_success_rate},
        {"mean_actions", s.mean_actions},
        {"std_actions", s.std_actions},
        {"records", records}},
       text.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct ServeArgs {
  bool sim = false;
  int port = -1;
  std::string host = "127.0.0.1";
  std::string dataset;
  std::string profile;
};

int cmd_serve(const Common&, const ServeArgs& a) {
  luv::AppConfig cfg = base_config();
  if (a.sim) {
    cfg.camera.kind = "sim";
    cfg.rig.kind = "sim";
  }
  if (a.port >= 0) cfg.port = a.port;
  if (!a.dataset.empty()) cfg.dataset_root = a.dataset;
  if (!a.profile.empty()) cfg.profile_path = a.profile;
  try {
    cfg.validate();
  } catch (const luv::Error& e) {
    throw UsageError(e.what());
  }
  if (!cfg.profile_path.empty()) require_profile(cfg.profile_path);
  luv::LuvService svc(cfg);
  try {
    svc.start(a.host, cfg.port);
  } catch (const luv::IoError& e) {
    throw UsageError(e.what());
  }
  std::cout << "listening on " << a.host << ":" << svc.port() << std::endl;
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  int sig = 0;
  sigwait(&set, &sig);
  svc.stop();
  return 0;
}

int cmd_mock_plug(int port) {
  luv::MockPlugServer server(port);
  std::cout << "mock plug on 127.0.0.1:" << server.port() << std::endl;
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  int sig = 0;
  sigwait(&set, &sig);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LUV: labels from UV-fluorescent paint"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_flag("--json", common.json, "Print a JSON report");

  CaptureArgs cap;
  auto* capture = app.add_subcommand("capture", "Collect a labeled dataset with the configured rig");
  capture->add_flag("--sim", cap.sim, "Simulated camera and lights");
  capture->add_option("--n", cap.n, "Number of samples");
  capture->add_option("--dataset", cap.dataset, "Dataset root");
  capture->add_option("--profile", cap.profile, "Calibration profile JSON");
  capture->add_option("--scene", cap.scene, "Simulated scene kind: towel, cable, needle, mixed");
  capture->add_option("--width", cap.width);
  capture->add_option("--height", cap.height);
  capture->add_option("--noise", cap.noise, "Simulated sensor noise sigma");
  capture->add_option("--seed", cap.seed)->each([&](const std::string&) { cap.seed_set = true; });
  capture->add_option("--bracket", cap.bracket, "UV exposures to fuse")->delimiter(',');

  LabelArgs lab;
  auto* label = app.add_subcommand("label", "Extract labels from UV images");
  label->add_option("--profile", lab.profile)->required();
  label->add_option("--uv", lab.uv, "UV image PNG; repeat for a bracket")->required();
  label->add_option("--exposure", lab.exposures, "Exposure of each --uv image");
  label->add_option("--out", lab.out, "Mask PNG output");
  label->add_option("--keypoints", lab.keypoints, "Keypoint JSON output");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Score UV exposures and pick the best");
  sweep->add_flag("--sim", sw.sim);
  sweep->add_option("--profile", sw.profile);
  sweep->add_option("--exposures", sw.exposures)->delimiter(',')->required();
  sweep->add_option("--scene", sw.scene);
  sweep->add_option("--seed", sw.seed);

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Fit the pixel classifier on a labeled dataset");
  train->add_option("--dataset", tr.dataset)->required();
  train->add_option("--model", tr.model)->required();
  train->add_option("--iterations", tr.hyper.iterations);
  train->add_option("--lr", tr.hyper.learning_rate);
  train->add_option("--l2", tr.hyper.l2);
  train->add_option("--seed", tr.hyper.seed);
  train->add_option("--subsample", tr.hyper.subsample_rate);
  train->add_option("--classes", tr.classes, "Class count including background");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Compare labels against a reference dataset");
  eval->add_option("--pred", ev.pred, "Candidate dataset");
  eval->add_option("--ref", ev.ref, "Reference dataset")->required();
  eval->add_option("--model", ev.model, "Predict the reference standard images with this model");
  eval->add_option("--radius", ev.radius, "Keypoint match radius in pixels");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic dataset");
  simulate->add_option("--out", sim.out)->required();
  simulate->add_option("--kind", sim.kind);
  simulate->add_option("--n", sim.n);
  simulate->add_option("--width", sim.width);
  simulate->add_option("--height", sim.height);
  simulate->add_option("--noise", sim.noise);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--bracket", sim.bracket)->delimiter(',');
  simulate->add_flag("--ground-truth", sim.ground_truth, "Store exact labels instead of extracted ones");
  simulate->add_flag("--unpainted", sim.unpainted, "Render standard images without paint");

  PlugArgs pl;
  auto* plug = app.add_subcommand("plug", "Switch or query a smart plug");
  plug->add_option("--host", pl.host)->required();
  plug->add_option("--port", pl.port);
  plug->add_option("--state", pl.state, "on, off or query")->required();
  plug->add_option("--timeout-ms", pl.timeout_ms);

  CostArgs co;
  auto* cost = app.add_subcommand("cost", "Images needed for the rig to beat per-label pricing");
  cost->add_option("--setup", co.setup)->required();
  cost->add_option("--price", co.price)->required();
  cost->add_option("--labels-per-image", co.labels_per_image)->required();

  PolicyArgs po;
  auto* policy = app.add_subcommand("policy", "Run smoothing rollouts on the simulated cloth");
  policy->add_option("--rollouts", po.rollouts);
  policy->add_option("--width", po.width);
  policy->add_option("--height", po.height);
  policy->add_option("--seed", po.seed);
  policy->add_option("--budget", po.budget);

  ServeArgs se;
  auto* serve = app.add_subcommand("serve", "HTTP control service");
  serve->add_flag("--sim", se.sim);
  serve->add_option("--port", se.port);
  serve->add_option("--host", se.host);
  serve->add_option("--dataset", se.dataset);
  serve->add_option("--profile", se.profile);

  int mock_port = 0;
  auto* mock = app.add_subcommand("mock-plug", "Serve a simulated smart plug");
  mock->add_option("--port", mock_port);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*capture) return cmd_capture(common, cap);
    if (*label) return cmd_label(common, lab);
    if (*sweep) return cmd_sweep(common, sw);
    if (*train) return cmd_train(common, tr);
    if (*eval) return cmd_eval(common, ev);
    if (*simulate) return cmd_simulate(common, sim);
    if (*plug) return cmd_plug(common, pl);
    if (*cost) return cmd_cost(common, co);
    if (*policy) return cmd_policy(common, po);
    if (*serve) return cmd_serve(common, se);
    if (*mock) return cmd_mock_plug(mock_port);
  } catch (const UsageError& e) {
    std::cerr << "luv: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "luv: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
