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

// Baseline per-pixel segmenter: multinomial logistic regression over
// [r, g, b, sin h, cos h, s, v, 1], trained by full-batch gradient descent.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "luv/colorops.hpp"
#include "luv/core.hpp"

namespace luv {

inline constexpr int kNumFeatures = 8;
using PixelFeatures = std::array<double, kNumFeatures>;

inline PixelFeatures pixel_features(const ImageRGB& img, int x, int y) {
  const Rgb8 p = img.at(x, y);
  const double r = p.r / 255.0, g = p.g / 255.0, b = p.b / 255.0;
  const Hsv<double> hsv = rgb_to_hsv(r, g, b);
  const double h = hsv.h * std::numbers::pi / 180.0;
  return {r, g, b, std::sin(h), std::cos(h), hsv.s, hsv.v, 1.0};
}

struct TrainHyper {
  double learning_rate = 1.0;
  int iterations = 500;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  double subsample_rate = 0.1;  // fraction of pixels kept per sample, (0, 1]
};

/// Row-major (num_classes x kNumFeatures) weights. Class 0 is background.
struct ModelParams {
  int num_classes = 0;
  std::vector<double> weights;
  TrainHyper hyper;
  std::vector<double> loss_trace;  // accepted losses, one per iteration; not persisted

  ModelParams() = default;
  explicit ModelParams(int classes) : num_classes(classes), weights(static_cast<std::size_t>(classes) * kNumFeatures) {
    if (classes < 1) throw InvalidArgument("model needs at least one class");
  }

  double& w(int k, int f) { return weights[static_cast<std::size_t>(k) * kNumFeatures + static_cast<std::size_t>(f)]; }
  double w(int k, int f) const {
    return weights[static_cast<std::size_t>(k) * kNumFeatures + static_cast<std::size_t>(f)];
  }
};

struct PixelBatch {
  std::vector<PixelFeatures> x;
  std::vector<int> y;
};

struct LossGrad {
  double loss = 0.0;
  std::vector<double> gradient;  // same layout as ModelParams::weights
};

namespace detail {

/// Scores into `out`, then softmax in place. Returns log-sum-exp.
inline double softmax(const ModelParams& m, const PixelFeatures& x, std::vector<double>& out) {
  double top = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < m.num_classes; ++k) {
    double s = 0.0;
    for (int f = 0; f < kNumFeatures; ++f) s += m.w(k, f) * x[static_cast<std::size_t>(f)];
    out[static_cast<std::size_t>(k)] = s;
    top = std::max(top, s);
  }
  double z = 0.0;
  for (int k = 0; k < m.num_classes; ++k) z += std::exp(out[static_cast<std::size_t>(k)] - top);
  const double lse = top + std::log(z);
  for (int k = 0; k < m.num_classes; ++k) {
    out[static_cast<std::size_t>(k)] = std::exp(out[static_cast<std::size_t>(k)] - lse);
  }
  return lse;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// Mean cross-entropy plus l2 * ||W||^2, and its gradient
/// (p - onehot(y)) x^T / N + 2 l2 W.
inline LossGrad loss_and_gradient(const ModelParams& m, const PixelBatch& batch, double l2) {
  if (batch.x.empty() || batch.x.size() != batch.y.size()) throw InvalidArgument("loss_and_gradient: bad batch");
  LossGrad out{0.0, std::vector<double>(m.weights.size(), 0.0)};
  std::vector<double> p(static_cast<std::size_t>(m.num_classes));
  for (std::size_t i = 0; i < batch.x.size(); ++i) {
    const int yi = batch.y[i];
    if (yi < 0 || yi >= m.num_classes) throw InvalidArgument("loss_and_gradient: label out of range");
    const PixelFeatures& x = batch.x[i];
    const double lse = detail::softmax(m, x, p);
    double score_y = 0.0;
    for (int f = 0; f < kNumFeatures; ++f) score_y += m.w(yi, f) * x[static_cast<std::size_t>(f)];
    out.loss += lse - score_y;
    for (int k = 0; k < m.num_classes; ++k) {
      const double r = p[static_cast<std::size_t>(k)] - (k == yi ? 1.0 : 0.0);
      double* g = out.gradient.data() + static_cast<std::size_t>(k) * kNumFeatures;
      for (int f = 0; f < kNumFeatures; ++f) g[f] += r * x[static_cast<std::size_t>(f)];
    }
  }
  const auto n = static_cast<double>(batch.x.size());
  out.loss /= n;
  double reg = 0.0;
  for (std::size_t j = 0; j < out.gradient.size(); ++j) {
    out.gradient[j] = out.gradient[j] / n + 2.0 * l2 * m.weights[j];
    reg += m.weights[j] * m.weights[j];
  }
  out.loss += l2 * reg;
  return out;
}

struct TrainingSample {
  std::string id;
  ImageRGB image;  // standard-light image
  Mask labels;     // class index per pixel
};

/// Pixels drawn from each sample with probability subsample_rate. The draw
/// for a sample depends only on (seed, id), and samples are visited in id
/// order, so the batch does not depend on input order.
inline PixelBatch build_batch(std::span<const TrainingSample> data, int num_classes, const TrainHyper& hyper) {
  if (!(hyper.subsample_rate > 0.0) || hyper.subsample_rate > 1.0) {
    throw InvalidArgument("subsample_rate must be in (0, 1]");
  }
  std::vector<const TrainingSample*> order;
  for (const auto& s : data) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
  PixelBatch batch;
  for (const TrainingSample* s : order) {
    if (!s->image.same_shape(s->labels.width(), s->labels.height())) {
      throw InvalidArgument("sample " + s->id + ": image and label shapes differ");
    }
    std::mt19937_64 rng(hyper.seed ^ (detail::fnv1a(s->id) * 0x9E3779B97F4A7C15ull));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int y = 0; y < s->image.height(); ++y) {
      for (int x = 0; x < s->image.width(); ++x) {
        if (hyper.subsample_rate < 1.0 && u(rng) >= hyper.subsample_rate) continue;
        const int label = s->labels(x, y);
        if (label >= num_classes) throw InvalidArgument("sample " + s->id + ": label exceeds class count");
        batch.x.push_back(pixel_features(s->image, x, y));
        batch.y.push_back(label);
      }
    }
  }
  return batch;
}

/// Gradient descent from zero weights. A step that raises the loss is
/// rejected and the step size halved, so the accepted trace never rises.
inline ModelParams fit(const PixelBatch& batch, int num_classes, const TrainHyper& hyper) {
  if (batch.x.empty()) throw InvalidArgument("fit: no labeled pixels");
  if (hyper.iterations < 0 || !(hyper.learning_rate > 0.0) || hyper.l2 < 0.0) {
    throw InvalidArgument("fit: invalid hyperparameters");
  }
  ModelParams m(num_classes);
  m.hyper = hyper;
  if (hyper.iterations == 0) return m;
  double lr = hyper.learning_rate;
  LossGrad cur = loss_and_gradient(m, batch, hyper.l2);
  ModelParams trial = m;
  for (int it = 0; it < hyper.iterations; ++it) {
    for (;;) {
      for (std::size_t j = 0; j < m.weights.size(); ++j) trial.weights[j] = m.weights[j] - lr * cur.gradient[j];
      LossGrad next = loss_and_gradient(trial, batch, hyper.l2);
      if (next.loss <= cur.loss) {
        m.weights.swap(trial.weights);
        trial.weights = m.weights;
        cur = std::move(next);
        break;
      }
      lr *= 0.5;
      if (lr < 1e-12) break;  // at a minimum to working precision
    }
    m.loss_trace.push_back(cur.loss);
  }
  return m;
}

inline ModelParams fit(std::span<const TrainingSample> data, int num_classes, const TrainHyper& hyper) {
  if (data.empty()) throw InvalidArgument("fit: empty dataset");
  return fit(build_batch(data, num_classes, hyper), num_classes, hyper);
}

/// Argmax class per pixel; ties go to the lower class index.
inline int predict_pixel(const ModelParams& m, const PixelFeatures& x) {
  int best = 0;
  double best_s = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < m.num_classes; ++k) {
    double s = 0.0;
    for (int f = 0; f < kNumFeatures; ++f) s += m.w(k, f) * x[static_cast<std::size_t>(f)];
    if (s > best_s) {
      best_s = s;
      best = k;
    }
  }
  return best;
}

inline Mask predict(const ModelParams& m, const ImageRGB& img) {
  if (m.num_classes < 1 || m.weights.size() != static_cast<std::size_t>(m.num_classes) * kNumFeatures) {
    throw InvalidArgument("predict: malformed model");
  }
  Mask out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out(x, y) = static_cast<std::uint8_t>(predict_pixel(m, pixel_features(img, x, y)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model file
//
//   "LUVM" | u32 version | u32 num_classes | u32 num_features
//   f64 learning_rate | u32 iterations | f64 l2 | u64 seed | f64 subsample_rate
//   f64 weights[num_classes * num_features]   (row-major)
// All integers and floats little-endian.

inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {
inline void put_u(std::ostream& os, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline std::uint64_t get_u(std::istream& is, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = is.get();
    if (c == EOF) throw InvalidArgument("model file truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}
inline void put_f64(std::ostream& os, double d) { put_u(os, std::bit_cast<std::uint64_t>(d), 8); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u(is, 8)); }
}  // namespace detail

inline void write_model(std::ostream& os, const ModelParams& m) {
  os.write("LUVM", 4);
  detail::put_u(os, kModelVersion, 4);
  detail::put_u(os, static_cast<std::uint32_t>(m.num_classes), 4);
  detail::put_u(os, kNumFeatures, 4);
  detail::put_f64(os, m.hyper.learning_rate);
  detail::put_u(os, static_cast<std::uint32_t>(m.hyper.iterations), 4);
  detail::put_f64(os, m.hyper.l2);
  detail::put_u(os, m.hyper.seed, 8);
  detail::put_f64(os, m.hyper.subsample_rate);
  for (double w : m.weights) detail::put_f64(os, w);
  if (!os) throw IoError("failed writing model");
}

inline ModelParams read_model(std::istream& is) {
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "LUVM") throw InvalidArgument("not a model file");
  const auto version = detail::get_u(is, 4);
  if (version != kModelVersion) throw InvalidArgument("unsupported model version " + std::to_string(version));
  const auto classes = static_cast<int>(detail::get_u(is, 4));
  const auto features = detail::get_u(is, 4);
  if (features != kNumFeatures || classes < 1 || classes > 256) throw InvalidArgument("model header out of range");
  ModelParams m(classes);
  m.hyper.learning_rate = detail::get_f64(is);
  m.hyper.iterations = static_cast<int>(detail::get_u(is, 4));
  m.hyper.l2 = detail::get_f64(is);
  m.hyper.seed = detail::get_u(is, 8);
  m.hyper.subsample_rate = detail::get_f64(is);
  for (double& w : m.weights) {
    w = detail::get_f64(is);
    if (!std::isfinite(w)) throw InvalidArgument("model weights must be finite");
  }
  return m;
}

inline void save_model(const std::string& path, const ModelParams& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path);
  write_model(os, m);
}

inline ModelParams load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return read_model(is);
}

}  // namespace luv
