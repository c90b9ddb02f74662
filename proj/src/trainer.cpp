// Copyright 2026 The segrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "segrobust/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "segrobust/error.hpp"
#include "segrobust/numerics.hpp"

namespace segrobust {

void TrainConfig::validate() const {
  if (!(scale_lo > 0.0 && scale_lo <= 1.0 && 1.0 <= scale_hi)) throw UsageError("scale range must satisfy 0 < lo <= 1 <= hi");
  if (crop_size < 16) throw UsageError("crop_size must be >= 16");
  if (total_iters < 0) throw UsageError("total_iters must be >= 0");
  if (batch_size < 1) throw UsageError("batch_size must be >= 1");
  if (!(base_lr >= 0.0 && classifier_lr >= 0.0 && weight_decay >= 0.0)) throw UsageError("rates must be non-negative");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw UsageError("momentum must lie in [0, 1)");
  if (!(poly_power >= 0.0)) throw UsageError("poly_power must be non-negative");
  logit_channels(head, num_classes);
}

double poly_factor(int iter, int total_iters, double power) {
  if (total_iters < 1 || iter < 0 || iter > total_iters) {
    throw UsageError("poly schedule iteration " + std::to_string(iter) + " outside [0, " +
                     std::to_string(total_iters) + "]");
  }
  return std::pow(1.0 - static_cast<double>(iter) / static_cast<double>(total_iters), power);
}

double poly_lr(int iter, const TrainConfig& cfg) { return cfg.base_lr * poly_factor(iter, cfg.total_iters, cfg.poly_power); }

std::pair<Tensor, LabelMap> augment(const Tensor& image, const LabelMap& label, const TrainConfig& cfg,
                                    CounterRng& rng) {
  if (image.rank() != 3 || image.dim(0) != label.height() || image.dim(1) != label.width()) {
    throw UsageError("augment: image and label are not spatially aligned");
  }
  const double s = cfg.scale_lo == cfg.scale_hi ? cfg.scale_lo : rng.uniform(cfg.scale_lo, cfg.scale_hi);
  const auto h = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(image.dim(0)) * s)));
  const auto w = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(image.dim(1)) * s)));
  const Tensor scaled = bilinear_resize(image, h, w);
  const LabelMap scaled_label = nearest_resize(label, h, w);

  const auto crop = static_cast<std::size_t>(cfg.crop_size);
  const std::size_t oy = h > crop ? rng.below(h - crop + 1) : 0;
  const std::size_t ox = w > crop ? rng.below(w - crop + 1) : 0;
  Tensor out_image({crop, crop, image.dim(2)});
  LabelMap out_label(crop, crop, kBackgroundClass);
  for (std::size_t y = 0; y < crop && oy + y < h; ++y) {
    for (std::size_t x = 0; x < crop && ox + x < w; ++x) {
      for (std::size_t c = 0; c < image.dim(2); ++c) out_image.at(y, x, c) = scaled.at(oy + y, ox + x, c);
      out_label.at(y, x) = scaled_label.at(oy + y, ox + x);
    }
  }
  return {std::move(out_image), std::move(out_label)};
}

namespace {

constexpr std::uint64_t kBatchStream = 0xBA7C4ULL, kAugmentStream = 0xA06ULL;

}  // namespace

Checkpoint train(const TrainConfig& cfg, std::span<const Sample> dataset, const TrainOptions& options) {
  cfg.validate();
  if (dataset.empty()) throw UsageError("train: dataset is empty");

  Checkpoint ckpt{make_segnet(cfg.head, cfg.num_classes, cfg.seed), cfg, 0, {}};
  ParameterGrads velocity = zero_grads(ckpt.net);
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  std::vector<Tensor> images(batch);
  std::vector<LabelMap> labels(batch);

  for (int it = 0; it < cfg.total_iters; ++it) {
    for (std::size_t b = 0; b < batch; ++b) {
      const auto iu = static_cast<std::uint64_t>(it);
      CounterRng pick(derive_key({cfg.seed, kBatchStream, iu, b}));
      const Sample& s = dataset[pick.below(dataset.size())];
      CounterRng rng(derive_key({cfg.seed, kAugmentStream, iu, b}));
      std::tie(images[b], labels[b]) = augment(s.image, s.label, cfg, rng);
    }
    const BackwardResult res = backward(ckpt.net, images, labels, options.workers);
    if (!std::isfinite(res.loss)) {
      throw NumericalError("training diverged: loss is " + std::to_string(res.loss) + " at iteration " +
                           std::to_string(it) + " (head " + std::string(head_name(cfg.head)) + ")");
    }

    const double factor = poly_factor(it, cfg.total_iters, cfg.poly_power);
    for (std::size_t l = 0; l < ckpt.net.layers.size(); ++l) {
      const bool classifier = l + 1 == ckpt.net.layers.size();
      const double lr = (classifier ? cfg.classifier_lr : cfg.base_lr) * factor;
      ConvLayer& layer = ckpt.net.layers[l];
      ConvLayer& vel = velocity[l];
      auto w = layer.kernel.data();
      auto vw = vel.kernel.data();
      const auto gw = res.grads[l].kernel.data();
      for (std::size_t j = 0; j < w.size(); ++j) {
        vw[j] = cfg.momentum * vw[j] + gw[j];
        w[j] -= lr * vw[j] + lr * cfg.weight_decay * w[j];
      }
      for (std::size_t j = 0; j < layer.bias.size(); ++j) {
        vel.bias[j] = cfg.momentum * vel.bias[j] + res.grads[l].bias[j];
        layer.bias[j] -= lr * vel.bias[j];
      }
    }
    ckpt.iteration = it + 1;
    ckpt.loss_history.push_back(res.loss);
    if (options.progress) options.progress(it, res.loss);
  }
  return ckpt;
}

// ---- serialization ----

namespace {

std::string hex(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

void write_values(std::ostringstream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << hex(values[i]) << ((i + 1) % 8 == 0 || i + 1 == values.size() ? '\n' : ' ');
  }
}

class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw DataError("checkpoint truncated after token " + std::to_string(tokens_));
    ++tokens_;
    return w;
  }
  void expect(const std::string& w) {
    const std::string got = word();
    if (got != w) throw DataError("checkpoint token " + std::to_string(tokens_) + ": expected '" + w + "', got '" + got + "'");
  }
  double real() {
    const std::string w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (end != w.c_str() + w.size()) throw DataError("checkpoint token " + std::to_string(tokens_) + ": bad real '" + w + "'");
    return v;
  }
  long integer() {
    const std::string w = word();
    try {
      std::size_t pos = 0;
      const long v = std::stol(w, &pos);
      if (pos == w.size()) return v;
    } catch (const std::exception&) {
    }
    throw DataError("checkpoint token " + std::to_string(tokens_) + ": bad integer '" + w + "'");
  }
  std::uint64_t unsigned_integer() {
    const std::string w = word();
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(w, &pos);
      if (pos == w.size()) return v;
    } catch (const std::exception&) {
    }
    throw DataError("checkpoint token " + std::to_string(tokens_) + ": bad integer '" + w + "'");
  }

 private:
  std::istringstream in_;
  std::size_t tokens_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  const TrainConfig& c = ckpt.config;
  std::ostringstream out;
  out << "segrobust-checkpoint 1\n";
  out << "head " << head_name(c.head) << "\n";
  out << "num_classes " << c.num_classes << "\n";
  out << "base_lr " << hex(c.base_lr) << "\n";
  out << "classifier_lr " << hex(c.classifier_lr) << "\n";
  out << "weight_decay " << hex(c.weight_decay) << "\n";
  out << "momentum " << hex(c.momentum) << "\n";
  out << "batch_size " << c.batch_size << "\n";
  out << "total_iters " << c.total_iters << "\n";
  out << "crop_size " << c.crop_size << "\n";
  out << "scale_lo " << hex(c.scale_lo) << "\n";
  out << "scale_hi " << hex(c.scale_hi) << "\n";
  out << "seed " << c.seed << "\n";
  out << "poly_power " << hex(c.poly_power) << "\n";
  out << "iteration " << ckpt.iteration << "\n";
  out << "layers " << ckpt.net.layers.size() << "\n";
  for (const auto& layer : ckpt.net.layers) {
    const auto& s = layer.kernel.shape();
    out << "layer relu " << (layer.relu ? 1 : 0) << " kernel " << s[0] << ' ' << s[1] << ' ' << s[2] << ' ' << s[3] << "\n";
    write_values(out, layer.kernel.data());
    out << "bias " << layer.bias.size() << "\n";
    write_values(out, layer.bias);
  }
  out << "history " << ckpt.loss_history.size() << "\n";
  write_values(out, ckpt.loss_history);
  out << "end\n";
  return out.str();
}

Checkpoint deserialize_checkpoint(const std::string& text) {
  Reader r(text);
  r.expect("segrobust-checkpoint");
  if (r.integer() != 1) throw DataError("unsupported checkpoint version");
  Checkpoint ckpt;
  TrainConfig& c = ckpt.config;
  r.expect("head");
  try {
    c.head = parse_head(r.word());
  } catch (const UsageError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  r.expect("num_classes");
  c.num_classes = static_cast<int>(r.integer());
  r.expect("base_lr");
  c.base_lr = r.real();
  r.expect("classifier_lr");
  c.classifier_lr = r.real();
  r.expect("weight_decay");
  c.weight_decay = r.real();
  r.expect("momentum");
  c.momentum = r.real();
  r.expect("batch_size");
  c.batch_size = static_cast<int>(r.integer());
  r.expect("total_iters");
  c.total_iters = static_cast<int>(r.integer());
  r.expect("crop_size");
  c.crop_size = static_cast<int>(r.integer());
  r.expect("scale_lo");
  c.scale_lo = r.real();
  r.expect("scale_hi");
  c.scale_hi = r.real();
  r.expect("seed");
  c.seed = r.unsigned_integer();
  r.expect("poly_power");
  c.poly_power = r.real();
  r.expect("iteration");
  ckpt.iteration = static_cast<int>(r.integer());

  ckpt.net.head = c.head;
  ckpt.net.num_classes = c.num_classes;
  r.expect("layers");
  const long layers = r.integer();
  if (layers < 1 || layers > 64) throw DataError("checkpoint: implausible layer count");
  for (long l = 0; l < layers; ++l) {
    ConvLayer layer;
    r.expect("layer");
    r.expect("relu");
    layer.relu = r.integer() != 0;
    r.expect("kernel");
    std::vector<std::size_t> shape(4);
    for (auto& d : shape) {
      const long v = r.integer();
      if (v < 1 || v > 4096) throw DataError("checkpoint: bad kernel extent");
      d = static_cast<std::size_t>(v);
    }
    layer.kernel = Tensor(shape);
    for (double& v : layer.kernel.data()) v = r.real();
    r.expect("bias");
    const long nb = r.integer();
    if (nb != static_cast<long>(shape[3])) throw DataError("checkpoint: bias length does not match kernel");
    layer.bias.resize(static_cast<std::size_t>(nb));
    for (double& v : layer.bias) v = r.real();
    ckpt.net.layers.push_back(std::move(layer));
  }
  if (ckpt.net.output_channels() != logit_channels(c.head, c.num_classes)) {
    throw DataError("checkpoint: classifier width does not match head and class count");
  }
  r.expect("history");
  const long nh = r.integer();
  if (nh < 0) throw DataError("checkpoint: negative history length");
  ckpt.loss_history.resize(static_cast<std::size_t>(nh));
  for (double& v : ckpt.loss_history) v = r.real();
  r.expect("end");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << serialize_checkpoint(ckpt);
  if (!out) throw DataError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize_checkpoint(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace segrobust
