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

#include "segrobust/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "segrobust/error.hpp"
#include "segrobust/numerics.hpp"
#include "segrobust/parallel.hpp"

namespace segrobust {

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : k_(num_classes), counts_(static_cast<std::size_t>(num_classes * num_classes), 0) {
  if (num_classes < 1) throw UsageError("confusion matrix needs at least one class");
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (auto c : counts_) n += c;
  return n;
}

void ConfusionMatrix::accumulate(const LabelMap& pred, const LabelMap& truth) {
  if (pred.height() != truth.height() || pred.width() != truth.width()) {
    throw UsageError("accumulate: prediction and ground truth extents differ");
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int t = truth[i], p = pred[i];
    if (t < 0 || t >= k_ || p < 0 || p >= k_) throw UsageError("accumulate: class index outside [0, k)");
    ++counts_[static_cast<std::size_t>(t * k_ + p)];
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.k_ != k_) throw UsageError("cannot merge confusion matrices of different sizes");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

std::optional<double> ConfusionMatrix::iou(int cls) const {
  std::uint64_t fp = 0, fn = 0;
  for (int o = 0; o < k_; ++o) {
    if (o == cls) continue;
    fp += at(o, cls);
    fn += at(cls, o);
  }
  const std::uint64_t tp = at(cls, cls);
  const std::uint64_t uni = tp + fp + fn;
  if (uni == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(uni);
}

std::optional<double> miou(const ConfusionMatrix& cm) {
  double total = 0.0;
  int present = 0;
  for (int c = 0; c < cm.num_classes(); ++c) {
    if (const auto v = cm.iou(c)) {
      total += *v;
      ++present;
    }
  }
  if (present == 0) return std::nullopt;
  return total / present;
}

std::optional<double> miou_percent(const ConfusionMatrix& cm) {
  const auto m = miou(cm);
  if (!m) return std::nullopt;
  return *m * 100.0;
}

namespace {

// H x W x k class-ordered scores for one pass.
Tensor pass_scores(const SegNet& net, const Tensor& image, MscAverage average) {
  const LogitMap logits = forward(net, image);
  if (average == MscAverage::Probabilities) return class_probabilities(logits);
  const auto k = static_cast<std::size_t>(net.num_classes);
  Tensor out({logits.height(), logits.width(), k});
  for (std::size_t y = 0; y < logits.height(); ++y) {
    for (std::size_t x = 0; x < logits.width(); ++x) {
      const auto r = class_ordered_response(net.head, logits.logits.pixel(y, x));
      std::copy(r.begin(), r.end(), out.pixel(y, x).begin());
    }
  }
  return out;
}

}  // namespace

LabelMap msc_predict(const SegNet& net, const Tensor& image, const MscOptions& options) {
  if (options.scales.empty()) throw UsageError("MSC needs at least one scale");
  const std::size_t h = image.dim(0), w = image.dim(1);
  Tensor acc({h, w, static_cast<std::size_t>(net.num_classes)});
  for (double s : options.scales) {
    if (!(s > 0.0)) throw UsageError("MSC scales must be positive");
    const auto sh = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(h) * s)));
    const auto sw = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(w) * s)));
    const Tensor scaled = bilinear_resize(image, sh, sw);
    acc = add(acc, bilinear_resize(pass_scores(net, scaled, options.average), h, w));
    if (options.flip) {
      const Tensor mirrored = pass_scores(net, flip_horizontal(scaled), options.average);
      acc = add(acc, bilinear_resize(flip_horizontal(mirrored), h, w));
    }
  }
  LabelMap out(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto p = acc.pixel(y, x);
      out.at(y, x) = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    }
  }
  return out;
}

bool operator==(const BenchmarkCell& a, const BenchmarkCell& b) {
  const bool same_value = (std::isnan(a.miou) && std::isnan(b.miou)) || a.miou == b.miou;
  return a.model == b.model && a.kind == b.kind && a.severity == b.severity && a.msc == b.msc && same_value;
}

std::optional<double> BenchmarkReport::cell(const std::string& model, CorruptionKind kind, int severity,
                                            bool msc) const {
  for (const auto& c : cells) {
    if (c.model == model && c.kind == kind && c.severity == severity && c.msc == msc) return c.miou;
  }
  return std::nullopt;
}

std::optional<double> BenchmarkReport::clean(const std::string& model, bool msc) const {
  for (const auto& c : cells) {
    if (c.model == model && !c.kind && c.msc == msc) return c.miou;
  }
  return std::nullopt;
}

namespace {

// Mean of the defined (non-NaN) values; nullopt when there are none.
std::optional<double> mean_of(const std::vector<double>& v) {
  double s = 0.0;
  std::size_t n = 0;
  for (double x : v) {
    if (std::isnan(x)) continue;
    s += x;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return s / static_cast<double>(n);
}

}  // namespace

std::optional<double> BenchmarkReport::severity_mean(const std::string& model, int severity, bool msc) const {
  if (severity == 0) return clean(model, msc);
  std::vector<double> v;
  for (auto kind : kinds) {
    if (auto x = cell(model, kind, severity, msc)) v.push_back(*x);
  }
  return mean_of(v);
}

std::optional<double> BenchmarkReport::kind_mean(const std::string& model, CorruptionKind kind, bool msc) const {
  std::vector<double> v;
  for (int s : severities) {
    if (auto x = cell(model, kind, s, msc)) v.push_back(*x);
  }
  return mean_of(v);
}

std::optional<double> BenchmarkReport::group_mean(const std::string& model, CorruptionGroup group, bool msc) const {
  std::vector<double> v;
  for (auto kind : kinds) {
    if (group_of(kind) != group) continue;
    for (int s : severities) {
      if (auto x = cell(model, kind, s, msc)) v.push_back(*x);
    }
  }
  return mean_of(v);
}

std::optional<double> BenchmarkReport::corrupted_mean(const std::string& model, bool msc) const {
  std::vector<double> v;
  for (const auto& c : cells) {
    if (c.model == model && c.kind && c.msc == msc) v.push_back(c.miou);
  }
  return mean_of(v);
}

BenchmarkReport run_benchmark(std::span<const BenchmarkModel> models, std::span<const Sample> dataset,
                              std::span<const CorruptionSpec> suite, const BenchmarkOptions& options) {
  if (models.empty()) throw UsageError("run_benchmark: no models given");
  std::string missing;
  for (const auto& m : models) {
    if (m.net == nullptr) missing += (missing.empty() ? "" : ", ") + m.name;
  }
  if (!missing.empty()) throw UsageError("run_benchmark: missing checkpoint for " + missing);
  const int k = models.front().net->num_classes;
  for (const auto& m : models) {
    if (m.net->num_classes != k) throw UsageError("run_benchmark: models disagree on the class count");
  }
  if (dataset.empty()) throw UsageError("run_benchmark: empty dataset");

  // Slot 0 is the clean image; slot j + 1 is suite[j].
  const std::size_t slots = suite.size() + 1;
  const std::size_t variants = options.msc ? 2 : 1;
  const std::size_t per_task = models.size() * variants;
  std::vector<std::vector<ConfusionMatrix>> partial(dataset.size() * slots);

  parallel_for(dataset.size() * slots, options.workers, [&](std::size_t task) {
    const std::size_t i = task / slots, j = task % slots;
    const Sample& sample = dataset[i];
    Tensor image = sample.image;
    if (j > 0) {
      const CorruptionSpec spec = spec_for_image(suite[j - 1], i);
      if (options.on_corrupt) options.on_corrupt(i, spec);
      image = corrupt(sample.image, spec);
    }
    auto& cms = partial[task];
    cms.assign(per_task, ConfusionMatrix(k));
    for (std::size_t m = 0; m < models.size(); ++m) {
      cms[m * variants].accumulate(predict(forward(*models[m].net, image)), sample.label);
      if (options.msc) cms[m * variants + 1].accumulate(msc_predict(*models[m].net, image, options.msc_options), sample.label);
    }
  });

  BenchmarkReport report;
  for (const auto& m : models) report.models.push_back(m.name);
  std::set<int> sev;
  std::vector<CorruptionKind> kinds;
  for (const auto& spec : suite) {
    sev.insert(spec.severity);
    if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end()) kinds.push_back(spec.kind);
  }
  report.kinds = kinds;
  report.severities.assign(sev.begin(), sev.end());
  report.has_msc = options.msc;

  for (std::size_t j = 0; j < slots; ++j) {
    for (std::size_t m = 0; m < models.size(); ++m) {
      for (std::size_t v = 0; v < variants; ++v) {
        ConfusionMatrix total(k);
        for (std::size_t i = 0; i < dataset.size(); ++i) total += partial[i * slots + j][m * variants + v];
        BenchmarkCell cell;
        cell.model = models[m].name;
        cell.msc = v == 1;
        if (j > 0) {
          cell.kind = suite[j - 1].kind;
          cell.severity = suite[j - 1].severity;
        }
        cell.miou = miou_percent(total).value_or(std::nan(""));
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

ConfusionMatrix evaluate(const SegNet& net, std::span<const Sample> dataset, int workers) {
  std::vector<ConfusionMatrix> parts(dataset.size(), ConfusionMatrix(net.num_classes));
  parallel_for(dataset.size(), workers,
               [&](std::size_t i) { parts[i].accumulate(predict(forward(net, dataset[i].image)), dataset[i].label); });
  ConfusionMatrix total(net.num_classes);
  for (const auto& p : parts) total += p;
  return total;
}

}  // namespace segrobust
