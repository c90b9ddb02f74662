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

#include "segrobust/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "segrobust/error.hpp"

namespace segrobust {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw UsageError(key + ": expected a number, got '" + s + "'");
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& s) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw UsageError(key + ": expected an integer, got '" + s + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw UsageError(key + ": expected true or false, got '" + s + "'");
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& format) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += format(items[i]);
  }
  return out;
}

template <typename T>
struct Field {
  std::string key;
  std::function<std::string(const T&)> get;
  std::function<void(T&, const std::string&)> set;
};

template <typename T, typename M>
Field<T> real_field(std::string key, M T::*member) {
  return {key, [member](const T& c) { return format_double(c.*member); },
          [member, key](T& c, const std::string& v) { c.*member = parse_double(key, v); }};
}

template <typename T, typename M>
Field<T> int_field(std::string key, M T::*member) {
  return {key, [member](const T& c) { return std::to_string(c.*member); },
          [member, key](T& c, const std::string& v) { c.*member = parse_int<M>(key, v); }};
}

template <typename T>
Field<T> bool_field(std::string key, bool T::*member) {
  return {key, [member](const T& c) { return std::string(c.*member ? "true" : "false"); },
          [member, key](T& c, const std::string& v) { c.*member = parse_bool(key, v); }};
}

// Keys under "train." that also accept per-head overrides.
const std::vector<Field<TrainConfig>>& train_fields() {
  static const std::vector<Field<TrainConfig>> fields{
      real_field("base_lr", &TrainConfig::base_lr),
      real_field("classifier_lr", &TrainConfig::classifier_lr),
      real_field("weight_decay", &TrainConfig::weight_decay),
      real_field("momentum", &TrainConfig::momentum),
      int_field("batch_size", &TrainConfig::batch_size),
      int_field("total_iters", &TrainConfig::total_iters),
      int_field("crop_size", &TrainConfig::crop_size),
      real_field("scale_lo", &TrainConfig::scale_lo),
      real_field("scale_hi", &TrainConfig::scale_hi),
      real_field("poly_power", &TrainConfig::poly_power),
  };
  return fields;
}

const std::vector<Field<RunConfig>>& run_fields() {
  static const std::vector<Field<RunConfig>> fields = [] {
    using C = RunConfig;
    std::vector<Field<C>> f;
    f.push_back({"run.name", [](const C& c) { return c.name; },
                 [](C& c, const std::string& v) {
                   if (v.empty() || v.find_first_of("/\\") != std::string::npos) {
                     throw UsageError("run.name must be a non-empty plain name");
                   }
                   c.name = v;
                 }});
    f.push_back({"run.out", [](const C& c) { return c.out.string(); }, [](C& c, const std::string& v) { c.out = v; }});
    f.push_back({"run.seeds", [](const C& c) { return join(c.seeds, [](std::uint64_t s) { return std::to_string(s); }); },
                 [](C& c, const std::string& v) {
                   c.seeds.clear();
                   for (const auto& s : split_list(v)) c.seeds.push_back(parse_int<std::uint64_t>("run.seeds", s));
                 }});

    auto dataset = [](std::string key, auto member, bool real) {
      Field<C> out;
      out.key = "dataset." + key;
      if (real) {
        out.get = [member](const C& c) { return format_double(static_cast<double>(c.dataset.*member)); };
        out.set = [member, k = out.key](C& c, const std::string& v) {
          c.dataset.*member = static_cast<std::remove_reference_t<decltype(c.dataset.*member)>>(parse_double(k, v));
        };
      } else {
        out.get = [member](const C& c) { return std::to_string(c.dataset.*member); };
        out.set = [member, k = out.key](C& c, const std::string& v) {
          c.dataset.*member = parse_int<std::remove_reference_t<decltype(c.dataset.*member)>>(k, v);
        };
      }
      return out;
    };
    using S = SyntheticSceneSpec;
    f.push_back(dataset("seed", &S::seed, false));
    f.push_back({"dataset.count", [](const C& c) { return std::to_string(c.dataset_count); },
                 [](C& c, const std::string& v) { c.dataset_count = parse_int<std::size_t>("dataset.count", v); }});
    f.push_back(dataset("image_size", &S::image_size, false));
    f.push_back(dataset("num_classes", &S::num_classes, false));
    f.push_back(dataset("min_shapes", &S::min_shapes, false));
    f.push_back(dataset("max_shapes", &S::max_shapes, false));
    f.push_back(dataset("min_radius", &S::min_radius, true));
    f.push_back(dataset("max_radius", &S::max_radius, true));
    f.push_back(dataset("background_contrast", &S::background_contrast, true));
    f.push_back(dataset("foreground_contrast", &S::foreground_contrast, true));
    f.push_back(dataset("color_jitter", &S::color_jitter, true));
    f.push_back(dataset("noise_floor", &S::noise_floor, true));
    f.push_back(dataset("max_overlap", &S::max_overlap, true));
    f.push_back(dataset("placement_retries", &S::placement_retries, false));
    f.push_back(dataset("val_modulus", &S::val_modulus, false));

    f.push_back({"train.heads", [](const C& c) { return join(c.heads, [](HeadKind h) { return std::string(head_name(h)); }); },
                 [](C& c, const std::string& v) {
                   c.heads.clear();
                   for (const auto& s : split_list(v)) c.heads.push_back(parse_head(s));
                 }});
    for (const auto& tf : train_fields()) {
      f.push_back({"train." + tf.key, [get = tf.get](const C& c) { return get(c.train); },
                   [set = tf.set](C& c, const std::string& v) { set(c.train, v); }});
    }

    f.push_back({"bench.severities", [](const C& c) { return join(c.severities, [](int s) { return std::to_string(s); }); },
                 [](C& c, const std::string& v) {
                   c.severities.clear();
                   for (const auto& s : split_list(v)) c.severities.push_back(parse_int<int>("bench.severities", s));
                 }});
    f.push_back({"bench.images", [](const C& c) { return std::to_string(c.bench_images); },
                 [](C& c, const std::string& v) { c.bench_images = parse_int<std::size_t>("bench.images", v); }});
    f.push_back(bool_field("bench.msc", &C::msc));
    f.push_back({"bench.msc_scales", [](const C& c) { return join(c.msc_options.scales, format_double); },
                 [](C& c, const std::string& v) {
                   c.msc_options.scales.clear();
                   for (const auto& s : split_list(v)) c.msc_options.scales.push_back(parse_double("bench.msc_scales", s));
                 }});
    f.push_back({"bench.msc_flip", [](const C& c) { return std::string(c.msc_options.flip ? "true" : "false"); },
                 [](C& c, const std::string& v) { c.msc_options.flip = parse_bool("bench.msc_flip", v); }});
    f.push_back({"bench.msc_average",
                 [](const C& c) {
                   return std::string(c.msc_options.average == MscAverage::Logits ? "logits" : "probabilities");
                 },
                 [](C& c, const std::string& v) {
                   if (v == "probabilities") {
                     c.msc_options.average = MscAverage::Probabilities;
                   } else if (v == "logits") {
                     c.msc_options.average = MscAverage::Logits;
                   } else {
                     throw UsageError("bench.msc_average must be probabilities or logits");
                   }
                 }});

    f.push_back({"analysis.images", [](const C& c) { return std::to_string(c.analysis_images); },
                 [](C& c, const std::string& v) { c.analysis_images = parse_int<std::size_t>("analysis.images", v); }});
    f.push_back(bool_field("analysis.centered_autocorrelation", &C::centered_autocorrelation));
    return f;
  }();
  return fields;
}

const Field<TrainConfig>* find_train_field(std::string_view key) {
  for (const auto& f : train_fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

// "train.<head>.<key>" -> the field, or nullptr when not a per-head key.
const Field<TrainConfig>* per_head_field(const std::string& key) {
  if (key.rfind("train.", 0) != 0) return nullptr;
  const auto dot = key.find('.', 6);
  if (dot == std::string::npos) return nullptr;
  const std::string head = key.substr(6, dot - 6);
  bool known = false;
  for (auto h : kAllHeads) known = known || head_name(h) == head;
  if (!known) return nullptr;
  return find_train_field(std::string_view(key).substr(dot + 1));
}

}  // namespace

TrainConfig RunConfig::train_config(HeadKind head, std::uint64_t seed) const {
  TrainConfig cfg = train;
  const std::string prefix = "train." + std::string(head_name(head)) + ".";
  for (const auto& [key, value] : head_overrides) {
    if (key.rfind(prefix, 0) == 0) find_train_field(key.substr(prefix.size()))->set(cfg, value);
  }
  cfg.head = head;
  cfg.num_classes = dataset.num_classes;
  cfg.seed = seed;
  return cfg;
}

void RunConfig::validate() const {
  dataset.validate();
  if (dataset_count < 1) throw UsageError("dataset.count must be >= 1");
  if (seeds.empty()) throw UsageError("run.seeds must list at least one seed");
  if (heads.empty()) throw UsageError("train.heads must list at least one head");
  for (auto h : heads) train_config(h, seeds.front()).validate();
  for (int s : severities) {
    if (s < 1 || s > kMaxSeverity) throw UsageError("bench.severities must lie in 1.." + std::to_string(kMaxSeverity));
  }
  if (msc_options.scales.empty()) throw UsageError("bench.msc_scales must not be empty");
  for (double s : msc_options.scales) {
    if (!(s > 0.0)) throw UsageError("bench.msc_scales must be positive");
  }
}

std::vector<Setting> parse_settings(const std::string& text) {
  std::vector<Setting> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::move(key), trim(std::string_view(body).substr(eq + 1)));
  }
  return out;
}

void apply_settings(RunConfig& config, const std::vector<Setting>& settings) {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : settings) {
    if (const auto* hf = per_head_field(key)) {
      TrainConfig probe = config.train;
      hf->set(probe, value);
      config.head_overrides[key] = hf->get(probe);
      continue;
    }
    const auto& fields = run_fields();
    const auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.key == key; });
    if (it == fields.end()) {
      unknown.push_back(key);
      continue;
    }
    it->set(config, value);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw UsageError(msg);
  }
}

RunConfig load_run_config(const std::filesystem::path* file, const std::vector<Setting>& overrides) {
  RunConfig config;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw UsageError("cannot read config file " + file->string());
    std::ostringstream text;
    text << in.rdbuf();
    apply_settings(config, parse_settings(text.str()));
  }
  apply_settings(config, overrides);
  config.validate();
  return config;
}

std::string resolved_config_text(const RunConfig& config) {
  std::ostringstream out;
  out << "# resolved configuration\n";
  for (const auto& f : run_fields()) out << f.key << " = " << f.get(config) << '\n';
  for (const auto& [key, value] : config.head_overrides) out << key << " = " << value << '\n';
  return out.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : run_fields()) keys.push_back(f.key);
  return keys;
}

}  // namespace segrobust
