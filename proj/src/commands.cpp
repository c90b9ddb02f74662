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

#include "segrobust/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "segrobust/error.hpp"
#include "segrobust/image_io.hpp"
#include "segrobust/parallel.hpp"
#include "segrobust/svg.hpp"

namespace segrobust {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kIncompleteMarker = "INCOMPLETE";

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void log_line(const CommandContext& ctx, const std::string& msg) {
  if (ctx.log) *ctx.log << msg << std::endl;
}

Json optional_json(std::optional<double> v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

// Marks the run directory while a command is in flight. The marker is only
// removed once the command finished and its results manifest is written, so
// an interrupted or failed run is recognizable on disk.
class RunGuard {
 public:
  RunGuard(const CommandContext& ctx, std::string command) : ctx_(ctx), command_(std::move(command)) {
    const fs::path dir = run_dir(ctx.config);
    fs::create_directories(dir);
    write_text(dir / "config.resolved", resolved_config_text(ctx.config));
    write_text(dir / kIncompleteMarker, command_ + " started; outputs in this directory may be partial\n");
  }

  void finish(Json results) {
    Json manifest;
    manifest["command"] = command_;
    manifest["status"] = "complete";
    manifest["config"] = "config.resolved";
    manifest["results"] = std::move(results);
    const fs::path dir = run_dir(ctx_.config);
    write_text(dir / ("results_" + command_ + ".json"), manifest.dump(2) + "\n");
    fs::remove(dir / kIncompleteMarker);
  }

 private:
  const CommandContext& ctx_;
  std::string command_;
};

LoadedDataset load_dataset(const CommandContext& ctx) {
  const fs::path dir = dataset_dir(ctx.config);
  if (!fs::exists(dir / "manifest.txt")) {
    throw DataError("no dataset at " + dir.string() + "; run the gen command first");
  }
  LoadedDataset data = read_dataset(dir);
  if (data.num_classes != ctx.config.dataset.num_classes) {
    throw DataError("dataset at " + dir.string() + " has " + std::to_string(data.num_classes) +
                    " classes but the config expects " + std::to_string(ctx.config.dataset.num_classes));
  }
  return data;
}

std::vector<Sample> take(std::vector<Sample> samples, std::size_t limit) {
  if (limit > 0 && samples.size() > limit) samples.resize(limit);
  return samples;
}

Checkpoint load_checked(const fs::path& path, const RunConfig& config) {
  if (!fs::exists(path)) throw UsageError("checkpoint not found: " + path.string());
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.net.num_classes != config.dataset.num_classes) {
    throw DataError("checkpoint " + path.string() + " was trained for " + std::to_string(ckpt.net.num_classes) +
                    " classes");
  }
  return ckpt;
}

Json summary_json(const BenchmarkReport& report) {
  Json rows = Json::array();
  for (const auto& r : summarize(report)) {
    Json row;
    row["model"] = r.model;
    row["val"] = optional_json(r.val);
    row["val_msc"] = optional_json(r.val_msc);
    row["cor"] = optional_json(r.cor);
    row["cor_msc"] = optional_json(r.cor_msc);
    Json groups;
    for (auto g : kAllGroups) groups[std::string(group_name(g))] = optional_json(report.group_mean(r.model, g, false));
    row["group_means"] = std::move(groups);
    rows.push_back(std::move(row));
  }
  return rows;
}

fs::path gen_impl(const CommandContext& ctx) {
  const RunConfig& c = ctx.config;
  log_line(ctx, "generating " + std::to_string(c.dataset_count) + " samples");
  const auto samples = generate(c.dataset, c.dataset_count, ctx.workers);
  const fs::path dir = dataset_dir(c);
  write_dataset(dir, samples, c.dataset.num_classes);
  return dir;
}

struct TrainOutcome {
  fs::path path;
  Checkpoint ckpt;
  double train_miou = 0.0;
};

TrainOutcome train_impl(const CommandContext& ctx, const LoadedDataset& data, HeadKind head, std::uint64_t seed) {
  const TrainConfig cfg = ctx.config.train_config(head, seed);
  const auto train_split = select_split(data.samples, Split::Train);
  if (train_split.empty()) throw DataError("dataset has no training samples");
  TrainOptions options;
  options.workers = ctx.workers;
  const int every = std::max(1, cfg.total_iters / 10);
  options.progress = [&](int it, double loss) {
    if ((it + 1) % every == 0) {
      std::ostringstream msg;
      msg << head_name(head) << " seed " << seed << " iter " << it + 1 << "/" << cfg.total_iters << " loss " << loss;
      log_line(ctx, msg.str());
    }
  };
  TrainOutcome out;
  out.ckpt = train(cfg, train_split, options);
  out.path = checkpoint_path(ctx.config, head, seed);
  fs::create_directories(out.path.parent_path());
  save_checkpoint(out.path, out.ckpt);
  out.train_miou = miou_percent(evaluate(out.ckpt.net, train_split, ctx.workers)).value_or(std::nan(""));
  return out;
}

BenchmarkReport bench_impl(const CommandContext& ctx, const LoadedDataset& data, const std::vector<BenchmarkModel>& models,
                           std::uint64_t seed, const std::string& tag) {
  const RunConfig& c = ctx.config;
  const auto val = take(select_split(data.samples, Split::Val), c.bench_images);
  if (val.empty()) throw DataError("dataset has no validation samples");
  const auto suite = corruption_suite(c.severities, seed);
  BenchmarkOptions options;
  options.msc = c.msc;
  options.msc_options = c.msc_options;
  options.workers = ctx.workers;
  log_line(ctx, "benchmarking " + std::to_string(models.size()) + " models on " + std::to_string(val.size()) +
                    " images x " + std::to_string(suite.size() + 1) + " conditions");
  BenchmarkReport report = run_benchmark(models, val, suite, options);

  const fs::path reports = run_dir(c) / "reports";
  write_text(reports / (tag + ".txt"), render_report(report, ReportFormat::Text));
  write_text(reports / (tag + ".csv"), render_report(report, ReportFormat::CellsCsv));
  write_text(reports / (tag + ".severity.csv"), render_report(report, ReportFormat::SeverityCsv));
  if (ctx.svg) write_text(reports / (tag + ".svg"), render_report(report, ReportFormat::SeveritySvg));
  return report;
}

RepresentationSummary analyze_impl(const CommandContext& ctx, const LoadedDataset& data, const SegNet& net,
                                   const std::string& tag) {
  const RunConfig& c = ctx.config;
  const auto val = take(select_split(data.samples, Split::Val), c.analysis_images);
  if (val.empty()) throw DataError("dataset has no validation samples");

  RepresentationSummary summary = summarize_representation(net, val, ctx.workers);
  if (c.centered_autocorrelation) {
    for (int cls = 0; cls < net.num_classes; ++cls) {
      auto& slot = summary.per_class[static_cast<std::size_t>(cls)];
      if (!slot) continue;
      slot = autocorrelation(gather_responses(net, val, cls, ctx.workers), true);
      summary.off_diagonal[static_cast<std::size_t>(cls)] = off_diagonal_score(*slot, cls);
    }
  }

  const fs::path dir = run_dir(c) / "analysis" / tag;
  write_text(dir / "ev.csv", ev_csv(summary.ev));
  std::ostringstream scores;
  scores << "class,pixels_predicted,off_diagonal\n";
  for (int cls = 0; cls < net.num_classes; ++cls) {
    const auto& r = summary.per_class[static_cast<std::size_t>(cls)];
    const auto& s = summary.off_diagonal[static_cast<std::size_t>(cls)];
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", s ? *s : std::nan(""));
    scores << cls << ',' << (r ? "yes" : "no") << ',' << buf << '\n';
    if (r) {
      write_text(dir / ("autocorr_c" + std::to_string(cls) + ".csv"), matrix_csv(*r));
      if (ctx.svg) {
        std::vector<std::string> labels;
        for (int b = 0; b < r->k; ++b) labels.push_back("c" + std::to_string(b));
        write_text(dir / ("autocorr_c" + std::to_string(cls) + ".svg"),
                   svg::heatmap("Autocorrelation, predicted class " + std::to_string(cls), r->values,
                                static_cast<std::size_t>(r->k), labels, -1.0, 1.0));
      }
    }
  }
  write_text(dir / "off_diagonal.csv", scores.str());
  if (ctx.svg) {
    svg::Series s{tag, {}, {}};
    for (std::size_t i = 0; i < summary.ev.accumulated.size(); ++i) {
      s.x.push_back(static_cast<double>(i + 1));
      s.y.push_back(100.0 * summary.ev.accumulated[i]);
    }
    write_text(dir / "ev.svg", svg::line_chart("Accumulated explained variance", "component", "EV (%)", {s}));
  }
  return summary;
}

Json analysis_json(const RepresentationSummary& s) {
  Json out;
  out["effective_dim_95"] = s.effective_dim_95;
  out["accumulated_ev"] = s.ev.accumulated;
  Json scores = Json::array();
  for (const auto& v : s.off_diagonal) scores.push_back(optional_json(v));
  out["off_diagonal"] = std::move(scores);
  return out;
}

std::string model_tag(HeadKind head, std::uint64_t seed) { return std::string(head_name(head)) + "_s" + std::to_string(seed); }

}  // namespace

fs::path run_dir(const RunConfig& config) { return config.out / config.name; }
fs::path dataset_dir(const RunConfig& config) { return run_dir(config) / "dataset"; }
fs::path checkpoint_path(const RunConfig& config, HeadKind head, std::uint64_t seed) {
  return run_dir(config) / "checkpoints" / (model_tag(head, seed) + ".ckpt");
}

fs::path cmd_gen(const CommandContext& ctx) {
  RunGuard guard(ctx, "gen");
  const fs::path dir = gen_impl(ctx);
  const LoadedDataset data = load_dataset(ctx);
  Json results;
  results["dataset"] = fs::relative(dir, run_dir(ctx.config)).string();
  results["train_samples"] = select_split(data.samples, Split::Train).size();
  results["val_samples"] = select_split(data.samples, Split::Val).size();
  guard.finish(std::move(results));
  return dir;
}

fs::path cmd_train(const CommandContext& ctx, HeadKind head, std::uint64_t seed) {
  RunGuard guard(ctx, "train");
  const LoadedDataset data = load_dataset(ctx);
  const TrainOutcome out = train_impl(ctx, data, head, seed);
  Json results;
  results["head"] = head_name(head);
  results["seed"] = seed;
  results["checkpoint"] = fs::relative(out.path, run_dir(ctx.config)).string();
  results["final_loss"] = out.ckpt.loss_history.empty() ? Json(nullptr) : Json(out.ckpt.loss_history.back());
  results["train_miou"] = optional_json(out.train_miou);
  guard.finish(std::move(results));
  return out.path;
}

std::size_t cmd_corrupt(const CommandContext& ctx, const fs::path& input, const fs::path& output, std::uint64_t seed) {
  RunGuard guard(ctx, "corrupt");
  if (!fs::exists(input / "manifest.txt")) throw UsageError("no dataset manifest under " + input.string());
  const LoadedDataset data = read_dataset(input);
  const auto suite = corruption_suite(ctx.config.severities, seed);
  const std::size_t n = data.samples.size();
  for (const auto& spec : suite) {
    fs::create_directories(output / std::string(corruption_name(spec.kind)) / std::to_string(spec.severity));
  }
  parallel_for(n * suite.size(), ctx.workers, [&](std::size_t task) {
    const std::size_t i = task / suite.size();
    const CorruptionSpec& spec = suite[task % suite.size()];
    const Tensor image = corrupt(data.samples[i].image, spec_for_image(spec, i));
    const fs::path dir = output / std::string(corruption_name(spec.kind)) / std::to_string(spec.severity);
    write_image(dir / (data.samples[i].id + ".ppm"), image);
  });
  Json results;
  results["input"] = input.string();
  results["output"] = output.string();
  results["images"] = n;
  results["specs"] = suite.size();
  guard.finish(std::move(results));
  return n * suite.size();
}

BenchmarkReport cmd_bench(const CommandContext& ctx, const std::vector<fs::path>& checkpoints, std::uint64_t seed,
                          const std::string& tag) {
  RunGuard guard(ctx, "bench");
  if (checkpoints.empty()) throw UsageError("bench: no checkpoints given");
  std::string missing;
  for (const auto& p : checkpoints) {
    if (!fs::exists(p)) missing += " " + p.string();
  }
  if (!missing.empty()) throw UsageError("bench: missing checkpoints:" + missing);
  const LoadedDataset data = load_dataset(ctx);
  std::vector<Checkpoint> ckpts;
  for (const auto& p : checkpoints) ckpts.push_back(load_checked(p, ctx.config));
  std::vector<BenchmarkModel> models;
  std::map<std::string, int> seen;
  for (const auto& c : ckpts) {
    std::string name(head_name(c.net.head));
    if (++seen[name] > 1) name += "_" + std::to_string(seen[name]);
    models.push_back({name, &c.net});
  }
  BenchmarkReport report = bench_impl(ctx, data, models, seed, tag);
  Json results;
  results["tag"] = tag;
  results["seed"] = seed;
  results["summary"] = summary_json(report);
  guard.finish(std::move(results));
  return report;
}

RepresentationSummary cmd_analyze(const CommandContext& ctx, const fs::path& checkpoint, const std::string& tag) {
  RunGuard guard(ctx, "analyze");
  const LoadedDataset data = load_dataset(ctx);
  const Checkpoint ckpt = load_checked(checkpoint, ctx.config);
  RepresentationSummary summary = analyze_impl(ctx, data, ckpt.net, tag);
  Json results = analysis_json(summary);
  results["tag"] = tag;
  guard.finish(std::move(results));
  return summary;
}

std::optional<double> SeedOutcome::noise_mean(HeadKind head) const {
  return report.group_mean(std::string(head_name(head)), CorruptionGroup::Noise, false);
}

std::optional<double> SeedOutcome::corrupted_mean(HeadKind head) const {
  return report.corrupted_mean(std::string(head_name(head)), false);
}

ReproResult cmd_repro(const CommandContext& ctx) {
  RunGuard guard(ctx, "repro");
  const RunConfig& c = ctx.config;
  gen_impl(ctx);
  const LoadedDataset data = load_dataset(ctx);

  ReproResult result;
  Json seeds_json = Json::array();
  std::ostringstream summary_text;
  summary_text << kScaleNote << '\n';
  for (std::uint64_t seed : c.seeds) {
    SeedOutcome outcome;
    outcome.seed = seed;
    outcome.heads = c.heads;
    std::vector<Checkpoint> ckpts;
    for (auto head : c.heads) {
      TrainOutcome t = train_impl(ctx, data, head, seed);
      outcome.train_miou.push_back(t.train_miou);
      ckpts.push_back(std::move(t.ckpt));
    }
    std::vector<BenchmarkModel> models;
    for (const auto& ck : ckpts) models.push_back({std::string(head_name(ck.net.head)), &ck.net});
    outcome.report = bench_impl(ctx, data, models, seed, "bench_s" + std::to_string(seed));
    for (const auto& ck : ckpts) {
      outcome.analysis.push_back(analyze_impl(ctx, data, ck.net, model_tag(ck.net.head, seed)));
    }

    summary_text << "Seed " << seed << '\n' << render_summary(summarize(outcome.report));
    summary_text << "train mIOU:";
    for (std::size_t h = 0; h < c.heads.size(); ++h) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), " %s %.1f", std::string(head_name(c.heads[h])).c_str(), outcome.train_miou[h]);
      summary_text << buf;
    }
    summary_text << "\neffective dim (95% EV):";
    for (std::size_t h = 0; h < c.heads.size(); ++h) {
      summary_text << ' ' << head_name(c.heads[h]) << ' ' << outcome.analysis[h].effective_dim_95;
    }
    summary_text << "\n\n";

    Json sj;
    sj["seed"] = seed;
    sj["summary"] = summary_json(outcome.report);
    Json heads = Json::array();
    for (std::size_t h = 0; h < c.heads.size(); ++h) {
      Json hj;
      hj["head"] = head_name(c.heads[h]);
      hj["train_miou"] = optional_json(outcome.train_miou[h]);
      hj["analysis"] = analysis_json(outcome.analysis[h]);
      heads.push_back(std::move(hj));
    }
    sj["heads"] = std::move(heads);
    seeds_json.push_back(std::move(sj));
    result.seeds.push_back(std::move(outcome));
  }

  // Seed-averaged overall summary.
  std::vector<SummaryRow> mean_rows;
  for (auto head : c.heads) {
    const std::string name(head_name(head));
    SummaryRow row{name, 0.0, std::nullopt, 0.0, std::nullopt};
    std::vector<SummaryRow> per_seed;
    for (const auto& o : result.seeds) {
      for (const auto& r : summarize(o.report)) {
        if (r.model == name) per_seed.push_back(r);
      }
    }
    auto avg = [&](auto field) -> std::optional<double> {
      double total = 0.0;
      for (const auto& r : per_seed) {
        if (!(r.*field)) return std::nullopt;
        total += *(r.*field);
      }
      return per_seed.empty() ? std::nullopt : std::optional<double>(total / static_cast<double>(per_seed.size()));
    };
    row.val = avg(&SummaryRow::val);
    row.val_msc = avg(&SummaryRow::val_msc);
    row.cor = avg(&SummaryRow::cor);
    row.cor_msc = avg(&SummaryRow::cor_msc);
    mean_rows.push_back(row);
  }
  summary_text << "Mean over " << c.seeds.size() << " seeds\n" << render_summary(mean_rows);
  write_text(run_dir(c) / "reports" / "summary.txt", summary_text.str());

  Json results;
  results["seeds"] = std::move(seeds_json);
  guard.finish(std::move(results));
  return result;
}

}  // namespace segrobust
