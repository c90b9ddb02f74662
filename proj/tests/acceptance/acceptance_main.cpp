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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "segrobust/commands.hpp"
#include "segrobust/config.hpp"
#include "segrobust/corruptions.hpp"
#include "segrobust/dataset.hpp"
#include "segrobust/evaluation.hpp"
#include "segrobust/heads.hpp"
#include "segrobust/numerics.hpp"
#include "segrobust/rng.hpp"

namespace fs = std::filesystem;
using namespace segrobust;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& name, const Outcome& o) {
  std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

constexpr HeadKind kHeads[] = {HeadKind::SoftmaxBaseline, HeadKind::IBE, HeadKind::SigmoidOnly, HeadKind::SCrIBE};

std::vector<double> random_logits(CounterRng& rng, std::size_t n, double stddev) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal(0.0, stddev);
  return v;
}

Outcome gradient_verification() {
  const auto start = Clock::now();
  double worst = 0.0;
  int draws = 0;
  for (HeadKind head : kHeads) {
    for (int k : {3, 6, 21}) {
      const auto c = static_cast<std::size_t>(logit_channels(head, k));
      for (std::uint64_t s = 0; s < 200; ++s) {
        CounterRng rng(derive_key({0xACCE, static_cast<std::uint64_t>(head), static_cast<std::uint64_t>(k), s}));
        Tensor v({c});
        const auto init = random_logits(rng, c, 2.0);
        std::copy(init.begin(), init.end(), v.data().begin());
        const int label = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        const auto analytic = pixel_loss(head, v.values(), label).grad;
        const Tensor fd = finite_difference([&](const Tensor& t) { return pixel_loss(head, t.values(), label).loss; }, v,
                                            1e-5);
        worst = std::max(worst, relative_error(analytic, fd.values()));
        ++draws;
      }
    }
  }
  const double t = seconds_since(start);
  return {worst <= 1e-5 && t < 10.0,
          std::to_string(draws) + " draws, max relative error " + fmt("%.2e", worst) + ", " + fmt("%.2f", t) + " s"};
}

Outcome closed_forms() {
  const auto start = Clock::now();
  double worst_p = 0.0, worst_l = 0.0;
  bool zeros = true;
  CounterRng rng(0xC105ED);
  for (int draw = 0; draw < 1000; ++draw) {
    const std::size_t n = 1 + rng.below(20);
    const auto fg = random_logits(rng, n, 1.5);
    double s = 0.0;
    for (double x : fg) s += std::exp(x);
    worst_p = std::max(worst_p, std::abs(ibe_background_probability(fg) - 1.0 / (s * s + 1.0)));
    worst_l = std::max(worst_l, std::abs(loss_scribe(fg, 0).loss - std::log1p(s)));
    const auto v = random_logits(rng, n + 1, 3.0);
    const int label = static_cast<int>(rng.below(n + 1));
    const auto g = loss_sigmoid(v, label).grad;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (static_cast<int>(i) != label && g[i] != 0.0) zeros = false;
    }
  }
  const double t = seconds_since(start);
  return {worst_p <= 1e-12 && worst_l <= 1e-12 && zeros && t < 1.0,
          "background probability error " + fmt("%.1e", worst_p) + ", background loss error " + fmt("%.1e", worst_l) +
              (zeros ? ", off-label sigmoid gradients exactly zero" : ", nonzero off-label sigmoid gradient") + ", " +
              fmt("%.3f", t) + " s"};
}

Outcome structure_invariants() {
  CounterRng rng(0x57);
  int sparse_bad = 0, sum_bad = 0;
  double worst_sum = 0.0;
  for (int draw = 0; draw < 10000; ++draw) {
    const int k = 2 + static_cast<int>(rng.below(20));
    const auto v = random_logits(rng, static_cast<std::size_t>(k), 3.0);
    const int label = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    double total = 0.0, scale = 0.0;
    for (double g : loss_softmax(v, label).grad) {
      total += g;
      scale += std::abs(g);
    }
    worst_sum = std::max(worst_sum, std::abs(total));
    if (std::abs(total) > 1e-15 * std::max(1.0, scale) * k) ++sum_bad;
    const int fg_label = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k - 1)));
    const std::vector<double> fg(v.begin(), v.end() - 1);
    const auto g = loss_scribe(fg, fg_label).grad;
    const auto nonzero = std::count_if(g.begin(), g.end(), [](double x) { return x != 0.0; });
    if (nonzero != 1 || g[static_cast<std::size_t>(fg_label - 1)] == 0.0) ++sparse_bad;
  }
  return {sparse_bad == 0 && sum_bad == 0,
          "10000 draws, " + std::to_string(sparse_bad) + " non-sparse foreground gradients, softmax gradient sum max " +
              fmt("%.1e", worst_sum)};
}

double set_oracle_miou(const LabelMap& pred, const LabelMap& truth, int k) {
  double total = 0.0;
  int present = 0;
  for (int c = 0; c < k; ++c) {
    std::set<std::size_t> p, t;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == c) p.insert(i);
      if (truth[i] == c) t.insert(i);
    }
    std::set<std::size_t> un = p;
    un.insert(t.begin(), t.end());
    if (un.empty()) continue;
    std::size_t inter = 0;
    for (std::size_t i : p) inter += t.count(i);
    total += static_cast<double>(inter) / static_cast<double>(un.size());
    ++present;
  }
  return total / present;
}

LabelMap random_map(CounterRng& rng, std::size_t h, std::size_t w, int k) {
  LabelMap m(h, w);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return m;
}

Outcome miou_oracle() {
  CounterRng rng(0x10);
  int mismatches = 0;
  for (int draw = 0; draw < 200; ++draw) {
    const int k = 2 + static_cast<int>(rng.below(6));
    const std::size_t h = 1 + rng.below(9), w = 1 + rng.below(9);
    const LabelMap p = random_map(rng, h, w, k), t = random_map(rng, h, w, k);
    ConfusionMatrix cm(k);
    cm.accumulate(p, t);
    if (*miou(cm) != set_oracle_miou(p, t, k)) ++mismatches;
  }
  const LabelMap truth = random_map(rng, 6, 7, 4);
  ConfusionMatrix perfect(4);
  perfect.accumulate(truth, truth);
  LabelMap half(1, 10, 0);
  for (std::size_t i = 5; i < 10; ++i) half[i] = 1;
  ConfusionMatrix two(2);
  two.accumulate(LabelMap(1, 10, 0), half);
  const double p100 = *miou_percent(perfect), p25 = *miou_percent(two);
  return {mismatches == 0 && p100 == 100.0 && p25 == 25.0,
          "200 random maps, " + std::to_string(mismatches) + " mismatches, perfect " + fmt("%.1f", p100) +
              ", two-class example " + fmt("%.1f", p25)};
}

double mean_squared(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a.values()[i] - b.values()[i]) * (a.values()[i] - b.values()[i]);
  return s / static_cast<double>(a.size());
}

// Expected squared deviation of clip(0.5 + sigma Z, 0, 1) from 0.5.
double clipped_normal_mse(double sigma) {
  const double c = 0.5 / sigma;
  const double tail = 0.5 * std::erfc(c / std::sqrt(2.0));
  const double density = std::exp(-0.5 * c * c) / std::sqrt(2.0 * M_PI);
  return sigma * sigma * (1.0 - 2.0 * tail - 2.0 * c * density) + 2.0 * 0.25 * tail;
}

Outcome corruption_suite_checks() {
  const auto start = Clock::now();
  SyntheticSceneSpec spec;
  spec.seed = 2024;
  spec.image_size = 48;
  spec.min_radius = 5;
  spec.max_radius = 12;
  std::vector<Tensor> images;
  for (const auto& s : generate(spec, 20)) images.push_back(s.image);

  int identity_bad = 0;
  for (auto kind : all_corruptions()) {
    if (!(corrupt(images.front(), {kind, 0, 7}) == images.front())) ++identity_bad;
  }

  std::string noise;
  bool noise_ok = true;
  const Tensor gray({128, 128, 3}, 0.5);
  for (int s = 1; s <= kMaxSeverity; ++s) {
    const double sigma = default_severity_table().get(CorruptionKind::GaussianNoise, "sigma", s);
    const double mse = mean_squared(corrupt(gray, {CorruptionKind::GaussianNoise, s, 99}), gray);
    // sigma^2 is the target only where clipping at 0 and 1 is negligible
    // (under 1% of pixels); beyond that the clipped-normal expectation is.
    const bool negligible_clipping = std::erfc(0.5 / sigma / std::sqrt(2.0)) <= 0.01;
    const double expected = negligible_clipping ? sigma * sigma : clipped_normal_mse(sigma);
    noise_ok = noise_ok && std::abs(mse / expected - 1.0) <= 0.1;
    noise += (s > 1 ? " " : "") + fmt("%.3f", mse / (sigma * sigma)) + (negligible_clipping ? "" : "*");
  }

  std::vector<std::string> not_monotone;
  for (auto kind : all_corruptions()) {
    double prev = 0.0;
    for (int s = 1; s <= kMaxSeverity; ++s) {
      double total = 0.0;
      for (std::size_t i = 0; i < images.size(); ++i) {
        total += std::sqrt(mean_squared(corrupt(images[i], spec_for_image({kind, s, 3}, i)), images[i]));
      }
      const double m = total / static_cast<double>(images.size());
      if (m < prev) {
        not_monotone.emplace_back(corruption_name(kind));
        break;
      }
      prev = m;
    }
  }
  const double t = seconds_since(start);
  std::string detail = std::to_string(identity_bad) + " kinds not identity at severity 0, noise MSE/sigma^2 [" + noise +
                       "] (* clipped-normal target), " + std::to_string(not_monotone.size()) + " kinds with decreasing L2";
  for (const auto& n : not_monotone) detail += " " + n;
  detail += ", " + fmt("%.1f", t) + " s";
  return {identity_bad == 0 && noise_ok && not_monotone.empty() && t < 120.0, detail};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int majority(const std::vector<bool>& wins) { return static_cast<int>(std::count(wins.begin(), wins.end(), true)); }

std::size_t head_index(const SeedOutcome& o, HeadKind h) {
  return static_cast<std::size_t>(std::find(o.heads.begin(), o.heads.end(), h) - o.heads.begin());
}

void end_to_end(const RunConfig& config, const fs::path& work, int workers) {
  CommandContext ctx;
  ctx.config = config;
  ctx.config.out = work;
  ctx.workers = workers;
  fs::remove_all(run_dir(ctx.config));
  std::cout << "running the reproduction (" << ctx.config.seeds.size() << " seeds) in " << run_dir(ctx.config).string()
            << std::endl;

  const auto start = Clock::now();
  ReproResult result;
  try {
    result = cmd_repro(ctx);
  } catch (const std::exception& e) {
    report(6, "end-to-end replication", {false, std::string("repro failed: ") + e.what()});
    report(7, "representation diagnostics", {false, "no trained checkpoints"});
    return;
  }
  const double minutes = seconds_since(start) / 60.0;

  const auto required = {HeadKind::SoftmaxBaseline, HeadKind::IBE, HeadKind::SCrIBE};
  for (const auto& o : result.seeds) {
    for (HeadKind h : required) {
      if (head_index(o, h) == o.heads.size()) {
        report(6, "end-to-end replication", {false, "config does not train " + std::string(head_name(h))});
        report(7, "representation diagnostics", {false, "config does not train " + std::string(head_name(h))});
        return;
      }
    }
  }

  double min_train = 100.0;
  std::vector<bool> noise_wins, ibe_wins, scribe_wins, dim_wins, orth_wins;
  std::string per_seed6, per_seed7;
  for (const auto& o : result.seeds) {
    for (double m : o.train_miou) min_train = std::min(min_train, m);
    const auto nb = o.noise_mean(HeadKind::SoftmaxBaseline), ns = o.noise_mean(HeadKind::SCrIBE);
    const auto cb = o.corrupted_mean(HeadKind::SoftmaxBaseline), ci = o.corrupted_mean(HeadKind::IBE),
               cs = o.corrupted_mean(HeadKind::SCrIBE);
    noise_wins.push_back(nb && ns && *ns > *nb);
    ibe_wins.push_back(cb && ci && *ci >= *cb);
    scribe_wins.push_back(cb && cs && *cs >= *cb);
    per_seed6 += " [seed " + std::to_string(o.seed) + " noise base/scribe " + fmt("%.1f", nb.value_or(NAN)) + "/" +
                 fmt("%.1f", ns.value_or(NAN)) + ", corrupted base/ibe/scribe " + fmt("%.1f", cb.value_or(NAN)) + "/" +
                 fmt("%.1f", ci.value_or(NAN)) + "/" + fmt("%.1f", cs.value_or(NAN)) + "]";

    const auto& ab = o.analysis[head_index(o, HeadKind::SoftmaxBaseline)];
    const auto& ai = o.analysis[head_index(o, HeadKind::IBE)];
    const auto& as = o.analysis[head_index(o, HeadKind::SCrIBE)];
    dim_wins.push_back(as.effective_dim_95 >= ai.effective_dim_95 && as.effective_dim_95 >= ab.effective_dim_95);
    // Every class predicted by all three heads must be more orthogonal to
    // the rest under both implicit-background heads.
    int compared = 0, lower = 0;
    for (std::size_t c = 0; c < ab.off_diagonal.size(); ++c) {
      if (!ab.off_diagonal[c] || !ai.off_diagonal[c] || !as.off_diagonal[c]) continue;
      ++compared;
      lower += *ai.off_diagonal[c] < *ab.off_diagonal[c] && *as.off_diagonal[c] < *ab.off_diagonal[c];
    }
    orth_wins.push_back(compared > 0 && lower == compared);
    per_seed7 += " [seed " + std::to_string(o.seed) + " dim base/ibe/scribe " + std::to_string(ab.effective_dim_95) +
                 "/" + std::to_string(ai.effective_dim_95) + "/" + std::to_string(as.effective_dim_95) +
                 ", lower off-diagonal in " + std::to_string(lower) + "/" + std::to_string(compared) + " classes]";
  }
  const int n = static_cast<int>(result.seeds.size());
  const int need = (2 * n + 2) / 3;  // 2 of 3
  const bool a = min_train >= 80.0;
  const bool b = majority(noise_wins) >= need;
  const bool c = majority(ibe_wins) >= need && majority(scribe_wins) >= need;
  const bool fast = minutes < 30.0;
  report(6, "end-to-end replication",
         {a && b && c && fast,
          std::string("(a) min train mIOU ") + fmt("%.1f", min_train) + (a ? " ok" : " below 80") +
              ", (b) noise SCrIBE>Base on " + std::to_string(majority(noise_wins)) + "/" + std::to_string(n) +
              ", (c) IBE>=Base on " + std::to_string(majority(ibe_wins)) + "/" + std::to_string(n) +
              " and SCrIBE>=Base on " + std::to_string(majority(scribe_wins)) + "/" + std::to_string(n) + ", " +
              fmt("%.1f", minutes) + " min;" + per_seed6});
  report(7, "representation diagnostics",
         {majority(dim_wins) >= need && majority(orth_wins) >= need,
          "effective dim SCrIBE>=IBE,Base on " + std::to_string(majority(dim_wins)) + "/" + std::to_string(n) +
              ", off-diagonal IBE,SCrIBE<Base on " + std::to_string(majority(orth_wins)) + "/" + std::to_string(n) +
              ";" + per_seed7});
}

Outcome determinism(const fs::path& work) {
  RunConfig base;
  apply_settings(base, parse_settings("dataset.count = 16\ndataset.image_size = 32\ndataset.min_radius = 5\n"
                                      "dataset.max_radius = 10\ntrain.total_iters = 12\ntrain.batch_size = 3\n"
                                      "train.crop_size = 24\nbench.images = 2\nbench.severities = 1,5\n"
                                      "bench.msc_scales = 0.75,1\nanalysis.images = 2\nrun.seeds = 1,2\n"));
  base.out = work;
  std::vector<fs::path> dirs;
  const int worker_counts[] = {1, 1, 4};
  for (std::size_t i = 0; i < 3; ++i) {
    CommandContext ctx;
    ctx.config = base;
    ctx.config.name = "determinism_" + std::to_string(i);
    ctx.workers = worker_counts[i];
    fs::remove_all(run_dir(ctx.config));
    cmd_repro(ctx);
    dirs.push_back(run_dir(ctx.config));
  }
  int files = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const fs::path rel = fs::relative(entry.path(), dirs[0]);
    ++files;
    const std::string ref = read_file(entry.path());
    for (std::size_t i = 1; i < dirs.size(); ++i) differing += read_file(dirs[i] / rel) != ref;
  }
  for (const auto& d : dirs) fs::remove_all(d);
  return {files > 0 && differing == 0, std::to_string(files) + " CSV files compared across 3 runs (workers 1, 1, 4), " +
                                           std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segrobust acceptance checks"};
  fs::path config_path, work = "acceptance_work";
  int workers = 0;
  bool skip_repro = false;
  app.add_option("--config", config_path, "reproduction config used for the end-to-end criteria")->check(CLI::ExistingFile);
  app.add_option("--work", work, "scratch directory");
  app.add_option("--workers", workers, "worker threads (0 = all cores)");
  app.add_flag("--skip-repro", skip_repro, "skip the end-to-end and representation criteria");
  CLI11_PARSE(app, argc, argv);

  auto guarded = [](int id, const std::string& name, const std::function<Outcome()>& f) {
    try {
      report(id, name, f());
    } catch (const std::exception& e) {
      report(id, name, {false, std::string("exception: ") + e.what()});
    }
  };
  guarded(1, "gradient verification", gradient_verification);
  guarded(2, "closed-form checks", closed_forms);
  guarded(3, "structure invariants", structure_invariants);
  guarded(4, "mIOU oracle", miou_oracle);
  guarded(5, "corruption suite", corruption_suite_checks);
  if (skip_repro) {
    report(6, "end-to-end replication", {false, "skipped"});
    report(7, "representation diagnostics", {false, "skipped"});
  } else {
    try {
      end_to_end(load_run_config(config_path.empty() ? nullptr : &config_path, {}), work, workers);
    } catch (const std::exception& e) {
      report(6, "end-to-end replication", {false, std::string("exception: ") + e.what()});
      report(7, "representation diagnostics", {false, "not run"});
    }
  }
  guarded(8, "determinism", [&] { return determinism(work); });
  std::printf("%d of 8 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
