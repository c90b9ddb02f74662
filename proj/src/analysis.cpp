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

#include "segrobust/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "segrobust/error.hpp"
#include "segrobust/heads.hpp"
#include "segrobust/parallel.hpp"

namespace segrobust {

ResponseMatrix gather_responses(const SegNet& net, std::span<const Sample> samples, std::optional<int> class_filter,
                                int workers) {
  if (samples.empty()) throw UsageError("gather_responses: no samples");
  if (class_filter && (*class_filter < 0 || *class_filter >= net.num_classes)) {
    throw UsageError("gather_responses: class filter out of range");
  }
  std::vector<std::vector<double>> parts(samples.size());
  parallel_for(samples.size(), workers, [&](std::size_t i) {
    const LogitMap out = forward(net, samples[i].image);
    std::vector<double>& rows = parts[i];
    for (std::size_t y = 0; y < out.height(); ++y) {
      for (std::size_t x = 0; x < out.width(); ++x) {
        const auto logits = out.logits.pixel(y, x);
        if (class_filter && predict_pixel(net.head, logits) != *class_filter) continue;
        const auto u = class_ordered_response(net.head, logits);
        rows.insert(rows.end(), u.begin(), u.end());
      }
    }
  });
  ResponseMatrix v;
  v.k = net.num_classes;
  v.class_filter = class_filter;
  for (const auto& p : parts) v.values.insert(v.values.end(), p.begin(), p.end());
  v.rows = v.values.size() / static_cast<std::size_t>(v.k);
  return v;
}

namespace {

std::vector<double> column_means(const ResponseMatrix& v) {
  std::vector<double> mean(static_cast<std::size_t>(v.k), 0.0);
  for (std::size_t r = 0; r < v.rows; ++r) {
    const auto row = v.row(r);
    for (int a = 0; a < v.k; ++a) mean[static_cast<std::size_t>(a)] += row[static_cast<std::size_t>(a)];
  }
  for (double& m : mean) m /= static_cast<double>(std::max<std::size_t>(v.rows, 1));
  return mean;
}

std::vector<double> gram(const ResponseMatrix& v, bool centered) {
  const auto k = static_cast<std::size_t>(v.k);
  const std::vector<double> mean = centered ? column_means(v) : std::vector<double>(k, 0.0);
  std::vector<double> g(k * k, 0.0);
  std::vector<double> d(k);
  for (std::size_t r = 0; r < v.rows; ++r) {
    const auto row = v.row(r);
    for (std::size_t a = 0; a < k; ++a) d[a] = row[a] - mean[a];
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a; b < k; ++b) g[a * k + b] += d[a] * d[b];
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < a; ++b) g[a * k + b] = g[b * k + a];
  }
  return g;
}

}  // namespace

Autocorrelation autocorrelation(const ResponseMatrix& v, bool centered) {
  if (v.rows < 2) throw UsageError("autocorrelation: need at least 2 rows, got " + std::to_string(v.rows));
  const auto k = static_cast<std::size_t>(v.k);
  const std::vector<double> g = gram(v, centered);
  Autocorrelation r;
  r.k = v.k;
  r.values.assign(k * k, 0.0);
  r.zero_columns.assign(k, false);
  for (std::size_t a = 0; a < k; ++a) r.zero_columns[a] = g[a * k + a] <= 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if (r.zero_columns[a] || r.zero_columns[b]) continue;
      const double value = g[a * k + b] / std::sqrt(g[a * k + a] * g[b * k + b]);
      r.values[a * k + b] = a == b ? 1.0 : std::clamp(value, -1.0, 1.0);
    }
  }
  return r;
}

double off_diagonal_score(const Autocorrelation& r, int cls) {
  if (cls < 0 || cls >= r.k || r.k < 2) throw UsageError("off_diagonal_score: class out of range");
  double total = 0.0;
  for (int b = 0; b < r.k; ++b) {
    if (b != cls) total += std::abs(r.at(cls, b));
  }
  return total / (r.k - 1);
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n, double tolerance) {
  const auto un = static_cast<std::size_t>(n);
  if (a.size() != un * un) throw UsageError("symmetric_eigenvalues: matrix size mismatch");
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < un; ++p) {
      for (std::size_t q = 0; q < un; ++q) {
        if (p != q) s += a[p * un + q] * a[p * un + q];
      }
    }
    return std::sqrt(s);
  };
  for (int sweep = 0; sweep < 100 && off_norm() > tolerance; ++sweep) {
    for (std::size_t p = 0; p + 1 < un; ++p) {
      for (std::size_t q = p + 1; q < un; ++q) {
        const double apq = a[p * un + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * un + q] - a[p * un + p]) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < un; ++i) {
          const double aip = a[i * un + p];
          const double aiq = a[i * un + q];
          a[i * un + p] = c * aip - s * aiq;
          a[i * un + q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < un; ++i) {
          const double api = a[p * un + i];
          const double aqi = a[q * un + i];
          a[p * un + i] = c * api - s * aqi;
          a[q * un + i] = s * api + c * aqi;
        }
      }
    }
  }
  std::vector<double> eig(un);
  for (std::size_t i = 0; i < un; ++i) eig[i] = a[i * un + i];
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

std::vector<double> covariance(const ResponseMatrix& v, bool centered) {
  if (v.rows < 2) throw UsageError("covariance: need at least 2 rows");
  std::vector<double> c = gram(v, centered);
  for (double& x : c) x /= static_cast<double>(v.rows - 1);
  return c;
}

EVCurve explained_variance(const ResponseMatrix& v, bool centered) {
  if (v.rows < static_cast<std::size_t>(v.k) + 1) {
    throw UsageError("explained_variance: need at least " + std::to_string(v.k + 1) + " rows, got " +
                     std::to_string(v.rows));
  }
  EVCurve curve;
  curve.eigenvalues = symmetric_eigenvalues(covariance(v, centered), v.k);
  double total = 0.0;
  for (double& e : curve.eigenvalues) {
    e = std::max(e, 0.0);
    total += e;
  }
  double running = 0.0;
  for (double e : curve.eigenvalues) {
    running += e;
    curve.accumulated.push_back(total > 0.0 ? running / total : 1.0);
  }
  if (!curve.accumulated.empty()) curve.accumulated.back() = 1.0;
  return curve;
}

int effective_dim(const EVCurve& curve, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw UsageError("effective_dim: threshold must lie in (0, 1)");
  for (std::size_t m = 0; m < curve.accumulated.size(); ++m) {
    if (curve.accumulated[m] >= threshold) return static_cast<int>(m) + 1;
  }
  return static_cast<int>(curve.accumulated.size());
}

RepresentationSummary summarize_representation(const SegNet& net, std::span<const Sample> samples, int workers) {
  RepresentationSummary out;
  const ResponseMatrix all = gather_responses(net, samples, std::nullopt, workers);
  out.ev = explained_variance(all);
  out.effective_dim_95 = effective_dim(out.ev, 0.95);
  for (int c = 0; c < net.num_classes; ++c) {
    const ResponseMatrix v = gather_responses(net, samples, c, workers);
    if (v.rows < 2) {
      out.per_class.emplace_back();
      out.off_diagonal.emplace_back();
      continue;
    }
    Autocorrelation r = autocorrelation(v);
    out.off_diagonal.emplace_back(off_diagonal_score(r, c));
    out.per_class.emplace_back(std::move(r));
  }
  return out;
}

std::string matrix_csv(const Autocorrelation& r) {
  std::ostringstream out;
  char buf[40];
  out << "class";
  for (int b = 0; b < r.k; ++b) out << ",c" << b;
  out << '\n';
  for (int a = 0; a < r.k; ++a) {
    out << 'c' << a;
    for (int b = 0; b < r.k; ++b) {
      std::snprintf(buf, sizeof(buf), "%.17g", r.at(a, b));
      out << ',' << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string ev_csv(const EVCurve& curve) {
  std::ostringstream out;
  char buf[80];
  out << "component,eigenvalue,accumulated\n";
  for (std::size_t i = 0; i < curve.eigenvalues.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i + 1, curve.eigenvalues[i], curve.accumulated[i]);
    out << buf;
  }
  return out.str();
}

}  // namespace segrobust
