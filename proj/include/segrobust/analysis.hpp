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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segrobust/dataset.hpp"
#include "segrobust/model.hpp"

namespace segrobust {

// One class-ordered k-dim response per selected pixel, row-major.
struct ResponseMatrix {
  int k = 0;
  std::size_t rows = 0;
  std::vector<double> values;
  std::optional<int> class_filter;

  std::span<const double> row(std::size_t r) const { return {values.data() + r * static_cast<std::size_t>(k), static_cast<std::size_t>(k)}; }
  bool empty() const { return rows == 0; }
};

// Gathers pixel responses in sample order, then raster order. With a
// filter, only pixels predicted as that class are kept; an empty result is
// returned (not an error) when the class is never predicted.
ResponseMatrix gather_responses(const SegNet& net, std::span<const Sample> samples,
                                std::optional<int> class_filter = std::nullopt, int workers = 1);

struct Autocorrelation {
  int k = 0;
  std::vector<double> values;      // k x k, row-major
  std::vector<bool> zero_columns;  // columns with zero norm; their entries are 0

  double at(int a, int b) const { return values[static_cast<std::size_t>(a * k + b)]; }
};

// Column-normalized Gram matrix: R_ab = sum V_a V_b / sqrt(sum V_a^2 sum V_b^2).
// Raw responses by default; `centered` subtracts column means first.
// Needs at least two rows.
Autocorrelation autocorrelation(const ResponseMatrix& v, bool centered = false);

// Mean |R_cb| over b != c.
double off_diagonal_score(const Autocorrelation& r, int cls);

struct EVCurve {
  std::vector<double> eigenvalues;  // descending, clamped at zero
  std::vector<double> accumulated;  // running normalized sums, ends at 1
};

// Eigenvalues of a symmetric n x n matrix by cyclic Jacobi rotation, in
// descending order. Stops once the off-diagonal norm is below `tolerance`.
std::vector<double> symmetric_eigenvalues(std::vector<double> matrix, int n, double tolerance = 1e-12);

// Sample covariance (divided by rows - 1) of the columns.
std::vector<double> covariance(const ResponseMatrix& v, bool centered = true);

// Spectrum of the covariance; needs at least k + 1 rows.
EVCurve explained_variance(const ResponseMatrix& v, bool centered = true);

// Smallest m (1-based) whose accumulated value reaches `threshold`.
int effective_dim(const EVCurve& curve, double threshold);

// Everything the diagnostics report for one trained network.
struct RepresentationSummary {
  EVCurve ev;
  int effective_dim_95 = 0;
  std::vector<std::optional<Autocorrelation>> per_class;  // nullopt when the class is never predicted
  std::vector<std::optional<double>> off_diagonal;        // score of class c inside its own matrix
};

RepresentationSummary summarize_representation(const SegNet& net, std::span<const Sample> samples, int workers = 1);

std::string matrix_csv(const Autocorrelation& r);
std::string ev_csv(const EVCurve& curve);

}  // namespace segrobust
