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

#include "segrobust/evaluation.hpp"

namespace segrobust {

enum class ReportFormat {
  Text,         // grouped corruption grid per severity plus a Mean block, then the summary
  CellsCsv,     // kind,group,severity,model,msc,miou
  SeverityCsv,  // model,msc,severity,miou (severity 0 is clean)
  SeveritySvg,  // mIOU against severity, one line per model and inference mode
};

std::string render_report(const BenchmarkReport& report, ReportFormat format);

// One line of the overall comparison: clean and corrupted mIOU, each with
// and without multi-scale inference.
struct SummaryRow {
  std::string model;
  std::optional<double> val;
  std::optional<double> val_msc;
  std::optional<double> cor;
  std::optional<double> cor_msc;
};

std::vector<SummaryRow> summarize(const BenchmarkReport& report);
std::string render_summary(std::span<const SummaryRow> rows);

// Inverse of ReportFormat::CellsCsv. Throws DataError on malformed input.
BenchmarkReport parse_cells_csv(const std::string& text);

// Printed at the top of text reports.
extern const char* const kScaleNote;

}  // namespace segrobust
