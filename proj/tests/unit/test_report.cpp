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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "segrobust/error.hpp"
#include "segrobust/report.hpp"

namespace segrobust {
namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

BenchmarkReport synthetic_report() {
  BenchmarkReport r;
  r.models = {"baseline", "scribe"};
  r.kinds = {all_corruptions().begin(), all_corruptions().end()};
  r.severities = {1, 2, 3, 4, 5};
  r.has_msc = true;
  for (int msc = 0; msc < 2; ++msc) {
    for (std::size_t m = 0; m < 2; ++m) {
      r.cells.push_back({r.models[m], std::nullopt, 0, msc == 1, 70.0 + 0.1 * static_cast<double>(m) + msc});
    }
  }
  double v = 60.0;
  for (auto k : r.kinds) {
    for (int s = 1; s <= 5; ++s) {
      for (std::size_t m = 0; m < 2; ++m) {
        for (int msc = 0; msc < 2; ++msc) {
          r.cells.push_back({r.models[m], k, s, msc == 1, v});
          v = std::fmod(v * 1.37 + 3.1, 100.0);
        }
      }
    }
  }
  r.cells.push_back({"scribe", CorruptionKind::Fog, 5, false, std::nan("")});
  return r;
}

TEST(RenderSummary, ReferenceValuesKeepTheFourColumnLayout) {
  const std::vector<SummaryRow> rows{{"Baseline", 69.1, 74.1, 35.5, 37.5},
                                     {"IBE", 70.6, 75.3, 38.6, 40.3},
                                     {"SCrIBE", 69.9, 74.6, 39.5, 42.1}};
  const auto lines = lines_of(render_summary(rows));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(words(lines[0]), (std::vector<std::string>{"Model", "val", "val+MSC", "cor", "cor+MSC"}));
  EXPECT_EQ(words(lines[1]), (std::vector<std::string>{"Baseline", "69.1", "74.1", "35.5", "37.5"}));
  EXPECT_EQ(words(lines[2]), (std::vector<std::string>{"IBE", "70.6", "75.3", "38.6", "40.3"}));
  EXPECT_EQ(words(lines[3]), (std::vector<std::string>{"SCrIBE", "69.9", "74.6", "39.5", "42.1"}));
  // Columns are right-aligned: every value ends at the same offset as its header.
  for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_EQ(lines[i].size(), lines[0].size());
}

TEST(RenderReport, EmptyReportRendersHeadersOnly) {
  const BenchmarkReport empty;
  EXPECT_EQ(render_report(empty, ReportFormat::CellsCsv), "kind,group,severity,model,msc,miou\n");
  EXPECT_EQ(render_report(empty, ReportFormat::SeverityCsv), "model,msc,severity,miou\n");
  const auto text = render_report(empty, ReportFormat::Text);
  EXPECT_NE(text.find("Model"), std::string::npos);
  EXPECT_EQ(text.find("baseline"), std::string::npos);
  EXPECT_NE(text.find("not comparable"), std::string::npos);
}

TEST(RenderReport, CellsCsvRoundTripsExactly) {
  const BenchmarkReport r = synthetic_report();
  const std::string csv = render_report(r, ReportFormat::CellsCsv);
  const BenchmarkReport back = parse_cells_csv(csv);
  EXPECT_EQ(back, r);
  EXPECT_EQ(render_report(back, ReportFormat::CellsCsv), csv);
  EXPECT_THROW(parse_cells_csv("wrong,header\n"), DataError);
  EXPECT_THROW(parse_cells_csv("kind,group,severity,model,msc,miou\nfog,Noise,1,a,0,5\n"), DataError);
  EXPECT_THROW(parse_cells_csv("kind,group,severity,model,msc,miou\nfog,Weather,x,a,0,5\n"), DataError);
}

TEST(RenderReport, TextGridHasGroupsSeverityBlocksAndMeans) {
  const BenchmarkReport r = synthetic_report();
  const std::string text = render_report(r, ReportFormat::Text);
  for (const char* g : {"Noise", "Blur", "Weather", "Lighting", "Spatial", "Gaus.", "JPEG", "Mean", "val+MSC"}) {
    EXPECT_NE(text.find(g), std::string::npos) << g;
  }
  std::size_t mean_rows = 0;
  for (const auto& line : lines_of(text)) mean_rows += line.rfind("Mean ", 0) == 0;
  EXPECT_EQ(mean_rows, 4u);  // two models, single-scale and multi-scale grids
}

TEST(RenderReport, SeverityCsvAndSvgSeries) {
  const BenchmarkReport r = synthetic_report();
  const auto lines = lines_of(render_report(r, ReportFormat::SeverityCsv));
  EXPECT_EQ(lines.size(), 1u + 2u * 2u * 6u);
  EXPECT_EQ(lines[1].substr(0, 13), "baseline,0,0,");
  const std::string svg = render_report(r, ReportFormat::SeveritySvg);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("scribe +MSC"), std::string::npos);
}

TEST(Summarize, UsesCleanAndCorruptedMeans) {
  const BenchmarkReport r = synthetic_report();
  const auto rows = summarize(r);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].val, r.clean("baseline", false));
  EXPECT_EQ(rows[1].cor_msc, r.corrupted_mean("scribe", true));
}

}  // namespace
}  // namespace segrobust
