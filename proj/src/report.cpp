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

#include "segrobust/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "segrobust/error.hpp"
#include "segrobust/svg.hpp"

namespace segrobust {

const char* const kScaleNote =
    "Values are mIOU (0-100) of a small convolutional model on synthetic scenes.\n"
    "They are not comparable with full-scale models on natural images; compare heads with each other.\n";

namespace {

constexpr int kModelWidth = 10;
constexpr int kCellWidth = 6;

std::string fmt(std::optional<double> v, int width) {
  char buf[32];
  if (v && std::isfinite(*v)) {
    std::snprintf(buf, sizeof(buf), "%*.1f", width, *v);
  } else {
    std::snprintf(buf, sizeof(buf), "%*s", width, "-");
  }
  return buf;
}

std::string pad(std::string_view s, int width) {
  std::string out(s);
  if (static_cast<int>(out.size()) < width) out.append(static_cast<std::size_t>(width) - out.size(), ' ');
  return out;
}

std::string rpad(std::string_view s, int width) {
  std::string out;
  if (static_cast<int>(s.size()) < width) out.append(static_cast<std::size_t>(width) - s.size(), ' ');
  out += s;
  return out;
}

// Kinds of the report bucketed by group, in table order.
std::vector<std::pair<CorruptionGroup, std::vector<CorruptionKind>>> grouped_kinds(const BenchmarkReport& report) {
  std::vector<std::pair<CorruptionGroup, std::vector<CorruptionKind>>> out;
  for (auto group : kAllGroups) {
    std::vector<CorruptionKind> kinds;
    for (auto kind : report.kinds) {
      if (group_of(kind) == group) kinds.push_back(kind);
    }
    if (!kinds.empty()) out.emplace_back(group, std::move(kinds));
  }
  return out;
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& values) {
  double total = 0.0;
  int n = 0;
  for (const auto& v : values) {
    if (v && std::isfinite(*v)) {
      total += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return total / n;
}

void render_grid(std::ostringstream& out, const BenchmarkReport& report, bool msc) {
  const auto groups = grouped_kinds(report);
  out << (msc ? "Corrupted validation mIOU, multi-scale inference\n" : "Corrupted validation mIOU, single-scale inference\n");

  std::string group_line = pad("", 5) + pad("", kModelWidth);
  std::string label_line = pad("Sv.", 5) + pad("Model", kModelWidth);
  for (const auto& [group, kinds] : groups) {
    const int span = static_cast<int>(kinds.size()) * kCellWidth;
    group_line += " |" + pad(std::string(" ") + std::string(group_name(group)), span);
    label_line += " |";
    for (auto kind : kinds) label_line += rpad(corruption_label(kind), kCellWidth);
  }
  group_line += " |";
  label_line += " |" + rpad("Avg", kCellWidth);
  out << group_line << '\n' << label_line << '\n';

  auto row = [&](const std::string& sv, const std::string& model, auto value_of) {
    std::string line = pad(sv, 5) + pad(model, kModelWidth);
    std::vector<std::optional<double>> values;
    for (const auto& [group, kinds] : groups) {
      line += " |";
      for (auto kind : kinds) {
        const auto v = value_of(kind);
        values.push_back(v);
        line += fmt(v, kCellWidth);
      }
    }
    line += " |" + fmt(mean_of(values), kCellWidth);
    out << line << '\n';
  };

  for (int sev : report.severities) {
    for (const auto& model : report.models) {
      row(std::to_string(sev), model, [&](CorruptionKind kind) { return report.cell(model, kind, sev, msc); });
    }
  }
  for (const auto& model : report.models) {
    row("Mean", model, [&](CorruptionKind kind) { return report.kind_mean(model, kind, msc); });
  }
  out << '\n';
}

std::string cells_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "kind,group,severity,model,msc,miou\n";
  char buf[64];
  for (const auto& c : report.cells) {
    if (c.kind) {
      out << corruption_name(*c.kind) << ',' << group_name(group_of(*c.kind));
    } else {
      out << "clean,clean";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", c.miou);
    out << ',' << c.severity << ',' << c.model << ',' << (c.msc ? 1 : 0) << ',' << buf << '\n';
  }
  return out.str();
}

std::vector<bool> msc_modes(const BenchmarkReport& report) {
  return report.has_msc ? std::vector<bool>{false, true} : std::vector<bool>{false};
}

std::vector<int> all_severities(const BenchmarkReport& report) {
  std::vector<int> out{0};
  out.insert(out.end(), report.severities.begin(), report.severities.end());
  return out;
}

std::string severity_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "model,msc,severity,miou\n";
  char buf[64];
  for (const auto& model : report.models) {
    for (bool msc : msc_modes(report)) {
      for (int sev : all_severities(report)) {
        const auto v = report.severity_mean(model, sev, msc);
        std::snprintf(buf, sizeof(buf), "%.17g", v ? *v : std::nan(""));
        out << model << ',' << (msc ? 1 : 0) << ',' << sev << ',' << buf << '\n';
      }
    }
  }
  return out.str();
}

std::string severity_svg(const BenchmarkReport& report) {
  std::vector<svg::Series> series;
  for (const auto& model : report.models) {
    for (bool msc : msc_modes(report)) {
      svg::Series s;
      s.name = msc ? model + " +MSC" : model;
      for (int sev : all_severities(report)) {
        const auto v = report.severity_mean(model, sev, msc);
        s.x.push_back(sev);
        s.y.push_back(v ? *v : std::nan(""));
      }
      series.push_back(std::move(s));
    }
  }
  return svg::line_chart("mIOU by corruption severity", "severity", "mIOU", series);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<SummaryRow> summarize(const BenchmarkReport& report) {
  std::vector<SummaryRow> rows;
  for (const auto& model : report.models) {
    SummaryRow row{model, report.clean(model, false), std::nullopt, report.corrupted_mean(model, false), std::nullopt};
    if (report.has_msc) {
      row.val_msc = report.clean(model, true);
      row.cor_msc = report.corrupted_mean(model, true);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_summary(std::span<const SummaryRow> rows) {
  std::ostringstream out;
  out << pad("Model", kModelWidth) << rpad("val", 8) << rpad("val+MSC", 9) << rpad("cor", 8) << rpad("cor+MSC", 9) << '\n';
  for (const auto& r : rows) {
    out << pad(r.model, kModelWidth) << fmt(r.val, 8) << fmt(r.val_msc, 9) << fmt(r.cor, 8) << fmt(r.cor_msc, 9) << '\n';
  }
  return out.str();
}

std::string render_report(const BenchmarkReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::CellsCsv:
      return cells_csv(report);
    case ReportFormat::SeverityCsv:
      return severity_csv(report);
    case ReportFormat::SeveritySvg:
      return severity_svg(report);
    case ReportFormat::Text:
      break;
  }
  std::ostringstream out;
  out << kScaleNote << '\n';
  for (bool msc : msc_modes(report)) render_grid(out, report, msc);
  out << "Summary (clean and mean corrupted mIOU)\n";
  const auto rows = summarize(report);
  out << render_summary(rows);
  return out.str();
}

BenchmarkReport parse_cells_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "kind,group,severity,model,msc,miou") {
    throw DataError("cells csv: missing or unexpected header");
  }
  BenchmarkReport report;
  std::set<int> severities;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 6) throw DataError("cells csv line " + std::to_string(line_no) + ": expected 6 fields");
    BenchmarkCell cell;
    try {
      if (f[0] != "clean") {
        cell.kind = parse_corruption(f[0]);
        if (group_name(group_of(*cell.kind)) != f[1]) throw DataError("group does not match kind");
      }
      std::size_t used = 0;
      cell.severity = std::stoi(f[2], &used);
      if (used != f[2].size()) throw DataError("bad severity");
      if (f[4] != "0" && f[4] != "1") throw DataError("msc must be 0 or 1");
      cell.msc = f[4] == "1";
      char* end = nullptr;
      cell.miou = std::strtod(f[5].c_str(), &end);
      if (f[5].empty() || *end != '\0') throw DataError("bad miou");
    } catch (const DataError& e) {
      throw DataError("cells csv line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw DataError("cells csv line " + std::to_string(line_no) + ": " + e.what());
    }
    cell.model = f[3];
    if (std::find(report.models.begin(), report.models.end(), cell.model) == report.models.end()) {
      report.models.push_back(cell.model);
    }
    if (cell.kind) {
      if (std::find(report.kinds.begin(), report.kinds.end(), *cell.kind) == report.kinds.end()) {
        report.kinds.push_back(*cell.kind);
      }
      severities.insert(cell.severity);
    }
    report.has_msc = report.has_msc || cell.msc;
    report.cells.push_back(std::move(cell));
  }
  report.severities.assign(severities.begin(), severities.end());
  return report;
}

}  // namespace segrobust
