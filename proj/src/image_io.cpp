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

#include "segrobust/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "segrobust/error.hpp"

namespace segrobust {
namespace {

struct PnmHeader {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t data_offset = 0;
};

[[noreturn]] void fail(const std::string& what, std::size_t offset) {
  throw DataError(what + " at byte offset " + std::to_string(offset));
}

void skip_space_and_comments(const std::string& b, std::size_t& pos) {
  while (pos < b.size()) {
    if (std::isspace(static_cast<unsigned char>(b[pos]))) {
      ++pos;
    } else if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
}

std::size_t read_number(const std::string& b, std::size_t& pos, const char* field) {
  skip_space_and_comments(b, pos);
  const std::size_t start = pos;
  std::size_t value = 0;
  while (pos < b.size() && std::isdigit(static_cast<unsigned char>(b[pos]))) {
    value = value * 10 + static_cast<std::size_t>(b[pos] - '0');
    if (value > (1u << 24)) fail(std::string("PNM ") + field + " too large", start);
    ++pos;
  }
  if (pos == start) fail(std::string("expected PNM ") + field, start);
  return value;
}

PnmHeader parse_header(const std::string& b, const char* magic, std::size_t channels) {
  if (b.size() < 2 || b.compare(0, 2, magic) != 0) fail(std::string("missing ") + magic + " magic", 0);
  std::size_t pos = 2;
  PnmHeader h;
  h.width = read_number(b, pos, "width");
  h.height = read_number(b, pos, "height");
  const std::size_t maxval_pos = pos;
  const std::size_t maxval = read_number(b, pos, "maxval");
  if (maxval != 255) fail("only 8-bit PNM (maxval 255) is supported", maxval_pos);
  if (h.width == 0 || h.height == 0) fail("PNM extents must be positive", maxval_pos);
  if (pos >= b.size() || !std::isspace(static_cast<unsigned char>(b[pos]))) fail("expected whitespace after maxval", pos);
  h.data_offset = pos + 1;
  const std::size_t need = h.width * h.height * channels;
  if (b.size() - h.data_offset < need) {
    fail("truncated PNM payload: need " + std::to_string(need) + " bytes, have " +
             std::to_string(b.size() - h.data_offset),
         b.size());
  }
  return h;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace

std::string encode_ppm(const Tensor& image) {
  if (image.rank() != 3 || image.dim(2) != 3) throw UsageError("PPM images must be H x W x 3");
  std::string out = "P6\n" + std::to_string(image.dim(1)) + " " + std::to_string(image.dim(0)) + "\n255\n";
  out.reserve(out.size() + image.size());
  for (double v : image.data()) {
    const double q = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(q)));
  }
  return out;
}

Tensor decode_ppm(const std::string& bytes) {
  const PnmHeader h = parse_header(bytes, "P6", 3);
  Tensor image({h.height, h.width, 3});
  for (std::size_t i = 0; i < image.size(); ++i) {
    image[i] = static_cast<double>(static_cast<unsigned char>(bytes[h.data_offset + i])) / 255.0;
  }
  return image;
}

std::string encode_pgm(const LabelMap& labels) {
  std::string out = "P5\n" + std::to_string(labels.width()) + " " + std::to_string(labels.height()) + "\n255\n";
  for (int c : labels.classes()) {
    if (c < 0 || c > 255) throw UsageError("label value does not fit in 8 bits");
    out.push_back(static_cast<char>(static_cast<unsigned char>(c)));
  }
  return out;
}

LabelMap decode_pgm(const std::string& bytes) {
  const PnmHeader h = parse_header(bytes, "P5", 1);
  std::vector<int> classes(h.width * h.height);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    classes[i] = static_cast<unsigned char>(bytes[h.data_offset + i]);
  }
  return LabelMap(h.height, h.width, std::move(classes));
}

void write_image(const std::filesystem::path& path, const Tensor& image) { write_file(path, encode_ppm(image)); }

Tensor read_image(const std::filesystem::path& path) {
  try {
    return decode_ppm(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_label(const std::filesystem::path& path, const LabelMap& labels) { write_file(path, encode_pgm(labels)); }

LabelMap read_label(const std::filesystem::path& path, int num_classes) {
  try {
    LabelMap labels = decode_pgm(read_file(path));
    labels.validate(num_classes);
    return labels;
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace segrobust
