#include "hsi/ingest.hpp"

#include <algorithm>
#include <bit>
#include <iterator>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hsi/error.hpp"

namespace hsi::io {
namespace {

constexpr std::string_view kCubeMagic = "HSICUBE1";

using Kind = ParseError::Kind;

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw ParseError(Kind::Io, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ParseError(Kind::Io, "cannot open " + path.string());
  return in;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

// Parses one whitespace-separated row of non-negative integers.
std::vector<long long> parse_row(const std::string& text, const std::filesystem::path& path, std::size_t line) {
  std::vector<long long> row;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      throw ParseError(Kind::Malformed, where(path, line) + "not an integer: '" + tok + "'");
    }
    if (used != tok.size()) throw ParseError(Kind::Malformed, where(path, line) + "not an integer: '" + tok + "'");
    row.push_back(v);
  }
  return row;
}

struct Grid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<long long> values;
};

Grid read_grid(std::istream& in, const std::filesystem::path& path, std::size_t first_line, std::size_t h,
               std::size_t w) {
  Grid g{h, w, {}};
  g.values.reserve(h * w);
  std::string text;
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t line = first_line + r;
    if (!std::getline(in, text)) {
      throw ParseError(Kind::Truncated, where(path, line) + "expected " + std::to_string(h) + " rows, got " +
                                            std::to_string(r));
    }
    auto row = parse_row(text, path, line);
    if (row.size() != w) {
      throw ParseError(Kind::RaggedRow, where(path, line) + "row has " + std::to_string(row.size()) +
                                            " entries, expected " + std::to_string(w));
    }
    for (long long v : row) {
      if (v < 0) throw ParseError(Kind::BadValue, where(path, line) + "negative value " + std::to_string(v));
    }
    g.values.insert(g.values.end(), row.begin(), row.end());
  }
  while (std::getline(in, text)) {
    if (text.find_first_not_of(" \t\r") != std::string::npos) {
      throw ParseError(Kind::Malformed, path.string() + ": trailing content after " + std::to_string(h) + " rows");
    }
  }
  return g;
}

std::pair<std::size_t, std::size_t> read_dims(std::istream& in, const std::filesystem::path& path) {
  std::string text;
  if (!std::getline(in, text)) throw ParseError(Kind::Truncated, where(path, 1) + "missing 'H W' header");
  const auto dims = parse_row(text, path, 1);
  if (dims.size() != 2 || dims[0] <= 0 || dims[1] <= 0) {
    throw ParseError(Kind::Malformed, where(path, 1) + "header must be 'H W' with positive integers");
  }
  return {static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1])};
}

}  // namespace

void write_cube(const HyperCube& cube, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::binary);
  out << kCubeMagic << ' ' << cube.height() << ' ' << cube.width() << ' ' << cube.bands() << " f32le\n";
  const std::size_t n = cube.pixels();
  std::vector<unsigned char> payload(n * cube.bands() * 4);
  std::size_t o = 0;
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(cube.values()[i * cube.bands() + b]);
      payload[o++] = static_cast<unsigned char>(bits);
      payload[o++] = static_cast<unsigned char>(bits >> 8);
      payload[o++] = static_cast<unsigned char>(bits >> 16);
      payload[o++] = static_cast<unsigned char>(bits >> 24);
    }
  }
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw ParseError(Kind::Io, "write failed: " + path.string());
}

HyperCube read_cube(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  std::string header;
  std::getline(in, header);
  if (header.compare(0, kCubeMagic.size(), kCubeMagic) != 0) {
    throw ParseError(Kind::MagicMismatch, path.string() + ": bad magic, expected " + std::string(kCubeMagic));
  }
  std::istringstream hs(header.substr(kCubeMagic.size()));
  long long h = 0, w = 0, b = 0;
  std::string dtype, extra;
  if (!(hs >> h >> w >> b >> dtype) || (hs >> extra) || h <= 0 || w <= 0 || b <= 0 ||
      h > 0xFFFFFFFFLL || w > 0xFFFFFFFFLL || b > 0xFFFFFFFFLL) {
    throw ParseError(Kind::Malformed, path.string() + ": malformed cube header '" + header + "'");
  }
  if (dtype != "f32le") throw ParseError(Kind::Malformed, path.string() + ": unsupported dtype '" + dtype + "'");
  const auto H = static_cast<std::size_t>(h), W = static_cast<std::size_t>(w), B = static_cast<std::size_t>(b);
  const std::size_t expected = H * W * B * 4;
  std::vector<unsigned char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (payload.size() < expected) {
    throw ParseError(Kind::Truncated, path.string() + ": truncated payload, expected " + std::to_string(expected) +
                                          " bytes, got " + std::to_string(payload.size()));
  }
  if (payload.size() > expected) {
    throw ParseError(Kind::SizeMismatch, path.string() + ": payload has " + std::to_string(payload.size()) +
                                             " bytes, header implies " + std::to_string(expected));
  }
  std::vector<float> values(H * W * B);
  std::size_t o = 0;
  for (std::size_t band = 0; band < B; ++band) {
    for (std::size_t i = 0; i < H * W; ++i, o += 4) {
      const std::uint32_t bits = static_cast<std::uint32_t>(payload[o]) | static_cast<std::uint32_t>(payload[o + 1]) << 8 |
                                 static_cast<std::uint32_t>(payload[o + 2]) << 16 |
                                 static_cast<std::uint32_t>(payload[o + 3]) << 24;
      const float v = std::bit_cast<float>(bits);
      if (!std::isfinite(v)) {
        throw ParseError(Kind::NonFinite, path.string() + ": non-finite value in band " + std::to_string(band) +
                                              " at pixel " + std::to_string(i));
      }
      values[i * B + band] = v;
    }
  }
  return HyperCube(H, W, B, std::move(values));
}

void write_labels(const LabelMap& labels, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << labels.height() << ' ' << labels.width() << '\n';
  for (std::size_t y = 0; y < labels.height(); ++y) {
    for (std::size_t x = 0; x < labels.width(); ++x) {
      if (x) out << ' ';
      out << labels.at(y, x);
    }
    out << '\n';
  }
  if (!out) throw ParseError(Kind::Io, "write failed: " + path.string());
}

LabelMap read_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto [h, w] = read_dims(in, path);
  const auto grid = read_grid(in, path, 2, h, w);
  std::vector<ClassId> labels(grid.values.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (grid.values[i] > 65535) {
      throw ParseError(Kind::BadValue, where(path, 2 + i / w) + "class id exceeds 65535");
    }
    labels[i] = static_cast<ClassId>(grid.values[i]);
  }
  return LabelMap(h, w, std::move(labels));
}

void write_split(const SplitMask& split, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << split.height() << ' ' << split.width() << '\n' << "seed " << split.seed() << '\n';
  for (std::size_t y = 0; y < split.height(); ++y) {
    for (std::size_t x = 0; x < split.width(); ++x) {
      if (x) out << ' ';
      out << static_cast<int>(split.at(y, x));
    }
    out << '\n';
  }
  if (!out) throw ParseError(Kind::Io, "write failed: " + path.string());
}

SplitMask read_split(const std::filesystem::path& path, const LabelMap& labels) {
  auto in = open_in(path);
  const auto [h, w] = read_dims(in, path);
  std::string text;
  if (!std::getline(in, text)) throw ParseError(Kind::Truncated, where(path, 2) + "missing seed line");
  std::istringstream ss(text);
  std::string key, extra;
  unsigned long long seed = 0;
  if (!(ss >> key >> seed) || key != "seed" || (ss >> extra)) {
    throw ParseError(Kind::Malformed, where(path, 2) + "expected 'seed <u64>'");
  }
  const auto grid = read_grid(in, path, 3, h, w);
  std::vector<SplitState> states(grid.values.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (grid.values[i] > 2) {
      throw ParseError(Kind::BadValue, where(path, 3 + i / w) + "split value " + std::to_string(grid.values[i]) +
                                           " outside {0,1,2}");
    }
    states[i] = static_cast<SplitState>(grid.values[i]);
  }
  if (h != labels.height() || w != labels.width()) {
    throw ParseError(Kind::SizeMismatch, path.string() + ": split is " + std::to_string(h) + "x" + std::to_string(w) +
                                             " but labels are " + std::to_string(labels.height()) + "x" +
                                             std::to_string(labels.width()));
  }
  return SplitMask(labels, std::move(states), seed);
}

void write_features(const FeatureSet& features, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "y,x";
  for (std::size_t d = 0; d < features.dim(); ++d) out << ",f" << d;
  out << '\n';
  char buf[40];
  for (std::size_t i = 0; i < features.count(); ++i) {
    out << features.coords()[i].y << ',' << features.coords()[i].x;
    for (double v : features.row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw ParseError(Kind::Io, "write failed: " + path.string());
}

FeatureSet read_features(const std::filesystem::path& path, std::size_t height, std::size_t width) {
  auto in = open_in(path);
  std::string text;
  if (!std::getline(in, text) || text.rfind("y,x,", 0) != 0) {
    throw ParseError(Kind::Malformed, where(path, 1) + "expected header 'y,x,f0,...'");
  }
  const std::size_t dim = static_cast<std::size_t>(std::count(text.begin(), text.end(), ',')) - 1;
  std::vector<double> values;
  std::vector<Pixel> coords;
  std::size_t line = 1;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != dim + 2) {
      throw ParseError(Kind::RaggedRow, where(path, line) + "expected " + std::to_string(dim + 2) + " columns, got " +
                                            std::to_string(cells.size()));
    }
    try {
      coords.push_back({std::stoull(cells[0]), std::stoull(cells[1])});
      for (std::size_t d = 0; d < dim; ++d) values.push_back(std::stod(cells[2 + d]));
    } catch (const std::exception&) {
      throw ParseError(Kind::Malformed, where(path, line) + "unparseable number");
    }
  }
  return FeatureSet(height, width, dim, std::move(values), std::move(coords));
}

}  // namespace hsi::io
