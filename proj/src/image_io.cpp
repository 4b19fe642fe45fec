#include "graspmap/image_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace graspmap::geom {

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  for (;;) {
    int c = in.get();
    if (c == EOF) return tok;
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
}

void swap_floats(std::vector<float>& v) {
  for (float& x : v) {
    uint32_t bits;
    std::memcpy(&bits, &x, 4);
    bits = __builtin_bswap32(bits);
    std::memcpy(&x, &bits, 4);
  }
}

constexpr bool host_little_endian() {
  return std::endian::native == std::endian::little;
}

}  // namespace

DepthMap read_pfm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "pfm: cannot open " + path);
  const std::string magic = next_token(f);
  if (magic != "Pf")
    fail(ErrorCode::parse, "pfm: " + path + ": expected grayscale 'Pf' header");
  int w = 0, h = 0;
  double scale = 0;
  try {
    w = std::stoi(next_token(f));
    h = std::stoi(next_token(f));
    scale = std::stod(next_token(f));
  } catch (const std::exception&) {
    fail(ErrorCode::parse, "pfm: " + path + ": malformed header");
  }
  if (w <= 0 || h <= 0 || scale == 0)
    fail(ErrorCode::parse, "pfm: " + path + ": bad dimensions or scale");

  DepthMap depth(w, h);
  std::vector<float> row(w);
  // PFM rows are stored bottom-to-top.
  for (int y = h - 1; y >= 0; --y) {
    f.read(reinterpret_cast<char*>(row.data()), sizeof(float) * w);
    if (!f) fail(ErrorCode::parse, "pfm: " + path + ": truncated pixel data");
    if ((scale < 0) != host_little_endian()) swap_floats(row);
    std::memcpy(&depth.at(0, y), row.data(), sizeof(float) * w);
  }
  return depth;
}

void write_pfm(const DepthMap& depth, const std::string& path) {
  if (depth.empty()) fail(ErrorCode::empty_input, "pfm: empty depth map");
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "pfm: cannot write " + path);
  f << "Pf\n" << depth.width << " " << depth.height << "\n"
    << (host_little_endian() ? "-1.0" : "1.0") << "\n";
  std::vector<float> row(depth.width);
  for (int y = depth.height - 1; y >= 0; --y) {
    for (int x = 0; x < depth.width; ++x) row[x] = depth.at(x, y);
    f.write(reinterpret_cast<const char*>(row.data()),
            sizeof(float) * depth.width);
  }
  if (!f) fail(ErrorCode::io, "pfm: write failed for " + path);
}

MaskImage read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "pgm: cannot open " + path);
  const std::string magic = next_token(f);
  if (magic != "P5")
    fail(ErrorCode::parse, "pgm: " + path + ": expected binary 'P5' header");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token(f));
    h = std::stoi(next_token(f));
    maxval = std::stoi(next_token(f));
  } catch (const std::exception&) {
    fail(ErrorCode::parse, "pgm: " + path + ": malformed header");
  }
  if (w <= 0 || h <= 0 || maxval != 255)
    fail(ErrorCode::parse, "pgm: " + path + ": bad dimensions or maxval");

  std::vector<uint8_t> raw(static_cast<size_t>(w) * h);
  f.read(reinterpret_cast<char*>(raw.data()), raw.size());
  if (!f) fail(ErrorCode::parse, "pgm: " + path + ": truncated pixel data");
  MaskImage mask(w, h);
  for (size_t i = 0; i < raw.size(); ++i) mask.values[i] = raw[i] >= 128;
  return mask;
}

void write_pgm(const MaskImage& mask, const std::string& path) {
  if (mask.empty()) fail(ErrorCode::empty_input, "pgm: empty mask");
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "pgm: cannot write " + path);
  f << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  std::vector<uint8_t> raw(mask.values.size());
  for (size_t i = 0; i < raw.size(); ++i) raw[i] = mask.values[i] ? 255 : 0;
  f.write(reinterpret_cast<const char*>(raw.data()), raw.size());
  if (!f) fail(ErrorCode::io, "pgm: write failed for " + path);
}

}  // namespace graspmap::geom
