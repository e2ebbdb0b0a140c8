#include "melrefine/image.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

namespace melrefine {

namespace {

void put_u32_be(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

void put_chunk(std::string& out, const char type[4], const std::string& payload) {
  put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t crc_start = out.size();
  out.append(type, 4);
  out.append(payload);
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(out.data() + crc_start), 4 + payload.size());
  put_u32_be(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

void render_png(const Map2D& map, const std::string& path) {
  if (map.rows == 0 || map.cols == 0) {
    throw std::invalid_argument("render_png: empty map");
  }
  for (float v : map.v) {
    if (!std::isfinite(v)) throw Error("render_png: non-finite cell value");
  }

  float lo = map.v[0], hi = map.v[0];
  for (float v : map.v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const bool flat = !(hi > lo);
  const double scale = flat ? 0.0 : 255.0 / (static_cast<double>(hi) - lo);

  // Raw scanlines (filter byte 0 per row), row 0 of the map at the bottom.
  std::vector<unsigned char> raw;
  raw.reserve(map.rows * (map.cols + 1));
  for (std::size_t r = 0; r < map.rows; ++r) {
    const std::size_t src = map.rows - 1 - r;
    raw.push_back(0);
    for (std::size_t c = 0; c < map.cols; ++c) {
      if (flat) {
        raw.push_back(128);
      } else {
        long px = std::lround((static_cast<double>(map.at(src, c)) - lo) * scale);
        px = std::max(0L, std::min(255L, px));
        raw.push_back(static_cast<unsigned char>(px));
      }
    }
  }

  uLongf comp_bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> comp(comp_bound);
  if (compress2(comp.data(), &comp_bound, raw.data(), static_cast<uLong>(raw.size()),
                Z_BEST_COMPRESSION) != Z_OK) {
    throw Error("render_png: deflate failed");
  }
  comp.resize(comp_bound);

  std::string png;
  const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  png.append(reinterpret_cast<const char*>(sig), 8);

  std::string ihdr;
  put_u32_be(ihdr, static_cast<std::uint32_t>(map.cols));
  put_u32_be(ihdr, static_cast<std::uint32_t>(map.rows));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", std::string(reinterpret_cast<const char*>(comp.data()), comp.size()));
  put_chunk(png, "IEND", "");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("render_png: cannot open " + path);
  out.write(png.data(), static_cast<std::streamsize>(png.size()));
  if (!out) throw Error("render_png: write failure on " + path);
}

}  // namespace melrefine
