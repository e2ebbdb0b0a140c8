#include "melrefine/fmap_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace melrefine {

namespace {

constexpr unsigned char kMagic[4] = {0x46, 0x4D, 0x41, 0x50};  // "FMAP"
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kDtypeF32 = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 * 8;
// Anything above this is assumed to be a corrupt header rather than a real
// request (would be >4 TiB of payload).
constexpr std::uint64_t kMaxElements = 1ull << 40;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

FeatureMap read_fmap(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FmapError(FmapErrorKind::kIo, "read_fmap: cannot open " + path);

  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw FmapError(FmapErrorKind::kIo, "read_fmap: read failure on " + path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());

  if (bytes.size() < 4 || std::memcmp(p, kMagic, 4) != 0) {
    throw FmapError(FmapErrorKind::kBadMagic, "read_fmap: bad magic in " + path);
  }
  if (bytes.size() < kHeaderBytes) {
    throw FmapError(FmapErrorKind::kTruncated,
                    "read_fmap: header truncated (" + std::to_string(bytes.size()) + " bytes) in " + path);
  }
  std::uint32_t version = get_u32(p + 4);
  if (version != kVersion) {
    throw FmapError(FmapErrorKind::kBadVersion,
                    "read_fmap: unsupported version " + std::to_string(version) + " in " + path);
  }
  std::uint32_t dtype = get_u32(p + 8);
  if (dtype != kDtypeF32) {
    throw FmapError(FmapErrorKind::kBadDtype,
                    "read_fmap: unsupported dtype " + std::to_string(dtype) + " in " + path);
  }

  std::uint64_t dims64[4];
  for (int i = 0; i < 4; ++i) dims64[i] = get_u64(p + 12 + 8 * i);
  std::uint64_t count = 1;
  for (std::uint64_t v : dims64) {
    if (v == 0) {
      // Zero dims cannot describe a payload; treat as a corrupt header.
      throw FmapError(FmapErrorKind::kDimOverflow, "read_fmap: zero dimension in " + path);
    }
    if (count > kMaxElements / v) {
      throw FmapError(FmapErrorKind::kDimOverflow, "read_fmap: dim overflow in " + path);
    }
    count *= v;
  }
  if (count > std::numeric_limits<std::size_t>::max() / sizeof(float)) {
    throw FmapError(FmapErrorKind::kDimOverflow, "read_fmap: dim overflow in " + path);
  }

  const std::size_t expected = kHeaderBytes + static_cast<std::size_t>(count) * sizeof(float);
  if (bytes.size() != expected) {
    throw FmapError(FmapErrorKind::kTruncated,
                    "read_fmap: payload size mismatch in " + path + " (expected " +
                        std::to_string(expected) + " bytes, got " + std::to_string(bytes.size()) + ")");
  }

  std::vector<float> data(static_cast<std::size_t>(count));
  std::memcpy(data.data(), p + kHeaderBytes, data.size() * sizeof(float));
  if constexpr (std::endian::native == std::endian::big) {
    for (float& f : data) {
      auto bits = std::bit_cast<std::uint32_t>(f);
      bits = __builtin_bswap32(bits);
      f = std::bit_cast<float>(bits);
    }
  }

  Dims dims{static_cast<std::size_t>(dims64[0]), static_cast<std::size_t>(dims64[1]),
            static_cast<std::size_t>(dims64[2]), static_cast<std::size_t>(dims64[3])};
  return FeatureMap(dims, std::move(data));
}

void write_fmap(const std::string& path, const FeatureMap& x) {
  std::string bytes;
  bytes.reserve(kHeaderBytes + x.data().size() * sizeof(float));
  bytes.append(reinterpret_cast<const char*>(kMagic), 4);
  put_u32(bytes, kVersion);
  put_u32(bytes, kDtypeF32);
  put_u64(bytes, x.dims().b);
  put_u64(bytes, x.dims().c);
  put_u64(bytes, x.dims().h);
  put_u64(bytes, x.dims().w);
  for (float f : x.data()) {
    auto bits = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FmapError(FmapErrorKind::kIo, "write_fmap: cannot open " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FmapError(FmapErrorKind::kIo, "write_fmap: write failure on " + path);
}

}  // namespace melrefine
