#pragma once

#include <string>

#include "melrefine/feature_map.hpp"

namespace melrefine {

// FMAP binary format, little-endian, no padding, no checksum:
//   bytes 0..3   magic "FMAP" (46 4D 41 50)
//   bytes 4..7   u32 version, must be 1
//   bytes 8..11  u32 dtype, must be 1 (real 32-bit float)
//   bytes 12..43 u64 x 4 dims (B, C, H, W)
//   bytes 44..   B*C*H*W floats, row-major (b, c, y, x)

enum class FmapErrorKind {
  kIo,
  kBadMagic,
  kBadVersion,
  kBadDtype,
  kTruncated,
  kDimOverflow,
};

struct FmapError : Error {
  FmapErrorKind kind;
  FmapError(FmapErrorKind k, const std::string& msg) : Error(msg), kind(k) {}
};

FeatureMap read_fmap(const std::string& path);
void write_fmap(const std::string& path, const FeatureMap& x);

}  // namespace melrefine
