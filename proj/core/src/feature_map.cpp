#include "melrefine/feature_map.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace melrefine {

std::string Dims::str() const {
  return "(" + std::to_string(b) + ", " + std::to_string(c) + ", " + std::to_string(h) + ", " +
         std::to_string(w) + ")";
}

namespace {

void check_dims_nonzero(const Dims& d) {
  if (d.b == 0 || d.c == 0 || d.h == 0 || d.w == 0) {
    throw Error("FeatureMap: all dims must be >= 1, got " + d.str());
  }
}

void check_finite(const Dims& d, const std::vector<float>& data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      std::size_t w = d.w, h = d.h, c = d.c;
      std::size_t x = i % w;
      std::size_t y = (i / w) % h;
      std::size_t ci = (i / (w * h)) % c;
      std::size_t bi = i / (w * h * c);
      throw Error("FeatureMap: non-finite value at flat index " + std::to_string(i) + " = (b=" +
                  std::to_string(bi) + ", c=" + std::to_string(ci) + ", y=" + std::to_string(y) +
                  ", x=" + std::to_string(x) + ")");
    }
  }
}

}  // namespace

FeatureMap::FeatureMap(Dims dims, std::vector<float> values)
    : dims_(dims), data_(std::move(values)) {
  check_dims_nonzero(dims_);
  if (data_.size() != dims_.count()) {
    throw Error("FeatureMap: data length " + std::to_string(data_.size()) +
                " does not match dims " + dims_.str());
  }
  check_finite(dims_, data_);
}

FeatureMap FeatureMap::zeros(Dims dims) {
  check_dims_nonzero(dims);
  return FeatureMap(dims, std::vector<float>(dims.count(), 0.0f));
}

bool FeatureMap::same_bits(const FeatureMap& other) const {
  if (!(dims_ == other.dims_)) return false;
  return std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0;
}

SpectrumMap::SpectrumMap(Dims dims, std::vector<std::complex<float>> values)
    : dims_(dims), data_(std::move(values)) {
  check_dims_nonzero(dims_);
  if (data_.size() != dims_.count()) {
    throw Error("SpectrumMap: data length " + std::to_string(data_.size()) +
                " does not match dims " + dims_.str());
  }
}

FeatureMap to_feature_map(const Map2D& m) {
  return FeatureMap({1, 1, m.rows, m.cols}, m.v);
}

Map2D to_map2d(const FeatureMap& x) {
  if (x.dims().b != 1 || x.dims().c != 1) {
    throw Error("to_map2d: expected dims (1, 1, H, W), got " + x.dims().str());
  }
  Map2D m(x.dims().h, x.dims().w);
  m.v = x.data();
  return m;
}

std::uint64_t content_hash(const FeatureMap& x) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(x.dims().b);
  mix(x.dims().c);
  mix(x.dims().h);
  mix(x.dims().w);
  for (float f : x.data()) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
    h ^= bits & 0xff;
    h *= 1099511628211ull;
    h ^= (bits >> 8) & 0xff;
    h *= 1099511628211ull;
    h ^= (bits >> 16) & 0xff;
    h *= 1099511628211ull;
    h ^= (bits >> 24) & 0xff;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace melrefine
