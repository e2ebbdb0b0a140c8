#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace melrefine {

// Base error for everything this library raises on bad data. Precondition
// violations (bad arguments) use std::invalid_argument instead.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Dims {
  std::size_t b = 0;
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  std::size_t count() const { return b * c * h * w; }
  std::size_t plane() const { return h * w; }
  bool operator==(const Dims&) const = default;
  std::string str() const;
};

// Rank-4 real tensor, row-major in (b, c, y, x) order. Values are checked
// finite on construction. Instances are safe to share across threads as long
// as nobody writes through data() while readers are active; the library
// itself never mutates a map it did not create.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(Dims dims, std::vector<float> values);

  static FeatureMap zeros(Dims dims);

  const Dims& dims() const { return dims_; }
  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  float at(std::size_t b, std::size_t c, std::size_t y, std::size_t x) const {
    return data_[offset(b, c, y, x)];
  }
  float& at(std::size_t b, std::size_t c, std::size_t y, std::size_t x) {
    return data_[offset(b, c, y, x)];
  }
  std::size_t offset(std::size_t b, std::size_t c, std::size_t y, std::size_t x) const {
    return ((b * dims_.c + c) * dims_.h + y) * dims_.w + x;
  }
  std::size_t slice_offset(std::size_t b, std::size_t c) const {
    return (b * dims_.c + c) * dims_.h * dims_.w;
  }

  bool same_bits(const FeatureMap& other) const;

 private:
  Dims dims_;
  std::vector<float> data_;
};

// Complex rank-4 tensor holding center-shifted 2D spectra: the DC bin of each
// (b, c) slice sits at spatial index (h/2, w/2) (floor convention). Produced
// by fft2_shifted; consumed by ifft2_shifted.
class SpectrumMap {
 public:
  SpectrumMap() = default;
  SpectrumMap(Dims dims, std::vector<std::complex<float>> values);

  const Dims& dims() const { return dims_; }
  const std::vector<std::complex<float>>& data() const { return data_; }
  std::vector<std::complex<float>>& data() { return data_; }

  std::complex<float> at(std::size_t b, std::size_t c, std::size_t y, std::size_t x) const {
    return data_[((b * dims_.c + c) * dims_.h + y) * dims_.w + x];
  }
  std::complex<float>& at(std::size_t b, std::size_t c, std::size_t y, std::size_t x) {
    return data_[((b * dims_.c + c) * dims_.h + y) * dims_.w + x];
  }

 private:
  Dims dims_;
  std::vector<std::complex<float>> data_;
};

// Dense 2D real map (rows x cols), row-major. Used for mel spectrograms and
// filterbank matrices.
struct Map2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> v;

  Map2D() = default;
  Map2D(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0f) {}
  float at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
  float& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
};

// Pack a 2D map into a (1, 1, rows, cols) FeatureMap (the FMAP on-disk shape).
FeatureMap to_feature_map(const Map2D& m);
Map2D to_map2d(const FeatureMap& x);

// FNV-1a over the raw little-endian float bits; used for determinism checks.
std::uint64_t content_hash(const FeatureMap& x);

}  // namespace melrefine
