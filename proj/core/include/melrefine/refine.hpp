#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "melrefine/feature_map.hpp"

namespace melrefine {

// Per-bin gains over a center-shifted (h x w) spectrum. A mask built by
// central_region_mask takes exactly two values: lf_gain inside the rectangle
// y in [h/4, 3h/4), x in [w/4, 3w/4) (floor, half-open, shifted coordinates)
// and hf_gain outside it.
struct BandMask {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<double> gain;  // row-major (y, x)

  double at(std::size_t y, std::size_t x) const { return gain[y * w + x]; }
  bool in_low_region(std::size_t y, std::size_t x) const {
    return y >= h / 4 && y < (3 * h) / 4 && x >= w / 4 && x < (3 * w) / 4;
  }
};

BandMask central_region_mask(std::size_t h, std::size_t w, double lf_gain, double hf_gain);

// The five inference knobs. s1/s2 scale skip high frequencies in decoder
// blocks 0/1, b1/b2 scale backbone high frequencies, m is the shared
// structure gain. All ones is the identity configuration and short-circuits
// every transform bit-exactly.
struct RefineParams {
  double s1 = 1.0;
  double s2 = 1.0;
  double b1 = 1.0;
  double b2 = 1.0;
  double m = 1.0;
  double eps = 1e-8;  // degenerate-range guard for the structure map

  void validate() const;
  bool is_identity() const { return s1 == 1.0 && s2 == 1.0 && b1 == 1.0 && b2 == 1.0 && m == 1.0; }
};

// Named settings: "tango", "mustango", "tango2", "identity".
RefineParams preset(const std::string& name);
const std::vector<std::string>& preset_names();

// Flat key-value text form: "s1=... s2=... b1=... b2=... m=...".
std::string params_to_kv(const RefineParams& p);
RefineParams params_from_kv(const std::string& text);
RefineParams read_params_file(const std::string& path);
void write_params_file(const std::string& path, const RefineParams& p);

// Per (b, c) slice: ifft2_shifted(fft2_shifted(slice) * mask), output real
// with the same dims. Bins are scaled in conjugate-symmetric pairs (each pair
// gets the mean of its two mask gains), which is exactly what taking the real
// part of the masked inverse transform yields; doing it up front keeps the
// inverse residue at rounding level for every real input.
FeatureMap fourier_band_scale(const FeatureMap& x, const BandMask& mask);

// Structure-aware gain: per batch element, alpha = (m - 1) * normalized
// channel mean + 1 (normalized over that element's plane min/max), applied
// to every channel. If max - min < eps the gain is identically 1 and the
// input is returned unchanged.
FeatureMap structure_scale(const FeatureMap& x, double m, double eps = 1e-8);

// Skip-connection path: amplify everything outside the central region by s.
FeatureMap refine_skip(const FeatureMap& h, double s);

// Backbone path: structure_scale by m, then scale high frequencies by b.
FeatureMap refine_backbone(const FeatureMap& x, double m, double b, double eps = 1e-8);

// The decoder hook. Blocks 0 and 1 apply (b1, s1) / (b2, s2) with the shared
// m; any later block returns its inputs untouched, bit for bit.
std::pair<FeatureMap, FeatureMap> apply_block(const RefineParams& params, std::size_t block_index,
                                              const FeatureMap& x, const FeatureMap& h);

}  // namespace melrefine
