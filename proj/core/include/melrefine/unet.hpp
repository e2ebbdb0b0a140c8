#pragma once

#include <cstdint>
#include <vector>

#include "melrefine/feature_map.hpp"
#include "melrefine/refine.hpp"

namespace melrefine {

// Forward-only toy U-Net: per encoder level a 3x3 reflect-padded convolution,
// rectifier and 2x2 mean-pool (pre-pool features kept as skips); the decoder
// mirrors it with 2x nearest-neighbor upsampling, the refinement hook on
// (backbone, skip), channel concat, 3x3 convolution and rectifier; a final
// 1x1 convolution maps back to in_channels. Convolution biases are zero.
// Weights come from a seeded mt19937_64 + inverse-CDF normal stream with
// std = 1/sqrt(fan_in), so identical configs rebuild identical weights.
struct UNetConfig {
  std::size_t levels = 3;
  std::size_t base_channels = 8;
  std::size_t in_channels = 1;
  std::size_t height = 32;
  std::size_t width = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

// Decoder-block intermediates captured around the hook: backbone and skip
// before (x, h) and after (xr, hr) refinement.
struct BlockCapture {
  FeatureMap x;
  FeatureMap h;
  FeatureMap xr;
  FeatureMap hr;
};

class ToyUNet {
 public:
  struct Conv {
    std::size_t in_ch = 0;
    std::size_t out_ch = 0;
    std::size_t ksize = 0;          // 3 or 1
    std::vector<float> w;           // (out, in, k, k) row-major
    std::vector<float> bias;        // out, all zero
  };

  const UNetConfig& config() const { return cfg_; }
  std::size_t decoder_blocks() const { return cfg_.levels; }
  std::uint64_t weight_checksum() const;

  // t in [0, 1] enters as a scalar bias on the bottleneck features. With
  // params == nullptr (or the identity configuration) the output is
  // bit-identical to the unhooked network. `capture`, when given, receives
  // one BlockCapture per decoder block.
  FeatureMap forward(const FeatureMap& x, double t, const RefineParams* params = nullptr,
                     std::vector<BlockCapture>* capture = nullptr) const;

 private:
  friend ToyUNet build_unet(const UNetConfig& cfg);

  UNetConfig cfg_;
  std::vector<Conv> enc_;
  std::vector<Conv> dec_;
  Conv final_;
};

ToyUNet build_unet(const UNetConfig& cfg);

}  // namespace melrefine
