#include "melrefine/unet.hpp"

#include <bit>
#include <cmath>

#include "melrefine/rng.hpp"

namespace melrefine {

void UNetConfig::validate() const {
  if (levels < 2) {
    throw std::invalid_argument("UNetConfig: need levels >= 2 so two decoder hook sites exist");
  }
  if (base_channels < 1 || in_channels < 1) {
    throw std::invalid_argument("UNetConfig: channel counts must be >= 1");
  }
  const std::size_t div = std::size_t{1} << levels;
  if (height == 0 || width == 0 || height % div != 0 || width % div != 0) {
    throw std::invalid_argument("UNetConfig: spatial dims (" + std::to_string(height) + ", " +
                                std::to_string(width) + ") must be divisible by 2^levels = " +
                                std::to_string(div));
  }
}

namespace {

// Channels produced by encoder level i (and kept as skip i).
std::size_t enc_out_channels(const UNetConfig& cfg, std::size_t i) {
  return cfg.base_channels << i;
}

}  // namespace

ToyUNet build_unet(const UNetConfig& cfg) {
  cfg.validate();

  ToyUNet net;
  net.cfg_ = cfg;
  NormalSampler rng(cfg.seed);

  auto make_conv = [&rng](std::size_t in_ch, std::size_t out_ch, std::size_t k) {
    ToyUNet::Conv conv;
    conv.in_ch = in_ch;
    conv.out_ch = out_ch;
    conv.ksize = k;
    conv.w.resize(out_ch * in_ch * k * k);
    conv.bias.assign(out_ch, 0.0f);
    const double std_dev = 1.0 / std::sqrt(static_cast<double>(in_ch * k * k));
    for (float& v : conv.w) v = static_cast<float>(rng.next() * std_dev);
    return conv;
  };

  // Draw order is fixed: encoder convs shallow to deep, decoder convs in hook
  // order, then the output projection.
  std::size_t ch = cfg.in_channels;
  for (std::size_t i = 0; i < cfg.levels; ++i) {
    const std::size_t out = enc_out_channels(cfg, i);
    net.enc_.push_back(make_conv(ch, out, 3));
    ch = out;
  }
  for (std::size_t k = 0; k < cfg.levels; ++k) {
    const std::size_t skip_ch = enc_out_channels(cfg, cfg.levels - 1 - k);
    const std::size_t out = k + 2 <= cfg.levels ? enc_out_channels(cfg, cfg.levels - 2 - k)
                                                : cfg.base_channels;
    net.dec_.push_back(make_conv(2 * skip_ch, out, 3));
  }
  net.final_ = make_conv(cfg.base_channels, cfg.in_channels, 1);
  return net;
}

namespace {

std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (i < 0) return static_cast<std::size_t>(-i);
  if (i >= static_cast<std::ptrdiff_t>(n)) return 2 * n - 2 - static_cast<std::size_t>(i);
  return static_cast<std::size_t>(i);
}

FeatureMap conv_relu(const ToyUNet::Conv& conv, const FeatureMap& in, bool relu) {
  const Dims& d = in.dims();
  FeatureMap out = FeatureMap::zeros({d.b, conv.out_ch, d.h, d.w});
  const std::ptrdiff_t r = conv.ksize == 3 ? 1 : 0;
  for (std::size_t b = 0; b < d.b; ++b) {
    for (std::size_t o = 0; o < conv.out_ch; ++o) {
      for (std::size_t y = 0; y < d.h; ++y) {
        for (std::size_t x = 0; x < d.w; ++x) {
          double acc = conv.bias[o];
          for (std::size_t i = 0; i < conv.in_ch; ++i) {
            for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
              const std::size_t sy = reflect(static_cast<std::ptrdiff_t>(y) + dy, d.h);
              for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
                const std::size_t sx = reflect(static_cast<std::ptrdiff_t>(x) + dx, d.w);
                const float wv =
                    conv.w[((o * conv.in_ch + i) * conv.ksize + static_cast<std::size_t>(dy + r)) *
                               conv.ksize +
                           static_cast<std::size_t>(dx + r)];
                acc += static_cast<double>(wv) * in.at(b, i, sy, sx);
              }
            }
          }
          float v = static_cast<float>(acc);
          if (relu && v < 0.0f) v = 0.0f;
          out.at(b, o, y, x) = v;
        }
      }
    }
  }
  return out;
}

FeatureMap mean_pool2(const FeatureMap& in) {
  const Dims& d = in.dims();
  FeatureMap out = FeatureMap::zeros({d.b, d.c, d.h / 2, d.w / 2});
  for (std::size_t b = 0; b < d.b; ++b) {
    for (std::size_t c = 0; c < d.c; ++c) {
      for (std::size_t y = 0; y + 1 < d.h; y += 2) {
        for (std::size_t x = 0; x + 1 < d.w; x += 2) {
          out.at(b, c, y / 2, x / 2) = 0.25f * (in.at(b, c, y, x) + in.at(b, c, y, x + 1) +
                                                in.at(b, c, y + 1, x) + in.at(b, c, y + 1, x + 1));
        }
      }
    }
  }
  return out;
}

FeatureMap upsample_nearest2(const FeatureMap& in) {
  const Dims& d = in.dims();
  FeatureMap out = FeatureMap::zeros({d.b, d.c, d.h * 2, d.w * 2});
  for (std::size_t b = 0; b < d.b; ++b) {
    for (std::size_t c = 0; c < d.c; ++c) {
      for (std::size_t y = 0; y < 2 * d.h; ++y) {
        for (std::size_t x = 0; x < 2 * d.w; ++x) {
          out.at(b, c, y, x) = in.at(b, c, y / 2, x / 2);
        }
      }
    }
  }
  return out;
}

FeatureMap concat_channels(const FeatureMap& a, const FeatureMap& b) {
  const Dims& da = a.dims();
  const Dims& db = b.dims();
  FeatureMap out = FeatureMap::zeros({da.b, da.c + db.c, da.h, da.w});
  for (std::size_t bi = 0; bi < da.b; ++bi) {
    for (std::size_t c = 0; c < da.c; ++c) {
      for (std::size_t i = 0; i < da.plane(); ++i) {
        out.data()[out.slice_offset(bi, c) + i] = a.data()[a.slice_offset(bi, c) + i];
      }
    }
    for (std::size_t c = 0; c < db.c; ++c) {
      for (std::size_t i = 0; i < db.plane(); ++i) {
        out.data()[out.slice_offset(bi, da.c + c) + i] = b.data()[b.slice_offset(bi, c) + i];
      }
    }
  }
  return out;
}

}  // namespace

std::uint64_t ToyUNet::weight_checksum() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix_float = [&h](float f) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (const Conv* conv : [this] {
         std::vector<const Conv*> all;
         for (const auto& c : enc_) all.push_back(&c);
         for (const auto& c : dec_) all.push_back(&c);
         all.push_back(&final_);
         return all;
       }()) {
    for (float f : conv->w) mix_float(f);
    for (float f : conv->bias) mix_float(f);
  }
  return h;
}

FeatureMap ToyUNet::forward(const FeatureMap& x, double t, const RefineParams* params,
                            std::vector<BlockCapture>* capture) const {
  const Dims& d = x.dims();
  if (d.c != cfg_.in_channels || d.h != cfg_.height || d.w != cfg_.width) {
    throw std::invalid_argument("ToyUNet::forward: input dims " + d.str() +
                                " do not match the configured network");
  }
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("ToyUNet::forward: t must be in [0, 1], got " + std::to_string(t));
  }
  if (capture) capture->clear();

  std::vector<FeatureMap> skips;
  skips.reserve(cfg_.levels);
  FeatureMap cur = x;
  for (std::size_t i = 0; i < cfg_.levels; ++i) {
    cur = conv_relu(enc_[i], cur, true);
    skips.push_back(cur);
    cur = mean_pool2(cur);
  }

  // Timestep conditioning: scalar bias on the bottleneck.
  if (t != 0.0) {
    for (float& v : cur.data()) v = static_cast<float>(v + t);
  }

  for (std::size_t k = 0; k < cfg_.levels; ++k) {
    cur = upsample_nearest2(cur);
    const FeatureMap& skip = skips[cfg_.levels - 1 - k];
    if (params) {
      auto [xr, hr] = apply_block(*params, k, cur, skip);
      if (capture) capture->push_back({cur, skip, xr, hr});
      cur = concat_channels(xr, hr);
    } else {
      if (capture) capture->push_back({cur, skip, cur, skip});
      cur = concat_channels(cur, skip);
    }
    cur = conv_relu(dec_[k], cur, true);
  }

  return conv_relu(final_, cur, false);
}

}  // namespace melrefine
