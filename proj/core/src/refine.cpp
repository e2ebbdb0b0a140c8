#include "melrefine/refine.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "melrefine/fft.hpp"

namespace melrefine {

BandMask central_region_mask(std::size_t h, std::size_t w, double lf_gain, double hf_gain) {
  if (h < 2 || w < 2) {
    throw std::invalid_argument("central_region_mask: need h, w >= 2, got (" + std::to_string(h) +
                                ", " + std::to_string(w) + ")");
  }
  if (!std::isfinite(lf_gain) || !std::isfinite(hf_gain)) {
    throw std::invalid_argument("central_region_mask: gains must be finite");
  }
  BandMask mask;
  mask.h = h;
  mask.w = w;
  mask.gain.resize(h * w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      mask.gain[y * w + x] = mask.in_low_region(y, x) ? lf_gain : hf_gain;
    }
  }
  return mask;
}

void RefineParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw std::invalid_argument(std::string("RefineParams: ") + name +
                                  " must be finite and > 0, got " + std::to_string(v));
    }
  };
  check(s1, "s1");
  check(s2, "s2");
  check(b1, "b1");
  check(b2, "b2");
  check(m, "m");
  if (!std::isfinite(eps) || eps < 0.0) {
    throw std::invalid_argument("RefineParams: eps must be finite and >= 0");
  }
}

RefineParams preset(const std::string& name) {
  if (name == "identity") return RefineParams{};
  if (name == "tango") return RefineParams{1.2, 1.2, 0.8, 0.1, 1.4};
  if (name == "mustango") return RefineParams{1.4, 1.2, 0.8, 0.6, 1.1};
  if (name == "tango2") return RefineParams{1.4, 1.2, 0.5, 0.1, 2.5};
  throw std::invalid_argument("preset: unknown preset '" + name +
                              "' (expected tango, mustango, tango2 or identity)");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"tango", "mustango", "tango2", "identity"};
  return names;
}

std::string params_to_kv(const RefineParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "s1=" << p.s1 << " s2=" << p.s2 << " b1=" << p.b1 << " b2=" << p.b2 << " m=" << p.m;
  return os.str();
}

RefineParams params_from_kv(const std::string& text) {
  RefineParams p;
  bool seen[5] = {false, false, false, false, false};
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) {
      throw Error("RefineParams: malformed token '" + tok + "' (expected key=value)");
    }
    std::string key = tok.substr(0, eq);
    double val;
    try {
      std::size_t used = 0;
      val = std::stod(tok.substr(eq + 1), &used);
      if (used != tok.size() - eq - 1) throw std::invalid_argument("trailing garbage");
    } catch (const std::exception&) {
      throw Error("RefineParams: bad value in token '" + tok + "'");
    }
    if (key == "s1") p.s1 = val, seen[0] = true;
    else if (key == "s2") p.s2 = val, seen[1] = true;
    else if (key == "b1") p.b1 = val, seen[2] = true;
    else if (key == "b2") p.b2 = val, seen[3] = true;
    else if (key == "m") p.m = val, seen[4] = true;
    else if (key == "eps") p.eps = val;
    else throw Error("RefineParams: unknown key '" + key + "'");
  }
  for (bool s : seen) {
    if (!s) throw Error("RefineParams: missing key (need s1, s2, b1, b2, m)");
  }
  p.validate();
  return p;
}

RefineParams read_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_params_file: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return params_from_kv(ss.str());
}

void write_params_file(const std::string& path, const RefineParams& p) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("write_params_file: cannot open " + path);
  out << params_to_kv(p) << "\n";
}

FeatureMap fourier_band_scale(const FeatureMap& x, const BandMask& mask) {
  const Dims& d = x.dims();
  if (mask.h != d.h || mask.w != d.w) {
    throw std::invalid_argument("fourier_band_scale: mask is (" + std::to_string(mask.h) + ", " +
                                std::to_string(mask.w) + ") but map spatial dims are (" +
                                std::to_string(d.h) + ", " + std::to_string(d.w) + ")");
  }

  // Real output = Re(IFFT(mask . FFT(x))) = IFFT(sym(mask) . FFT(x)) where
  // sym averages each conjugate bin pair. Precompute sym(mask) once.
  std::vector<double> sym(mask.gain.size());
  for (std::size_t y = 0; y < d.h; ++y) {
    std::size_t yc = fftdetail::conj_index(y, d.h);
    for (std::size_t xcol = 0; xcol < d.w; ++xcol) {
      std::size_t xc = fftdetail::conj_index(xcol, d.w);
      sym[y * d.w + xcol] = 0.5 * (mask.gain[y * d.w + xcol] + mask.gain[yc * d.w + xc]);
    }
  }

  SpectrumMap spec = fft2_shifted(x);
  auto& sd = spec.data();
  const std::size_t plane = d.plane();
  for (std::size_t s = 0; s < d.b * d.c; ++s) {
    for (std::size_t i = 0; i < plane; ++i) {
      sd[s * plane + i] *= static_cast<float>(sym[i]);
    }
  }
  return ifft2_shifted(spec);
}

FeatureMap structure_scale(const FeatureMap& x, double m, double eps) {
  if (!std::isfinite(m) || m < 1.0) {
    throw std::invalid_argument("structure_scale: m must be >= 1, got " + std::to_string(m));
  }
  if (m == 1.0) return x;

  const Dims& d = x.dims();
  const auto& in = x.data();
  std::vector<float> out(in.size());
  std::vector<double> mean(d.plane());
  for (std::size_t b = 0; b < d.b; ++b) {
    // Channel-wise mean over this batch element.
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t c = 0; c < d.c; ++c) {
      const std::size_t base = x.slice_offset(b, c);
      for (std::size_t i = 0; i < d.plane(); ++i) mean[i] += in[base + i];
    }
    const double inv_c = 1.0 / static_cast<double>(d.c);
    double lo = mean[0] * inv_c, hi = mean[0] * inv_c;
    for (std::size_t i = 0; i < d.plane(); ++i) {
      mean[i] *= inv_c;
      lo = std::min(lo, mean[i]);
      hi = std::max(hi, mean[i]);
    }

    if (hi - lo < eps) {
      // Degenerate plane: gain is identically 1, keep the element bit-exact.
      for (std::size_t c = 0; c < d.c; ++c) {
        const std::size_t base = x.slice_offset(b, c);
        for (std::size_t i = 0; i < d.plane(); ++i) out[base + i] = in[base + i];
      }
      continue;
    }

    const double scale = (m - 1.0) / (hi - lo);
    for (std::size_t i = 0; i < d.plane(); ++i) mean[i] = scale * (mean[i] - lo) + 1.0;
    for (std::size_t c = 0; c < d.c; ++c) {
      const std::size_t base = x.slice_offset(b, c);
      for (std::size_t i = 0; i < d.plane(); ++i) {
        out[base + i] = static_cast<float>(in[base + i] * mean[i]);
      }
    }
  }
  return FeatureMap(d, std::move(out));
}

FeatureMap refine_skip(const FeatureMap& h, double s) {
  if (!std::isfinite(s) || s <= 0.0) {
    throw std::invalid_argument("refine_skip: s must be > 0, got " + std::to_string(s));
  }
  if (s == 1.0) return h;
  return fourier_band_scale(h, central_region_mask(h.dims().h, h.dims().w, 1.0, s));
}

FeatureMap refine_backbone(const FeatureMap& x, double m, double b, double eps) {
  if (!std::isfinite(b) || b <= 0.0) {
    throw std::invalid_argument("refine_backbone: b must be > 0, got " + std::to_string(b));
  }
  FeatureMap stage1 = structure_scale(x, m, eps);  // validates m >= 1
  if (b == 1.0) return stage1;
  return fourier_band_scale(stage1, central_region_mask(x.dims().h, x.dims().w, 1.0, b));
}

std::pair<FeatureMap, FeatureMap> apply_block(const RefineParams& params, std::size_t block_index,
                                              const FeatureMap& x, const FeatureMap& h) {
  params.validate();
  if (x.dims().h < 2 || x.dims().w < 2 || h.dims().h < 2 || h.dims().w < 2) {
    throw std::invalid_argument("apply_block: spatial dims must be >= 2");
  }
  if (block_index >= 2) return {x, h};
  const double s = block_index == 0 ? params.s1 : params.s2;
  const double b = block_index == 0 ? params.b1 : params.b2;
  return {refine_backbone(x, params.m, b, params.eps), refine_skip(h, s)};
}

}  // namespace melrefine
