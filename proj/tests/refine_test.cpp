#include <cmath>

#include "doctest.h"
#include "melrefine/metrics.hpp"
#include "melrefine/refine.hpp"
#include "oracles.hpp"

using melrefine::BandMask;
using melrefine::Dims;
using melrefine::FeatureMap;
using melrefine::RefineParams;
using melrefine::apply_block;
using melrefine::band_energy;
using melrefine::central_region_mask;
using melrefine::fourier_band_scale;
using melrefine::preset;
using melrefine::refine_backbone;
using melrefine::refine_skip;
using melrefine::structure_scale;

namespace {

double max_abs_diff(const FeatureMap& a, const FeatureMap& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, static_cast<double>(std::abs(a.data()[i] - b.data()[i])));
  }
  return m;
}

}  // namespace

TEST_CASE("central_region_mask: 8x8 low region is rows/cols {2, 3, 4, 5}") {
  const double s = 1.4;
  BandMask m = central_region_mask(8, 8, 1.0, s);
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) {
      const bool low = y >= 2 && y <= 5 && x >= 2 && x <= 5;
      CHECK(m.at(y, x) == (low ? 1.0 : s));
    }
  }
}

TEST_CASE("central_region_mask: (h, w, 1, 1) is all ones") {
  BandMask m = central_region_mask(6, 10, 1.0, 1.0);
  for (double g : m.gain) CHECK(g == 1.0);
}

TEST_CASE("central_region_mask: 6x6 region is indices {1, 2, 3}, 9 bins in, 27 out") {
  BandMask m = central_region_mask(6, 6, 1.0, 2.0);
  std::size_t in = 0, out = 0;
  for (std::size_t y = 0; y < 6; ++y) {
    for (std::size_t x = 0; x < 6; ++x) {
      const bool low = y >= 1 && y <= 3 && x >= 1 && x <= 3;
      CHECK(m.at(y, x) == (low ? 1.0 : 2.0));
      (low ? in : out)++;
    }
  }
  CHECK(in == 9);
  CHECK(out == 27);
}

TEST_CASE("central_region_mask rejects degenerate sizes") {
  CHECK_THROWS_AS(central_region_mask(1, 8, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(central_region_mask(8, 0, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("fourier_band_scale: all-ones mask is the identity within 1e-5") {
  FeatureMap x = oracle::random_map({1, 2, 8, 8}, 3);
  CHECK(max_abs_diff(fourier_band_scale(x, central_region_mask(8, 8, 1.0, 1.0)), x) < 1e-5);
}

TEST_CASE("fourier_band_scale: constant map is untouched by an HF-only mask") {
  FeatureMap x({1, 1, 8, 8}, std::vector<float>(64, 0.6f));
  CHECK(max_abs_diff(fourier_band_scale(x, central_region_mask(8, 8, 1.0, 3.0)), x) < 1e-6);
}

TEST_CASE("fourier_band_scale: checkerboard is exactly scaled by the HF gain") {
  std::vector<float> data(64);
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) data[y * 8 + x] = ((y + x) % 2 == 0) ? 1.0f : -1.0f;
  }
  FeatureMap x({1, 1, 8, 8}, data);
  FeatureMap y = fourier_band_scale(x, central_region_mask(8, 8, 1.0, 2.0));
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(std::abs(y.data()[i] - 2.0f * x.data()[i]) < 1e-5);
  }
}

TEST_CASE("fourier_band_scale equals the reference mask->ifft->real-part route") {
  // The library applies conjugate-symmetrized gains; the oracle multiplies
  // the raw two-valued mask into the naive DFT and drops the imaginary part.
  // The two must agree bin for bin on fully generic input.
  const std::size_t h = 8, w = 12;
  FeatureMap x = oracle::random_map({1, 2, h, w}, 11);
  const double s = 1.4;
  FeatureMap got = fourier_band_scale(x, central_region_mask(h, w, 1.0, s));

  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<double> slice(h * w);
    for (std::size_t i = 0; i < h * w; ++i) slice[i] = x.data()[x.slice_offset(0, c) + i];
    auto spec = oracle::naive_dft2_shifted(slice, h, w);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t xx = 0; xx < w; ++xx) {
        const bool low = y >= h / 4 && y < 3 * h / 4 && xx >= w / 4 && xx < 3 * w / 4;
        spec[y * w + xx] *= low ? 1.0 : s;
      }
    }
    auto back = oracle::naive_idft2_shifted(spec, h, w);
    for (std::size_t i = 0; i < h * w; ++i) {
      CHECK(std::abs(got.data()[got.slice_offset(0, c) + i] - back[i].real()) < 1e-5);
    }
  }
}

TEST_CASE("fourier_band_scale rejects mismatched mask dims") {
  FeatureMap x = oracle::random_map({1, 1, 8, 8}, 1);
  CHECK_THROWS_AS(fourier_band_scale(x, central_region_mask(4, 4, 1.0, 2.0)),
                  std::invalid_argument);
}

TEST_CASE("property: linearity of fourier_band_scale in its input") {
  FeatureMap x = oracle::random_map({1, 1, 8, 8}, 17);
  BandMask mask = central_region_mask(8, 8, 1.0, 1.7);
  const float a = 2.5f;
  std::vector<float> scaled(64);
  for (std::size_t i = 0; i < 64; ++i) scaled[i] = a * x.data()[i];
  FeatureMap fa = fourier_band_scale(FeatureMap({1, 1, 8, 8}, scaled), mask);
  FeatureMap fx = fourier_band_scale(x, mask);
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(std::abs(fa.data()[i] - a * fx.data()[i]) < 1e-5);
  }
}

TEST_CASE("structure_scale: constant input comes back exactly") {
  FeatureMap x({2, 3, 4, 4}, std::vector<float>(96, 0.37f));
  FeatureMap y = structure_scale(x, 2.5);
  CHECK(x.same_bits(y));
}

TEST_CASE("structure_scale: plane {0, 0.5, 1} with m = 2 gets gains {1, 1.5, 2}") {
  FeatureMap x({1, 1, 2, 2}, {0.0f, 0.5f, 1.0f, 0.25f});
  FeatureMap y = structure_scale(x, 2.0);
  // Single channel, so the channel mean is the plane itself.
  CHECK(y.at(0, 0, 0, 0) == doctest::Approx(0.0));         // gain 1 at the min
  CHECK(y.at(0, 0, 0, 1) == doctest::Approx(0.5 * 1.5));   // gain 1.5 at 0.5
  CHECK(y.at(0, 0, 1, 0) == doctest::Approx(1.0 * 2.0));   // gain 2 at the max
  CHECK(y.at(0, 0, 1, 1) == doctest::Approx(0.25 * 1.25));
}

TEST_CASE("structure_scale matches the scalar-loop oracle on random 2x4x8x8") {
  FeatureMap x = oracle::random_map({2, 4, 8, 8}, 23);
  FeatureMap got = structure_scale(x, 1.4);
  FeatureMap want = oracle::naive_structure_scale(x, 1.4, 1e-8);
  CHECK(max_abs_diff(got, want) < 1e-6);
}

TEST_CASE("structure_scale rejects m < 1") {
  FeatureMap x = oracle::random_map({1, 1, 4, 4}, 2);
  CHECK_THROWS_AS(structure_scale(x, 0.99), std::invalid_argument);
}

TEST_CASE("property: alpha stays in [1, m] and attains both endpoints") {
  FeatureMap x = oracle::random_map({2, 4, 8, 8}, 31);
  const double m = 1.9;
  for (std::size_t b = 0; b < 2; ++b) {
    auto alpha = oracle::naive_alpha(x, b, m, 1e-8);
    double lo = alpha[0], hi = alpha[0];
    for (double a : alpha) {
      CHECK(a >= 1.0 - 1e-12);
      CHECK(a <= m + 1e-12);
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    CHECK(lo == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hi == doctest::Approx(m).epsilon(1e-12));
  }
}

TEST_CASE("refine_skip: s = 1 returns the input bit-exactly") {
  FeatureMap h = oracle::random_map({1, 2, 8, 8}, 5);
  CHECK(refine_skip(h, 1.0).same_bits(h));
}

TEST_CASE("refine_skip: band-energy law on band-clean input (s = 1.4)") {
  FeatureMap h = oracle::random_band_clean_map({1, 2, 16, 16}, 9);
  const double s = 1.4;
  const auto before = band_energy(h);
  const auto after = band_energy(refine_skip(h, s));
  CHECK(after.hf / before.hf == doctest::Approx(s * s).epsilon(1e-3));
  CHECK(after.lf / before.lf == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("refine_backbone: m = 1, b = 1 is the identity") {
  FeatureMap x = oracle::random_map({1, 2, 8, 8}, 6);
  CHECK(refine_backbone(x, 1.0, 1.0).same_bits(x));
}

TEST_CASE("refine_backbone: constant input survives the tango2 backbone settings") {
  FeatureMap x({1, 2, 8, 8}, std::vector<float>(128, 1.5f));
  CHECK(max_abs_diff(refine_backbone(x, 2.5, 0.5), x) < 1e-5);
}

TEST_CASE("refine_backbone: stage 1 vanishes at m = 1 (composition check)") {
  FeatureMap x = oracle::random_map({1, 2, 8, 8}, 41);
  const double b = 0.5;
  FeatureMap via_backbone = refine_backbone(x, 1.0, b);
  FeatureMap via_mask = fourier_band_scale(x, central_region_mask(8, 8, 1.0, b));
  CHECK(max_abs_diff(via_backbone, via_mask) < 1e-6);
}

TEST_CASE("refine_backbone rejects bad gains") {
  FeatureMap x = oracle::random_map({1, 1, 4, 4}, 2);
  CHECK_THROWS_AS(refine_backbone(x, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(refine_backbone(x, 1.5, 0.0), std::invalid_argument);
}

TEST_CASE("apply_block: identity params are bit-exact at every block index") {
  FeatureMap x = oracle::random_map({1, 2, 8, 8}, 51);
  FeatureMap h = oracle::random_map({1, 2, 8, 8}, 52);
  for (std::size_t block : {0u, 1u, 2u, 5u}) {
    auto [xr, hr] = apply_block(RefineParams{}, block, x, h);
    CHECK(xr.same_bits(x));
    CHECK(hr.same_bits(h));
  }
}

TEST_CASE("apply_block: blocks >= 2 never touch the features") {
  FeatureMap x = oracle::random_map({1, 2, 8, 8}, 61);
  FeatureMap h = oracle::random_map({1, 2, 8, 8}, 62);
  const RefineParams aggressive{3.0, 2.0, 0.05, 0.01, 4.0};
  for (std::size_t block = 2; block < 6; ++block) {
    auto [xr, hr] = apply_block(aggressive, block, x, h);
    CHECK(xr.same_bits(x));
    CHECK(hr.same_bits(h));
    // Idempotent: run it again through the same index.
    auto [xr2, hr2] = apply_block(aggressive, block, xr, hr);
    CHECK(xr2.same_bits(x));
    CHECK(hr2.same_bits(h));
  }
}

TEST_CASE("apply_block: tango preset differs between blocks only through b1 vs b2") {
  // tango has s1 == s2 == 1.2, so the skip output must match across blocks
  // while the backbone output differs (b1 = 0.8 vs b2 = 0.1).
  const RefineParams p = preset("tango");
  FeatureMap x = oracle::random_map({1, 2, 8, 8}, 71);
  FeatureMap h = oracle::random_map({1, 2, 8, 8}, 72);
  auto [x0, h0] = apply_block(p, 0, x, h);
  auto [x1, h1] = apply_block(p, 1, x, h);
  CHECK(max_abs_diff(h0, h1) < 1e-7);
  CHECK(max_abs_diff(x0, x1) > 1e-3);
  // And the backbone outputs match the dedicated op with the per-block gain.
  CHECK(max_abs_diff(x0, refine_backbone(x, p.m, p.b1)) < 1e-7);
  CHECK(max_abs_diff(x1, refine_backbone(x, p.m, p.b2)) < 1e-7);
}

TEST_CASE("presets encode the shipped settings") {
  const RefineParams tango = preset("tango");
  CHECK(tango.s1 == 1.2);
  CHECK(tango.s2 == 1.2);
  CHECK(tango.b1 == 0.8);
  CHECK(tango.b2 == 0.1);
  CHECK(tango.m == 1.4);

  const RefineParams mustango = preset("mustango");
  CHECK(mustango.s1 == 1.4);
  CHECK(mustango.s2 == 1.2);
  CHECK(mustango.b1 == 0.8);
  CHECK(mustango.b2 == 0.6);
  CHECK(mustango.m == 1.1);

  const RefineParams tango2 = preset("tango2");
  CHECK(tango2.s1 == 1.4);
  CHECK(tango2.s2 == 1.2);
  CHECK(tango2.b1 == 0.5);
  CHECK(tango2.b2 == 0.1);
  CHECK(tango2.m == 2.5);

  CHECK(preset("identity").is_identity());
  CHECK_THROWS_AS(preset("nonsense"), std::invalid_argument);
}

TEST_CASE("params round-trip through the key-value text form") {
  const RefineParams p = preset("mustango");
  const RefineParams q = melrefine::params_from_kv(melrefine::params_to_kv(p));
  CHECK(q.s1 == p.s1);
  CHECK(q.s2 == p.s2);
  CHECK(q.b1 == p.b1);
  CHECK(q.b2 == p.b2);
  CHECK(q.m == p.m);
  CHECK_THROWS_AS(melrefine::params_from_kv("s1=1.0 s2=1.0"), melrefine::Error);
  CHECK_THROWS_AS(melrefine::params_from_kv("s1=1 s2=1 b1=1 b2=1 m=banana"), melrefine::Error);
}
