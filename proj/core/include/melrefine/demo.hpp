#pragma once

#include <string>
#include <vector>

#include "melrefine/sampler.hpp"

namespace melrefine {

// Side-by-side artifact bundle: one hookless baseline sample and one refined
// sample from identical seeds, written as FMAP + PNG, plus captured decoder
// intermediates of the refined run and a text report.
struct DemoReport {
  struct BlockRatios {
    // Output-over-input spectral band energies at the hook, totalled over
    // channels. Identity parameters give exactly 1 everywhere.
    double skip_lf = 1.0;
    double skip_hf = 1.0;
    double backbone_lf = 1.0;
    double backbone_hf = 1.0;
  };

  double max_abs_diff = 0.0;
  std::vector<BlockRatios> blocks;  // one per decoder block
  std::string report_text;          // exactly what report.txt holds
};

// Writes baseline.{fmap,png}, refined.{fmap,png},
// refined.blkK.{x,h,xr,hr}.fmap and report.txt under out_dir (created if
// missing). Fixed seeds make the whole bundle byte-reproducible.
DemoReport run_demo(const UNetConfig& ucfg, const SamplerConfig& scfg, const RefineParams& params,
                    const std::string& out_dir);

}  // namespace melrefine
