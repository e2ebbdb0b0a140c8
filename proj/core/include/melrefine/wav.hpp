#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace melrefine {

struct Waveform {
  std::vector<float> samples;  // mono, nominally in [-1, 1]
  std::uint32_t sample_rate = 0;
};

// RIFF/WAVE reader for PCM16 and IEEE float32, mono or stereo. Stereo frames
// are averaged to mono; PCM16 samples are scaled by 1/32768. Anything else
// (other codecs, other bit depths, > 2 channels) is rejected.
Waveform read_wav(const std::string& path);

}  // namespace melrefine
