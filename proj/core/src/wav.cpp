#include "melrefine/wav.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "melrefine/feature_map.hpp"

namespace melrefine {

namespace {

struct Cursor {
  const unsigned char* p;
  std::size_t size;
  std::size_t pos = 0;

  bool has(std::size_t n) const { return pos + n <= size; }
  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint16_t>(p[pos] | (p[pos + 1] << 8));
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = static_cast<std::uint32_t>(p[pos]) | (static_cast<std::uint32_t>(p[pos + 1]) << 8) |
                      (static_cast<std::uint32_t>(p[pos + 2]) << 16) |
                      (static_cast<std::uint32_t>(p[pos + 3]) << 24);
    pos += 4;
    return v;
  }
};

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_wav: cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  Cursor cur{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()};
  if (!cur.has(12) || std::memcmp(cur.p, "RIFF", 4) != 0 || std::memcmp(cur.p + 8, "WAVE", 4) != 0) {
    throw Error("read_wav: " + path + " is not a RIFF/WAVE file");
  }
  cur.pos = 12;

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  while (cur.has(8)) {
    char id[4];
    std::memcpy(id, cur.p + cur.pos, 4);
    cur.pos += 4;
    std::uint32_t chunk_size = cur.u32();
    if (!cur.has(chunk_size)) throw Error("read_wav: truncated chunk in " + path);
    const unsigned char* chunk = cur.p + cur.pos;

    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw Error("read_wav: malformed fmt chunk in " + path);
      Cursor f{chunk, chunk_size};
      format = f.u16();
      channels = f.u16();
      sample_rate = f.u32();
      f.u32();  // byte rate
      f.u16();  // block align
      bits = f.u16();
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = chunk;
      data_size = chunk_size;
    }
    cur.pos += chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr) {
    throw Error("read_wav: missing fmt or data chunk in " + path);
  }
  if (channels != 1 && channels != 2) {
    throw Error("read_wav: unsupported channel count " + std::to_string(channels) + " in " + path);
  }
  if (sample_rate == 0) throw Error("read_wav: zero sample rate in " + path);

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) {
    throw Error("read_wav: unsupported codec (format " + std::to_string(format) + ", " +
                std::to_string(bits) + "-bit) in " + path + "; need PCM16 or float32");
  }

  const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t frames = data_size / frame_bytes;

  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* s = data + i * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        std::int16_t raw = static_cast<std::int16_t>(s[0] | (s[1] << 8));
        acc += static_cast<double>(raw) / 32768.0;
      } else {
        std::uint32_t bits32 = static_cast<std::uint32_t>(s[0]) | (static_cast<std::uint32_t>(s[1]) << 8) |
                               (static_cast<std::uint32_t>(s[2]) << 16) |
                               (static_cast<std::uint32_t>(s[3]) << 24);
        acc += static_cast<double>(std::bit_cast<float>(bits32));
      }
    }
    const float v = static_cast<float>(acc / channels);
    if (!std::isfinite(v)) {
      throw Error("read_wav: non-finite sample at frame " + std::to_string(i) + " in " + path);
    }
    w.samples[i] = v;
  }
  return w;
}

}  // namespace melrefine
