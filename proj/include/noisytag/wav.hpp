#pragma once

// Mono WAV read/write, PCM16 and IEEE-float32 subtypes only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "noisytag/audio.hpp"
#include "noisytag/errors.hpp"

namespace noisytag {

enum class WavFormat { pcm16, float32 };

namespace detail {

inline void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u16(std::string& buf, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct ByteReader {
  const unsigned char* p;
  std::size_t n;
  std::size_t pos = 0;
  bool skip(std::size_t k) {
    if (pos + k > n) return false;
    pos += k;
    return true;
  }
  bool read_u32(std::uint32_t& v) {
    if (pos + 4 > n) return false;
    v = static_cast<std::uint32_t>(p[pos]) | (static_cast<std::uint32_t>(p[pos + 1]) << 8) |
        (static_cast<std::uint32_t>(p[pos + 2]) << 16) | (static_cast<std::uint32_t>(p[pos + 3]) << 24);
    pos += 4;
    return true;
  }
  bool read_u16(std::uint16_t& v) {
    if (pos + 2 > n) return false;
    v = static_cast<std::uint16_t>(p[pos] | (p[pos + 1] << 8));
    pos += 2;
    return true;
  }
};

}  // namespace detail

inline void write_wav(const std::string& path, const AudioClip& clip,
                      WavFormat format = WavFormat::float32) {
  validate(clip);
  const std::uint16_t fmt_tag = format == WavFormat::pcm16 ? 1 : 3;
  const std::uint16_t bits = format == WavFormat::pcm16 ? 16 : 32;
  const std::uint16_t block_align = static_cast<std::uint16_t>(bits / 8);
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(clip.samples.size() * block_align);

  std::string buf;
  buf.reserve(44 + data_size);
  buf += "RIFF";
  detail::put_u32(buf, 36 + data_size);
  buf += "WAVEfmt ";
  detail::put_u32(buf, 16);
  detail::put_u16(buf, fmt_tag);
  detail::put_u16(buf, 1);  // mono
  detail::put_u32(buf, static_cast<std::uint32_t>(clip.sample_rate_hz));
  detail::put_u32(buf, static_cast<std::uint32_t>(clip.sample_rate_hz) * block_align);
  detail::put_u16(buf, block_align);
  detail::put_u16(buf, bits);
  buf += "data";
  detail::put_u32(buf, data_size);

  if (format == WavFormat::pcm16) {
    for (float s : clip.samples) {
      const double scaled = std::clamp(static_cast<double>(s), -1.0, 1.0) * 32767.0;
      const auto v = static_cast<std::int16_t>(std::lrint(scaled));
      detail::put_u16(buf, static_cast<std::uint16_t>(v));
    }
  } else {
    for (float s : clip.samples) {
      std::uint32_t bits32;
      std::memcpy(&bits32, &s, 4);
      detail::put_u32(buf, bits32);
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_wav: cannot open " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write_wav: short write to " + path);
}

inline AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_wav: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  detail::ByteReader r{bytes.data(), bytes.size()};

  std::uint32_t riff_size = 0;
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw IoError("read_wav: not a RIFF/WAVE file: " + path);
  }
  r.pos = 4;
  r.read_u32(riff_size);
  r.pos = 12;

  std::uint16_t fmt_tag = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;
  AudioClip clip;
  bool have_data = false;

  while (r.pos + 8 <= bytes.size()) {
    const char* chunk_id = reinterpret_cast<const char*>(bytes.data() + r.pos);
    r.pos += 4;
    std::uint32_t chunk_size = 0;
    r.read_u32(chunk_size);
    const std::size_t chunk_start = r.pos;
    if (std::memcmp(chunk_id, "fmt ", 4) == 0) {
      std::uint32_t byte_rate = 0;
      std::uint16_t block_align = 0;
      if (!r.read_u16(fmt_tag) || !r.read_u16(channels) || !r.read_u32(sample_rate) ||
          !r.read_u32(byte_rate) || !r.read_u16(block_align) || !r.read_u16(bits)) {
        throw IoError("read_wav: truncated fmt chunk: " + path);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk_id, "data", 4) == 0) {
      if (!have_fmt) throw IoError("read_wav: data chunk before fmt: " + path);
      if (channels != 1) throw IoError("read_wav: only mono supported: " + path);
      if (chunk_start + chunk_size > bytes.size()) {
        throw IoError("read_wav: truncated data chunk: " + path);
      }
      const unsigned char* d = bytes.data() + chunk_start;
      if (fmt_tag == 1 && bits == 16) {
        const std::size_t n = chunk_size / 2;
        clip.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          const auto v = static_cast<std::int16_t>(d[2 * i] | (d[2 * i + 1] << 8));
          clip.samples[i] = static_cast<float>(v) / 32767.0f;
        }
      } else if (fmt_tag == 3 && bits == 32) {
        const std::size_t n = chunk_size / 4;
        clip.samples.resize(n);
        std::memcpy(clip.samples.data(), d, n * 4);
      } else {
        throw IoError("read_wav: unsupported format (want PCM16 or float32): " + path);
      }
      clip.sample_rate_hz = static_cast<int>(sample_rate);
      have_data = true;
    }
    // Chunks are word-aligned.
    r.pos = chunk_start + chunk_size + (chunk_size & 1);
  }
  if (!have_data) throw IoError("read_wav: no data chunk: " + path);
  validate(clip);
  return clip;
}

}  // namespace noisytag
