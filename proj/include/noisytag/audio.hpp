#pragma once

// Waveform container and the SNR-exact mixing primitives. All operations are
// pure: inputs are immutable, results are new clips. Samples are stored as
// 32-bit floats; every accumulation runs in double.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "noisytag/errors.hpp"

namespace noisytag {

inline constexpr int kDefaultSampleRate = 22050;

struct AudioClip {
  std::vector<float> samples;
  int sample_rate_hz = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

inline void validate(const AudioClip& clip) {
  if (clip.samples.empty()) throw BadSpec("audio clip has no samples");
  if (clip.sample_rate_hz <= 0) throw BadSpec("audio clip has non-positive sample rate");
  for (float s : clip.samples) {
    if (!std::isfinite(s)) throw BadSpec("audio clip contains non-finite sample");
  }
}

inline double rms(const AudioClip& clip) {
  double acc = 0.0;
  for (float s : clip.samples) acc += static_cast<double>(s) * s;
  return std::sqrt(acc / static_cast<double>(clip.samples.size()));
}

inline AudioClip normalize_rms(const AudioClip& clip, double target_rms) {
  const double current = rms(clip);
  if (current <= 0.0) throw ZeroEnergy("normalize_rms: silent clip");
  if (target_rms <= 0.0) throw BadSpec("normalize_rms: target must be positive");
  const double gain = target_rms / current;
  AudioClip out;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.samples.resize(clip.samples.size());
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    out.samples[i] = static_cast<float>(clip.samples[i] * gain);
  }
  return out;
}

// music + g * composite, where composite is the equal-RMS sum of the noises
// and g sets the requested full-clip SNR exactly.
inline AudioClip mix_at_snr(const AudioClip& music,
                            const std::vector<AudioClip>& noises,
                            double snr_db) {
  if (noises.empty()) throw BadSpec("mix_at_snr: no noise clips");
  for (const AudioClip& n : noises) {
    if (n.sample_rate_hz != music.sample_rate_hz) {
      throw LengthMismatch("mix_at_snr: sample-rate mismatch");
    }
    if (n.samples.size() != music.samples.size()) {
      throw LengthMismatch("mix_at_snr: length mismatch");
    }
  }
  const double music_rms = rms(music);
  if (music_rms <= 0.0) throw ZeroEnergy("mix_at_snr: silent music clip");

  // Equal-RMS composite of the noise clips. The common level is arbitrary;
  // the final gain rescales the composite as a whole.
  std::vector<double> composite(music.samples.size(), 0.0);
  for (const AudioClip& n : noises) {
    const double nr = rms(n);
    if (nr <= 0.0) throw ZeroEnergy("mix_at_snr: silent noise clip");
    const double g = 1.0 / nr;
    for (std::size_t i = 0; i < composite.size(); ++i) {
      composite[i] += g * n.samples[i];
    }
  }
  double comp_acc = 0.0;
  for (double v : composite) comp_acc += v * v;
  const double comp_rms = std::sqrt(comp_acc / static_cast<double>(composite.size()));
  if (comp_rms <= 0.0) throw ZeroEnergy("mix_at_snr: composite noise cancelled to silence");

  const double gain = (music_rms / comp_rms) * std::pow(10.0, -snr_db / 20.0);
  AudioClip out;
  out.sample_rate_hz = music.sample_rate_hz;
  out.samples.resize(music.samples.size());
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = static_cast<float>(music.samples[i] + gain * composite[i]);
  }
  return out;
}

// Exact-length crop/loop. Longer clips are cropped starting at `offset`
// (clamped so the window fits); shorter clips loop with period len so the
// result's RMS is not diluted by padding silence.
inline AudioClip fit_length(const AudioClip& clip, std::size_t n_samples,
                            std::size_t offset = 0) {
  if (n_samples == 0) throw BadSpec("fit_length: zero target length");
  const std::size_t len = clip.samples.size();
  AudioClip out;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.samples.resize(n_samples);
  if (len >= n_samples) {
    const std::size_t max_offset = len - n_samples;
    const std::size_t start = offset > max_offset ? max_offset : offset;
    for (std::size_t i = 0; i < n_samples; ++i) out.samples[i] = clip.samples[start + i];
  } else {
    for (std::size_t i = 0; i < n_samples; ++i) {
      out.samples[i] = clip.samples[(offset + i) % len];
    }
  }
  return out;
}

// 20*log10(rms(signal)/rms(residual)) for a known decomposition; used by
// tests and by the mixing property checks.
inline double measured_snr_db(const AudioClip& signal, const AudioClip& residual) {
  return 20.0 * std::log10(rms(signal) / rms(residual));
}

}  // namespace noisytag
