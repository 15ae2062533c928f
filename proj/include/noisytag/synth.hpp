#pragma once

// Seed-deterministic signal generators. These stand in for the music and
// noise corpora at desk scale: harmonic tones with amplitude envelopes for
// music, spectrally tilted (optionally bursty) noise for the noise pool.
// Identical specs always produce bit-identical clips.

#include <cmath>
#include <cstdint>
#include <vector>

#include "noisytag/audio.hpp"
#include "noisytag/errors.hpp"
#include "noisytag/rng.hpp"

namespace noisytag {

enum class SynthKind { music, noise };

struct MusicParams {
  double f0_hz = 220.0;
  int n_harmonics = 4;
  double harmonic_decay = 1.0;   // amplitude of harmonic h is h^-decay
  double tremolo_depth = 0.0;    // 0 = steady, 1 = full amplitude modulation
  double tremolo_rate_hz = 16.0;
};

struct NoiseParams {
  double spectral_tilt = 0.0;    // 0 = white, 2 = heavily lowpassed
  bool burst_envelope = false;   // gated bursts (applause/crowd style)
  double burst_rate_hz = 3.0;
};

struct SynthSpec {
  SynthKind kind = SynthKind::music;
  std::uint64_t seed = 0;
  double duration_s = 1.0;
  int sample_rate_hz = kDefaultSampleRate;
  MusicParams music;
  NoiseParams noise;
};

namespace detail {

inline std::size_t synth_length(const SynthSpec& spec) {
  if (spec.duration_s <= 0.0) throw BadSpec("synth: non-positive duration");
  if (spec.sample_rate_hz <= 0) throw BadSpec("synth: non-positive sample rate");
  return static_cast<std::size_t>(
      std::llround(spec.duration_s * spec.sample_rate_hz));
}

// Deterministic output level in [0.05, 0.5] drawn from the spec seed.
inline void scale_to_seeded_rms(std::vector<float>& samples, Rng& rng) {
  double acc = 0.0;
  for (float s : samples) acc += static_cast<double>(s) * s;
  const double current = std::sqrt(acc / samples.size());
  const double target = 0.05 + 0.45 * rng.uniform();
  const double gain = current > 0.0 ? target / current : 0.0;
  for (float& s : samples) s = static_cast<float>(s * gain);
}

}  // namespace detail

inline AudioClip synth_music(const SynthSpec& spec) {
  if (spec.kind != SynthKind::music) throw BadSpec("synth_music: spec.kind != music");
  const std::size_t n = detail::synth_length(spec);
  const MusicParams& p = spec.music;
  if (p.f0_hz <= 0.0 || p.n_harmonics < 1) throw BadSpec("synth_music: bad params");

  Rng rng(spec.seed);
  const double two_pi = 6.283185307179586476925286766559;
  std::vector<double> phases(static_cast<std::size_t>(p.n_harmonics));
  for (auto& ph : phases) ph = rng.uniform(0.0, two_pi);
  const double trem_phase = rng.uniform(0.0, two_pi);

  std::vector<float> samples(n);
  const double dt = 1.0 / spec.sample_rate_hz;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    double v = 0.0;
    for (int h = 1; h <= p.n_harmonics; ++h) {
      const double amp = std::pow(static_cast<double>(h), -p.harmonic_decay);
      v += amp * std::sin(two_pi * p.f0_hz * h * t + phases[static_cast<std::size_t>(h - 1)]);
    }
    const double env =
        1.0 - 0.5 * p.tremolo_depth +
        0.5 * p.tremolo_depth * std::sin(two_pi * p.tremolo_rate_hz * t + trem_phase);
    samples[i] = static_cast<float>(v * env);
  }
  detail::scale_to_seeded_rms(samples, rng);
  return AudioClip{std::move(samples), spec.sample_rate_hz};
}

inline AudioClip synth_noise(const SynthSpec& spec) {
  if (spec.kind != SynthKind::noise) throw BadSpec("synth_noise: spec.kind != noise");
  const std::size_t n = detail::synth_length(spec);
  const NoiseParams& p = spec.noise;
  if (p.spectral_tilt < 0.0) throw BadSpec("synth_noise: negative tilt");

  Rng rng(spec.seed);
  std::vector<float> samples(n);

  // White core plus a leaky-integrated component; the blend weight maps the
  // tilt knob onto progressively darker spectra.
  const double w = std::min(1.0, p.spectral_tilt / 2.0);
  const double pole = 0.985;
  double lp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double white = rng.normal();
    lp = pole * lp + (1.0 - pole) * white;
    samples[i] = static_cast<float>((1.0 - w) * white + w * 12.0 * lp);
  }

  if (p.burst_envelope) {
    if (p.burst_rate_hz <= 0.0) throw BadSpec("synth_noise: non-positive burst rate");
    // Alternating burst/gap segments with jittered lengths. Starting with a
    // burst keeps the clip from being all-silent; the gaps guarantee a
    // sizeable silence fraction.
    const std::size_t seg =
        std::max<std::size_t>(1, static_cast<std::size_t>(spec.sample_rate_hz / p.burst_rate_hz));
    const std::size_t ramp = std::max<std::size_t>(1, static_cast<std::size_t>(0.005 * spec.sample_rate_hz));
    std::size_t i = 0;
    bool active = true;
    while (i < n) {
      const std::size_t base = active ? seg : seg / 2;
      const std::size_t seg_len =
          std::min<std::size_t>(n - i, base / 2 + 1 + rng.index(base + 1));
      if (!active) {
        for (std::size_t k = 0; k < seg_len; ++k) samples[i + k] = 0.0f;
      } else {
        for (std::size_t k = 0; k < seg_len && k < ramp; ++k) {
          const float g = static_cast<float>(k) / ramp;
          samples[i + k] *= g;
          samples[i + seg_len - 1 - k] *= g;
        }
      }
      i += seg_len;
      active = !active;
    }
  }

  detail::scale_to_seeded_rms(samples, rng);
  return AudioClip{std::move(samples), spec.sample_rate_hz};
}

inline AudioClip synthesize(const SynthSpec& spec) {
  return spec.kind == SynthKind::music ? synth_music(spec) : synth_noise(spec);
}

}  // namespace noisytag
