#pragma once

// Band-limited sample-rate conversion with a Kaiser-windowed sinc kernel,
// evaluated directly per output sample. Quality target: tonal content
// survives an octave down-conversion with its spectral peak intact.

#include <cmath>
#include <cstddef>
#include <vector>

#include "noisytag/audio.hpp"
#include "noisytag/errors.hpp"

namespace noisytag {

namespace detail {

// Zeroth-order modified Bessel function of the first kind (series form).
inline double bessel_i0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double half_x = x / 2.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half_x / k) * (half_x / k);
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

inline double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = 3.14159265358979323846 * x;
  return std::sin(px) / px;
}

}  // namespace detail

inline AudioClip resample(const AudioClip& clip, int target_rate_hz) {
  if (target_rate_hz <= 0) throw BadSpec("resample: non-positive target rate");
  if (clip.sample_rate_hz == target_rate_hz) return clip;
  validate(clip);

  const double ratio = static_cast<double>(target_rate_hz) / clip.sample_rate_hz;
  // Cutoff sits just under the lower of the two Nyquist frequencies.
  const double scale = std::min(1.0, ratio) * 0.945;
  constexpr int kZeroCrossings = 24;
  constexpr double kKaiserBeta = 9.0;
  const double half_width = kZeroCrossings / scale;
  const double i0_beta = detail::bessel_i0(kKaiserBeta);

  const std::size_t in_len = clip.samples.size();
  const std::size_t out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(in_len) * ratio));

  AudioClip out;
  out.sample_rate_hz = target_rate_hz;
  out.samples.resize(out_len);

  for (std::size_t m = 0; m < out_len; ++m) {
    const double center = static_cast<double>(m) / ratio;
    const auto k_lo = static_cast<long long>(std::ceil(center - half_width));
    const auto k_hi = static_cast<long long>(std::floor(center + half_width));
    double acc = 0.0;
    for (long long k = k_lo; k <= k_hi; ++k) {
      if (k < 0 || k >= static_cast<long long>(in_len)) continue;
      const double x = center - static_cast<double>(k);
      const double window_arg = x / half_width;
      const double kaiser =
          detail::bessel_i0(kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - window_arg * window_arg))) /
          i0_beta;
      acc += static_cast<double>(clip.samples[static_cast<std::size_t>(k)]) *
             scale * detail::sinc(scale * x) * kaiser;
    }
    out.samples[m] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace noisytag
