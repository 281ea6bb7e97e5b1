#include "pitchstyle/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pitchstyle/error.hpp"
#include "pitchstyle/pitch_tracker.hpp"
#include "pitchstyle/signal_io.hpp"

namespace pitchstyle {

AudioBuffer render_harmonics(const F0Contour& contour, int partials, int sample_rate) {
  validate(contour);
  if (partials < 1) fail(ErrorKind::kInvalidArgument, "partials must be >= 1");
  if (sample_rate <= 0) fail(ErrorKind::kInvalidArgument, "sample_rate must be > 0");
  const double samples_per_frame = sample_rate / contour.frame_rate;
  const auto length = static_cast<std::size_t>(std::llround(contour.size() * samples_per_frame));
  AudioBuffer out{std::vector<double>(length, 0.0), sample_rate};
  if (contour.voiced_count() == 0) return out;

  const F0Contour filled = interpolate_unvoiced(contour);
  double norm = 0.0;
  for (int k = 1; k <= partials; ++k) norm += 1.0 / k;
  const double gain = 0.9 / norm;
  const double fade_step = 1.0 / std::max(1.0, kFadeSeconds * sample_rate);
  const double nyquist = 0.5 * sample_rate;

  double phase = 0.0;  // cycles of the fundamental
  double envelope = contour.voiced[0] ? 1.0 : 0.0;
  const std::size_t last = contour.size() - 1;
  for (std::size_t n = 0; n < length; ++n) {
    const double pos = static_cast<double>(n) / samples_per_frame;
    const auto f = std::min(static_cast<std::size_t>(pos), last);
    const double frac = f < last ? pos - static_cast<double>(f) : 0.0;
    const double f0 = filled.f0_hz[f] + frac * (filled.f0_hz[std::min(f + 1, last)] - filled.f0_hz[f]);
    const double target = contour.voiced[f] ? 1.0 : 0.0;
    envelope = envelope < target ? std::min(target, envelope + fade_step)
                                 : std::max(target, envelope - fade_step);

    double s = 0.0;
    if (envelope > 0.0) {
      for (int k = 1; k <= partials && k * f0 < nyquist; ++k) {
        s += std::sin(2.0 * std::numbers::pi * k * phase) / k;
      }
    }
    out.samples[n] = gain * envelope * s;
    phase += f0 / sample_rate;
    phase -= std::floor(phase);
  }
  return out;
}

void synth_demo(const F0Contour& contour, const std::filesystem::path& out_wav, int partials) {
  write_wav(out_wav, render_harmonics(contour, partials, kDefaultSampleRate));
}

}  // namespace pitchstyle
