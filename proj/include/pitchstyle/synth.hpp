#pragma once

#include <filesystem>

#include "pitchstyle/contour.hpp"

namespace pitchstyle {

inline constexpr int kDefaultPartials = 8;
inline constexpr double kFadeSeconds = 0.010;

/// Additive harmonic rendering of a contour. Partial k has amplitude 1/k,
/// the sum is normalised to a peak of 0.9, and phase runs continuously.
/// F0 is linearly interpolated between frame instants (frame f sits at
/// sample f * sample_rate / frame_rate) and held through unvoiced frames,
/// whose amplitude fades to zero over kFadeSeconds. Partials at or above
/// Nyquist are dropped.
AudioBuffer render_harmonics(const F0Contour& contour, int partials = kDefaultPartials,
                             int sample_rate = kDefaultSampleRate);

void synth_demo(const F0Contour& contour, const std::filesystem::path& out_wav,
                int partials = kDefaultPartials);

}  // namespace pitchstyle
