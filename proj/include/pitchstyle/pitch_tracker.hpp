#pragma once

#include "pitchstyle/contour.hpp"

namespace pitchstyle {

struct TrackerConfig {
  double f0_floor = 60.0;
  double f0_ceil = 1000.0;
  int hop = kDefaultHop;
  int channels_per_octave = 2;
  // Maximum coefficient of variation among the four interval estimates for
  // a frame to count as voiced.
  double voicing_reliability_threshold = 0.15;
  // Frames whose local RMS is below this are unvoiced regardless of score.
  double amplitude_floor = 1e-3;
};

/// Throws Error(kInvalidArgument) when the config is unusable at this rate.
void validate(const TrackerConfig& config, int sample_rate);

// Frame i is centred at sample i * hop; output has floor(samples / hop)
// frames at frame_rate = sample_rate / hop.
//
// For each candidate band the signal is low-passed by a Nuttall window two
// band periods long. Rising/falling zero crossings and peaks/dips of the
// filtered signal give four interval series, each interpolated onto the
// frame grid. A band's candidate is the mean of the four estimates and its
// score their coefficient of variation; candidates outside
// [band / 2, band] or [f0_floor, f0_ceil] are discarded. The best-scoring
// candidate wins each frame.
F0Contour extract_f0(const AudioBuffer& audio, const TrackerConfig& config = {});

/// Fills unvoiced gaps log-linearly between voiced neighbours and holds the
/// nearest voiced value at the edges. Voiced flags are left untouched, so
/// unvoiced frames of the result carry the filled values.
F0Contour interpolate_unvoiced(const F0Contour& contour);

}  // namespace pitchstyle
