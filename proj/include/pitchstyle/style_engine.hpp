#pragma once

#include <optional>
#include <vector>

#include "pitchstyle/contour.hpp"

namespace pitchstyle {

/// Low/high split of a natural-log F0 contour. exp(low + high) reproduces
/// the gap-filled source contour.
struct StyleBands {
  std::vector<double> low;
  std::vector<double> high;
  std::vector<bool> voiced;
  double frame_rate = kDefaultFrameRate;
  int levels = kDefaultLevels;

  std::size_t size() const { return low.size(); }
};

/// High-band multiplier: global, optionally overridden per frame.
struct ScalingSpec {
  double global_factor = 1.0;
  std::optional<std::vector<double>> frame_factors;

  static ScalingSpec global(double factor) { return {factor, std::nullopt}; }
  double factor_at(std::size_t frame) const {
    return frame_factors ? (*frame_factors)[frame] : global_factor;
  }
};

struct VibratoParams {
  double rate_hz = 6.0;
  double extent_cents = 50.0;    // peak deviation
  double onset_delay_s = 0.0;    // linear ramp-in
  double phase_rad = 0.0;
};

StyleBands decompose(const F0Contour& contour, int levels = kDefaultLevels);

/// f0[i] = exp(low[i] + a_i * high[i]) on voiced frames, 0 elsewhere.
F0Contour recompose(const StyleBands& bands, const ScalingSpec& scaling);

F0Contour shift_pitch_range(const F0Contour& contour, double src_mean_hz,
                            double tgt_mean_hz);

double mean_f0(const F0Contour& contour);

/// Adds a log-domain sinusoid of the given extent to frames [begin, end):
/// log f0 += (extent / 1200) ln 2 * ramp(t) * sin(2 pi rate t + phase),
/// with t measured from segment.begin.
F0Contour synth_vibrato(const F0Contour& contour, const VibratoParams& params,
                        FrameRange segment);

/// The modulation synth_vibrato would add, in natural-log units, for a
/// segment of the given length.
std::vector<double> vibrato_modulation(const VibratoParams& params,
                                       std::size_t frames, double frame_rate);

F0Contour remove_vibrato(const F0Contour& contour, int levels = kDefaultLevels);

}  // namespace pitchstyle
