#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pitchstyle/contour.hpp"

namespace pitchstyle {

/// Decision thresholds of the rule-based straight/vibrato classifier.
struct EstimatorConfig {
  double extent_threshold_cents = 20.0;
  double rate_min_hz = 4.0;  // accepted vibrato rates
  double rate_max_hz = 9.0;
  double band_low_hz = 5.0;  // band whose energy share is reported
  double band_high_hz = 8.0;
  double min_band_fraction = 0.5;
  double search_low_hz = 3.0;  // autocorrelation lag search range
  double search_high_hz = 10.0;
  // The shortest lag whose correlation peak reaches this share of the best
  // peak wins, which keeps multiples of the period from being picked.
  double peak_tolerance = 0.85;
  double min_window_s = 0.5;
};

struct VibratoEstimate {
  double rate_hz = 0.0;
  double extent_cents = 0.0;
  double band_energy_fraction = 0.0;
  Style label = Style::kStraight;
};

/// Longest run of consecutive voiced frames (empty range if none).
FrameRange longest_voiced_run(const F0Contour& contour);

/// Measures an already windowed high band (natural-log units).
VibratoEstimate estimate_high_band(std::span<const double> high, double frame_rate,
                                   const EstimatorConfig& config = {});

/// Decomposes the whole contour, then measures the high band on `window`
/// (default: the longest voiced run). The window must be fully voiced and
/// at least config.min_window_s long.
VibratoEstimate estimate(const F0Contour& contour, int levels = kDefaultLevels,
                         std::optional<FrameRange> window = std::nullopt,
                         const EstimatorConfig& config = {});

/// Share of the energy of a known injected modulation (natural-log units,
/// one value per frame) that lands in the high band at `levels`:
/// <h, m> / <m, m>, clamped to [0, 1].
double level_energy_capture(const F0Contour& contour, std::span<const double> modulation,
                            int levels);

struct LabeledContour {
  F0Contour contour;
  Style label = Style::kStraight;
};

/// Fraction of items whose estimated label matches the ground truth.
double style_accuracy(std::span<const LabeledContour> corpus, int levels = kDefaultLevels,
                      const EstimatorConfig& config = {});

}  // namespace pitchstyle
