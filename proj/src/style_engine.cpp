#include "pitchstyle/style_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pitchstyle/error.hpp"
#include "pitchstyle/pitch_tracker.hpp"
#include "pitchstyle/wavelet.hpp"

namespace pitchstyle {
namespace {

void validate(const ScalingSpec& s, std::size_t frames) {
  auto check = [](double a) {
    if (!std::isfinite(a) || a < 0.0) {
      fail(ErrorKind::kInvalidArgument, "scaling factors must be finite and >= 0");
    }
  };
  check(s.global_factor);
  if (s.frame_factors) {
    if (s.frame_factors->size() != frames) {
      fail(ErrorKind::kShapeMismatch,
           "frame_factors has " + std::to_string(s.frame_factors->size()) +
               " entries for " + std::to_string(frames) + " frames");
    }
    for (double a : *s.frame_factors) check(a);
  }
}

void validate(const VibratoParams& p) {
  if (!std::isfinite(p.rate_hz) || p.rate_hz < 3.0 || p.rate_hz > 10.0) {
    fail(ErrorKind::kInvalidArgument, "vibrato rate must lie in [3, 10] Hz");
  }
  if (!std::isfinite(p.extent_cents) || p.extent_cents < 0.0 ||
      !std::isfinite(p.onset_delay_s) || p.onset_delay_s < 0.0 ||
      !std::isfinite(p.phase_rad)) {
    fail(ErrorKind::kInvalidArgument, "vibrato extent and onset delay must be >= 0");
  }
}

}  // namespace

StyleBands decompose(const F0Contour& contour, int levels) {
  validate(contour);
  if (levels < 1 || levels >= 63 || contour.size() < (std::size_t{1} << levels)) {
    fail(ErrorKind::kInvalidArgument,
         "contour of " + std::to_string(contour.size()) +
             " frames is too short for " + std::to_string(levels) + " levels");
  }
  const F0Contour filled = interpolate_unvoiced(contour);
  std::vector<double> log_f0(filled.size());
  for (std::size_t i = 0; i < filled.size(); ++i) log_f0[i] = std::log(filled.f0_hz[i]);

  const auto d = dwt(log_f0, levels);
  StyleBands bands;
  bands.low = reconstruct_band(d, Band::kLow);
  bands.high = reconstruct_band(d, Band::kHigh);
  bands.voiced = contour.voiced;
  bands.frame_rate = contour.frame_rate;
  bands.levels = levels;
  return bands;
}

F0Contour recompose(const StyleBands& bands, const ScalingSpec& scaling) {
  const std::size_t n = bands.size();
  if (bands.high.size() != n || bands.voiced.size() != n) {
    fail(ErrorKind::kShapeMismatch, "style bands differ in length");
  }
  validate(scaling, n);
  F0Contour out;
  out.frame_rate = bands.frame_rate;
  out.f0_hz.assign(n, 0.0);
  out.voiced = bands.voiced;
  for (std::size_t i = 0; i < n; ++i) {
    if (bands.voiced[i]) {
      out.f0_hz[i] = std::exp(bands.low[i] + scaling.factor_at(i) * bands.high[i]);
    }
  }
  return out;
}

F0Contour shift_pitch_range(const F0Contour& contour, double src_mean_hz,
                            double tgt_mean_hz) {
  validate(contour);
  if (!(src_mean_hz > 0.0) || !(tgt_mean_hz > 0.0) || !std::isfinite(src_mean_hz) ||
      !std::isfinite(tgt_mean_hz)) {
    fail(ErrorKind::kInvalidArgument, "pitch-range means must be positive");
  }
  const double ratio = tgt_mean_hz / src_mean_hz;
  F0Contour out = contour;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.voiced[i]) out.f0_hz[i] *= ratio;
  }
  return out;
}

double mean_f0(const F0Contour& contour) {
  validate(contour);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < contour.size(); ++i) {
    if (contour.voiced[i]) {
      sum += contour.f0_hz[i];
      ++n;
    }
  }
  if (n == 0) fail(ErrorKind::kInvalidArgument, "mean_f0 of a contour with no voiced frames");
  return sum / static_cast<double>(n);
}

std::vector<double> vibrato_modulation(const VibratoParams& p, std::size_t frames,
                                       double frame_rate) {
  validate(p);
  std::vector<double> m(frames);
  const double depth = p.extent_cents / 1200.0 * std::numbers::ln2;
  for (std::size_t i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / frame_rate;
    const double ramp = p.onset_delay_s > 0.0 ? std::min(1.0, t / p.onset_delay_s) : 1.0;
    m[i] = depth * ramp * std::sin(2.0 * std::numbers::pi * p.rate_hz * t + p.phase_rad);
  }
  return m;
}

F0Contour synth_vibrato(const F0Contour& contour, const VibratoParams& params,
                        FrameRange segment) {
  validate(contour);
  if (segment.begin > segment.end || segment.end > contour.size()) {
    fail(ErrorKind::kInvalidArgument, "vibrato segment lies outside the contour");
  }
  for (std::size_t i = segment.begin; i < segment.end; ++i) {
    if (!contour.voiced[i]) {
      fail(ErrorKind::kInvalidArgument,
           "vibrato segment includes unvoiced frame " + std::to_string(i));
    }
  }
  const auto mod = vibrato_modulation(params, segment.size(), contour.frame_rate);
  F0Contour out = contour;
  for (std::size_t i = 0; i < mod.size(); ++i) {
    out.f0_hz[segment.begin + i] = contour.f0_hz[segment.begin + i] * std::exp(mod[i]);
  }
  return out;
}

F0Contour remove_vibrato(const F0Contour& contour, int levels) {
  return recompose(decompose(contour, levels), ScalingSpec::global(0.0));
}

}  // namespace pitchstyle
