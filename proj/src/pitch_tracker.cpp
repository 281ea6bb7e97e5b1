#include "pitchstyle/pitch_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "pitchstyle/error.hpp"

namespace pitchstyle {
namespace {

constexpr double kNoScore = std::numeric_limits<double>::infinity();

std::vector<double> nuttall_window(std::size_t n) {
  std::vector<double> w(n);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / denom;
    w[i] = 0.355768 - 0.487396 * std::cos(t) + 0.144232 * std::cos(2 * t) -
           0.012604 * std::cos(3 * t);
  }
  return w;
}

// Zero-phase FIR low-pass (unit DC gain); samples outside the signal count
// as zero.
std::vector<double> lowpass(const std::vector<double>& x, double band_hz,
                            int sample_rate) {
  const auto half = static_cast<std::size_t>(
      std::max(1.0, std::round(sample_rate / band_hz / 2.0)));
  auto taps = nuttall_window(4 * half + 1);
  const double gain = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (double& t : taps) t /= gain;

  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto centre = static_cast<std::ptrdiff_t>(2 * half);
  const auto len = static_cast<std::ptrdiff_t>(taps.size());
  std::vector<double> y(x.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t k0 = std::max<std::ptrdiff_t>(0, i + centre - (n - 1));
    const std::ptrdiff_t k1 = std::min<std::ptrdiff_t>(len - 1, i + centre);
    double acc = 0.0;
    for (std::ptrdiff_t k = k0; k <= k1; ++k) acc += taps[k] * x[i + centre - k];
    y[i] = acc;
  }
  return y;
}

// Interval series from one event type: f0 = rate / (gap between successive
// events), located at the midpoint of the gap (in samples).
struct IntervalSeries {
  std::vector<double> location;
  std::vector<double> f0;
};

// Sub-sample positions where s crosses zero going up (rising) or down.
std::vector<double> crossings(const std::vector<double>& s, bool rising,
                              double offset) {
  std::vector<double> at;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double a = s[i];
    const double b = s[i + 1];
    const bool hit = rising ? (a < 0.0 && b >= 0.0) : (a > 0.0 && b <= 0.0);
    if (hit) at.push_back(static_cast<double>(i) + a / (a - b) + offset);
  }
  return at;
}

IntervalSeries to_intervals(const std::vector<double>& events, int sample_rate) {
  IntervalSeries s;
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    const double gap = events[i + 1] - events[i];
    if (gap <= 0.0) continue;
    s.location.push_back(0.5 * (events[i] + events[i + 1]));
    s.f0.push_back(sample_rate / gap);
  }
  return s;
}

// Linear interpolation of the series at position t; NaN outside its span.
double interpolate_at(const IntervalSeries& s, double t) {
  if (s.location.size() < 2 || t < s.location.front() || t > s.location.back()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const auto it = std::upper_bound(s.location.begin(), s.location.end(), t);
  if (it == s.location.end()) return s.f0.back();
  const auto hi = static_cast<std::size_t>(it - s.location.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - s.location[lo]) / (s.location[hi] - s.location[lo]);
  return s.f0[lo] + w * (s.f0[hi] - s.f0[lo]);
}

struct Candidate {
  double f0 = 0.0;
  double score = kNoScore;
};

std::vector<Candidate> band_candidates(const std::vector<double>& x,
                                       double band_hz, std::size_t frames,
                                       const TrackerConfig& cfg,
                                       int sample_rate) {
  const auto y = lowpass(x, band_hz, sample_rate);
  std::vector<double> dy(y.size() > 1 ? y.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < y.size(); ++i) dy[i] = y[i + 1] - y[i];

  const IntervalSeries series[4] = {
      to_intervals(crossings(y, true, 0.0), sample_rate),
      to_intervals(crossings(y, false, 0.0), sample_rate),
      to_intervals(crossings(dy, false, 0.5), sample_rate),  // peaks
      to_intervals(crossings(dy, true, 0.5), sample_rate),   // dips
  };

  std::vector<Candidate> out(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const double t = static_cast<double>(f) * cfg.hop;
    double est[4];
    bool ok = true;
    for (int k = 0; k < 4 && ok; ++k) {
      est[k] = interpolate_at(series[k], t);
      ok = std::isfinite(est[k]);
    }
    if (!ok) continue;
    const double mean = (est[0] + est[1] + est[2] + est[3]) / 4.0;
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean);
    const double cv = std::sqrt(var / 3.0) / mean;
    if (mean > band_hz || mean < band_hz / 2.0 || mean < cfg.f0_floor ||
        mean > cfg.f0_ceil) {
      continue;
    }
    out[f] = {mean, cv};
  }
  return out;
}

}  // namespace

void validate(const TrackerConfig& c, int sample_rate) {
  if (!(c.f0_floor > 0.0) || !(c.f0_floor < c.f0_ceil) ||
      !(c.f0_ceil < sample_rate / 2.0)) {
    fail(ErrorKind::kInvalidArgument,
         "tracker needs 0 < f0_floor < f0_ceil < sample_rate / 2");
  }
  if (c.hop < 1 || c.channels_per_octave < 1) {
    fail(ErrorKind::kInvalidArgument, "tracker needs hop >= 1 and channels_per_octave >= 1");
  }
  if (!(c.voicing_reliability_threshold >= 0.0) || !(c.amplitude_floor >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "tracker thresholds must be non-negative");
  }
}

F0Contour extract_f0(const AudioBuffer& audio, const TrackerConfig& cfg) {
  validate(audio);
  validate(cfg, audio.sample_rate);
  const std::size_t n = audio.samples.size();
  if (n < 2 * static_cast<std::size_t>(cfg.hop)) {
    fail(ErrorKind::kInvalidArgument,
         "audio of " + std::to_string(n) + " samples is shorter than two hops");
  }
  const std::size_t frames = n / cfg.hop;

  std::vector<double> x = audio.samples;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  for (double& v : x) v -= mean;

  // Bands at f0_floor * 2^(i / channels) up to twice the ceiling, so every
  // f0 in range sits in the upper half of at least one band.
  std::vector<double> bands;
  for (int i = 1;; ++i) {
    const double b = cfg.f0_floor * std::exp2(static_cast<double>(i) / cfg.channels_per_octave);
    if (b > 2.0 * cfg.f0_ceil || b >= audio.sample_rate / 2.0) break;
    bands.push_back(b);
  }

  std::vector<Candidate> best(frames);
  for (double band : bands) {
    const auto cands = band_candidates(x, band, frames, cfg, audio.sample_rate);
    for (std::size_t f = 0; f < frames; ++f) {
      if (cands[f].score < best[f].score) best[f] = cands[f];
    }
  }

  F0Contour out;
  out.frame_rate = static_cast<double>(audio.sample_rate) / cfg.hop;
  out.f0_hz.assign(frames, 0.0);
  out.voiced.assign(frames, false);
  const auto half_hop = static_cast<std::ptrdiff_t>(cfg.hop);
  for (std::size_t f = 0; f < frames; ++f) {
    const auto centre = static_cast<std::ptrdiff_t>(f * cfg.hop);
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, centre - half_hop);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n), centre + half_hop);
    double energy = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) energy += x[i] * x[i];
    const double rms = hi > lo ? std::sqrt(energy / static_cast<double>(hi - lo)) : 0.0;
    if (best[f].score <= cfg.voicing_reliability_threshold && rms > cfg.amplitude_floor) {
      out.f0_hz[f] = best[f].f0;
      out.voiced[f] = true;
    }
  }
  return out;
}

F0Contour interpolate_unvoiced(const F0Contour& contour) {
  // Values on unvoiced frames are ignored, so an already interpolated
  // contour is accepted as input.
  if (contour.f0_hz.size() != contour.voiced.size()) {
    fail(ErrorKind::kInvalidArgument, "contour f0 and voiced sequences differ in length");
  }
  for (std::size_t i = 0; i < contour.size(); ++i) {
    if (contour.voiced[i] && !(contour.f0_hz[i] > 0.0 && std::isfinite(contour.f0_hz[i]))) {
      fail(ErrorKind::kInvalidArgument,
           "voiced frame " + std::to_string(i) + " has non-positive f0");
    }
  }
  std::vector<std::size_t> voiced_at;
  for (std::size_t i = 0; i < contour.size(); ++i) {
    if (contour.voiced[i]) voiced_at.push_back(i);
  }
  if (voiced_at.empty()) {
    fail(ErrorKind::kInvalidArgument, "cannot interpolate a fully unvoiced contour");
  }
  F0Contour out = contour;
  for (std::size_t i = 0; i < voiced_at.front(); ++i) out.f0_hz[i] = contour.f0_hz[voiced_at.front()];
  for (std::size_t i = voiced_at.back() + 1; i < contour.size(); ++i) {
    out.f0_hz[i] = contour.f0_hz[voiced_at.back()];
  }
  for (std::size_t k = 0; k + 1 < voiced_at.size(); ++k) {
    const std::size_t a = voiced_at[k];
    const std::size_t b = voiced_at[k + 1];
    if (b == a + 1) continue;
    const double la = std::log(contour.f0_hz[a]);
    const double lb = std::log(contour.f0_hz[b]);
    for (std::size_t i = a + 1; i < b; ++i) {
      const double w = static_cast<double>(i - a) / static_cast<double>(b - a);
      out.f0_hz[i] = std::exp(la + w * (lb - la));
    }
  }
  return out;
}

}  // namespace pitchstyle
