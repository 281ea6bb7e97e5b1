#include "pitchstyle/vibrato_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "pitchstyle/error.hpp"
#include "pitchstyle/style_engine.hpp"

namespace pitchstyle {
namespace {

double normalized_autocorrelation(std::span<const double> h, std::size_t lag) {
  double cross = 0.0;
  double e0 = 0.0;
  double e1 = 0.0;
  for (std::size_t i = 0; i + lag < h.size(); ++i) {
    cross += h[i] * h[i + lag];
    e0 += h[i] * h[i];
    e1 += h[i + lag] * h[i + lag];
  }
  const double denom = std::sqrt(e0 * e1);
  return denom > 0.0 ? cross / denom : 0.0;
}

double dominant_rate(std::span<const double> h, double frame_rate,
                     const EstimatorConfig& cfg) {
  constexpr std::size_t kMinOverlap = 8;
  if (h.size() < kMinOverlap + 3) return 0.0;
  const auto lag_lo = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(frame_rate / cfg.search_high_hz)));
  const auto lag_hi = std::min<std::size_t>(
      h.size() - kMinOverlap, static_cast<std::size_t>(std::ceil(frame_rate / cfg.search_low_hz)));
  if (lag_hi <= lag_lo) return 0.0;

  // r[k - lag_lo + 1] for k in [lag_lo - 1, lag_hi + 1]
  std::vector<double> r;
  for (std::size_t k = lag_lo - 1; k <= lag_hi + 1; ++k) r.push_back(normalized_autocorrelation(h, k));

  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    if (r[i] > 0.0 && r[i] >= r[i - 1] && r[i] >= r[i + 1]) peaks.push_back(i);
  }
  if (peaks.empty()) return 0.0;
  double best = 0.0;
  for (std::size_t i : peaks) best = std::max(best, r[i]);
  std::size_t chosen = peaks.front();
  for (std::size_t i : peaks) {
    if (r[i] >= cfg.peak_tolerance * best) {
      chosen = i;
      break;
    }
  }
  const double a = r[chosen - 1];
  const double b = r[chosen];
  const double c = r[chosen + 1];
  const double curvature = a - 2.0 * b + c;
  const double shift = curvature < 0.0 ? 0.5 * (a - c) / curvature : 0.0;
  const double lag = static_cast<double>(lag_lo - 1 + chosen) + std::clamp(shift, -0.5, 0.5);
  return frame_rate / lag;
}

// Energy share of [band_low, band_high] in a Hann-windowed periodogram. The
// band is widened by the window's main-lobe half-width (2 * rate / n) so a
// sinusoid at a band edge is not split in half by spectral leakage.
double band_fraction(std::span<const double> h, double frame_rate,
                     const EstimatorConfig& cfg) {
  const std::size_t n = h.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(n);
  std::vector<double> xw(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                          static_cast<double>(n - 1));
    xw[i] = (h[i] - mean) * w;
    total += xw[i] * xw[i];
  }
  if (total <= 0.0) return 0.0;

  std::size_t nfft = 4096;
  while (nfft < 8 * n) nfft *= 2;
  const double slack = 2.0 * frame_rate / static_cast<double>(n);
  const double lo = std::max(0.0, cfg.band_low_hz - slack);
  const double hi = std::min(frame_rate / 2.0, cfg.band_high_hz + slack);
  const auto k_lo = static_cast<std::size_t>(std::ceil(lo * nfft / frame_rate));
  const auto k_hi = static_cast<std::size_t>(std::floor(hi * nfft / frame_rate));

  double band = 0.0;
  for (std::size_t k = std::max<std::size_t>(k_lo, 1); k <= k_hi && 2 * k < nfft; ++k) {
    const double omega = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nfft);
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      re += xw[i] * std::cos(omega * static_cast<double>(i));
      im -= xw[i] * std::sin(omega * static_cast<double>(i));
    }
    band += 2.0 * (re * re + im * im);
  }
  // Parseval: sum over all nfft bins of |X_k|^2 equals nfft * sum x^2.
  return std::clamp(band / (static_cast<double>(nfft) * total), 0.0, 1.0);
}

}  // namespace

FrameRange longest_voiced_run(const F0Contour& contour) {
  FrameRange best;
  std::size_t start = 0;
  bool in_run = false;
  for (std::size_t i = 0; i <= contour.size(); ++i) {
    const bool v = i < contour.size() && contour.voiced[i];
    if (v && !in_run) {
      start = i;
      in_run = true;
    } else if (!v && in_run) {
      if (i - start > best.size()) best = {start, i};
      in_run = false;
    }
  }
  return best;
}

VibratoEstimate estimate_high_band(std::span<const double> high, double frame_rate,
                                   const EstimatorConfig& cfg) {
  VibratoEstimate e;
  if (high.empty()) return e;
  double energy = 0.0;
  for (double v : high) energy += v * v;
  const double rms = std::sqrt(energy / static_cast<double>(high.size()));
  e.extent_cents = 1200.0 / std::numbers::ln2 * std::numbers::sqrt2 * rms;
  e.rate_hz = dominant_rate(high, frame_rate, cfg);
  e.band_energy_fraction = band_fraction(high, frame_rate, cfg);
  const bool vibrato = e.extent_cents >= cfg.extent_threshold_cents &&
                       e.rate_hz >= cfg.rate_min_hz && e.rate_hz <= cfg.rate_max_hz &&
                       e.band_energy_fraction >= cfg.min_band_fraction;
  e.label = vibrato ? Style::kVibrato : Style::kStraight;
  return e;
}

VibratoEstimate estimate(const F0Contour& contour, int levels,
                         std::optional<FrameRange> window, const EstimatorConfig& cfg) {
  validate(contour);
  const FrameRange w = window.value_or(longest_voiced_run(contour));
  if (w.begin > w.end || w.end > contour.size()) {
    fail(ErrorKind::kInvalidArgument, "analysis window lies outside the contour");
  }
  if (static_cast<double>(w.size()) < cfg.min_window_s * contour.frame_rate - 1e-9) {
    fail(ErrorKind::kInvalidArgument,
         "analysis window of " + std::to_string(w.size()) + " frames is shorter than " +
             std::to_string(cfg.min_window_s) + " s");
  }
  for (std::size_t i = w.begin; i < w.end; ++i) {
    if (!contour.voiced[i]) {
      fail(ErrorKind::kInvalidArgument,
           "analysis window includes unvoiced frame " + std::to_string(i));
    }
  }
  const StyleBands bands = decompose(contour, levels);
  return estimate_high_band(std::span<const double>(bands.high).subspan(w.begin, w.size()),
                            contour.frame_rate, cfg);
}

double level_energy_capture(const F0Contour& contour, std::span<const double> modulation,
                            int levels) {
  if (modulation.size() != contour.size()) {
    fail(ErrorKind::kShapeMismatch, "modulation length differs from contour length");
  }
  const StyleBands bands = decompose(contour, levels);
  double hm = 0.0;
  double mm = 0.0;
  for (std::size_t i = 0; i < modulation.size(); ++i) {
    hm += bands.high[i] * modulation[i];
    mm += modulation[i] * modulation[i];
  }
  if (!(mm > 0.0)) fail(ErrorKind::kInvalidArgument, "modulation has no energy");
  // The band split is an orthogonal projection P, so <h, m> = |Pm|^2 plus a
  // zero-mean cross term from whatever the contour carried before.
  return std::clamp(hm / mm, 0.0, 1.0);
}

double style_accuracy(std::span<const LabeledContour> corpus, int levels,
                      const EstimatorConfig& cfg) {
  if (corpus.empty()) fail(ErrorKind::kInvalidArgument, "style_accuracy of an empty corpus");
  std::size_t hits = 0;
  for (const auto& item : corpus) {
    if (estimate(item.contour, levels, std::nullopt, cfg).label == item.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(corpus.size());
}

}  // namespace pitchstyle
