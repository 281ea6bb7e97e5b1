#include "pitchstyle/wavelet.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pitchstyle/error.hpp"

namespace pitchstyle {
namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Expected per-level input lengths n_0 .. n_L for a decomposition.
std::vector<std::size_t> stage_lengths(std::size_t n, int levels) {
  std::vector<std::size_t> lengths{n};
  for (int j = 0; j < levels; ++j) {
    n = (n + 1) / 2;
    lengths.push_back(n);
  }
  return lengths;
}

}  // namespace

WaveletDecomposition dwt(std::span<const double> x, int levels) {
  if (levels < 1) fail(ErrorKind::kInvalidArgument, "dwt needs at least one level");
  if (levels >= 63 || x.size() < (std::size_t{1} << levels)) {
    fail(ErrorKind::kInvalidArgument,
         "dwt level " + std::to_string(levels) + " too large for length " +
             std::to_string(x.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorKind::kInvalidArgument, "dwt input is not finite");
  }

  WaveletDecomposition out;
  out.original_length = x.size();
  std::vector<double> current(x.begin(), x.end());
  for (int j = 0; j < levels; ++j) {
    const std::size_t pad = current.size() % 2;
    if (pad) current.push_back(current.back());
    const std::size_t half = current.size() / 2;
    std::vector<double> approx(half);
    std::vector<double> detail(half);
    for (std::size_t k = 0; k < half; ++k) {
      const double a = current[2 * k];
      const double b = current[2 * k + 1];
      approx[k] = (a + b) * kInvSqrt2;
      detail[k] = (a - b) * kInvSqrt2;
    }
    out.padding.push_back(pad);
    out.details.push_back(std::move(detail));
    current = std::move(approx);
  }
  out.approx = std::move(current);
  return out;
}

std::vector<double> idwt(const WaveletDecomposition& d) {
  const int levels = d.levels();
  if (levels < 1 || d.padding.size() != d.details.size()) {
    fail(ErrorKind::kShapeMismatch, "decomposition has no levels or bad padding record");
  }
  const auto lengths = stage_lengths(d.original_length, levels);
  if (d.approx.size() != lengths.back()) {
    fail(ErrorKind::kShapeMismatch, "approximation length disagrees with original_length");
  }
  for (int j = 0; j < levels; ++j) {
    if (d.details[j].size() != lengths[j + 1] ||
        d.padding[j] != lengths[j] % 2) {
      fail(ErrorKind::kShapeMismatch,
           "detail level " + std::to_string(j + 1) + " has inconsistent length");
    }
  }

  std::vector<double> current = d.approx;
  for (int j = levels - 1; j >= 0; --j) {
    const auto& detail = d.details[j];
    std::vector<double> up(2 * current.size());
    for (std::size_t k = 0; k < current.size(); ++k) {
      up[2 * k] = (current[k] + detail[k]) * kInvSqrt2;
      up[2 * k + 1] = (current[k] - detail[k]) * kInvSqrt2;
    }
    up.resize(lengths[j]);
    current = std::move(up);
  }
  return current;
}

std::vector<double> reconstruct_band(const WaveletDecomposition& d, Band band) {
  WaveletDecomposition partial = d;
  if (band == Band::kLow) {
    for (auto& detail : partial.details) detail.assign(detail.size(), 0.0);
  } else {
    partial.approx.assign(partial.approx.size(), 0.0);
  }
  return idwt(partial);
}

BandEdges band_edges(double frame_rate, int levels) {
  if (!(frame_rate > 0.0) || levels < 1) {
    fail(ErrorKind::kInvalidArgument, "band_edges needs frame_rate > 0 and levels >= 1");
  }
  BandEdges edges;
  edges.approx = {0.0, frame_rate / std::ldexp(1.0, levels + 1)};
  for (int j = 1; j <= levels; ++j) {
    edges.details.push_back(
        {frame_rate / std::ldexp(1.0, j + 1), frame_rate / std::ldexp(1.0, j)});
  }
  return edges;
}

}  // namespace pitchstyle
