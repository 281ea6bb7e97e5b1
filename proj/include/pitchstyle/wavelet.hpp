#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pitchstyle {

/// Multilevel orthonormal Haar (db1) decomposition.
///
/// details[j - 1] holds D_j (j = 1 is the finest level); approx holds A_L.
/// Stage j halves a sequence of length n_{j-1}; when that length is odd the
/// last sample is replicated first and padding[j - 1] records the extra
/// sample, so synthesis can truncate back to n_{j-1} exactly.
struct WaveletDecomposition {
  std::vector<double> approx;
  std::vector<std::vector<double>> details;
  std::vector<std::size_t> padding;
  std::size_t original_length = 0;

  int levels() const { return static_cast<int>(details.size()); }
};

WaveletDecomposition dwt(std::span<const double> x, int levels);

std::vector<double> idwt(const WaveletDecomposition& decomposition);

enum class Band { kLow, kHigh };

// kLow synthesizes the approximation alone, kHigh the details alone; the two
// sum to idwt() of the full decomposition.
std::vector<double> reconstruct_band(const WaveletDecomposition& decomposition,
                                     Band band);

struct FrequencyInterval {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

struct BandEdges {
  FrequencyInterval approx;
  std::vector<FrequencyInterval> details;  // details[j - 1] for level j
};

/// Nominal pass bands of the approximation and each detail level at the
/// given frame rate.
BandEdges band_edges(double frame_rate, int levels);

}  // namespace pitchstyle
