#pragma once

#include <cstddef>
#include <vector>

namespace pitchstyle {

inline constexpr int kDefaultSampleRate = 24000;
inline constexpr int kDefaultHop = 256;
inline constexpr double kDefaultFrameRate =
    static_cast<double>(kDefaultSampleRate) / kDefaultHop;  // 93.75 Hz
inline constexpr int kDefaultLevels = 4;

/// Mono audio; samples nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Frame-rate F0 track. Unvoiced frames carry f0 = 0.
struct F0Contour {
  double frame_rate = kDefaultFrameRate;
  std::vector<double> f0_hz;
  std::vector<bool> voiced;

  std::size_t size() const { return f0_hz.size(); }
  bool empty() const { return f0_hz.empty(); }
  std::size_t voiced_count() const;
};

/// Half-open frame interval [begin, end).
struct FrameRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool operator==(const FrameRange&) const = default;
};

enum class Style { kStraight = 0, kVibrato = 1 };

const char* to_string(Style style);
Style parse_style(const char* name);

/// Throws Error(kInvalidArgument) unless lengths agree, frame_rate > 0,
/// unvoiced frames are 0 and voiced frames are finite and positive.
void validate(const F0Contour& contour);

/// Throws unless sample_rate > 0 and all samples are finite.
void validate(const AudioBuffer& buffer);

F0Contour make_flat_contour(double f0_hz, std::size_t frames,
                            double frame_rate = kDefaultFrameRate);

}  // namespace pitchstyle
