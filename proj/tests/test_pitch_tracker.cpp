#include "pitchstyle/pitch_tracker.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"

using namespace pitchstyle;

TEST(ExtractF0, PureTone440) {
  const auto c = extract_f0(testutil::sine(440.0, 1.0));
  EXPECT_DOUBLE_EQ(c.frame_rate, 93.75);
  ASSERT_EQ(c.size(), 24000u / 256u);
  for (std::size_t i = 2; i + 2 < c.size(); ++i) {
    ASSERT_TRUE(c.voiced[i]) << "frame " << i;
    EXPECT_LT(std::abs(testutil::cents(c.f0_hz[i], 440.0)), 10.0) << "frame " << i;
  }
}

TEST(ExtractF0, SilenceIsUnvoiced) {
  const AudioBuffer silence{std::vector<double>(24000, 0.0), 24000};
  const auto c = extract_f0(silence);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_FALSE(c.voiced[i]);
    EXPECT_EQ(c.f0_hz[i], 0.0);
  }
}

TEST(ExtractF0, LinearChirpTracksInstantaneousFrequency) {
  const int fs = 24000;
  const double seconds = 2.0;
  const double f_start = 200.0;
  const double f_end = 400.0;
  const double k = (f_end - f_start) / seconds;
  AudioBuffer b{std::vector<double>(static_cast<std::size_t>(seconds * fs)), fs};
  for (std::size_t n = 0; n < b.samples.size(); ++n) {
    const double t = static_cast<double>(n) / fs;
    b.samples[n] = 0.5 * std::sin(2.0 * std::numbers::pi * (f_start * t + 0.5 * k * t * t));
  }
  const auto c = extract_f0(b);
  double previous = 0.0;
  std::size_t voiced = 0;
  for (std::size_t i = 2; i + 2 < c.size(); ++i) {
    if (!c.voiced[i]) continue;
    ++voiced;
    const double t = static_cast<double>(i) * 256.0 / fs;
    EXPECT_LT(std::abs(testutil::cents(c.f0_hz[i], f_start + k * t)), 10.0) << "frame " << i;
    // Monotone within the same 10-cent tolerance.
    EXPECT_GE(testutil::cents(c.f0_hz[i], previous > 0.0 ? previous : c.f0_hz[i]), -10.0);
    previous = c.f0_hz[i];
  }
  EXPECT_GT(voiced, c.size() * 9 / 10);
}

TEST(ExtractF0, OutputLengthAndFrameRateFollowHop) {
  TrackerConfig cfg;
  cfg.hop = 120;
  const auto c = extract_f0(testutil::sine(220.0, 0.5), cfg);
  EXPECT_EQ(c.size(), 12000u / 120u);
  EXPECT_DOUBLE_EQ(c.frame_rate, 200.0);
}

TEST(ExtractF0, VoicedFramesStayInsideTheSearchRange) {
  const auto c = extract_f0(testutil::sine(150.0, 0.6, 0.8));
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.voiced[i]) {
      EXPECT_GE(c.f0_hz[i], 60.0);
      EXPECT_LE(c.f0_hz[i], 1000.0);
    }
  }
}

TEST(ExtractF0, RejectsShortBuffersAndBadConfig) {
  EXPECT_ERROR_KIND(extract_f0(AudioBuffer{std::vector<double>(511, 0.0), 24000}),
                    ErrorKind::kInvalidArgument);
  TrackerConfig cfg;
  cfg.f0_ceil = 20000.0;
  EXPECT_ERROR_KIND(extract_f0(testutil::sine(220.0, 0.5), cfg), ErrorKind::kInvalidArgument);
  cfg = {};
  cfg.hop = 0;
  EXPECT_ERROR_KIND(extract_f0(testutil::sine(220.0, 0.5), cfg), ErrorKind::kInvalidArgument);
}

TEST(InterpolateUnvoiced, FlatFlanks) {
  const F0Contour c{93.75, {220.0, 0.0, 220.0}, {true, false, true}};
  const auto r = interpolate_unvoiced(c);
  EXPECT_NEAR(r.f0_hz[1], 220.0, 1e-9);
  EXPECT_EQ(r.voiced, c.voiced);
}

TEST(InterpolateUnvoiced, LogLinearInterior) {
  const F0Contour c{93.75, {200.0, 0, 0, 0, 400.0}, {true, false, false, false, true}};
  const auto r = interpolate_unvoiced(c);
  EXPECT_NEAR(r.f0_hz[1], 237.8, 0.05);
  EXPECT_NEAR(r.f0_hz[2], 282.8, 0.05);
  EXPECT_NEAR(r.f0_hz[3], 336.4, 0.05);
  EXPECT_NEAR(r.f0_hz[2], 200.0 * std::sqrt(2.0), 1e-9);
}

TEST(InterpolateUnvoiced, EdgesHoldNearestVoicedValue) {
  const F0Contour c{93.75, {0, 0, 180.0, 190.0, 0}, {false, false, true, true, false}};
  const auto r = interpolate_unvoiced(c);
  EXPECT_DOUBLE_EQ(r.f0_hz[0], 180.0);
  EXPECT_DOUBLE_EQ(r.f0_hz[1], 180.0);
  EXPECT_DOUBLE_EQ(r.f0_hz[4], 190.0);
}

TEST(InterpolateUnvoiced, IdentityWithoutGapsAndIdempotent) {
  const F0Contour full{93.75, {100.0, 120.0, 140.0}, {true, true, true}};
  EXPECT_EQ(interpolate_unvoiced(full).f0_hz, full.f0_hz);

  const F0Contour c{93.75, {0, 300.0, 0, 0, 150.0, 0}, {false, true, false, false, true, false}};
  const auto once = interpolate_unvoiced(c);
  const auto twice = interpolate_unvoiced(once);
  EXPECT_EQ(once.f0_hz, twice.f0_hz);
  EXPECT_EQ(once.voiced, c.voiced);
  EXPECT_EQ(once.f0_hz[1], 300.0);
  EXPECT_EQ(once.f0_hz[4], 150.0);
}

TEST(InterpolateUnvoiced, FullyUnvoicedIsAnError) {
  const F0Contour c{93.75, {0, 0}, {false, false}};
  EXPECT_ERROR_KIND(interpolate_unvoiced(c), ErrorKind::kInvalidArgument);
}
