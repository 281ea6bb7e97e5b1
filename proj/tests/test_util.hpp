#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pitchstyle/contour.hpp"
#include "pitchstyle/error.hpp"

namespace testutil {

inline pitchstyle::AudioBuffer sine(double hz, double seconds, double amplitude = 0.5,
                                    int sample_rate = pitchstyle::kDefaultSampleRate) {
  pitchstyle::AudioBuffer b;
  b.sample_rate = sample_rate;
  const auto n = static_cast<std::size_t>(seconds * sample_rate);
  b.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / sample_rate);
  }
  return b;
}

inline double cents(double a, double b) { return 1200.0 * std::log2(a / b); }

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = "pitchstyle_";
    if (info != nullptr) name += std::string(info->test_suite_name()) + "_" + info->name();
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil

#define EXPECT_ERROR_KIND(statement, expected_kind)                            \
  do {                                                                         \
    try {                                                                      \
      statement;                                                               \
      ADD_FAILURE() << "expected pitchstyle::Error from " #statement;          \
    } catch (const pitchstyle::Error& e) {                                     \
      EXPECT_EQ(e.kind(), expected_kind) << e.what();                          \
    }                                                                          \
  } while (false)
