#pragma once

#include <filesystem>
#include <string>

#include "pitchstyle/contour.hpp"

namespace pitchstyle {

// WAV reading accepts RIFF/WAVE with PCM 16-bit or IEEE float 32-bit data,
// mono or stereo (stereo is averaged). Failures throw Error with kind
// kMalformedHeader, kUnsupportedFormat, kTruncatedData or kIo.
AudioBuffer read_wav(const std::filesystem::path& path);
AudioBuffer parse_wav(const std::string& bytes);

// Always writes 16-bit PCM mono. Samples are clamped to [-1, 1] and encoded
// as round(s * 32768) saturated to the int16 range.
void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer);
std::string encode_wav(const AudioBuffer& buffer);

enum class ContourFormat { kJson, kCsv };

/// Picks the format from the file extension (".csv" -> CSV, else JSON).
ContourFormat contour_format_for(const std::filesystem::path& path);

// JSON: {"frame_rate": r, "frames": [{"f0": x, "voiced": b}, ...]}
// CSV:  "# frame_rate=r" line, "index,f0,voiced" header, one row per frame.
// Values are printed with 17 significant digits so doubles round-trip exactly.
std::string format_contour(const F0Contour& contour, ContourFormat format);
F0Contour parse_contour(const std::string& text);

void write_contour(const std::filesystem::path& path, const F0Contour& contour,
                   ContourFormat format);
void write_contour(const std::filesystem::path& path, const F0Contour& contour);
F0Contour read_contour(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& text);

}  // namespace pitchstyle
