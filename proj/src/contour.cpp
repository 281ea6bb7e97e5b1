#include "pitchstyle/contour.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "pitchstyle/error.hpp"

namespace pitchstyle {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kIo: return "io error";
    case ErrorKind::kMalformedHeader: return "malformed header";
    case ErrorKind::kUnsupportedFormat: return "unsupported format";
    case ErrorKind::kTruncatedData: return "truncated data";
    case ErrorKind::kSchema: return "schema violation";
    case ErrorKind::kShapeMismatch: return "shape mismatch";
    case ErrorKind::kDiverged: return "training diverged";
  }
  return "unknown";
}

std::size_t F0Contour::voiced_count() const {
  std::size_t n = 0;
  for (bool v : voiced) n += v ? 1 : 0;
  return n;
}

const char* to_string(Style style) {
  return style == Style::kVibrato ? "vibrato" : "straight";
}

Style parse_style(const char* name) {
  if (std::strcmp(name, "straight") == 0) return Style::kStraight;
  if (std::strcmp(name, "vibrato") == 0) return Style::kVibrato;
  fail(ErrorKind::kInvalidArgument,
       std::string("unknown style '") + name + "' (expected straight|vibrato)");
}

void validate(const F0Contour& contour) {
  if (!(contour.frame_rate > 0.0) || !std::isfinite(contour.frame_rate)) {
    fail(ErrorKind::kInvalidArgument, "contour frame_rate must be positive");
  }
  if (contour.f0_hz.size() != contour.voiced.size()) {
    fail(ErrorKind::kInvalidArgument,
         "contour f0 and voiced sequences differ in length");
  }
  for (std::size_t i = 0; i < contour.size(); ++i) {
    const double f = contour.f0_hz[i];
    if (contour.voiced[i]) {
      if (!std::isfinite(f) || f <= 0.0) {
        fail(ErrorKind::kInvalidArgument,
             "voiced frame " + std::to_string(i) + " has non-positive f0");
      }
    } else if (f != 0.0) {
      fail(ErrorKind::kInvalidArgument,
           "unvoiced frame " + std::to_string(i) + " has nonzero f0");
    }
  }
}

void validate(const AudioBuffer& buffer) {
  if (buffer.sample_rate <= 0) {
    fail(ErrorKind::kInvalidArgument, "sample_rate must be positive");
  }
  for (double s : buffer.samples) {
    if (!std::isfinite(s)) {
      fail(ErrorKind::kInvalidArgument, "audio buffer has non-finite sample");
    }
  }
}

F0Contour make_flat_contour(double f0_hz, std::size_t frames,
                            double frame_rate) {
  F0Contour c;
  c.frame_rate = frame_rate;
  c.f0_hz.assign(frames, f0_hz);
  c.voiced.assign(frames, true);
  return c;
}

}  // namespace pitchstyle
