#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pitchstyle/contour.hpp"
#include "pitchstyle/vibrato_analysis.hpp"

namespace pitchstyle {

/// Parameters of the synthetic singing corpus. Ranges are closed [lo, hi].
struct CorpusSpec {
  std::size_t items = 200;
  std::pair<double, double> base_pitch_hz{110.0, 440.0};
  std::pair<int, int> note_count{3, 6};
  double vibrato_fraction = 0.5;
  std::pair<double, double> rate_hz{5.0, 8.0};
  std::pair<double, double> extent_cents{30.0, 120.0};
  double jitter_cents_rms = 3.0;
  std::uint64_t seed = 0;
  std::pair<double, double> note_duration_s{0.8, 1.6};
  int max_interval_semitones = 2;
  double glide_s = 0.1;
  double onset_delay_s = 0.15;
  double frame_rate = kDefaultFrameRate;
  // Vibrato phase is tied to frame 0 of the item instead of drawn per note.
  bool phase_locked = false;
  std::pair<int, int> edge_unvoiced_frames{4, 12};

  /// Corpus used to fit the converter: one fixed rate of frame_rate / 16
  /// (5.86 Hz at 93.75 Hz) with phase locked to the item start.
  static CorpusSpec converter_training();
};

/// Throws Error(kInvalidArgument) on empty or reversed ranges.
void validate(const CorpusSpec& spec);

struct CorpusNote {
  FrameRange frames;
  FrameRange sustain;  // frames after the glide into the note
  double f0_hz = 0.0;  // nominal pitch before vibrato and jitter
};

struct VibratoSegment {
  FrameRange frames;
  double phase_rad = 0.0;
};

struct CorpusItem {
  std::size_t id = 0;
  Style label = Style::kStraight;
  double rate_hz = 0.0;  // 0 for straight items
  double extent_cents = 0.0;
  double onset_delay_s = 0.0;
  std::vector<CorpusNote> notes;
  std::vector<VibratoSegment> segments;
  F0Contour contour;

  /// Injected vibrato in natural-log units, one value per frame.
  std::vector<double> modulation() const;
  /// Sustained part of the longest note (after the glide), shrunk by
  /// `trim` frames on each side.
  FrameRange sustained_segment(std::size_t trim) const;
};

struct Corpus {
  CorpusSpec spec;
  std::vector<CorpusItem> items;

  std::vector<LabeledContour> labeled() const;
};

/// Deterministic in spec.seed. Item i draws from its own generator, so
/// items do not depend on each other.
Corpus generate_corpus(const CorpusSpec& spec);
CorpusItem generate_item(const CorpusSpec& spec, std::size_t id);

/// Writes items/item_NNNN.json and manifest.json under `dir`.
void write_corpus(const std::filesystem::path& dir, const Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& dir);

std::string manifest_json(const Corpus& corpus);

}  // namespace pitchstyle
