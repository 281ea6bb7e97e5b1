#include "pitchstyle/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "json.hpp"
#include "pitchstyle/error.hpp"
#include "pitchstyle/signal_io.hpp"
#include "pitchstyle/style_engine.hpp"

namespace pitchstyle {
namespace {

using nlohmann::json;

std::size_t frame_at(double seconds, double frame_rate) {
  return static_cast<std::size_t>(std::ceil(seconds * frame_rate - 1e-9));
}

template <typename T>
void check_range(const std::pair<T, T>& r, const char* name) {
  if (!(r.first <= r.second)) {
    fail(ErrorKind::kInvalidArgument, std::string(name) + " range is empty or reversed");
  }
}

std::string item_path(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "items/item_%04zu.json", id);
  return buf;
}

json range_json(FrameRange r) { return json::array({r.begin, r.end}); }

FrameRange range_from(const json& j) {
  return {j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

json spec_json(const CorpusSpec& s) {
  return {{"items", s.items},
          {"base_pitch_hz", {s.base_pitch_hz.first, s.base_pitch_hz.second}},
          {"note_count", {s.note_count.first, s.note_count.second}},
          {"vibrato_fraction", s.vibrato_fraction},
          {"rate_hz", {s.rate_hz.first, s.rate_hz.second}},
          {"extent_cents", {s.extent_cents.first, s.extent_cents.second}},
          {"jitter_cents_rms", s.jitter_cents_rms},
          {"seed", s.seed},
          {"note_duration_s", {s.note_duration_s.first, s.note_duration_s.second}},
          {"max_interval_semitones", s.max_interval_semitones},
          {"glide_s", s.glide_s},
          {"onset_delay_s", s.onset_delay_s},
          {"frame_rate", s.frame_rate},
          {"phase_locked", s.phase_locked},
          {"edge_unvoiced_frames", {s.edge_unvoiced_frames.first, s.edge_unvoiced_frames.second}}};
}

template <typename T>
std::pair<T, T> pair_from(const json& j) {
  return {j.at(0).get<T>(), j.at(1).get<T>()};
}

CorpusSpec spec_from(const json& j) {
  CorpusSpec s;
  s.items = j.at("items").get<std::size_t>();
  s.base_pitch_hz = pair_from<double>(j.at("base_pitch_hz"));
  s.note_count = pair_from<int>(j.at("note_count"));
  s.vibrato_fraction = j.at("vibrato_fraction").get<double>();
  s.rate_hz = pair_from<double>(j.at("rate_hz"));
  s.extent_cents = pair_from<double>(j.at("extent_cents"));
  s.jitter_cents_rms = j.at("jitter_cents_rms").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.note_duration_s = pair_from<double>(j.at("note_duration_s"));
  s.max_interval_semitones = j.at("max_interval_semitones").get<int>();
  s.glide_s = j.at("glide_s").get<double>();
  s.onset_delay_s = j.at("onset_delay_s").get<double>();
  s.frame_rate = j.at("frame_rate").get<double>();
  s.phase_locked = j.at("phase_locked").get<bool>();
  s.edge_unvoiced_frames = pair_from<int>(j.at("edge_unvoiced_frames"));
  return s;
}

}  // namespace

CorpusSpec CorpusSpec::converter_training() {
  CorpusSpec s;
  s.rate_hz = {s.frame_rate / 16.0, s.frame_rate / 16.0};
  s.phase_locked = true;
  return s;
}

void validate(const CorpusSpec& s) {
  check_range(s.base_pitch_hz, "base_pitch_hz");
  check_range(s.note_count, "note_count");
  check_range(s.rate_hz, "rate_hz");
  check_range(s.extent_cents, "extent_cents");
  check_range(s.note_duration_s, "note_duration_s");
  check_range(s.edge_unvoiced_frames, "edge_unvoiced_frames");
  if (!(s.base_pitch_hz.first > 0.0)) fail(ErrorKind::kInvalidArgument, "base pitch must be > 0");
  if (s.note_count.first < 1) fail(ErrorKind::kInvalidArgument, "need at least one note");
  if (!(s.vibrato_fraction >= 0.0 && s.vibrato_fraction <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "vibrato_fraction must lie in [0, 1]");
  }
  if (!(s.frame_rate > 0.0) || !(s.note_duration_s.first > 0.0) || !(s.glide_s >= 0.0) ||
      !(s.onset_delay_s >= 0.0) || !(s.jitter_cents_rms >= 0.0) || s.max_interval_semitones < 0 ||
      s.edge_unvoiced_frames.first < 0 || !(s.extent_cents.first >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "corpus spec has a negative or zero parameter");
  }
  if (s.rate_hz.first < 3.0 || s.rate_hz.second > 10.0) {
    fail(ErrorKind::kInvalidArgument, "vibrato rate range must lie within [3, 10] Hz");
  }
}

std::vector<double> CorpusItem::modulation() const {
  std::vector<double> m(contour.size(), 0.0);
  for (const auto& seg : segments) {
    const VibratoParams p{rate_hz, extent_cents, onset_delay_s, seg.phase_rad};
    const auto part = vibrato_modulation(p, seg.frames.size(), contour.frame_rate);
    std::copy(part.begin(), part.end(), m.begin() + static_cast<std::ptrdiff_t>(seg.frames.begin));
  }
  return m;
}

FrameRange CorpusItem::sustained_segment(std::size_t trim) const {
  if (notes.empty()) return {};
  const auto& longest = *std::max_element(notes.begin(), notes.end(), [](const auto& a, const auto& b) {
    return a.sustain.size() < b.sustain.size();
  });
  const FrameRange r = longest.sustain;
  if (r.size() <= 2 * trim) return {r.begin, r.begin};
  return {r.begin + trim, r.end - trim};
}

std::vector<LabeledContour> Corpus::labeled() const {
  std::vector<LabeledContour> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back({item.contour, item.label});
  return out;
}

CorpusItem generate_item(const CorpusSpec& spec, std::size_t id) {
  validate(spec);
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(id)};
  std::mt19937_64 rng(seq);
  auto uniform = [&rng](double lo, double hi) {
    return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto integer = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  CorpusItem item;
  item.id = id;
  const double f = spec.vibrato_fraction;
  const bool vibrato = std::floor(static_cast<double>(id + 1) * f) > std::floor(static_cast<double>(id) * f);
  item.label = vibrato ? Style::kVibrato : Style::kStraight;

  const int count = integer(spec.note_count.first, spec.note_count.second);
  const double base = uniform(std::log(spec.base_pitch_hz.first), std::log(spec.base_pitch_hz.second));
  std::vector<double> durations(static_cast<std::size_t>(count));
  for (double& d : durations) d = uniform(spec.note_duration_s.first, spec.note_duration_s.second);
  std::vector<double> levels{base};
  for (int i = 1; i < count; ++i) {
    const int step = integer(-spec.max_interval_semitones, spec.max_interval_semitones);
    levels.push_back(levels.back() + std::numbers::ln2 * step / 12.0);
  }

  double total = 0.0;
  std::vector<double> starts;
  for (double d : durations) {
    starts.push_back(total);
    total += d;
  }
  const double fr = spec.frame_rate;
  const auto frames = static_cast<std::size_t>(std::floor(total * fr));

  std::vector<double> log_f0(frames, levels[0]);
  for (std::size_t n = 1; n < levels.size(); ++n) {
    const double jump = levels[n] - levels[n - 1];
    for (std::size_t i = 0; i < frames; ++i) {
      const double t = static_cast<double>(i) / fr - starts[n];
      const double w = spec.glide_s > 0.0 ? std::clamp(t / spec.glide_s, 0.0, 1.0) : (t >= 0.0 ? 1.0 : 0.0);
      log_f0[i] += jump * w;
    }
  }
  for (std::size_t n = 0; n < levels.size(); ++n) {
    const FrameRange r{std::min(frame_at(starts[n], fr), frames),
                       std::min(frame_at(starts[n] + durations[n], fr), frames)};
    const FrameRange sustain{std::min(frame_at(starts[n] + spec.glide_s, fr), r.end), r.end};
    item.notes.push_back({r, sustain, std::exp(levels[n])});
  }

  item.contour.frame_rate = fr;
  item.contour.f0_hz.resize(frames);
  item.contour.voiced.assign(frames, true);
  for (std::size_t i = 0; i < frames; ++i) item.contour.f0_hz[i] = std::exp(log_f0[i]);

  if (vibrato) {
    item.rate_hz = uniform(spec.rate_hz.first, spec.rate_hz.second);
    item.extent_cents = uniform(spec.extent_cents.first, spec.extent_cents.second);
    item.onset_delay_s = spec.onset_delay_s;
    for (std::size_t n = 0; n < levels.size(); ++n) {
      const FrameRange r = item.notes[n].sustain;
      const double drawn = uniform(0.0, 2.0 * std::numbers::pi);
      const double phase = spec.phase_locked
                               ? 2.0 * std::numbers::pi * item.rate_hz * static_cast<double>(r.begin) / fr
                               : drawn;
      item.segments.push_back({r, phase});
      const VibratoParams p{item.rate_hz, item.extent_cents, item.onset_delay_s, phase};
      item.contour = synth_vibrato(item.contour, p, r);
    }
  }

  std::normal_distribution<double> jitter(0.0, spec.jitter_cents_rms / 1200.0 * std::numbers::ln2);
  for (double& v : item.contour.f0_hz) v = std::exp(std::log(v) + jitter(rng));

  const auto head = static_cast<std::size_t>(integer(spec.edge_unvoiced_frames.first, spec.edge_unvoiced_frames.second));
  const auto tail = static_cast<std::size_t>(integer(spec.edge_unvoiced_frames.first, spec.edge_unvoiced_frames.second));
  for (std::size_t i = 0; i < frames; ++i) {
    if (i < head || i + tail >= frames) {
      item.contour.voiced[i] = false;
      item.contour.f0_hz[i] = 0.0;
    }
  }
  return item;
}

Corpus generate_corpus(const CorpusSpec& spec) {
  validate(spec);
  Corpus corpus{spec, {}};
  corpus.items.reserve(spec.items);
  for (std::size_t id = 0; id < spec.items; ++id) corpus.items.push_back(generate_item(spec, id));
  return corpus;
}

std::string manifest_json(const Corpus& corpus) {
  json items = json::array();
  for (const auto& item : corpus.items) {
    json notes = json::array();
    for (const auto& n : item.notes) notes.push_back(
          {{"frames", range_json(n.frames)}, {"sustain", range_json(n.sustain)}, {"f0_hz", n.f0_hz}});
    json segments = json::array();
    for (const auto& s : item.segments) {
      segments.push_back({{"frames", range_json(s.frames)}, {"phase_rad", s.phase_rad}});
    }
    items.push_back({{"id", item.id},
                     {"path", item_path(item.id)},
                     {"label", to_string(item.label)},
                     {"rate", item.rate_hz},
                     {"extent_cents", item.extent_cents},
                     {"onset_delay_s", item.onset_delay_s},
                     {"notes", notes},
                     {"segments", segments}});
  }
  json manifest{{"spec", spec_json(corpus.spec)}, {"items", items}};
  return manifest.dump(2) + "\n";
}

void write_corpus(const std::filesystem::path& dir, const Corpus& corpus) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "items", ec);
  if (ec) fail(ErrorKind::kIo, "cannot create " + (dir / "items").string() + ": " + ec.message());
  for (const auto& item : corpus.items) {
    write_contour(dir / item_path(item.id), item.contour, ContourFormat::kJson);
  }
  write_text_file(dir / "manifest.json", manifest_json(corpus));
}

Corpus load_corpus(const std::filesystem::path& dir) {
  const std::string text = read_text_file(dir / "manifest.json");
  try {
    const json j = json::parse(text);
    Corpus corpus{spec_from(j.at("spec")), {}};
    for (const auto& e : j.at("items")) {
      CorpusItem item;
      item.id = e.at("id").get<std::size_t>();
      item.label = parse_style(e.at("label").get<std::string>().c_str());
      item.rate_hz = e.at("rate").get<double>();
      item.extent_cents = e.at("extent_cents").get<double>();
      item.onset_delay_s = e.value("onset_delay_s", 0.0);
      for (const auto& n : e.value("notes", json::array())) {
        item.notes.push_back(
            {range_from(n.at("frames")), range_from(n.at("sustain")), n.at("f0_hz").get<double>()});
      }
      for (const auto& s : e.value("segments", json::array())) {
        item.segments.push_back({range_from(s.at("frames")), s.at("phase_rad").get<double>()});
      }
      item.contour = read_contour(dir / e.at("path").get<std::string>());
      for (const auto& s : item.segments) {
        if (s.frames.end > item.contour.size()) {
          fail(ErrorKind::kSchema, "item " + std::to_string(item.id) + " segment exceeds its contour");
        }
      }
      corpus.items.push_back(std::move(item));
    }
    std::sort(corpus.items.begin(), corpus.items.end(),
              [](const CorpusItem& a, const CorpusItem& b) { return a.id < b.id; });
    return corpus;
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, "malformed manifest " + (dir / "manifest.json").string() + ": " + e.what());
  }
}

}  // namespace pitchstyle
