#include "pitchstyle/cli.hpp"

#include <algorithm>
#include <charconv>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pitchstyle/converter_model.hpp"
#include "pitchstyle/corpus.hpp"
#include "pitchstyle/error.hpp"
#include "pitchstyle/evaluation.hpp"
#include "pitchstyle/pitch_tracker.hpp"
#include "pitchstyle/signal_io.hpp"
#include "pitchstyle/style_engine.hpp"
#include "pitchstyle/synth.hpp"
#include "pitchstyle/vibrato_analysis.hpp"

namespace pitchstyle::cli {
namespace {

// Bad option values that CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr double kDefaultFrameFactor = 2.0;

struct FrameScale {
  FrameRange range;
  double factor = kDefaultFrameFactor;
};

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw UsageError("bad " + what + " '" + text + "'");
  return value;
}

FrameScale parse_frame_scale(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 2 || parts.size() > 3) {
    throw UsageError("--frames expects start:end[:factor], got '" + text + "'");
  }
  FrameScale fs;
  fs.range.begin = parse_number<std::size_t>(parts[0], "frame index");
  fs.range.end = parse_number<std::size_t>(parts[1], "frame index");
  if (parts.size() == 3) fs.factor = parse_number<double>(parts[2], "factor");
  if (fs.range.begin >= fs.range.end) throw UsageError("--frames range '" + text + "' is empty");
  return fs;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

void emit_contour(const F0Contour& contour, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << format_contour(contour, ContourFormat::kJson);
  } else {
    write_contour(path, contour);
  }
}

std::string bands_text(const StyleBands& bands, const std::string& path) {
  if (!path.empty() && path != "-" && contour_format_for(path) == ContourFormat::kCsv) {
    std::ostringstream os;
    os.precision(17);
    os << "index,low,high,voiced\n";
    for (std::size_t i = 0; i < bands.size(); ++i) {
      os << i << ',' << bands.low[i] << ',' << bands.high[i] << ',' << (bands.voiced[i] ? 1 : 0) << '\n';
    }
    return os.str();
  }
  const nlohmann::json j{{"frame_rate", bands.frame_rate},
                         {"levels", bands.levels},
                         {"voiced", bands.voiced},
                         {"low", bands.low},
                         {"high", bands.high}};
  return j.dump() + "\n";
}

std::string estimate_json(const VibratoEstimate& e, FrameRange window) {
  const nlohmann::json j{{"label", to_string(e.label)},
                         {"rate_hz", e.rate_hz},
                         {"extent_cents", e.extent_cents},
                         {"band_energy_fraction", e.band_energy_fraction},
                         {"window", {window.begin, window.end}}};
  return j.dump(2) + "\n";
}

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_number<double>(p, "alpha"));
  if (out.empty()) throw UsageError("--alphas is empty");
  return out;
}

Style style_option(const std::string& name) {
  try {
    return parse_style(name.c_str());
  } catch (const Error&) {
    throw UsageError("unknown style '" + name + "' (expected straight or vibrato)");
  }
}

std::optional<FrameRange> window_option(long long begin, long long end) {
  if (begin < 0 && end < 0) return std::nullopt;
  if (begin < 0 || end < 0) throw UsageError("--begin and --end must be given together");
  if (begin >= end) throw UsageError("--begin must be less than --end");
  return FrameRange{static_cast<std::size_t>(begin), static_cast<std::size_t>(end)};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pitch contour style processing: F0 extraction, wavelet band split, vibrato control"};
  app.name("pitchstyle");
  app.require_subcommand(1);

  std::string input;
  std::string output;
  int levels = kDefaultLevels;
  auto add_io = [&](CLI::App* sub, const char* input_help) {
    sub->add_option("input", input, input_help)->required();
    sub->add_option("-o,--output", output, "Output path (default: stdout)");
  };
  auto add_levels = [&](CLI::App* sub) {
    sub->add_option("-L,--levels", levels, "DWT levels")->check(CLI::Range(1, 16));
  };

  TrackerConfig tracker;
  auto* extract = app.add_subcommand("extract", "Estimate F0 and voicing from a WAV file");
  add_io(extract, "Input WAV");
  extract->add_option("--f0-floor", tracker.f0_floor, "Lowest F0 in Hz");
  extract->add_option("--f0-ceil", tracker.f0_ceil, "Highest F0 in Hz");
  extract->add_option("--hop", tracker.hop, "Hop size in samples");
  extract->add_option("--channels", tracker.channels_per_octave, "Filter bands per octave");
  extract->add_option("--threshold", tracker.voicing_reliability_threshold, "Voicing reliability threshold");
  extract->add_option("--amplitude-floor", tracker.amplitude_floor, "RMS below which frames are unvoiced");

  auto* decompose_cmd = app.add_subcommand("decompose", "Split a contour into low and high log-F0 bands");
  add_io(decompose_cmd, "Input contour");
  add_levels(decompose_cmd);

  std::string model_path;
  std::string target_style;
  auto* convert = app.add_subcommand("convert", "Replace the high band with a model prediction");
  add_io(convert, "Input contour");
  add_levels(convert);
  convert->add_option("-m,--model", model_path, "Trained model checkpoint")->required();
  convert->add_option("--to", target_style, "Target style: straight or vibrato")->required();

  std::optional<double> factor;
  std::vector<std::string> frame_specs;
  auto* scale = app.add_subcommand("scale", "Scale the high band globally or on frame ranges");
  add_io(scale, "Input contour");
  add_levels(scale);
  scale->add_option("--factor", factor, "Global high-band factor (default 1)");
  scale->add_option("--frames", frame_specs,
                    "start:end[:factor] frame range with its own factor (default factor 2); repeatable")
      ->allow_extra_args(false);

  long long begin = -1;
  long long end = -1;
  auto* detect = app.add_subcommand("detect", "Classify straight/vibrato and measure rate and extent");
  add_io(detect, "Input contour");
  add_levels(detect);
  detect->add_option("--begin", begin, "First frame of the analysis window");
  detect->add_option("--end", end, "One past the last frame of the analysis window");

  auto* remove = app.add_subcommand("remove-vibrato", "Drop the high band");
  add_io(remove, "Input contour");
  add_levels(remove);

  VibratoParams vib;
  auto* add = app.add_subcommand("add-vibrato", "Add sinusoidal vibrato to a voiced segment");
  add_io(add, "Input contour");
  add->add_option("--rate", vib.rate_hz, "Rate in Hz");
  add->add_option("--extent", vib.extent_cents, "Peak deviation in cents");
  add->add_option("--onset", vib.onset_delay_s, "Linear ramp-in time in seconds");
  add->add_option("--phase", vib.phase_rad, "Starting phase in radians");
  add->add_option("--begin", begin, "First frame (default: longest voiced run)");
  add->add_option("--end", end, "One past the last frame");

  double target_mean = 0.0;
  std::optional<double> source_mean;
  auto* shift = app.add_subcommand("shift-range", "Scale F0 so the voiced mean matches a target");
  add_io(shift, "Input contour");
  shift->add_option("--target-mean", target_mean, "Target mean F0 in Hz")->required();
  shift->add_option("--source-mean", source_mean, "Source mean F0 in Hz (default: measured)");

  CorpusSpec spec;
  std::string preset = "default";
  std::string corpus_dir;
  std::optional<std::size_t> items;
  std::optional<std::uint64_t> seed;
  std::optional<double> fraction, rate_min, rate_max, extent_min, extent_max, jitter;
  bool phase_locked = false;
  auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic labelled contour corpus");
  gen->add_option("--out", corpus_dir, "Output directory")->required();
  gen->add_option("--preset", preset, "default or converter")
      ->check(CLI::IsMember({"default", "converter"}));
  gen->add_option("--items", items, "Number of items");
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--vibrato-fraction", fraction, "Share of vibrato items");
  gen->add_option("--rate-min", rate_min, "Lowest vibrato rate in Hz");
  gen->add_option("--rate-max", rate_max, "Highest vibrato rate in Hz");
  gen->add_option("--extent-min", extent_min, "Smallest extent in cents");
  gen->add_option("--extent-max", extent_max, "Largest extent in cents");
  gen->add_option("--jitter", jitter, "Jitter RMS in cents");
  gen->add_flag("--phase-locked", phase_locked, "Lock vibrato phase to the item start");

  TrainConfig train_cfg;
  ModelShape shape;
  std::size_t stride = 16;
  std::uint64_t init_seed = 0;
  std::string loss_csv;
  auto* train_cmd = app.add_subcommand("train", "Fit the high-band converter on a corpus");
  train_cmd->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  train_cmd->add_option("-o,--output", output, "Checkpoint path")->required();
  add_levels(train_cmd);
  train_cmd->add_option("--steps", train_cfg.steps, "SGD steps");
  train_cmd->add_option("--lr", train_cfg.learning_rate, "Learning rate");
  train_cmd->add_option("--batch", train_cfg.batch, "Windows per step");
  train_cmd->add_option("--seed", train_cfg.seed, "Batch sampling seed");
  train_cmd->add_option("--init-seed", init_seed, "Weight initialisation seed");
  train_cmd->add_option("--window", shape.window, "Window length in frames");
  train_cmd->add_option("--stride", stride, "Offset between training windows");
  train_cmd->add_option("--loss-csv", loss_csv, "Write the loss history here");

  std::string alphas_text = "0.1,0.3,0.5,0.7,1.0,2.0";
  auto* eval = app.add_subcommand("eval", "Detector accuracy, scaling trend and level capture");
  eval->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  eval->add_option("--alphas", alphas_text, "Comma separated scaling factors");
  eval->add_option("-o,--output", output, "Report path (default: stdout)");
  add_levels(eval);

  int partials = kDefaultPartials;
  auto* synth = app.add_subcommand("synth", "Render a contour with additive harmonics");
  add_io(synth, "Input contour");
  synth->get_option("--output")->required();
  synth->add_option("--partials", partials, "Number of harmonics")->check(CLI::PositiveNumber);

  std::vector<std::string> argv_store{"pitchstyle"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (extract->parsed()) {
      const AudioBuffer audio = read_wav(input);
      emit_contour(extract_f0(audio, tracker), output, out);
    } else if (decompose_cmd->parsed()) {
      emit(bands_text(decompose(read_contour(input), levels), output), output, out);
    } else if (convert->parsed()) {
      const Style style = style_option(target_style);
      const ConverterModel model = load_model(model_path);
      emit_contour(convert_style(model, read_contour(input), style, levels), output, out);
    } else if (scale->parsed()) {
      const F0Contour contour = read_contour(input);
      ScalingSpec scaling = ScalingSpec::global(factor.value_or(1.0));
      if (!frame_specs.empty()) {
        std::vector<double> per_frame(contour.size(), scaling.global_factor);
        for (const auto& text : frame_specs) {
          const FrameScale fs = parse_frame_scale(text);
          if (fs.range.end > contour.size()) {
            throw UsageError("--frames '" + text + "' exceeds the contour length " +
                             std::to_string(contour.size()));
          }
          std::fill(per_frame.begin() + static_cast<std::ptrdiff_t>(fs.range.begin),
                    per_frame.begin() + static_cast<std::ptrdiff_t>(fs.range.end), fs.factor);
        }
        scaling.frame_factors = std::move(per_frame);
      }
      emit_contour(recompose(decompose(contour, levels), scaling), output, out);
    } else if (detect->parsed()) {
      const F0Contour contour = read_contour(input);
      const auto window = window_option(begin, end);
      const VibratoEstimate e = estimate(contour, levels, window);
      emit(estimate_json(e, window.value_or(longest_voiced_run(contour))), output, out);
    } else if (remove->parsed()) {
      emit_contour(remove_vibrato(read_contour(input), levels), output, out);
    } else if (add->parsed()) {
      const F0Contour contour = read_contour(input);
      const FrameRange segment = window_option(begin, end).value_or(longest_voiced_run(contour));
      emit_contour(synth_vibrato(contour, vib, segment), output, out);
    } else if (shift->parsed()) {
      const F0Contour contour = read_contour(input);
      const double src = source_mean.value_or(mean_f0(contour));
      emit_contour(shift_pitch_range(contour, src, target_mean), output, out);
    } else if (gen->parsed()) {
      spec = preset == "converter" ? CorpusSpec::converter_training() : CorpusSpec{};
      if (items) spec.items = *items;
      if (seed) spec.seed = *seed;
      if (fraction) spec.vibrato_fraction = *fraction;
      if (rate_min) spec.rate_hz.first = *rate_min;
      if (rate_max) spec.rate_hz.second = *rate_max;
      if (extent_min) spec.extent_cents.first = *extent_min;
      if (extent_max) spec.extent_cents.second = *extent_max;
      if (jitter) spec.jitter_cents_rms = *jitter;
      if (phase_locked) spec.phase_locked = true;
      const Corpus corpus = generate_corpus(spec);
      write_corpus(corpus_dir, corpus);
      out << "wrote " << corpus.items.size() << " items to " << corpus_dir << "\n";
    } else if (train_cmd->parsed()) {
      const Corpus corpus = load_corpus(corpus_dir);
      const auto labeled = corpus.labeled();
      const auto windows = make_training_windows(labeled, shape.window, levels, stride);
      TrainResult result = train(ConverterModel::initialize(shape, init_seed), windows, train_cfg);
      save_model(output, result.model);
      if (!loss_csv.empty()) {
        std::ostringstream os;
        os.precision(17);
        os << "step,loss\n";
        for (std::size_t i = 0; i < result.loss_history.size(); ++i) {
          os << std::min((i + 1) * kLossLogInterval, train_cfg.steps) << ',' << result.loss_history[i]
             << '\n';
        }
        write_text_file(loss_csv, os.str());
      }
      out << "trained " << train_cfg.steps << " steps on " << windows.size()
          << " windows; loss " << result.loss_history.front() << " -> "
          << result.loss_history.back() << "\n";
    } else if (eval->parsed()) {
      EvalConfig cfg;
      cfg.alphas = parse_alphas(alphas_text);
      cfg.levels = levels;
      emit(report_json(evaluate_corpus(load_corpus(corpus_dir), cfg)), output, out);
    } else if (synth->parsed()) {
      synth_demo(read_contour(input), output, partials);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace pitchstyle::cli
