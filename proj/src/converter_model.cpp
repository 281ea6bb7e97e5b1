#include "pitchstyle/converter_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "json.hpp"
#include "pitchstyle/error.hpp"
#include "pitchstyle/signal_io.hpp"

namespace pitchstyle {
namespace {

DenseLayer make_layer(std::size_t in, std::size_t out) {
  return {in, out, std::vector<double>(in * out, 0.0), std::vector<double>(out, 0.0)};
}

// Activations of one forward pass; acts[0] is the input, acts[l + 1] the
// output of layer l (post-tanh for hidden layers, linear for the last).
struct Trace {
  std::vector<std::vector<double>> acts;
};

void assemble_input(const ConverterModel& m, std::span<const double> low,
                    const std::vector<bool>& flags, Style style, std::vector<double>& x) {
  const std::size_t w = m.window();
  if (low.size() != w || flags.size() != w) {
    fail(ErrorKind::kShapeMismatch, "window of " + std::to_string(low.size()) +
                                        " values / " + std::to_string(flags.size()) +
                                        " flags for a model of width " + std::to_string(w));
  }
  x.resize(m.input_size());
  std::copy(low.begin(), low.end(), x.begin());
  for (std::size_t i = 0; i < w; ++i) x[w + i] = flags[i] ? 1.0 : 0.0;
  const auto& sv = m.style_vectors[static_cast<std::size_t>(style)];
  std::copy(sv.begin(), sv.end(), x.begin() + static_cast<std::ptrdiff_t>(2 * w));
}

void run_forward(const ConverterModel& m, Trace& t) {
  t.acts.resize(m.layers.size() + 1);
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const DenseLayer& layer = m.layers[l];
    const std::vector<double>& in = t.acts[l];
    std::vector<double>& out = t.acts[l + 1];
    out.assign(layer.bias.begin(), layer.bias.end());
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double* row = layer.weights.data() + o * layer.inputs;
      double acc = 0.0;
      for (std::size_t i = 0; i < layer.inputs; ++i) acc += row[i] * in[i];
      out[o] += acc;
    }
    if (l + 1 < m.layers.size()) {
      for (double& v : out) v = std::tanh(v);
    }
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Offsets of each parameter block inside the flat gradient vector.
struct Layout {
  std::vector<std::size_t> weight_at;
  std::vector<std::size_t> bias_at;
  std::vector<std::size_t> style_at;
  std::size_t total = 0;
};

Layout layout_of(const ConverterModel& m) {
  Layout lay;
  std::size_t at = 0;
  for (const auto& layer : m.layers) {
    lay.weight_at.push_back(at);
    at += layer.weights.size();
    lay.bias_at.push_back(at);
    at += layer.bias.size();
  }
  for (const auto& sv : m.style_vectors) {
    lay.style_at.push_back(at);
    at += sv.size();
  }
  lay.total = at;
  return lay;
}

// Adds d(sum |pred - target|) * scale to the gradient for one window.
double accumulate_window(const ConverterModel& m, const Layout& lay, const TrainingWindow& s,
                         double scale, Trace& t, std::vector<double>& grad) {
  t.acts.resize(1);
  assemble_input(m, s.low, s.flags, s.style, t.acts[0]);
  if (s.target.size() != m.window()) fail(ErrorKind::kShapeMismatch, "target width mismatch");
  run_forward(m, t);

  const std::vector<double>& pred = t.acts.back();
  double abs_sum = 0.0;
  std::vector<double> delta(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - s.target[i];
    abs_sum += std::abs(r);
    delta[i] = sign(r) * scale;
  }

  std::vector<double> prev;
  for (std::size_t l = m.layers.size(); l-- > 0;) {
    const DenseLayer& layer = m.layers[l];
    const std::vector<double>& in = t.acts[l];
    double* gw = grad.data() + lay.weight_at[l];
    double* gb = grad.data() + lay.bias_at[l];
    prev.assign(layer.inputs, 0.0);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      gb[o] += d;
      const double* row = layer.weights.data() + o * layer.inputs;
      double* grow = gw + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) {
        grow[i] += d * in[i];
        prev[i] += d * row[i];
      }
    }
    if (l > 0) {
      for (std::size_t i = 0; i < prev.size(); ++i) prev[i] *= 1.0 - in[i] * in[i];
    }
    delta.swap(prev);
  }
  // delta now holds d/d(input); the style vector occupies its tail.
  const std::size_t w = m.window();
  double* gs = grad.data() + lay.style_at[static_cast<std::size_t>(s.style)];
  for (std::size_t k = 0; k < m.shape.style_dim; ++k) gs[k] += delta[2 * w + k];
  return abs_sum;
}

std::vector<double> residuals(const ConverterModel& m, const TrainingWindow& s) {
  auto pred = forward(m, s.low, s.flags, s.style);
  for (std::size_t i = 0; i < pred.size(); ++i) pred[i] -= s.target[i];
  return pred;
}

}  // namespace

ConverterModel ConverterModel::zeros(const ModelShape& shape) {
  if (shape.window < 2 || shape.style_dim < 1) {
    fail(ErrorKind::kInvalidArgument, "model window must be >= 2 and style_dim >= 1");
  }
  ConverterModel m;
  m.shape = shape;
  std::size_t in = 2 * shape.window + shape.style_dim;
  for (std::size_t h : shape.hidden_sizes) {
    if (h == 0) fail(ErrorKind::kInvalidArgument, "hidden layer of width 0");
    m.layers.push_back(make_layer(in, h));
    in = h;
  }
  m.layers.push_back(make_layer(in, shape.window));
  m.style_vectors.assign(2, std::vector<double>(shape.style_dim, 0.0));
  return m;
}

ConverterModel ConverterModel::initialize(const ModelShape& shape, std::uint64_t seed) {
  ConverterModel m = zeros(shape);
  m.seed = seed;
  std::mt19937_64 rng(seed);
  for (auto& layer : m.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : layer.weights) w = dist(rng);
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& sv : m.style_vectors) {
    for (double& v : sv) v = normal(rng);
  }
  return m;
}

std::size_t ConverterModel::parameter_count() const { return layout_of(*this).total; }

double& ConverterModel::parameter(std::size_t index) {
  for (auto& layer : layers) {
    if (index < layer.weights.size()) return layer.weights[index];
    index -= layer.weights.size();
    if (index < layer.bias.size()) return layer.bias[index];
    index -= layer.bias.size();
  }
  for (auto& sv : style_vectors) {
    if (index < sv.size()) return sv[index];
    index -= sv.size();
  }
  fail(ErrorKind::kInvalidArgument, "parameter index out of range");
}

double ConverterModel::parameter(std::size_t index) const {
  return const_cast<ConverterModel&>(*this).parameter(index);
}

bool ConverterModel::all_finite() const {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  for (const auto& layer : layers) {
    if (!finite(layer.weights) || !finite(layer.bias)) return false;
  }
  return std::all_of(style_vectors.begin(), style_vectors.end(), finite);
}

std::vector<double> center_window(std::span<const double> low) {
  const double mean =
      low.empty() ? 0.0 : std::accumulate(low.begin(), low.end(), 0.0) / static_cast<double>(low.size());
  std::vector<double> out(low.begin(), low.end());
  for (double& v : out) v -= mean;
  return out;
}

std::vector<TrainingWindow> make_training_windows(std::span<const LabeledContour> items,
                                                  std::size_t window, int levels,
                                                  std::size_t stride) {
  if (window < 2 || stride < 1) fail(ErrorKind::kInvalidArgument, "bad window or stride");
  std::vector<TrainingWindow> out;
  for (const auto& item : items) {
    if (item.contour.size() < window) continue;
    const StyleBands bands = decompose(item.contour, levels);
    for (std::size_t o = 0; o + window <= bands.size(); o += stride) {
      TrainingWindow tw;
      tw.flags.assign(bands.voiced.begin() + static_cast<std::ptrdiff_t>(o),
                      bands.voiced.begin() + static_cast<std::ptrdiff_t>(o + window));
      if (std::none_of(tw.flags.begin(), tw.flags.end(), [](bool v) { return v; })) continue;
      tw.low = center_window(std::span<const double>(bands.low).subspan(o, window));
      tw.target.assign(bands.high.begin() + static_cast<std::ptrdiff_t>(o),
                       bands.high.begin() + static_cast<std::ptrdiff_t>(o + window));
      tw.style = item.label;
      out.push_back(std::move(tw));
    }
  }
  return out;
}

std::vector<double> forward(const ConverterModel& model, std::span<const double> low_window,
                            const std::vector<bool>& flags, Style style) {
  Trace t;
  t.acts.resize(1);
  assemble_input(model, low_window, flags, style, t.acts[0]);
  run_forward(model, t);
  return t.acts.back();
}

double loss(const ConverterModel& model, std::span<const TrainingWindow> batch) {
  if (batch.empty()) fail(ErrorKind::kInvalidArgument, "loss of an empty batch");
  double sum = 0.0;
  for (const auto& s : batch) {
    if (s.target.size() != model.window()) fail(ErrorKind::kShapeMismatch, "target width mismatch");
    for (double r : residuals(model, s)) sum += std::abs(r);
  }
  return sum / static_cast<double>(batch.size() * model.window());
}

double loss_gradient(const ConverterModel& model, std::span<const TrainingWindow> batch,
                     std::vector<double>& gradient) {
  if (batch.empty()) fail(ErrorKind::kInvalidArgument, "loss of an empty batch");
  const Layout lay = layout_of(model);
  gradient.assign(lay.total, 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size() * model.window());
  Trace t;
  double sum = 0.0;
  for (const auto& s : batch) sum += accumulate_window(model, lay, s, scale, t, gradient);
  return sum * scale;
}

TrainResult train(ConverterModel model, std::span<const TrainingWindow> corpus,
                  const TrainConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate) || cfg.steps < 1 ||
      cfg.batch < 1) {
    fail(ErrorKind::kInvalidArgument, "train needs learning_rate >= 0, steps >= 1, batch >= 1");
  }
  if (corpus.size() < cfg.batch) {
    fail(ErrorKind::kInvalidArgument, "corpus has " + std::to_string(corpus.size()) +
                                          " windows, fewer than one batch of " +
                                          std::to_string(cfg.batch));
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  std::vector<TrainingWindow> batch(cfg.batch);
  std::vector<double> grad;
  TrainResult result;
  double interval_sum = 0.0;
  std::size_t interval_steps = 0;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    for (auto& slot : batch) slot = corpus[pick(rng)];
    const double value = loss_gradient(model, batch, grad);
    if (!std::isfinite(value)) {
      fail(ErrorKind::kDiverged, "loss became non-finite at step " + std::to_string(step));
    }
    for (std::size_t p = 0; p < grad.size(); ++p) model.parameter(p) -= cfg.learning_rate * grad[p];
    ++model.steps_trained;
    interval_sum += value;
    if (++interval_steps == kLossLogInterval || step + 1 == cfg.steps) {
      result.loss_history.push_back(interval_sum / static_cast<double>(interval_steps));
      interval_sum = 0.0;
      interval_steps = 0;
    }
  }
  result.model = std::move(model);
  return result;
}

GradCheckResult grad_check(const ConverterModel& model, const TrainingWindow& sample,
                           double epsilon, std::size_t coordinates, std::uint64_t seed) {
  std::vector<double> analytic;
  const std::span<const TrainingWindow> one(&sample, 1);
  loss_gradient(model, one, analytic);

  ConverterModel probe = model;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, analytic.size() - 1);
  GradCheckResult result;
  const std::size_t max_attempts = 20 * coordinates;
  for (std::size_t attempt = 0; attempt < max_attempts && result.checked < coordinates; ++attempt) {
    const std::size_t p = pick(rng);
    const double original = probe.parameter(p);
    probe.parameter(p) = original + epsilon;
    const auto r_plus = residuals(probe, sample);
    probe.parameter(p) = original - epsilon;
    const auto r_minus = residuals(probe, sample);
    probe.parameter(p) = original;

    bool kink = false;
    for (std::size_t i = 0; i < r_plus.size() && !kink; ++i) kink = sign(r_plus[i]) != sign(r_minus[i]);
    if (kink) {
      ++result.skipped_kinks;
      continue;
    }
    double sum_plus = 0.0;
    double sum_minus = 0.0;
    for (double r : r_plus) sum_plus += std::abs(r);
    for (double r : r_minus) sum_minus += std::abs(r);
    const double n = static_cast<double>(r_plus.size());
    const double numeric = (sum_plus / n - sum_minus / n) / (2.0 * epsilon);
    const double denom = std::max({std::abs(analytic[p]), std::abs(numeric), 1e-8});
    result.max_relative_error = std::max(result.max_relative_error, std::abs(analytic[p] - numeric) / denom);
    ++result.checked;
  }
  return result;
}

std::vector<double> predict_high_band(const ConverterModel& model, const StyleBands& bands,
                                      Style style) {
  const std::size_t w = model.window();
  const std::size_t hop = w / 2;
  const std::size_t n = bands.size();
  if (n == 0) fail(ErrorKind::kInvalidArgument, "cannot convert an empty contour");
  const std::size_t windows = n <= w ? 1 : (n - w + hop - 1) / hop + 1;
  const std::size_t padded = (windows - 1) * hop + w;

  std::vector<double> low(padded, bands.low.back());
  std::copy(bands.low.begin(), bands.low.end(), low.begin());
  std::vector<bool> flags(padded, false);
  std::copy(bands.voiced.begin(), bands.voiced.end(), flags.begin());

  std::vector<double> taper(w);
  for (std::size_t k = 0; k < w; ++k) {
    taper[k] = 1.0 - std::abs(2.0 * static_cast<double>(k) + 1.0 - static_cast<double>(w)) /
                         static_cast<double>(w);
  }
  std::vector<double> sum(padded, 0.0);
  std::vector<double> weight(padded, 0.0);
  for (std::size_t k = 0; k < windows; ++k) {
    const std::size_t o = k * hop;
    const auto centred = center_window(std::span<const double>(low).subspan(o, w));
    const std::vector<bool> wf(flags.begin() + static_cast<std::ptrdiff_t>(o),
                               flags.begin() + static_cast<std::ptrdiff_t>(o + w));
    const auto pred = forward(model, centred, wf, style);
    for (std::size_t i = 0; i < w; ++i) {
      sum[o + i] += taper[i] * pred[i];
      weight[o + i] += taper[i];
    }
  }
  std::vector<double> high(n);
  for (std::size_t i = 0; i < n; ++i) high[i] = sum[i] / weight[i];
  return high;
}

F0Contour convert_style(const ConverterModel& model, const F0Contour& contour, Style target,
                        int levels) {
  if (!model.all_finite()) fail(ErrorKind::kInvalidArgument, "model has non-finite weights");
  if (model.steps_trained == 0) fail(ErrorKind::kInvalidArgument, "model is untrained");
  StyleBands bands = decompose(contour, levels);
  bands.high = predict_high_band(model, bands, target);
  return recompose(bands, ScalingSpec::global(1.0));
}

std::string model_to_json(const ConverterModel& m) {
  nlohmann::json j;
  j["format"] = "pitchstyle-converter";
  j["format_version"] = kModelFormatVersion;
  j["window"] = m.shape.window;
  j["hidden_sizes"] = m.shape.hidden_sizes;
  j["style_dim"] = m.shape.style_dim;
  j["seed"] = m.seed;
  j["steps_trained"] = m.steps_trained;
  j["layers"] = nlohmann::json::array();
  for (const auto& layer : m.layers) {
    j["layers"].push_back({{"inputs", layer.inputs},
                           {"outputs", layer.outputs},
                           {"weights", layer.weights},
                           {"bias", layer.bias}});
  }
  j["style_vectors"] = {{"straight", m.style_vectors[0]}, {"vibrato", m.style_vectors[1]}};
  return j.dump() + "\n";
}

ConverterModel model_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", std::string{}) != "pitchstyle-converter") {
      fail(ErrorKind::kSchema, "not a converter checkpoint");
    }
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      fail(ErrorKind::kSchema, "checkpoint format_version " + std::to_string(version) +
                                   " is not supported (expected " +
                                   std::to_string(kModelFormatVersion) + ")");
    }
    ModelShape shape;
    shape.window = j.at("window").get<std::size_t>();
    shape.hidden_sizes = j.at("hidden_sizes").get<std::vector<std::size_t>>();
    shape.style_dim = j.at("style_dim").get<std::size_t>();
    ConverterModel m = ConverterModel::zeros(shape);
    m.seed = j.at("seed").get<std::uint64_t>();
    m.steps_trained = j.at("steps_trained").get<std::uint64_t>();
    const auto& layers = j.at("layers");
    if (layers.size() != m.layers.size()) fail(ErrorKind::kSchema, "checkpoint layer count mismatch");
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      auto weights = layers[l].at("weights").get<std::vector<double>>();
      auto bias = layers[l].at("bias").get<std::vector<double>>();
      if (weights.size() != m.layers[l].weights.size() || bias.size() != m.layers[l].bias.size()) {
        fail(ErrorKind::kSchema, "checkpoint layer " + std::to_string(l) + " has wrong size");
      }
      m.layers[l].weights = std::move(weights);
      m.layers[l].bias = std::move(bias);
    }
    const auto& sv = j.at("style_vectors");
    m.style_vectors[0] = sv.at("straight").get<std::vector<double>>();
    m.style_vectors[1] = sv.at("vibrato").get<std::vector<double>>();
    for (const auto& v : m.style_vectors) {
      if (v.size() != shape.style_dim) fail(ErrorKind::kSchema, "style vector has wrong size");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kSchema, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ConverterModel& model) {
  write_text_file(path, model_to_json(model));
}

ConverterModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_text_file(path));
}

}  // namespace pitchstyle
