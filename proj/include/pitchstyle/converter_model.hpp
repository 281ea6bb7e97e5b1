#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pitchstyle/contour.hpp"
#include "pitchstyle/style_engine.hpp"
#include "pitchstyle/vibrato_analysis.hpp"

namespace pitchstyle {

struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;

  bool operator==(const DenseLayer&) const = default;
};

struct ModelShape {
  std::size_t window = 64;
  std::vector<std::size_t> hidden_sizes{128, 128};
  std::size_t style_dim = 16;

  bool operator==(const ModelShape&) const = default;
};

/// Windowed high-band regressor. Input per window is the mean-centred low
/// band, the voiced flags (0/1) and the style vector; tanh between layers,
/// linear output of `window` values.
struct ConverterModel {
  ModelShape shape;
  std::uint64_t seed = 0;
  std::uint64_t steps_trained = 0;
  std::vector<DenseLayer> layers;
  std::vector<std::vector<double>> style_vectors;  // indexed by Style

  /// Glorot-uniform weights, zero biases, N(0, 1) style vectors.
  static ConverterModel initialize(const ModelShape& shape, std::uint64_t seed);
  /// Every parameter zero.
  static ConverterModel zeros(const ModelShape& shape);

  std::size_t window() const { return shape.window; }
  std::size_t input_size() const { return 2 * shape.window + shape.style_dim; }
  std::size_t parameter_count() const;
  /// Flat parameter order: layers (weights then bias), then style vectors.
  double& parameter(std::size_t index);
  double parameter(std::size_t index) const;
  bool all_finite() const;

  bool operator==(const ConverterModel&) const = default;
};

/// One training example: a centred low-band window, its flags, the style
/// label and the ground-truth high band.
struct TrainingWindow {
  std::vector<double> low;
  std::vector<bool> flags;
  Style style = Style::kStraight;
  std::vector<double> target;
};

/// Subtracts the window mean.
std::vector<double> center_window(std::span<const double> low);

/// Cuts windows at offsets 0, stride, 2 * stride, ... from each decomposed
/// contour. Windows with no voiced frame are skipped.
std::vector<TrainingWindow> make_training_windows(std::span<const LabeledContour> items,
                                                  std::size_t window, int levels,
                                                  std::size_t stride);

/// low_window must already be centred.
std::vector<double> forward(const ConverterModel& model, std::span<const double> low_window,
                            const std::vector<bool>& flags, Style style);

/// Mean absolute error over every value of every window in the batch.
double loss(const ConverterModel& model, std::span<const TrainingWindow> batch);

/// Loss plus its gradient, laid out like ConverterModel::parameter().
double loss_gradient(const ConverterModel& model, std::span<const TrainingWindow> batch,
                     std::vector<double>& gradient);

struct TrainConfig {
  double learning_rate = 0.3;
  std::size_t steps = 20000;
  std::size_t batch = 32;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kLossLogInterval = 100;

struct TrainResult {
  ConverterModel model;
  std::vector<double> loss_history;  // mean batch loss per logging interval
};

/// Plain SGD on uniformly sampled batches. Throws Error(kDiverged) on a
/// non-finite loss.
TrainResult train(ConverterModel model, std::span<const TrainingWindow> corpus,
                  const TrainConfig& config);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
};

/// Compares the analytic gradient with central differences on `coordinates`
/// random parameters. Coordinates whose +/- epsilon probes put any residual
/// on opposite sides of zero straddle a kink of |.| and are redrawn.
GradCheckResult grad_check(const ConverterModel& model, const TrainingWindow& sample,
                           double epsilon = 1e-5, std::size_t coordinates = 100,
                           std::uint64_t seed = 7);

/// Predicts the high band for every frame: windows at hop W/2 over the
/// edge-padded low band, blended with triangular weights.
std::vector<double> predict_high_band(const ConverterModel& model, const StyleBands& bands,
                                      Style style);

/// Decompose, replace the high band with the prediction, recompose at a = 1.
F0Contour convert_style(const ConverterModel& model, const F0Contour& contour, Style target,
                        int levels = kDefaultLevels);

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const ConverterModel& model);
ConverterModel model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const ConverterModel& model);
ConverterModel load_model(const std::filesystem::path& path);

}  // namespace pitchstyle
