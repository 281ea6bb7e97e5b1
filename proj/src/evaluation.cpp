#include "pitchstyle/evaluation.hpp"

#include "json.hpp"
#include "pitchstyle/error.hpp"
#include "pitchstyle/style_engine.hpp"

namespace pitchstyle {

double vibrato_detection_rate(const Corpus& corpus, double alpha, int levels,
                              const EstimatorConfig& config) {
  std::size_t total = 0;
  std::size_t hits = 0;
  for (const auto& item : corpus.items) {
    if (item.label != Style::kVibrato) continue;
    const F0Contour scaled = recompose(decompose(item.contour, levels), ScalingSpec::global(alpha));
    ++total;
    if (estimate(scaled, levels, std::nullopt, config).label == Style::kVibrato) ++hits;
  }
  if (total == 0) fail(ErrorKind::kInvalidArgument, "corpus has no vibrato items");
  return static_cast<double>(hits) / static_cast<double>(total);
}

EvalReport evaluate_corpus(const Corpus& corpus, const EvalConfig& config) {
  if (corpus.items.empty()) fail(ErrorKind::kInvalidArgument, "cannot evaluate an empty corpus");
  EvalReport report;
  const auto labeled = corpus.labeled();
  report.style_accuracy = style_accuracy(labeled, config.levels, config.estimator);
  for (double alpha : config.alphas) {
    report.per_alpha_accuracy.push_back(
        {alpha, vibrato_detection_rate(corpus, alpha, config.levels, config.estimator)});
  }
  for (int levels : config.capture_levels) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& item : corpus.items) {
      if (item.segments.empty()) continue;
      sum += level_energy_capture(item.contour, item.modulation(), levels);
      ++n;
    }
    if (n > 0) report.level_capture[levels] = sum / static_cast<double>(n);
  }
  return report;
}

std::string report_json(const EvalReport& report) {
  nlohmann::json alphas = nlohmann::json::array();
  for (const auto& a : report.per_alpha_accuracy) {
    alphas.push_back({{"alpha", a.alpha}, {"accuracy", a.accuracy}});
  }
  nlohmann::json capture = nlohmann::json::object();
  for (const auto& [levels, value] : report.level_capture) capture[std::to_string(levels)] = value;
  const nlohmann::json j{{"style_accuracy", report.style_accuracy},
                         {"per_alpha_accuracy", alphas},
                         {"level_capture", capture}};
  return j.dump(2) + "\n";
}

}  // namespace pitchstyle
