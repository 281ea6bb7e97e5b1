#pragma once

#include <map>
#include <string>
#include <vector>

#include "pitchstyle/corpus.hpp"
#include "pitchstyle/vibrato_analysis.hpp"

namespace pitchstyle {

struct EvalConfig {
  std::vector<double> alphas{0.1, 0.3, 0.5, 0.7, 1.0, 2.0};
  int levels = kDefaultLevels;
  std::vector<int> capture_levels{3, 4, 5};
  EstimatorConfig estimator;
};

struct AlphaAccuracy {
  double alpha = 0.0;
  double accuracy = 0.0;  // share of vibrato items still labelled vibrato
};

struct EvalReport {
  double style_accuracy = 0.0;
  std::vector<AlphaAccuracy> per_alpha_accuracy;
  std::map<int, double> level_capture;  // mean over vibrato items
};

/// Share of vibrato items the detector labels vibrato after their high band
/// is scaled by `alpha`.
double vibrato_detection_rate(const Corpus& corpus, double alpha, int levels = kDefaultLevels,
                              const EstimatorConfig& config = {});

EvalReport evaluate_corpus(const Corpus& corpus, const EvalConfig& config = {});

std::string report_json(const EvalReport& report);

}  // namespace pitchstyle
