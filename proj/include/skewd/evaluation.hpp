#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skewd/inference.hpp"

namespace skewd {

struct ScoredPrediction {
  std::string pair_id;
  Direction predicted = Direction::XtoY;
  Direction truth = Direction::XtoY;
  double certainty = 0.0;
  bool correct() const { return predicted == truth; }
};

struct CurvePoint {
  double rate;
  double accuracy;
};

/// Fraction of correct predictions. Throws InputError when empty.
double accuracy(std::span<const ScoredPrediction> preds);

/// Orders predictions by certainty, most certain first; equal certainties
/// keep ascending pair_id order.
std::vector<ScoredPrediction> rank_by_certainty(std::span<const ScoredPrediction> preds);

/// Point m is (m / M, accuracy of the m most certain predictions).
std::vector<CurvePoint> decision_rate_curve(std::span<const ScoredPrediction> preds);

/// Area under the decision rate curve: the mean of its prefix accuracies.
double audrc(std::span<const ScoredPrediction> preds);

}  // namespace skewd
