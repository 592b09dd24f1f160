#include "skewd/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "skewd/error.hpp"

namespace skewd {

namespace {

void require_nonempty(std::span<const ScoredPrediction> preds) {
  if (preds.empty()) throw InputError("no predictions to evaluate");
  for (const auto& p : preds) {
    if (!std::isfinite(p.certainty)) throw InputError("certainty of pair " + p.pair_id + " is not finite");
  }
}

}  // namespace

double accuracy(std::span<const ScoredPrediction> preds) {
  require_nonempty(preds);
  const auto hits = std::count_if(preds.begin(), preds.end(), [](const auto& p) { return p.correct(); });
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

std::vector<ScoredPrediction> rank_by_certainty(std::span<const ScoredPrediction> preds) {
  std::vector<ScoredPrediction> sorted(preds.begin(), preds.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.certainty != b.certainty) return a.certainty > b.certainty;
    return a.pair_id < b.pair_id;
  });
  return sorted;
}

std::vector<CurvePoint> decision_rate_curve(std::span<const ScoredPrediction> preds) {
  require_nonempty(preds);
  const auto sorted = rank_by_certainty(preds);
  const double total = static_cast<double>(sorted.size());
  std::vector<CurvePoint> curve;
  curve.reserve(sorted.size());
  long hits = 0;
  for (std::size_t m = 1; m <= sorted.size(); ++m) {
    if (sorted[m - 1].correct()) ++hits;
    curve.push_back({static_cast<double>(m) / total, static_cast<double>(hits) / static_cast<double>(m)});
  }
  return curve;
}

double audrc(std::span<const ScoredPrediction> preds) {
  const auto curve = decision_rate_curve(preds);
  double sum = 0.0;
  for (const auto& pt : curve) sum += pt.accuracy;
  return sum / static_cast<double>(curve.size());
}

}  // namespace skewd
