#include <gtest/gtest.h>

#include <numeric>

#include "skewd/error.hpp"
#include "skewd/evaluation.hpp"

namespace skewd {
namespace {

ScoredPrediction pred(const std::string& id, bool correct, double certainty) {
  return {id, correct ? Direction::XtoY : Direction::YtoX, Direction::XtoY, certainty};
}

TEST(Accuracy, Fractions) {
  EXPECT_EQ(accuracy(std::vector{pred("a", true, 1), pred("b", true, 2)}), 1.0);
  EXPECT_EQ(accuracy(std::vector{pred("a", true, 1), pred("b", false, 2)}), 0.5);
  EXPECT_EQ(accuracy(std::vector{pred("a", true, 1), pred("b", false, 2), pred("c", true, 0), pred("d", true, 5)}),
            0.75);
  EXPECT_THROW(accuracy(std::vector<ScoredPrediction>{}), InputError);
}

TEST(Audrc, WorkedExamples) {
  EXPECT_EQ(audrc(std::vector{pred("a", true, 0.1), pred("b", true, 9), pred("c", true, 3)}), 1.0);
  EXPECT_EQ(audrc(std::vector{pred("a", false, 1)}), 0.0);
  // certainty order: correct, wrong, correct
  const std::vector mixed{pred("x", true, 1.0), pred("y", false, 5.0), pred("z", true, 9.0)};
  EXPECT_NEAR(audrc(mixed), (1.0 + 0.5 + 2.0 / 3.0) / 3.0, 1e-15);
  const auto curve = decision_rate_curve(mixed);
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_NEAR(curve[0].rate, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(curve[0].accuracy, 1.0);
  EXPECT_NEAR(curve[1].rate, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(curve[1].accuracy, 0.5);
  EXPECT_EQ(curve[2].rate, 1.0);
  EXPECT_NEAR(curve[2].accuracy, 2.0 / 3.0, 1e-15);
  EXPECT_THROW(audrc(std::vector<ScoredPrediction>{}), InputError);
  EXPECT_THROW(decision_rate_curve(std::vector<ScoredPrediction>{}), InputError);
}

TEST(Audrc, TiesFollowPairId) {
  const std::vector preds{pred("b", false, 1.0), pred("a", true, 1.0), pred("c", true, 0.5)};
  const auto ranked = rank_by_certainty(preds);
  EXPECT_EQ(ranked[0].pair_id, "a");
  EXPECT_EQ(ranked[1].pair_id, "b");
  EXPECT_EQ(ranked[2].pair_id, "c");
  EXPECT_NEAR(audrc(preds), (1.0 + 0.5 + 2.0 / 3.0) / 3.0, 1e-15);
}

TEST(Audrc, EqualsCurveMean) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::bernoulli_distribution coin(0.6);
  std::vector<ScoredPrediction> preds;
  for (int i = 0; i < 57; ++i) preds.push_back(pred("p" + std::to_string(i), coin(rng), u(rng)));
  const auto curve = decision_rate_curve(preds);
  const double mean =
      std::accumulate(curve.begin(), curve.end(), 0.0, [](double s, const CurvePoint& c) { return s + c.accuracy; }) /
      static_cast<double>(curve.size());
  EXPECT_EQ(audrc(preds), mean);
  EXPECT_GE(audrc(preds), 0.0);
  EXPECT_LE(audrc(preds), 1.0);
  EXPECT_EQ(curve.back().accuracy, accuracy(preds));
}

TEST(Audrc, RejectsNonFiniteCertainty) {
  EXPECT_THROW(audrc(std::vector{pred("a", true, std::nan(""))}), InputError);
}

}  // namespace
}  // namespace skewd
