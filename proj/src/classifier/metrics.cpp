#include "clarify/classifier/metrics.hpp"

#include <string>

#include "clarify/errors.hpp"

namespace clarify {

namespace {

int checked_level(int level) {
  if (level < 1 || level > 4) throw PreconditionError("level out of range: " + std::to_string(level));
  return level;
}

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassifierMetrics evaluate_classifier(std::span<const int> predictions, std::span<const int> gold,
                                      int clear_min_level) {
  if (predictions.size() != gold.size()) {
    throw LengthMismatch("predictions and gold differ in length (" +
                         std::to_string(predictions.size()) + " vs " +
                         std::to_string(gold.size()) + ")");
  }
  if (gold.empty()) throw PreconditionError("evaluate_classifier: no items");
  if (clear_min_level < 2 || clear_min_level > 4) {
    throw PreconditionError("clear_min_level must be in {2, 3, 4}");
  }

  ClassifierMetrics m;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int g = checked_level(gold[i]);
    const int p = checked_level(predictions[i]);
    ++m.confusion[static_cast<std::size_t>(g - 1)][static_cast<std::size_t>(p - 1)];
    ++m.binary[g >= clear_min_level][p >= clear_min_level];
  }
  m.total = static_cast<std::int64_t>(gold.size());
  const auto tp = m.binary[1][1];
  const auto tn = m.binary[0][0];
  const auto fp = m.binary[0][1];
  const auto fn = m.binary[1][0];
  m.accuracy = ratio(tp + tn, m.total);
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  return m;
}

}  // namespace clarify
