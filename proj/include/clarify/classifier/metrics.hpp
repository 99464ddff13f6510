#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace clarify {

struct ClassifierMetrics {
  // Rows are gold, columns are predictions. Level matrix index = level - 1;
  // binary index 1 = "clear" (level >= clear_min_level).
  std::array<std::array<std::int64_t, 4>, 4> confusion{};
  std::array<std::array<std::int64_t, 2>, 2> binary{};
  std::int64_t total = 0;
  double accuracy = 0.0;
  double precision = 0.0;  // of the "clear" class; 0 when nothing is predicted clear
  double recall = 0.0;     // of the "clear" class; 0 when nothing is gold clear
};

/// Throws LengthMismatch if sizes differ, PreconditionError if empty or a
/// level is outside [1, 4] or clear_min_level outside {2, 3, 4}.
ClassifierMetrics evaluate_classifier(std::span<const int> predictions, std::span<const int> gold,
                                      int clear_min_level);

}  // namespace clarify
