#pragma once

#include <vector>

namespace clarify::testing {

// Reference values computed once with scipy.stats (ttest_1samp and
// wilcoxon with default options) and frozen here.
struct StatsFixture {
  std::vector<double> x;
  double mean, sd, t, p, d, wilcoxon_p, favorability, equal_or_better;
};

inline const std::vector<StatsFixture>& stats_fixtures() {
  static const std::vector<StatsFixture> f = {
      {{3, 4, 3, 4, 3, 4, 3, 4, 3, 4}, 3.5, 0.5270462766947299, 2.9999999999999996,
       0.014956363910414203, 0.9486832980505138, 0.03688842570704982, 0.5, 1.0},
      {{5, 4, 3, 2, 1}, 3.0, 1.5811388300841898, 0.0, 1.0, 0.0, 1.0, 0.4, 0.6},
      {{4, 5, 4, 4, 3, 5, 2, 4, 5, 4, 3, 4}, 3.9166666666666665, 0.90033663737852,
       3.5269324258409878, 0.004740328193977805, 1.018137692736457, 0.01462936573737411, 0.75,
       0.9166666666666666},
      {{1, 2, 2, 3, 1, 2, 4, 2}, 2.125, 0.9910312089651149, -2.497271238044365,
       0.04115622848920312, -0.8829187134416477, 0.06498314450821076, 0.125, 0.25},
      {{5, 5, 4, 5, 5, 4, 5, 5, 5, 4, 3, 5, 5, 4, 5}, 4.6, 0.6324555320336759, 9.797958971132712,
       1.2021333854078993e-07, 2.5298221281347026, 0.0006380839819516312, 0.9333333333333333, 1.0},
      {{2, 5, 1, 4, 4, 3, 5, 2, 4, 4, 5, 1, 3, 4, 5, 4, 2, 5, 3, 4}, 3.5, 1.3178930553209385,
       1.6966991126265962, 0.106075752199252, 0.37939345531966406, 0.12366647073828084, 0.6, 0.75},
  };
  return f;
}

}  // namespace clarify::testing
