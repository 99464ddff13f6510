#pragma once

// Reference computations written independently of the library, used only
// as test oracles.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace clarify::testing {

struct Moments {
  double mean;
  double sd;
};

// Sum / sum-of-squares form, unlike the library's two-pass form.
inline Moments moments_oracle(const std::vector<double>& x) {
  double s = 0.0;
  double ss = 0.0;
  for (double v : x) {
    s += v;
    ss += v * v;
  }
  const double n = static_cast<double>(x.size());
  const double var = (ss - s * s / n) / (n - 1.0);
  return {s / n, std::sqrt(var < 0 ? 0.0 : var)};
}

inline double t_pdf(double t, double df) {
  const double logc = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * M_PI);
  return std::exp(logc - (df + 1.0) / 2.0 * std::log1p(t * t / df));
}

// Two-sided p = 2 * integral_{|t|}^{inf} pdf, integrated with composite
// Simpson after substituting t = |t| + u / (1 - u) on u in [0, 1).
inline double t_two_sided_p_oracle(double t, double df) {
  const double a = std::abs(t);
  const int n = 200000;
  const double h = 1.0 / n;
  auto f = [&](double u) {
    if (u >= 1.0) return 0.0;
    const double x = a + u / (1.0 - u);
    return t_pdf(x, df) / ((1.0 - u) * (1.0 - u));
  };
  double sum = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) sum += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return std::min(1.0, 2.0 * sum * h / 3.0);
}

// Exact two-sided signed-rank p by enumerating all 2^n sign patterns of
// untied ranks 1..n.
inline double wilcoxon_exact_oracle(const std::vector<double>& diffs) {
  const int n = static_cast<int>(diffs.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(diffs[a]) < std::abs(diffs[b]); });
  int observed = 0;
  for (int r = 0; r < n; ++r) {
    if (diffs[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] > 0) observed += r + 1;
  }
  long long le = 0;
  long long ge = 0;
  for (long long mask = 0; mask < (1LL << n); ++mask) {
    int w = 0;
    for (int r = 0; r < n; ++r) {
      if (mask & (1LL << r)) w += r + 1;
    }
    le += w <= observed;
    ge += w >= observed;
  }
  const double total = static_cast<double>(1LL << n);
  return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / total);
}

// Confusion counts by direct loop; binary index 1 = clear.
struct BinaryOracle {
  std::array<std::array<int, 2>, 2> m{};  // [gold][pred]
  double accuracy;
  double precision;
  double recall;
};

inline BinaryOracle binary_oracle(const std::vector<int>& pred, const std::vector<int>& gold, int clear_min) {
  BinaryOracle o{};
  int correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int g = gold[i] >= clear_min;
    const int p = pred[i] >= clear_min;
    ++o.m[g][p];
    correct += g == p;
  }
  o.accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());
  const int tp = o.m[1][1];
  const int pp = o.m[0][1] + o.m[1][1];
  const int ap = o.m[1][0] + o.m[1][1];
  o.precision = pp ? static_cast<double>(tp) / pp : 0.0;
  o.recall = ap ? static_cast<double>(tp) / ap : 0.0;
  return o;
}

}  // namespace clarify::testing
