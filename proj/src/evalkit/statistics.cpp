#include "clarify/evalkit/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/students_t.hpp>

#include "clarify/errors.hpp"

namespace clarify {

namespace {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Exact two-sided p for the signed-rank statistic with untied ranks 1..n.
double exact_signed_rank_p(int n, double r_plus) {
  const int total = n * (n + 1) / 2;
  std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
  ways[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    for (int s = total; s >= k; --s) ways[s] += ways[s - k];
  }
  const double all = std::ldexp(1.0, n);
  const int w = static_cast<int>(std::lround(r_plus));
  double lower = 0.0;
  double upper = 0.0;
  for (int s = 0; s <= total; ++s) {
    if (s <= w) lower += ways[s];
    if (s >= w) upper += ways[s];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

}  // namespace

double mean_of(std::span<const double> sample) {
  if (sample.empty()) throw PreconditionError("mean of an empty sample");
  double sum = 0.0;
  for (double x : sample) sum += x;
  return sum / static_cast<double>(sample.size());
}

double sample_sd(std::span<const double> sample) {
  if (sample.size() < 2) throw PreconditionError("sample sd needs n >= 2");
  const double m = mean_of(sample);
  double ss = 0.0;
  for (double x : sample) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(sample.size() - 1));
}

double wilcoxon_signed_rank_p(std::span<const double> sample, double mu) {
  std::vector<double> d;
  for (double x : sample) {
    if (x != mu) d.push_back(x - mu);
  }
  if (d.empty()) throw DegenerateSample("every difference from mu is zero", true);

  std::vector<std::size_t> order(d.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });

  // Average ranks over runs of equal |d|.
  std::vector<double> rank(d.size());
  std::vector<std::size_t> tie_sizes;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    if (j > i) tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }

  double r_plus = 0.0;
  double r_minus = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) (d[i] > 0 ? r_plus : r_minus) += rank[i];

  const auto n = static_cast<double>(d.size());
  if (tie_sizes.empty() && d.size() <= 30) {
    return exact_signed_rank_p(static_cast<int>(d.size()), r_plus);
  }
  const double t_stat = std::min(r_plus, r_minus);
  const double mn = n * (n + 1.0) / 4.0;
  double var24 = n * (n + 1.0) * (2.0 * n + 1.0);
  for (auto t : tie_sizes) {
    const auto tt = static_cast<double>(t);
    var24 -= 0.5 * tt * (tt * tt - 1.0);
  }
  const double se = std::sqrt(var24 / 24.0);
  const double diff = t_stat - mn;
  const double correction = diff > 0 ? 0.5 : (diff < 0 ? -0.5 : 0.0);
  const double z = (diff - correction) / se;
  return std::min(1.0, 2.0 * normal_sf(std::abs(z)));
}

OneSampleTest one_sample_test(std::span<const double> sample, double mu) {
  if (sample.size() < 2) throw PreconditionError("one-sample test needs n >= 2");
  OneSampleTest r;
  r.n = sample.size();
  r.mu = mu;
  r.mean = mean_of(sample);
  r.sd = sample_sd(sample);
  if (r.sd == 0.0) {
    throw DegenerateSample("sample sd is 0; t and Cohen's d are undefined", r.mean == mu);
  }
  const auto n = static_cast<double>(r.n);
  r.t = (r.mean - mu) / (r.sd / std::sqrt(n));
  r.cohens_d = (r.mean - mu) / r.sd;
  const boost::math::students_t dist(n - 1.0);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  r.wilcoxon_p = wilcoxon_signed_rank_p(sample, mu);
  return r;
}

double favorability_share(std::span<const int> scores) {
  if (scores.empty()) throw PreconditionError("favorability of an empty sample");
  const auto k = std::count_if(scores.begin(), scores.end(), [](int s) { return s >= 4; });
  return static_cast<double>(k) / static_cast<double>(scores.size());
}

double equal_or_better_share(std::span<const int> scores) {
  if (scores.empty()) throw PreconditionError("equal-or-better share of an empty sample");
  const auto k = std::count_if(scores.begin(), scores.end(), [](int s) { return s >= 3; });
  return static_cast<double>(k) / static_cast<double>(scores.size());
}

StatsSummary summarize(const std::vector<RatingRecord>& oriented, double mu) {
  std::map<Metric, std::vector<int>> by_metric;
  for (const auto& r : oriented) by_metric[r.metric].push_back(r.score);

  StatsSummary out;
  out.mu = mu;
  for (const auto& [metric, scores] : by_metric) {
    MetricSummary m;
    m.metric = metric;
    m.n = scores.size();
    const std::vector<double> xs(scores.begin(), scores.end());
    m.mean = mean_of(xs);
    m.favorability = favorability_share(scores);
    m.equal_or_better = equal_or_better_share(scores);
    if (m.n >= 2) {
      m.sd = sample_sd(xs);
      try {
        const auto test = one_sample_test(xs, mu);
        m.t = test.t;
        m.p = test.p;
        m.cohens_d = test.cohens_d;
        m.wilcoxon_p = test.wilcoxon_p;
      } catch (const DegenerateSample& e) {
        m.degenerate_mean_equals_mu = e.mean_equals_mu();
        if (!e.mean_equals_mu()) m.wilcoxon_p = wilcoxon_signed_rank_p(xs, mu);
      }
    }
    out.metrics.push_back(m);
  }
  return out;
}

nlohmann::json to_json(const StatsSummary& summary) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& m : summary.metrics) {
    metrics.push_back({
        {"metric", to_string(m.metric)},
        {"n", m.n},
        {"mean", m.mean},
        {"sd", m.sd},
        {"favorability", m.favorability},
        {"equal_or_better", m.equal_or_better},
        {"t", opt(m.t)},
        {"p", opt(m.p)},
        {"cohens_d", opt(m.cohens_d)},
        {"wilcoxon_p", opt(m.wilcoxon_p)},
        {"degenerate", m.degenerate_mean_equals_mu
                           ? nlohmann::json{{"mean_equals_mu", *m.degenerate_mean_equals_mu}}
                           : nlohmann::json(nullptr)},
    });
  }
  return {{"mu", summary.mu}, {"metrics", metrics}};
}

}  // namespace clarify
