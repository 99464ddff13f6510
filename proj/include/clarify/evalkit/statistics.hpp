#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "clarify/evalkit/study.hpp"

namespace clarify {

struct OneSampleTest {
  std::size_t n = 0;
  double mu = 3.0;
  double mean = 0.0;
  double sd = 0.0;          // sample sd (n - 1)
  double t = 0.0;           // (mean - mu) / (sd / sqrt(n))
  double p = 1.0;           // two-sided, Student t with n - 1 df
  double cohens_d = 0.0;    // (mean - mu) / sd
  double wilcoxon_p = 1.0;  // two-sided signed-rank companion
};

/// Throws PreconditionError when n < 2 and DegenerateSample when sd == 0.
OneSampleTest one_sample_test(std::span<const double> sample, double mu = 3.0);

/// Two-sided Wilcoxon signed-rank p-value of sample - mu. Zero differences
/// are dropped. Exact null distribution without ties and n <= 30, otherwise
/// the normal approximation with tie and continuity correction. Throws
/// DegenerateSample when every difference is zero.
double wilcoxon_signed_rank_p(std::span<const double> sample, double mu = 3.0);

double mean_of(std::span<const double> sample);
double sample_sd(std::span<const double> sample);

/// Share of scores in {4, 5}.
double favorability_share(std::span<const int> scores);
/// Share of scores in {3, 4, 5}.
double equal_or_better_share(std::span<const int> scores);

struct MetricSummary {
  Metric metric = Metric::PrecisionFocus;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double favorability = 0.0;
  double equal_or_better = 0.0;
  // Unset when n < 2 or the sample is degenerate.
  std::optional<double> t;
  std::optional<double> p;
  std::optional<double> cohens_d;
  std::optional<double> wilcoxon_p;
  // Set only for degenerate samples (sd == 0).
  std::optional<bool> degenerate_mean_equals_mu;
};

struct StatsSummary {
  double mu = 3.0;
  std::vector<MetricSummary> metrics;  // in Metric enum order, present metrics only
};

/// Per-metric statistics over oriented ratings.
StatsSummary summarize(const std::vector<RatingRecord>& oriented, double mu = 3.0);

nlohmann::json to_json(const StatsSummary& summary);

}  // namespace clarify
