#include "clarify/evalkit/perplexity.hpp"

#include <cmath>

#include "clarify/errors.hpp"

namespace clarify {

namespace {

struct Accumulator {
  double sum = 0.0;
  double carry = 0.0;  // Kahan compensation
  std::size_t n = 0;

  void add(double logp) {
    if (!(logp <= 0.0)) {
      throw PositiveLogProb("log-probability must be <= 0, got " + std::to_string(logp));
    }
    const double y = logp - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    ++n;
  }

  double value() const {
    if (n == 0) throw EmptySequence("perplexity of an empty token sequence");
    return std::exp(-sum / static_cast<double>(n));
  }
};

}  // namespace

double perplexity(std::span<const double> logprobs) {
  Accumulator acc;
  for (double lp : logprobs) acc.add(lp);
  return acc.value();
}

double perplexity(const std::vector<TokenLogProb>& tokens) {
  Accumulator acc;
  for (const auto& t : tokens) acc.add(t.logprob);
  return acc.value();
}

double corpus_perplexity(const std::vector<std::vector<double>>& sequences) {
  Accumulator acc;
  for (const auto& seq : sequences) {
    for (double lp : seq) acc.add(lp);
  }
  return acc.value();
}

double compare_perplexity(const std::vector<std::vector<double>>& model_a,
                          const std::vector<std::vector<double>>& model_b) {
  const double a = corpus_perplexity(model_a);
  const double b = corpus_perplexity(model_b);
  return (a - b) / a;
}

}  // namespace clarify
