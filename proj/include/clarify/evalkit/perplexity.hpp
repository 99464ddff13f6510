#pragma once

#include <span>
#include <vector>

#include "clarify/backend/types.hpp"

namespace clarify {

/// exp(-mean(logprobs)) over natural-log token probabilities. Throws
/// EmptySequence for no tokens and PositiveLogProb for any logp > 0 or NaN.
double perplexity(std::span<const double> logprobs);
double perplexity(const std::vector<TokenLogProb>& tokens);

/// Perplexity of a corpus with every token of every sequence pooled.
double corpus_perplexity(const std::vector<std::vector<double>>& sequences);

/// Relative reduction (ppl_a - ppl_b) / ppl_a of corpus perplexities.
/// Positive means model b is more confident.
double compare_perplexity(const std::vector<std::vector<double>>& model_a,
                          const std::vector<std::vector<double>>& model_b);

}  // namespace clarify
