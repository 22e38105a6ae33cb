#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace hcp::metrics {

struct PerplexityReport {
  size_t token_count = 0;
  double mean_nll = 0.0;     // mean negative natural-log likelihood
  double perplexity = 1.0;   // exp(mean_nll)
  std::optional<double> params_billions;
  std::optional<double> normalized_perplexity;  // perplexity * params_billions
};

/// Perplexity of a scored token sequence. `token_logprobs` are natural-log
/// probabilities (<= 0; positive values are warned about, not rejected).
/// Throws EmptySequence on an empty list.
PerplexityReport perplexity(const std::vector<double>& token_logprobs,
                            std::optional<double> params_billions = std::nullopt);

/// Size-normalized perplexity: ppl * params_billions (the orange bars).
/// Throws NonPositiveInput unless both arguments are positive.
double normalized_perplexity(double ppl, double params_billions);

}  // namespace hcp::metrics
