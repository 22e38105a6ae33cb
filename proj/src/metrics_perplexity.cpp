#include "hcp/metrics/perplexity.hpp"

#include <cmath>
#include <iostream>

#include "hcp/error.hpp"

namespace hcp::metrics {

PerplexityReport perplexity(const std::vector<double>& token_logprobs,
                            std::optional<double> params_billions) {
  if (token_logprobs.empty()) throw EmptySequence("perplexity over an empty sequence");
  size_t positive = 0;
  double sum = 0.0;
  for (double lp : token_logprobs) {
    if (lp > 0.0) ++positive;
    sum += lp;
  }
  if (positive > 0) {
    std::cerr << "warning: " << positive << " log-probabilities are positive\n";
  }
  PerplexityReport report;
  report.token_count = token_logprobs.size();
  report.mean_nll = -sum / static_cast<double>(token_logprobs.size());
  report.perplexity = std::exp(report.mean_nll);
  if (params_billions) {
    report.params_billions = params_billions;
    report.normalized_perplexity = normalized_perplexity(report.perplexity, *params_billions);
  }
  return report;
}

double normalized_perplexity(double ppl, double params_billions) {
  if (ppl <= 0.0 || params_billions <= 0.0) {
    throw NonPositiveInput("normalized_perplexity needs positive inputs");
  }
  return ppl * params_billions;
}

}  // namespace hcp::metrics
