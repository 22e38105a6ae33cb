#pragma once

#include <cstdint>
#include <string>

namespace hcp::metrics {

/// Decoder-only transformer parameter count:
///   vocab*d + context*d + layers*(12*d^2 + 13*d) + 2*d
/// plus a second vocab*d projection when embeddings are untied. Biases and
/// layer norms included; attention head count does not change the total.
uint64_t estimate_params(uint64_t layers, uint64_t hidden_dim, uint64_t heads,
                         uint64_t vocab, uint64_t context_len, bool tied_embeddings);

/// RAM = parameters * bytes per parameter, exact integer arithmetic.
uint64_t estimate_ram(uint64_t param_count, uint64_t bytes_per_param = 4);

/// Decimal-gigabyte rendering, e.g. 3600000000 -> "3.6 GB".
std::string format_gb(uint64_t bytes);

struct ModelBudget {
  uint64_t layers = 0;
  uint64_t hidden_dim = 0;
  uint64_t heads = 0;
  uint64_t vocab = 0;
  uint64_t context_len = 0;
  bool tied_embeddings = false;
  uint64_t param_count = 0;
  uint64_t ram_bytes = 0;
};

ModelBudget model_budget(uint64_t layers, uint64_t hidden_dim, uint64_t heads,
                         uint64_t vocab, uint64_t context_len, bool tied_embeddings,
                         uint64_t bytes_per_param = 4);

}  // namespace hcp::metrics
