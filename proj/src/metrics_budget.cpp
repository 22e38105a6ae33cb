#include "hcp/metrics/budget.hpp"

#include <cstdio>

namespace hcp::metrics {

uint64_t estimate_params(uint64_t layers, uint64_t hidden_dim, uint64_t heads,
                         uint64_t vocab, uint64_t context_len, bool tied_embeddings) {
  (void)heads;  // head count partitions d; it does not add parameters
  uint64_t d = hidden_dim;
  uint64_t embeddings = vocab * d + context_len * d;
  uint64_t per_layer = 12 * d * d + 13 * d;
  uint64_t final_norm = 2 * d;
  uint64_t total = embeddings + layers * per_layer + final_norm;
  if (!tied_embeddings) total += vocab * d;
  return total;
}

uint64_t estimate_ram(uint64_t param_count, uint64_t bytes_per_param) {
  return param_count * bytes_per_param;
}

std::string format_gb(uint64_t bytes) {
  double gb = static_cast<double>(bytes) / 1e9;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", gb);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s + " GB";
}

ModelBudget model_budget(uint64_t layers, uint64_t hidden_dim, uint64_t heads,
                         uint64_t vocab, uint64_t context_len, bool tied_embeddings,
                         uint64_t bytes_per_param) {
  ModelBudget b;
  b.layers = layers;
  b.hidden_dim = hidden_dim;
  b.heads = heads;
  b.vocab = vocab;
  b.context_len = context_len;
  b.tied_embeddings = tied_embeddings;
  b.param_count = estimate_params(layers, hidden_dim, heads, vocab, context_len,
                                  tied_embeddings);
  b.ram_bytes = estimate_ram(b.param_count, bytes_per_param);
  return b;
}

}  // namespace hcp::metrics
