#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace hcp::modeling {

/// Count-based n-gram language model over lexical tokens. Log-probabilities
/// use additive smoothing (a proper distribution, for perplexity); greedy
/// and sampled generation use stupid backoff (unseen contexts fall back to
/// the next shorter context scaled by backoff_factor).
struct NgramModel {
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEos = "</s>";
  static constexpr const char* kUnk = "<unk>";

  int order = 4;
  double smoothing_k = 0.01;
  double backoff_factor = 0.4;

  struct ContextCounts {
    std::map<std::string, uint64_t> next;
    uint64_t total = 0;
  };
  // tables[len] maps a context of `len` tokens (joined with '\x1f') to its
  // next-token counts; tables[0][""] holds the unigram counts.
  std::vector<std::map<std::string, ContextCounts>> tables;
  std::vector<std::string> vocab;  // sorted; includes </s> and <unk>, never <s>
};

/// Count every n-gram of orders 1..order over the sequences, with begin/end
/// sentinels. Throws EmptyCorpus on an empty corpus.
NgramModel train_ngram(const std::vector<std::vector<std::string>>& sequences,
                       int order = 4, double smoothing_k = 0.01,
                       double backoff_factor = 0.4);

/// Additive-smoothed conditional: (count + k) / (total + k * |V|), over the
/// longest-order table. Sums to 1 over the vocabulary for every context;
/// out-of-vocabulary tokens get the smoothed floor (finite, never -inf).
double conditional_logprob(const NgramModel& model,
                           const std::vector<std::string>& context,
                           const std::string& token);

/// One natural-log probability per token. Throws EmptySequence.
std::vector<double> logprobs(const NgramModel& model,
                             const std::vector<std::string>& tokens);

/// Stupid-backoff score (not normalized) used for generation.
double backoff_score(const NgramModel& model, const std::vector<std::string>& context,
                     const std::string& token);

/// Temperature 0 is greedy argmax with lexicographic tie-break; otherwise
/// seeded sampling proportional to score^(1/temperature). Generation stops
/// at the end sentinel or after max_new_tokens.
std::vector<std::string> generate(const NgramModel& model,
                                  const std::vector<std::string>& prompt_tokens,
                                  size_t max_new_tokens, double temperature,
                                  uint64_t seed);

nlohmann::json model_to_json(const NgramModel& model);
NgramModel model_from_json(const nlohmann::json& j);
void save_model(const NgramModel& model, const std::string& path);
NgramModel load_model(const std::string& path);

}  // namespace hcp::modeling
