#include "hcp/modeling/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "hcp/error.hpp"
#include "hcp/util/io.hpp"

namespace hcp::modeling {

namespace {

constexpr char kSep = '\x1f';

std::string context_key(const std::vector<std::string>& tokens, size_t end, size_t len) {
  // key over tokens[end-len .. end)
  std::string key;
  for (size_t i = end - len; i < end; ++i) {
    if (!key.empty() || i != end - len) key += kSep;
    key += tokens[i];
  }
  return key;
}

// last min(len, order-1) tokens of an arbitrary context vector
std::string suffix_key(const std::vector<std::string>& context, size_t len) {
  std::string key;
  size_t start = context.size() - len;
  for (size_t i = start; i < context.size(); ++i) {
    if (i != start) key += kSep;
    key += context[i];
  }
  return key;
}

std::vector<std::string> padded_context(const NgramModel& model,
                                        const std::vector<std::string>& history) {
  size_t need = static_cast<size_t>(model.order - 1);
  std::vector<std::string> ctx;
  ctx.reserve(need);
  if (history.size() < need) {
    for (size_t i = history.size(); i < need; ++i) ctx.push_back(NgramModel::kBos);
  }
  size_t start = history.size() > need ? history.size() - need : 0;
  for (size_t i = start; i < history.size(); ++i) ctx.push_back(history[i]);
  return ctx;
}

}  // namespace

NgramModel train_ngram(const std::vector<std::vector<std::string>>& sequences, int order,
                       double smoothing_k, double backoff_factor) {
  if (sequences.empty()) throw EmptyCorpus("n-gram training needs a non-empty corpus");
  if (order < 1) throw Error("n-gram order must be >= 1");

  NgramModel model;
  model.order = order;
  model.smoothing_k = smoothing_k;
  model.backoff_factor = backoff_factor;
  model.tables.assign(static_cast<size_t>(order), {});

  std::set<std::string> vocab;
  vocab.insert(NgramModel::kEos);
  vocab.insert(NgramModel::kUnk);

  for (const auto& seq : sequences) {
    std::vector<std::string> padded;
    padded.reserve(seq.size() + static_cast<size_t>(order));
    for (int i = 0; i < order - 1; ++i) padded.push_back(NgramModel::kBos);
    padded.insert(padded.end(), seq.begin(), seq.end());
    padded.push_back(NgramModel::kEos);

    for (const auto& tok : seq) vocab.insert(tok);

    size_t lead = static_cast<size_t>(order - 1);
    for (size_t i = lead; i < padded.size(); ++i) {
      for (size_t len = 0; len < static_cast<size_t>(order); ++len) {
        auto& ctx = model.tables[len][context_key(padded, i, len)];
        ++ctx.next[padded[i]];
        ++ctx.total;
      }
    }
  }
  model.vocab.assign(vocab.begin(), vocab.end());
  return model;
}

double conditional_logprob(const NgramModel& model, const std::vector<std::string>& context,
                           const std::string& token) {
  size_t len = std::min(context.size(), static_cast<size_t>(model.order - 1));
  const auto& table = model.tables[len];
  auto it = table.find(suffix_key(context, len));
  uint64_t count = 0, total = 0;
  if (it != table.end()) {
    total = it->second.total;
    auto nit = it->second.next.find(token);
    if (nit != it->second.next.end()) count = nit->second;
  }
  double k = model.smoothing_k;
  double v = static_cast<double>(model.vocab.size());
  return std::log((static_cast<double>(count) + k) /
                  (static_cast<double>(total) + k * v));
}

std::vector<double> logprobs(const NgramModel& model,
                             const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw EmptySequence("logprobs over an empty token list");
  std::vector<double> out;
  out.reserve(tokens.size());
  std::vector<std::string> history;
  history.reserve(tokens.size());
  for (const auto& tok : tokens) {
    out.push_back(conditional_logprob(model, padded_context(model, history), tok));
    history.push_back(tok);
  }
  return out;
}

double backoff_score(const NgramModel& model, const std::vector<std::string>& context,
                     const std::string& token) {
  size_t len = std::min(context.size(), static_cast<size_t>(model.order - 1));
  double factor = 1.0;
  for (size_t l = len + 1; l-- > 0;) {
    const auto& table = model.tables[l];
    auto it = table.find(suffix_key(context, l));
    if (it != table.end()) {
      auto nit = it->second.next.find(token);
      if (nit != it->second.next.end() && nit->second > 0) {
        return factor * static_cast<double>(nit->second) /
               static_cast<double>(it->second.total);
      }
    }
    factor *= model.backoff_factor;
  }
  return 0.0;
}

std::vector<std::string> generate(const NgramModel& model,
                                  const std::vector<std::string>& prompt_tokens,
                                  size_t max_new_tokens, double temperature,
                                  uint64_t seed) {
  std::vector<std::string> history = prompt_tokens;
  std::vector<std::string> out;
  std::mt19937_64 engine(seed);

  while (out.size() < max_new_tokens) {
    auto ctx = padded_context(model, history);
    std::string chosen;
    if (temperature <= 0.0) {
      double best = -1.0;
      for (const auto& tok : model.vocab) {  // sorted: ties pick the smallest
        if (tok == NgramModel::kUnk) continue;
        double s = backoff_score(model, ctx, tok);
        if (s > best) {
          best = s;
          chosen = tok;
        }
      }
      if (best <= 0.0) break;  // nothing scored; degenerate model
    } else {
      std::vector<double> weights;
      weights.reserve(model.vocab.size());
      double sum = 0.0;
      for (const auto& tok : model.vocab) {
        double s = tok == NgramModel::kUnk ? 0.0 : backoff_score(model, ctx, tok);
        double w = s > 0.0 ? std::pow(s, 1.0 / temperature) : 0.0;
        weights.push_back(w);
        sum += w;
      }
      if (sum <= 0.0) break;
      double r = static_cast<double>(engine() >> 11) * 0x1.0p-53 * sum;
      size_t idx = 0;
      for (; idx + 1 < weights.size(); ++idx) {
        if (r < weights[idx]) break;
        r -= weights[idx];
      }
      chosen = model.vocab[idx];
    }
    if (chosen == NgramModel::kEos) break;
    out.push_back(chosen);
    history.push_back(chosen);
  }
  return out;
}

nlohmann::json model_to_json(const NgramModel& model) {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& table : model.tables) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [ctx, counts] : table) {
      nlohmann::json row = nlohmann::json::object();
      for (const auto& [tok, count] : counts.next) row[tok] = count;
      t[ctx] = std::move(row);
    }
    tables.push_back(std::move(t));
  }
  return {{"order", model.order},
          {"smoothing_k", model.smoothing_k},
          {"backoff_factor", model.backoff_factor},
          {"vocab", model.vocab},
          {"tables", tables}};
}

NgramModel model_from_json(const nlohmann::json& j) {
  NgramModel model;
  model.order = j.at("order").get<int>();
  model.smoothing_k = j.at("smoothing_k").get<double>();
  model.backoff_factor = j.at("backoff_factor").get<double>();
  model.vocab = j.at("vocab").get<std::vector<std::string>>();
  for (const auto& table : j.at("tables")) {
    NgramModel::ContextCounts dummy;
    std::map<std::string, NgramModel::ContextCounts> level;
    for (const auto& [ctx, row] : table.items()) {
      NgramModel::ContextCounts counts;
      for (const auto& [tok, count] : row.items()) {
        counts.next[tok] = count.get<uint64_t>();
        counts.total += count.get<uint64_t>();
      }
      level.emplace(ctx, std::move(counts));
    }
    model.tables.push_back(std::move(level));
  }
  return model;
}

void save_model(const NgramModel& model, const std::string& path) {
  util::write_file(path, model_to_json(model).dump());
}

NgramModel load_model(const std::string& path) {
  return model_from_json(nlohmann::json::parse(util::read_file(path)));
}

}  // namespace hcp::modeling
