#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hcp/error.hpp"
#include "hcp/lse/lse.hpp"
#include "hcp/metrics/budget.hpp"
#include "hcp/metrics/codebleu.hpp"
#include "hcp/metrics/perplexity.hpp"
#include "hcp/syntax/tree.hpp"

using namespace hcp;
using namespace hcp::metrics;
using hcp::syntax::Language;

namespace {

std::vector<std::string> toks(std::initializer_list<const char*> list) {
  return std::vector<std::string>(list.begin(), list.end());
}

// Brute-force clipped n-gram BLEU, written against vectors instead of hash
// maps; the independent oracle for the derived examples.
double oracle_bleu(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                   int max_n = 4) {
  if (cand.empty()) return 0.0;
  double eps = 1e-9;
  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    size_t nn = static_cast<size_t>(n);
    size_t total = cand.size() >= nn ? cand.size() - nn + 1 : 0;
    size_t matched = 0;
    std::vector<bool> ref_used(ref.size(), false);
    for (size_t i = 0; i + nn <= cand.size(); ++i) {
      for (size_t j = 0; j + nn <= ref.size(); ++j) {
        if (ref_used[j]) continue;
        bool eq = true;
        for (size_t k = 0; k < nn; ++k) {
          if (cand[i + k] != ref[j + k]) {
            eq = false;
            break;
          }
        }
        if (eq) {
          ref_used[j] = true;
          ++matched;
          break;
        }
      }
    }
    double p;
    if (matched > 0) {
      p = static_cast<double>(matched) / static_cast<double>(total);
    } else if (n >= 2) {
      p = eps / (static_cast<double>(total) + eps);
    } else {
      return 0.0;
    }
    log_sum += std::log(p);
  }
  double bp = cand.size() >= ref.size()
                  ? 1.0
                  : std::exp(1.0 - static_cast<double>(ref.size()) / cand.size());
  return bp * std::exp(log_sum / max_n);
}

// Independent subtree enumerator for the ast_match oracle: builds its own
// serialization via explicit child lists instead of the library's writer.
void oracle_collect(const syntax::SyntaxNode& n, std::string& repr,
                    std::map<std::string, int>& bag) {
  using syntax::NodeKind;
  if (n.is_leaf()) {
    switch (n.kind) {
      case NodeKind::Comment: repr = ""; return;
      case NodeKind::Identifier: repr = "id"; return;
      case NodeKind::NumberLiteral: repr = "num"; return;
      case NodeKind::StringLiteral: repr = "str"; return;
      case NodeKind::CharLiteral: repr = "chr"; return;
      default: repr = n.text; return;
    }
  }
  std::vector<std::string> parts;
  for (const auto& c : n.children) {
    std::string sub;
    oracle_collect(c, sub, bag);
    if (!sub.empty()) parts.push_back(sub);
  }
  repr = "(";
  repr += syntax::kind_name(n.kind);
  for (const auto& p : parts) {
    repr += ' ';
    repr += p;
  }
  repr += ')';
  if (!parts.empty()) bag[repr] += 1;
}

double oracle_ast_match(const std::string& cand, const std::string& ref, Language lang) {
  std::map<std::string, int> cb, rb;
  std::string dump;
  oracle_collect(syntax::parse(cand, lang).root, dump, cb);
  oracle_collect(syntax::parse(ref, lang).root, dump, rb);
  int matched = 0, total = 0;
  for (auto& [k, v] : rb) total += v;
  for (auto& [k, v] : cb) {
    auto it = rb.find(k);
    if (it != rb.end()) matched += std::min(v, it->second);
  }
  return total ? static_cast<double>(matched) / total : 0.0;
}

// Direct per-matrix summation of a decoder-only transformer, kept separate
// from the closed-form implementation.
uint64_t oracle_params(uint64_t L, uint64_t d, uint64_t V, uint64_t C, bool tied) {
  uint64_t token_embedding = V * d;
  uint64_t position_embedding = C * d;
  uint64_t per_layer = 0;
  per_layer += 4 * (d * d + d);      // q, k, v, o projections with biases
  per_layer += d * (4 * d) + 4 * d;  // mlp up
  per_layer += (4 * d) * d + d;      // mlp down
  per_layer += 2 * (2 * d);          // two layer norms (scale + shift)
  uint64_t final_norm = 2 * d;
  uint64_t head = tied ? 0 : V * d;
  return token_embedding + position_embedding + L * per_layer + final_norm + head;
}

const char* kRefFunction =
    "double smooth(double *data, int n) {\n"
    "  double acc = 0.0;\n"
    "  for (int i = 1; i < n - 1; i++) {\n"
    "    data[i] = (data[i - 1] + data[i] + data[i + 1]) / 3.0;\n"
    "    acc += data[i];\n"
    "  }\n"
    "  return acc / n;\n"
    "}\n";

std::string corrupt_tokens(const std::string& source, double fraction, uint64_t seed) {
  auto tokens = syntax::token_texts(syntax::lex(source, Language::C));
  std::mt19937_64 engine(seed);
  size_t flips = static_cast<size_t>(fraction * tokens.size());
  const char* junk[] = {"qq", "zz", "99", "ww", "kk"};
  for (size_t f = 0; f < flips; ++f) {
    size_t idx = engine() % tokens.size();
    tokens[idx] = junk[engine() % 5];
  }
  return syntax::detokenize(tokens);
}

}  // namespace

TEST_CASE("perplexity closed forms") {
  auto certain = perplexity({0.0, 0.0, 0.0});
  CHECK(certain.perplexity == doctest::Approx(1.0));

  double uniform = -std::log(50257.0);
  auto report = perplexity(std::vector<double>(64, uniform));
  CHECK(report.perplexity == doctest::Approx(50257.0).epsilon(1e-9));

  auto hand = perplexity({-1.0, -2.0, -3.0});
  CHECK(hand.mean_nll == doctest::Approx(2.0));
  CHECK(hand.perplexity == doctest::Approx(std::exp(2.0)));
  CHECK(hand.token_count == 3);

  CHECK_THROWS_AS(perplexity({}), EmptySequence);
  CHECK_NOTHROW(perplexity({0.5, -1.0}));  // warns, not fatal
}

TEST_CASE("perplexity matches a long-double oracle to 1e-12") {
  std::mt19937_64 engine(1234);
  std::uniform_real_distribution<double> dist(-12.0, 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 1 + engine() % 300;
    std::vector<double> lps(n);
    long double sum = 0.0L;
    for (auto& lp : lps) {
      lp = dist(engine);
      sum += lp;
    }
    long double expected = expl(-sum / static_cast<long double>(n));
    auto report = perplexity(lps);
    CHECK(std::abs(report.perplexity - static_cast<double>(expected)) <=
          1e-12 * static_cast<double>(expected));
  }
}

TEST_CASE("normalized perplexity reproduces figure bars") {
  CHECK(normalized_perplexity(2.33, 2.7) == doctest::Approx(6.29).epsilon(0.0016));
  CHECK(normalized_perplexity(3.51, 0.9) == doctest::Approx(3.16).epsilon(0.0032));
  CHECK(normalized_perplexity(1.71, 15.5) == doctest::Approx(26.51).epsilon(0.0004));
  CHECK_THROWS_AS(normalized_perplexity(0.0, 1.0), NonPositiveInput);
  CHECK_THROWS_AS(normalized_perplexity(2.0, -1.0), NonPositiveInput);
}

TEST_CASE("perplexity report normalization invariant") {
  auto report = perplexity({-1.5, -0.25, -3.0}, 0.9);
  REQUIRE(report.normalized_perplexity.has_value());
  CHECK(*report.normalized_perplexity / report.perplexity == doctest::Approx(0.9));
}

TEST_CASE("bleu identity and floors") {
  auto same = toks({"int", "x", "=", "1", ";"});
  CHECK(bleu(same, same) == doctest::Approx(1.0));
  CHECK(bleu(toks({"a", "b"}), toks({"c", "d"})) == doctest::Approx(0.0));
  CHECK(bleu({}, same) == 0.0);
  CHECK_THROWS_AS(bleu(same, {}), EmptyReference);
}

TEST_CASE("bleu derived example against brute-force oracle") {
  auto cand = toks({"a", "b", "c", "d"});
  auto ref = toks({"a", "b", "c", "e"});
  double mine = bleu(cand, ref);
  double oracle = oracle_bleu(cand, ref);
  CHECK(mine == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(mine == doctest::Approx(0.003976353642841165).epsilon(1e-9));
}

TEST_CASE("bleu agrees with oracle on random token pairs") {
  std::mt19937_64 engine(77);
  const char* vocab[] = {"a", "b", "c", "(", ")", "x", "1"};
  for (int trial = 0; trial < 40; ++trial) {
    auto draw = [&](size_t len) {
      std::vector<std::string> v;
      for (size_t i = 0; i < len; ++i) v.push_back(vocab[engine() % 7]);
      return v;
    };
    auto cand = draw(1 + engine() % 24);
    auto ref = draw(1 + engine() % 24);
    CHECK(bleu(cand, ref) == doctest::Approx(oracle_bleu(cand, ref)).epsilon(1e-12));
  }
}

TEST_CASE("weighted ngram match weights keywords five to one") {
  auto cand = toks({"for", "(", "x", ")"});
  auto ref = toks({"for", "(", "y", ")"});
  // unigram level only: (5 + 1 + 1) / (5 + 1 + 1 + 1)
  double p1 = weighted_ngram_match(cand, ref, keyword_set(Language::C), 1);
  CHECK(p1 == doctest::Approx(7.0 / 8.0));

  // two pairs diverging at the same position with the same lengths, so the
  // n-gram geometry is identical and only the unigram weighting differs
  double kw_divergent = weighted_ngram_match(toks({"for", "(", "x", ")", ";"}),
                                             toks({"while", "(", "x", ")", ";"}),
                                             keyword_set(Language::C));
  double id_divergent = weighted_ngram_match(toks({"foo", "(", "x", ")", ";"}),
                                             toks({"cnt", "(", "x", ")", ";"}),
                                             keyword_set(Language::C));
  CHECK(kw_divergent < id_divergent);  // keyword mismatch hurts more

  CHECK(weighted_ngram_match(cand, cand, keyword_set(Language::C)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(weighted_ngram_match(cand, {}, keyword_set(Language::C)), EmptyReference);
}

TEST_CASE("ast match identity and alpha invariance") {
  CHECK(ast_match(kRefFunction, kRefFunction, Language::C) == doctest::Approx(1.0));
  const char* renamed =
      "double zz9(double *qq, int ww) {\n"
      "  double kk = 0.0;\n"
      "  for (int jj = 1; jj < ww - 1; jj++) {\n"
      "    qq[jj] = (qq[jj - 1] + qq[jj] + qq[jj + 1]) / 3.0;\n"
      "    kk += qq[jj];\n"
      "  }\n"
      "  return kk / ww;\n"
      "}\n";
  CHECK(ast_match(renamed, kRefFunction, Language::C) == doctest::Approx(1.0));
}

TEST_CASE("ast match derived example against subtree enumerator") {
  const char* ref = "int f(){int a; int b;}";
  const char* cand = "int f(){int a;}";
  double mine = ast_match(cand, ref, Language::C);
  double oracle = oracle_ast_match(cand, ref, Language::C);
  CHECK(mine == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(mine > 0.0);
  CHECK(mine < 1.0);
}

TEST_CASE("ast match is invariant under lse re-suffixing") {
  lse::LseConfig a, b;
  a.seed = 100;
  b.seed = 200;
  std::string out_a = lse::apply_lse(kRefFunction, Language::C, a);
  std::string out_b = lse::apply_lse(kRefFunction, Language::C, b);
  CHECK(out_a != out_b);
  CHECK(ast_match(out_a, out_b, Language::C) == doctest::Approx(1.0));
  CHECK(ast_match(out_b, out_a, Language::C) == doctest::Approx(1.0));
}

TEST_CASE("ast match fallbacks") {
  CHECK(ast_match("", kRefFunction, Language::C) == 0.0);
  CHECK_THROWS_AS(ast_match(kRefFunction, "", Language::C), ReferenceUnparseable);
}

TEST_CASE("dataflow match hand-built edge sets") {
  CHECK(dataflow_match(kRefFunction, kRefFunction, Language::C) ==
        std::optional<double>(1.0));

  // ref edges: {use a <- def a}; candidate has no uses at all
  auto score = dataflow_match("int a=1; int b=2;", "int a=1; int b=a;", Language::C);
  REQUIRE(score.has_value());
  CHECK(*score == doctest::Approx(0.0));

  CHECK_FALSE(dataflow_match("void f(){}", "void f(){}", Language::C).has_value());
}

TEST_CASE("dataflow tracks def ordinals") {
  // two defs of a; the second use links to the second def
  const char* ref = "int a = 1; int x = a; a = 2; int y = a;";
  CHECK(dataflow_match(ref, ref, Language::C) == std::optional<double>(1.0));
  // candidate missing the reassignment matches only the first-edge
  const char* cand = "int a = 1; int x = a; int y = a;";
  auto score = dataflow_match(cand, ref, Language::C);
  REQUIRE(score.has_value());
  CHECK(*score == doctest::Approx(0.5));
}

TEST_CASE("codebleu identity, bounds, and renormalization") {
  CodeBleuScore same = codebleu(kRefFunction, kRefFunction, Language::C);
  CHECK(same.aggregate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(same.bleu == doctest::Approx(1.0));
  CHECK(same.weighted_ngram == doctest::Approx(1.0));
  CHECK(same.ast == doctest::Approx(1.0));
  REQUIRE(same.dataflow.has_value());
  CHECK(*same.dataflow == doctest::Approx(1.0));

  // no dataflow edges in the reference: weights renormalize over the rest
  CodeBleuScore no_flow = codebleu("void f ( ) { }", "void f ( ) { }", Language::C);
  CHECK_FALSE(no_flow.dataflow.has_value());
  CHECK(no_flow.aggregate == doctest::Approx(1.0).epsilon(1e-9));

  CodeBleuScore empty_cand = codebleu("", kRefFunction, Language::C);
  CHECK(empty_cand.aggregate == doctest::Approx(0.0));

  CHECK_THROWS_AS(codebleu(kRefFunction, "", Language::C), EmptyReference);

  CodeBleuWeights bad;
  bad.bleu = 0.9;
  CHECK_THROWS_AS(codebleu(kRefFunction, kRefFunction, Language::C, bad), Error);
}

TEST_CASE("codebleu perturbation monotonicity") {
  std::string c0 = corrupt_tokens(kRefFunction, 0.0, 9);
  std::string c20 = corrupt_tokens(kRefFunction, 0.2, 9);
  std::string c50 = corrupt_tokens(kRefFunction, 0.5, 9);
  double s0 = codebleu(c0, kRefFunction, Language::C).aggregate;
  double s20 = codebleu(c20, kRefFunction, Language::C).aggregate;
  double s50 = codebleu(c50, kRefFunction, Language::C).aggregate;
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s0 > s20);
  CHECK(s20 > s50);
}

TEST_CASE("codebleu components stay in unit interval") {
  const char* pairs[][2] = {
      {"int f(){return 1;}", kRefFunction},
      {kRefFunction, "int f(){return 1;}"},
      {"void g(int *p, int n){ for(int i=0;i<n;i++) p[i]=i; }", kRefFunction},
  };
  for (auto& [cand, ref] : pairs) {
    auto score = codebleu(cand, ref, Language::C);
    CHECK(score.bleu >= 0.0);
    CHECK(score.bleu <= 1.0);
    CHECK(score.weighted_ngram >= 0.0);
    CHECK(score.weighted_ngram <= 1.0);
    CHECK(score.ast >= 0.0);
    CHECK(score.ast <= 1.0);
    if (score.dataflow) {
      CHECK(*score.dataflow >= 0.0);
      CHECK(*score.dataflow <= 1.0);
    }
    CHECK(score.aggregate >= 0.0);
    CHECK(score.aggregate <= 1.0);
  }
}

TEST_CASE("codebleu score json shape") {
  auto j = score_to_json(codebleu(kRefFunction, kRefFunction, Language::C));
  CHECK(j.contains("bleu"));
  CHECK(j.contains("weighted"));
  CHECK(j.contains("ast"));
  CHECK(j.contains("dataflow"));
  CHECK(j.contains("codebleu"));
  auto j2 = score_to_json(codebleu("void f ( ) { }", "void f ( ) { }", Language::C));
  CHECK(j2.at("dataflow").is_null());
}

TEST_CASE("codebleu with context scores continuations") {
  std::string prompt = "int sum(int *v, int n) { int s = 0;";
  std::string reference = "for (int i = 0; i < n; i++) s += v[i]; return s; }";
  auto oracle = codebleu_with_context(prompt, reference, reference, Language::C);
  CHECK(oracle.aggregate == doctest::Approx(1.0).epsilon(1e-9));

  auto empty = codebleu_with_context(prompt, "", reference, Language::C);
  CHECK(empty.bleu == doctest::Approx(0.0));
  CHECK(empty.aggregate < oracle.aggregate);
}

TEST_CASE("estimate_params formula and paper value") {
  uint64_t params = estimate_params(8, 2560, 32, 50257, 2048, /*tied=*/false);
  CHECK(params == 891975680ULL);
  CHECK(params == oracle_params(8, 2560, 50257, 2048, false));
  double rel = std::abs(static_cast<double>(params) - 889.3e6) / 889.3e6;
  CHECK(rel < 0.01);

  CHECK(estimate_params(0, 16, 4, 100, 32, true) == 100 * 16 + 32 * 16 + 2 * 16);
  CHECK(estimate_params(1, 2, 1, 4, 4, true) == 94);
  // heads never change the count
  CHECK(estimate_params(8, 2560, 32, 50257, 2048, false) ==
        estimate_params(8, 2560, 8, 50257, 2048, false));
  // random architectures agree with the per-matrix oracle
  std::mt19937_64 engine(5);
  for (int trial = 0; trial < 20; ++trial) {
    uint64_t L = engine() % 12;
    uint64_t d = 8 + engine() % 512;
    uint64_t V = 100 + engine() % 50000;
    uint64_t C = 16 + engine() % 4096;
    bool tied = engine() % 2;
    CHECK(estimate_params(L, d, 1, V, C, tied) == oracle_params(L, d, V, C, tied));
  }
}

TEST_CASE("estimate_ram exact integers") {
  CHECK(estimate_ram(900000000ULL, 4) == 3600000000ULL);
  CHECK(format_gb(3600000000ULL) == "3.6 GB");
  CHECK(estimate_ram(0, 4) == 0);
  CHECK(estimate_ram(891975680ULL, 2) == 1783951360ULL);

  auto budget = model_budget(8, 2560, 32, 50257, 2048, false);
  CHECK(budget.ram_bytes == budget.param_count * 4);
}
