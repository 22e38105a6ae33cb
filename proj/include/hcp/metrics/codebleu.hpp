#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "hcp/syntax/token.hpp"

namespace hcp::metrics {

struct CodeBleuWeights {
  double bleu = 0.25;
  double weighted_ngram = 0.25;
  double ast = 0.25;
  double dataflow = 0.25;

  void validate() const;  // nonnegative, summing to 1
};

struct CodeBleuScore {
  double bleu = 0.0;
  double weighted_ngram = 0.0;
  double ast = 0.0;
  std::optional<double> dataflow;  // absent when the reference has no edges
  CodeBleuWeights weights;
  double aggregate = 0.0;
};

nlohmann::json score_to_json(const CodeBleuScore& score);

/// Clipped n-gram precision BLEU with brevity penalty. Zero-match
/// precisions for n >= 2 smooth to eps/(total+eps), eps = 1e-9; a zero
/// unigram precision floors the score at 0. Throws EmptyReference.
double bleu(const std::vector<std::string>& candidate_tokens,
            const std::vector<std::string>& reference_tokens, int max_n = 4);

/// C/C++ reserved words plus `#pragma`, `omp`, and OpenMP clause words —
/// the unigram weighting set for weighted_ngram_match.
const std::unordered_set<std::string>& keyword_set(syntax::Language lang);

/// BLEU with unigram matches weighted: keywords weigh 5, everything else 1
/// (weights apply to both clipped matches and totals).
double weighted_ngram_match(const std::vector<std::string>& candidate_tokens,
                            const std::vector<std::string>& reference_tokens,
                            const std::unordered_set<std::string>& keywords, int max_n = 4);

/// Subtree match: the multiset of serialized subtrees rooted at each
/// non-leaf node, identifier/literal leaf texts ignored, clipped against
/// the reference. An unparseable candidate scores 0; a reference with no
/// subtrees throws ReferenceUnparseable.
double ast_match(const std::string& candidate_source, const std::string& reference_source,
                 syntax::Language lang);

/// Def-use edge match. Edges link each variable use to its most recent
/// preceding assignment or declaration in source order, per function, with
/// variables normalized positionally by first appearance. Returns nullopt
/// when the reference has no edges.
std::optional<double> dataflow_match(const std::string& candidate_source,
                                     const std::string& reference_source,
                                     syntax::Language lang);

/// The four components on (candidate, reference) sources plus their
/// weighted aggregate; weights renormalize when dataflow is absent.
CodeBleuScore codebleu(const std::string& candidate_source,
                       const std::string& reference_source, syntax::Language lang,
                       const CodeBleuWeights& weights = {});

/// Context-split variant used by the evaluation harness: BLEU components
/// compare the bare continuations, while the AST and dataflow components
/// parse prompt+continuation against prompt+reference (a bare continuation
/// rarely parses on its own; the shared prompt inflates both sides
/// equally).
CodeBleuScore codebleu_with_context(const std::string& prompt_text,
                                    const std::string& candidate_text,
                                    const std::string& reference_text,
                                    syntax::Language lang,
                                    const CodeBleuWeights& weights = {});

}  // namespace hcp::metrics
