#include "hcp/metrics/codebleu.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

#include "hcp/error.hpp"
#include "hcp/syntax/tree.hpp"

namespace hcp::metrics {

using syntax::Language;
using syntax::NodeKind;
using syntax::SyntaxNode;

void CodeBleuWeights::validate() const {
  if (bleu < 0 || weighted_ngram < 0 || ast < 0 || dataflow < 0 ||
      std::abs(bleu + weighted_ngram + ast + dataflow - 1.0) > 1e-9) {
    throw Error("codebleu weights must be nonnegative and sum to 1");
  }
}

nlohmann::json score_to_json(const CodeBleuScore& score) {
  nlohmann::json j{{"bleu", score.bleu},
                   {"weighted", score.weighted_ngram},
                   {"ast", score.ast},
                   {"codebleu", score.aggregate}};
  if (score.dataflow) {
    j["dataflow"] = *score.dataflow;
  } else {
    j["dataflow"] = nullptr;
  }
  return j;
}

namespace {

constexpr double kEps = 1e-9;

std::string ngram_key(const std::vector<std::string>& tokens, size_t start, size_t n) {
  std::string key;
  for (size_t i = 0; i < n; ++i) {
    if (i) key += '\x1f';
    key += tokens[start + i];
  }
  return key;
}

double brevity_penalty(size_t cand_len, size_t ref_len) {
  if (cand_len >= ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
}

}  // namespace

double bleu(const std::vector<std::string>& candidate_tokens,
            const std::vector<std::string>& reference_tokens, int max_n) {
  if (reference_tokens.empty()) throw EmptyReference("bleu against an empty reference");
  if (candidate_tokens.empty()) return 0.0;

  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    size_t nn = static_cast<size_t>(n);
    size_t total = candidate_tokens.size() >= nn ? candidate_tokens.size() - nn + 1 : 0;
    std::unordered_map<std::string, size_t> ref_counts;
    if (reference_tokens.size() >= nn) {
      for (size_t i = 0; i + nn <= reference_tokens.size(); ++i) {
        ++ref_counts[ngram_key(reference_tokens, i, nn)];
      }
    }
    std::unordered_map<std::string, size_t> cand_counts;
    for (size_t i = 0; i + nn <= candidate_tokens.size(); ++i) {
      ++cand_counts[ngram_key(candidate_tokens, i, nn)];
    }
    size_t matched = 0;
    for (const auto& [key, count] : cand_counts) {
      auto it = ref_counts.find(key);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    double p;
    if (matched > 0) {
      p = static_cast<double>(matched) / static_cast<double>(total);
    } else if (n >= 2) {
      p = kEps / (static_cast<double>(total) + kEps);
    } else {
      return 0.0;  // no unigram overlap at all
    }
    log_sum += std::log(p);
  }
  return brevity_penalty(candidate_tokens.size(), reference_tokens.size()) *
         std::exp(log_sum / max_n);
}

const std::unordered_set<std::string>& keyword_set(Language lang) {
  static const char* omp_words[] = {
      "#pragma",      "omp",          "parallel",    "sections",     "section",
      "single",       "task",         "taskloop",    "taskwait",     "taskyield",
      "target",       "teams",        "distribute",  "simd",         "declare",
      "critical",     "atomic",       "barrier",     "flush",        "ordered",
      "master",       "masked",       "loop",        "scan",         "depend",
      "map",          "device",       "shared",      "private",      "firstprivate",
      "lastprivate",  "reduction",    "schedule",    "collapse",     "num_threads",
      "num_teams",    "thread_limit", "proc_bind",   "copyin",       "copyprivate",
      "linear",       "aligned",      "safelen",     "simdlen",      "uniform",
      "nowait",       "untied",       "mergeable",   "grainsize",    "priority",
      "dist_schedule", "defaultmap",  "to",          "from",         "tofrom",
      "threadprivate", "none",        "final",       "read",         "write",
      "capture",      "seq_cst",      "acquire",     "release",      "relaxed",
      "dynamic",      "guided",       "runtime"};
  static const std::unordered_set<std::string>* c_set = [] {
    auto* s = new std::unordered_set<std::string>;
    for (const char* w : omp_words) s->insert(w);
    for (const char* w :
         {"auto", "break", "case", "char", "const", "continue", "default", "do", "double",
          "else", "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long",
          "register", "restrict", "return", "short", "signed", "sizeof", "static",
          "struct", "switch", "typedef", "union", "unsigned", "void", "volatile",
          "while"}) {
      s->insert(w);
    }
    return s;
  }();
  static const std::unordered_set<std::string>* cpp_set = [] {
    auto* s = new std::unordered_set<std::string>(*c_set);
    for (const char* w :
         {"alignas", "alignof", "bool", "catch", "class", "constexpr", "decltype",
          "delete", "explicit", "false", "friend", "mutable", "namespace", "new",
          "noexcept", "nullptr", "operator", "private", "protected", "public",
          "template", "this", "throw", "true", "try", "typeid", "typename", "using",
          "virtual", "wchar_t"}) {
      s->insert(w);
    }
    return s;
  }();
  return lang == Language::C ? *c_set : *cpp_set;
}

double weighted_ngram_match(const std::vector<std::string>& candidate_tokens,
                            const std::vector<std::string>& reference_tokens,
                            const std::unordered_set<std::string>& keywords, int max_n) {
  if (reference_tokens.empty()) {
    throw EmptyReference("weighted_ngram_match against an empty reference");
  }
  if (candidate_tokens.empty()) return 0.0;

  auto weight = [&](const std::string& tok) { return keywords.count(tok) ? 5.0 : 1.0; };

  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    size_t nn = static_cast<size_t>(n);
    double matched = 0.0;
    double total = 0.0;
    if (n == 1) {
      std::unordered_map<std::string, size_t> ref_counts;
      for (const auto& t : reference_tokens) ++ref_counts[t];
      std::unordered_map<std::string, size_t> cand_counts;
      for (const auto& t : candidate_tokens) ++cand_counts[t];
      for (const auto& [tok, count] : cand_counts) {
        double w = weight(tok);
        total += w * static_cast<double>(count);
        auto it = ref_counts.find(tok);
        if (it != ref_counts.end()) {
          matched += w * static_cast<double>(std::min(count, it->second));
        }
      }
    } else {
      total = candidate_tokens.size() >= nn
                  ? static_cast<double>(candidate_tokens.size() - nn + 1)
                  : 0.0;
      std::unordered_map<std::string, size_t> ref_counts;
      if (reference_tokens.size() >= nn) {
        for (size_t i = 0; i + nn <= reference_tokens.size(); ++i) {
          ++ref_counts[ngram_key(reference_tokens, i, nn)];
        }
      }
      std::unordered_map<std::string, size_t> cand_counts;
      for (size_t i = 0; i + nn <= candidate_tokens.size(); ++i) {
        ++cand_counts[ngram_key(candidate_tokens, i, nn)];
      }
      for (const auto& [key, count] : cand_counts) {
        auto it = ref_counts.find(key);
        if (it != ref_counts.end()) {
          matched += static_cast<double>(std::min(count, it->second));
        }
      }
    }
    double p;
    if (matched > 0) {
      p = matched / total;
    } else if (n >= 2) {
      p = kEps / (total + kEps);
    } else {
      return 0.0;
    }
    log_sum += std::log(p);
  }
  return brevity_penalty(candidate_tokens.size(), reference_tokens.size()) *
         std::exp(log_sum / max_n);
}

// ---- ast match -----------------------------------------------------------

namespace {

// kind name plus recursively serialized children; identifier and literal
// leaf texts are ignored so the component is invariant under renaming.
std::string serialize_subtrees(const SyntaxNode& node,
                               std::map<std::string, size_t>& multiset) {
  if (node.is_leaf()) {
    switch (node.kind) {
      case NodeKind::Comment: return "";
      case NodeKind::Identifier: return "id";
      case NodeKind::NumberLiteral: return "num";
      case NodeKind::StringLiteral: return "str";
      case NodeKind::CharLiteral: return "chr";
      default: return node.text;
    }
  }
  std::string serial = "(";
  serial += kind_name(node.kind);
  bool any_child = false;
  for (const auto& child : node.children) {
    std::string cs = serialize_subtrees(child, multiset);
    if (cs.empty()) continue;
    any_child = true;
    serial += ' ';
    serial += cs;
  }
  serial += ')';
  if (any_child) ++multiset[serial];
  return serial;
}

std::map<std::string, size_t> subtree_multiset(const std::string& source, Language lang) {
  auto tree = syntax::parse(source, lang);
  std::map<std::string, size_t> multiset;
  serialize_subtrees(tree.root, multiset);
  return multiset;
}

}  // namespace

double ast_match(const std::string& candidate_source, const std::string& reference_source,
                 Language lang) {
  auto ref = subtree_multiset(reference_source, lang);
  size_t ref_total = 0;
  for (const auto& [key, count] : ref) ref_total += count;
  if (ref_total == 0) {
    throw ReferenceUnparseable("reference has no syntax subtrees");
  }
  std::map<std::string, size_t> cand;
  try {
    cand = subtree_multiset(candidate_source, lang);
  } catch (const Error&) {
    return 0.0;  // unparseable candidate scores zero, never aborts
  }
  size_t matched = 0;
  for (const auto& [key, count] : cand) {
    auto it = ref.find(key);
    if (it != ref.end()) matched += std::min(count, it->second);
  }
  return static_cast<double>(matched) / static_cast<double>(ref_total);
}

// ---- dataflow match ------------------------------------------------------

namespace {

// Flow-insensitive def-use extraction: one variable table per function,
// edges keyed (positional variable id, def ordinal).
class DataflowExtractor {
 public:
  std::map<std::string, size_t> run(const SyntaxNode& root) {
    walk(root);
    return std::move(edges_);
  }

 private:
  struct Frame {
    std::unordered_map<std::string, int> norm_id;
    std::unordered_map<std::string, int> def_count;
  };
  Frame frame_;
  std::map<std::string, size_t> edges_;

  int norm(const std::string& name) {
    auto it = frame_.norm_id.find(name);
    if (it != frame_.norm_id.end()) return it->second;
    int id = static_cast<int>(frame_.norm_id.size());
    frame_.norm_id.emplace(name, id);
    return id;
  }

  void def(const std::string& name) {
    norm(name);
    ++frame_.def_count[name];
  }

  void use(const std::string& name) {
    int id = norm(name);
    auto it = frame_.def_count.find(name);
    if (it == frame_.def_count.end() || it->second == 0) return;  // no def to link
    std::string key = "v" + std::to_string(id) + "@" + std::to_string(it->second - 1);
    ++edges_[key];
  }

  static const SyntaxNode* declarator_of(const SyntaxNode& init_declarator) {
    if (init_declarator.children.empty()) return nullptr;
    return &init_declarator.children[0];
  }

  static const SyntaxNode* declared_name(const SyntaxNode& d) {
    switch (d.kind) {
      case NodeKind::Identifier:
        return &d;
      case NodeKind::ArrayDeclarator:
      case NodeKind::FunctionDeclarator:
        if (!d.children.empty()) return declared_name(d.children[0]);
        return nullptr;
      case NodeKind::PointerDeclarator:
      case NodeKind::Declarator:
        for (auto it = d.children.rbegin(); it != d.children.rend(); ++it) {
          if (it->kind == NodeKind::Identifier) return &*it;
          if (!it->is_leaf()) {
            const SyntaxNode* found = declared_name(*it);
            if (found) return found;
          }
        }
        return nullptr;
      default:
        return nullptr;
    }
  }

  // identifiers inside a declarator that are not the declared name itself
  // (array sizes, parameter defaults) count as uses
  void walk_declarator_uses(const SyntaxNode& d, const SyntaxNode* name) {
    if (&d == name) return;
    if (d.kind == NodeKind::ParameterList) return;  // prototype params are noise
    if (d.is_leaf()) {
      if (d.kind == NodeKind::Identifier) use(d.text);
      return;
    }
    for (const auto& c : d.children) walk_declarator_uses(c, name);
  }

  void walk(const SyntaxNode& n) {
    switch (n.kind) {
      case NodeKind::PragmaDirective:
      case NodeKind::PreprocDirective:
      case NodeKind::Comment:
      case NodeKind::StructSpecifier:
      case NodeKind::EnumSpecifier:
        return;
      case NodeKind::FunctionDefinition: {
        Frame saved = std::move(frame_);
        frame_ = Frame{};
        for (const auto& c : n.children) walk(c);
        frame_ = std::move(saved);
        return;
      }
      case NodeKind::ParameterDeclaration: {
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
          if (it->is_leaf()) continue;
          const SyntaxNode* name = declared_name(*it);
          if (name) def(name->text);
          break;
        }
        return;
      }
      case NodeKind::Declaration: {
        bool alias = false;
        for (const auto& c : n.children) {
          if (c.kind == NodeKind::Keyword && (c.text == "typedef" || c.text == "using")) {
            alias = true;
          }
          if (c.kind == NodeKind::InitDeclarator) break;
        }
        for (const auto& c : n.children) {
          if (c.kind != NodeKind::InitDeclarator) continue;
          const SyntaxNode* d = declarator_of(c);
          const SyntaxNode* name = d ? declared_name(*d) : nullptr;
          if (name && !alias) def(name->text);
          if (d) walk_declarator_uses(*d, name);
          for (size_t i = 1; i < c.children.size(); ++i) walk(c.children[i]);
        }
        return;
      }
      case NodeKind::AssignmentExpression: {
        if (n.children.size() >= 3) {
          const SyntaxNode& lhs = n.children[0];
          const SyntaxNode& op = n.children[1];
          walk(n.children[2]);  // rhs first: its uses see the previous def
          if (lhs.kind == NodeKind::Identifier) {
            if (op.text != "=") use(lhs.text);
            def(lhs.text);
          } else {
            walk(lhs);
          }
        } else {
          for (const auto& c : n.children) walk(c);
        }
        return;
      }
      case NodeKind::UpdateExpression: {
        if (!n.children.empty() && n.children[0].kind == NodeKind::Identifier) {
          use(n.children[0].text);
          def(n.children[0].text);
        } else {
          for (const auto& c : n.children) walk(c);
        }
        return;
      }
      case NodeKind::UnaryExpression: {
        if (n.children.size() == 2 &&
            (n.children[0].text == "++" || n.children[0].text == "--") &&
            n.children[1].kind == NodeKind::Identifier) {
          use(n.children[1].text);
          def(n.children[1].text);
          return;
        }
        for (const auto& c : n.children) walk(c);
        return;
      }
      case NodeKind::MemberExpression: {
        if (!n.children.empty()) walk(n.children[0]);  // member names are not variables
        return;
      }
      case NodeKind::CallExpression: {
        if (n.children.size() >= 2) {
          if (n.children[0].kind != NodeKind::Identifier) walk(n.children[0]);
          walk(n.children[1]);  // arguments
        }
        return;
      }
      case NodeKind::Identifier:
        if (n.is_leaf()) use(n.text);
        return;
      default:
        for (const auto& c : n.children) walk(c);
        return;
    }
  }
};

std::map<std::string, size_t> dataflow_edges(const std::string& source, Language lang) {
  auto tree = syntax::parse(source, lang);
  DataflowExtractor extractor;
  return extractor.run(tree.root);
}

}  // namespace

std::optional<double> dataflow_match(const std::string& candidate_source,
                                     const std::string& reference_source, Language lang) {
  auto ref = dataflow_edges(reference_source, lang);
  size_t ref_total = 0;
  for (const auto& [key, count] : ref) ref_total += count;
  if (ref_total == 0) return std::nullopt;

  std::map<std::string, size_t> cand;
  try {
    cand = dataflow_edges(candidate_source, lang);
  } catch (const Error&) {
    return 0.0;
  }
  size_t matched = 0;
  for (const auto& [key, count] : cand) {
    auto it = ref.find(key);
    if (it != ref.end()) matched += std::min(count, it->second);
  }
  return static_cast<double>(matched) / static_cast<double>(ref_total);
}

// ---- aggregate -----------------------------------------------------------

namespace {

CodeBleuScore assemble(double b, double w, double a, std::optional<double> d,
                       const CodeBleuWeights& weights) {
  CodeBleuScore score;
  score.bleu = b;
  score.weighted_ngram = w;
  score.ast = a;
  score.dataflow = d;
  score.weights = weights;
  double norm = weights.bleu + weights.weighted_ngram + weights.ast;
  double sum = weights.bleu * b + weights.weighted_ngram * w + weights.ast * a;
  if (d) {
    norm += weights.dataflow;
    sum += weights.dataflow * *d;
  }
  score.aggregate = norm > 0 ? sum / norm : 0.0;
  return score;
}

}  // namespace

CodeBleuScore codebleu(const std::string& candidate_source,
                       const std::string& reference_source, Language lang,
                       const CodeBleuWeights& weights) {
  weights.validate();
  auto cand_tokens = syntax::token_texts(syntax::lex(candidate_source, lang));
  auto ref_tokens = syntax::token_texts(syntax::lex(reference_source, lang));
  if (ref_tokens.empty()) throw EmptyReference("codebleu against an empty reference");

  double b = bleu(cand_tokens, ref_tokens);
  double w = weighted_ngram_match(cand_tokens, ref_tokens, keyword_set(lang));
  double a = ast_match(candidate_source, reference_source, lang);
  std::optional<double> d = dataflow_match(candidate_source, reference_source, lang);
  return assemble(b, w, a, d, weights);
}

CodeBleuScore codebleu_with_context(const std::string& prompt_text,
                                    const std::string& candidate_text,
                                    const std::string& reference_text, Language lang,
                                    const CodeBleuWeights& weights) {
  weights.validate();
  auto cand_tokens = syntax::token_texts(syntax::lex(candidate_text, lang));
  auto ref_tokens = syntax::token_texts(syntax::lex(reference_text, lang));
  if (ref_tokens.empty()) {
    throw EmptyReference("codebleu_with_context against an empty reference");
  }
  double b = bleu(cand_tokens, ref_tokens);
  double w = weighted_ngram_match(cand_tokens, ref_tokens, keyword_set(lang));
  std::string cand_unit = prompt_text + "\n" + candidate_text;
  std::string ref_unit = prompt_text + "\n" + reference_text;
  double a = ast_match(cand_unit, ref_unit, lang);
  std::optional<double> d = dataflow_match(cand_unit, ref_unit, lang);
  return assemble(b, w, a, d, weights);
}

}  // namespace hcp::metrics
