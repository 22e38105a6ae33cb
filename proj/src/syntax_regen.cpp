#include "hcp/syntax/regen.hpp"

#include <algorithm>
#include <unordered_set>

#include "hcp/error.hpp"

namespace hcp::syntax {

namespace {

struct Emitter {
  std::string out;
  enum class Sep { None, Space, Newline } pending = Sep::None;

  void token(const std::string& text) {
    if (text.empty()) return;
    if (pending == Sep::Newline) {
      out += '\n';
    } else if (pending == Sep::Space) {
      out += ' ';
    }
    out += text;
    pending = (text == ";" || text == "{" || text == "}") ? Sep::Newline : Sep::Space;
  }

  void break_line() {
    if (!out.empty()) pending = Sep::Newline;
  }
};

void emit(const SyntaxNode& node, const RewriteMap& rewrites, Emitter& em) {
  auto it = rewrites.find(&node);
  if (it != rewrites.end()) {
    em.token(it->second);
    return;
  }
  if (node.kind == NodeKind::Comment) return;
  bool directive =
      node.kind == NodeKind::PragmaDirective || node.kind == NodeKind::PreprocDirective;
  if (directive) em.break_line();
  if (node.is_leaf()) {
    em.token(node.text);
  } else {
    for (const auto& child : node.children) emit(child, rewrites, em);
  }
  if (directive) em.break_line();
}

void check_rewrites(const SyntaxNode& root, const RewriteMap& rewrites) {
  if (rewrites.empty()) return;
  std::unordered_set<const SyntaxNode*> nodes;
  visit(root, [&](const SyntaxNode& n) { nodes.insert(&n); });
  std::vector<std::pair<uint32_t, uint32_t>> spans;
  spans.reserve(rewrites.size());
  for (const auto& [node, text] : rewrites) {
    if (!nodes.count(node)) throw Error("rewrite target is not a node of this tree");
    spans.emplace_back(node->begin, node->end);
  }
  std::sort(spans.begin(), spans.end());
  for (size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second) {
      throw RewriteConflict("rewrites target overlapping spans [" +
                            std::to_string(spans[i - 1].first) + "," +
                            std::to_string(spans[i - 1].second) + ") and [" +
                            std::to_string(spans[i].first) + "," +
                            std::to_string(spans[i].second) + ")");
    }
  }
}

}  // namespace

std::string regenerate_node(const SyntaxNode& node, const RewriteMap& rewrites) {
  check_rewrites(node, rewrites);
  Emitter em;
  emit(node, rewrites, em);
  if (!em.out.empty()) em.out += '\n';
  return std::move(em.out);
}

std::string regenerate(const SyntaxTree& tree, const RewriteMap& rewrites) {
  return regenerate_node(tree.root, rewrites);
}

}  // namespace hcp::syntax
