#include "hcp/lse/lse.hpp"

#include <cctype>
#include <random>
#include <unordered_set>

#include "hcp/error.hpp"
#include "hcp/syntax/regen.hpp"

namespace hcp::lse {

using syntax::NodeKind;
using syntax::SyntaxNode;
using syntax::SyntaxTree;

const char* role_name(Role role) {
  switch (role) {
    case Role::Function: return "function";
    case Role::Variable: return "variable";
    case Role::Array: return "array";
    case Role::Parameter: return "parameter";
    case Role::Number: return "number";
    case Role::String: return "string";
  }
  return "variable";
}

namespace {

const char* placeholder_prefix(Role role) {
  switch (role) {
    case Role::Function: return "func";
    case Role::Variable:
    case Role::Parameter: return "var";
    case Role::Array: return "arr";
    case Role::Number: return "num";
    case Role::String: return "str";
  }
  return "var";
}

// Placeholder-shaped identifiers already present in the input reserve their
// suffix, so a fresh draw can never collide with them.
bool parse_placeholder_suffix(const std::string& text, uint64_t& suffix) {
  static const char* prefixes[] = {"func_", "var_", "arr_", "num_", "str_"};
  for (const char* p : prefixes) {
    size_t plen = std::char_traits<char>::length(p);
    if (text.size() > plen && text.compare(0, plen, p) == 0) {
      uint64_t value = 0;
      for (size_t i = plen; i < text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
        value = value * 10 + static_cast<uint64_t>(text[i] - '0');
        if (value > (1ULL << 62)) return false;
      }
      suffix = value;
      return true;
    }
  }
  return false;
}

class SuffixGenerator {
 public:
  SuffixGenerator(uint64_t lo, uint64_t hi, uint64_t seed)
      : lo_(lo), hi_(hi < lo ? lo : hi), engine_(seed), overflow_(hi_ + 1) {}

  void reserve(uint64_t value) {
    if (used_.insert(value).second && value >= lo_ && value <= hi_) ++used_in_range_;
  }

  uint64_t draw() {
    uint64_t size = hi_ - lo_ + 1;
    if (used_in_range_ >= size) {
      while (used_.count(overflow_)) ++overflow_;
      used_.insert(overflow_);
      return overflow_++;
    }
    for (;;) {
      uint64_t k = lo_ + engine_() % size;
      if (used_.insert(k).second) {
        ++used_in_range_;
        return k;
      }
    }
  }

 private:
  uint64_t lo_, hi_;
  std::mt19937_64 engine_;
  uint64_t overflow_;
  std::unordered_set<uint64_t> used_;
  uint64_t used_in_range_ = 0;
};

bool is_declarator_kind(NodeKind kind) {
  return kind == NodeKind::Declarator || kind == NodeKind::PointerDeclarator ||
         kind == NodeKind::ArrayDeclarator || kind == NodeKind::FunctionDeclarator ||
         kind == NodeKind::Identifier;
}

const SyntaxNode* declarator_name(const SyntaxNode& d) {
  switch (d.kind) {
    case NodeKind::Identifier:
      return &d;
    case NodeKind::ArrayDeclarator:
    case NodeKind::FunctionDeclarator:
      if (!d.children.empty() && is_declarator_kind(d.children[0].kind)) {
        return declarator_name(d.children[0]);
      }
      return nullptr;
    case NodeKind::PointerDeclarator:
    case NodeKind::Declarator:
      for (auto it = d.children.rbegin(); it != d.children.rend(); ++it) {
        if (it->kind == NodeKind::Identifier) return &*it;
        if (!it->is_leaf() && is_declarator_kind(it->kind)) return declarator_name(*it);
      }
      return nullptr;
    default:
      return nullptr;
  }
}

bool subtree_has_array(const SyntaxNode& n) {
  if (n.kind == NodeKind::ArrayDeclarator) return true;
  if (n.kind == NodeKind::ParameterList) return false;
  for (const auto& c : n.children) {
    if (subtree_has_array(c)) return true;
  }
  return false;
}

// Function iff the parens apply directly to the name (not through a
// parenthesized pointer core, which declares a function-pointer variable).
bool declarator_is_function_name(const SyntaxNode& d) {
  const SyntaxNode* cur = &d;
  if (cur->kind == NodeKind::PointerDeclarator && !cur->children.empty() &&
      cur->children.back().kind == NodeKind::FunctionDeclarator) {
    cur = &cur->children.back();
  }
  if (cur->kind != NodeKind::FunctionDeclarator || cur->children.empty()) return false;
  const SyntaxNode& core = cur->children[0];
  if (core.kind == NodeKind::Identifier) return true;
  if (core.kind == NodeKind::Declarator && !core.children.empty() &&
      core.children[0].text != "(") {
    return true;  // qualified name
  }
  return false;
}

Role classify_declarator(const SyntaxNode& d) {
  if (subtree_has_array(d)) return Role::Array;
  if (declarator_is_function_name(d)) return Role::Function;
  return Role::Variable;
}

class MapBuilder {
 public:
  MapBuilder(const LseConfig& cfg, uint64_t seed)
      : cfg_(cfg), gen_(cfg.suffix_lo, cfg.suffix_hi, seed) {
    numbers_ = cfg.anonymize_numbers && !cfg.compilable_mode;
    strings_ = cfg.anonymize_strings && !cfg.compilable_mode;
  }

  AnonymizationMap build(const SyntaxTree& tree) {
    // reserve suffixes of pre-existing placeholder-shaped identifiers
    syntax::visit(tree.root, [&](const SyntaxNode& n) {
      uint64_t suffix = 0;
      if (n.kind == NodeKind::Identifier && parse_placeholder_suffix(n.text, suffix)) {
        gen_.reserve(suffix);
      }
    });
    walk(tree.root);
    return std::move(map_);
  }

 private:
  const LseConfig& cfg_;
  SuffixGenerator gen_;
  bool numbers_ = true;
  bool strings_ = true;
  AnonymizationMap map_;

  void add(const std::string& original, Role role) {
    if (original.empty() || map_.index.count(original)) return;
    uint64_t suffix = gen_.draw();
    std::string placeholder =
        std::string(placeholder_prefix(role)) + "_" + std::to_string(suffix);
    if (role == Role::String) placeholder = "\"" + placeholder + "\"";
    map_.index.emplace(original, static_cast<uint32_t>(map_.entries.size()));
    map_.entries.push_back({original, role, placeholder, suffix});
  }

  static bool declaration_is_alias(const SyntaxNode& decl) {
    for (const auto& c : decl.children) {
      if (c.kind == NodeKind::Keyword && (c.text == "typedef" || c.text == "using")) {
        return true;
      }
      if (c.kind == NodeKind::InitDeclarator) break;
    }
    return false;
  }

  void add_declarator_names(const SyntaxNode& decl) {
    bool alias = declaration_is_alias(decl);
    for (const auto& c : decl.children) {
      if (c.kind != NodeKind::InitDeclarator || c.children.empty()) continue;
      const SyntaxNode& d = c.children[0];
      if (!is_declarator_kind(d.kind)) continue;
      const SyntaxNode* name = declarator_name(d);
      if (name && !alias) add(name->text, classify_declarator(d));
    }
  }

  void walk(const SyntaxNode& n) {
    switch (n.kind) {
      case NodeKind::PragmaDirective:
      case NodeKind::PreprocDirective:
      case NodeKind::Comment:
        return;  // directives keep their tokens verbatim
      case NodeKind::FunctionDefinition:
        for (const auto& c : n.children) {
          if (is_declarator_kind(c.kind) && c.kind != NodeKind::Identifier) {
            const SyntaxNode* name = declarator_name(c);
            if (name) add(name->text, Role::Function);
            break;
          }
        }
        break;
      case NodeKind::Declaration:
        add_declarator_names(n);
        break;
      case NodeKind::ParameterDeclaration:
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
          if (is_declarator_kind(it->kind)) {
            const SyntaxNode* name = declarator_name(*it);
            if (name) add(name->text, Role::Parameter);
            break;
          }
        }
        break;
      case NodeKind::NumberLiteral:
        if (numbers_) add(n.text, Role::Number);
        return;
      case NodeKind::StringLiteral:
        if (strings_) add(n.text, Role::String);
        return;
      default:
        break;
    }
    for (const auto& c : n.children) walk(c);
  }
};

void collect_rewrites(const SyntaxNode& n, const AnonymizationMap& map,
                      syntax::RewriteMap& rewrites) {
  if (n.kind == NodeKind::PragmaDirective || n.kind == NodeKind::PreprocDirective) return;
  if (n.is_leaf()) {
    if (n.kind != NodeKind::Identifier && n.kind != NodeKind::NumberLiteral &&
        n.kind != NodeKind::StringLiteral) {
      return;
    }
    const auto* entry = map.find(n.text);
    if (entry) rewrites.emplace(&n, entry->replacement);
    return;
  }
  for (const auto& c : n.children) collect_rewrites(c, map, rewrites);
}

}  // namespace

AnonymizationMap build_anonymization_map(const SyntaxTree& tree, const LseConfig& config) {
  MapBuilder builder(config, config.seed);
  return builder.build(tree);
}

std::string apply_lse(const std::string& source, syntax::Language lang,
                      const LseConfig& config) {
  SyntaxTree tree = syntax::parse(source, lang);
  if (tree.error_count > config.max_parse_errors) {
    throw LseRejected("parse errors (" + std::to_string(tree.error_count) +
                      ") exceed threshold (" + std::to_string(config.max_parse_errors) + ")");
  }
  AnonymizationMap map = build_anonymization_map(tree, config);
  syntax::RewriteMap rewrites;
  collect_rewrites(tree.root, map, rewrites);
  return syntax::regenerate(tree, rewrites);
}

}  // namespace hcp::lse
