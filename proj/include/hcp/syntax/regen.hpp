#pragma once

#include <map>
#include <string>

#include "hcp/syntax/tree.hpp"

namespace hcp::syntax {

/// Replacement text per rewritten node. An empty replacement removes the
/// node (and everything under it) from the output.
using RewriteMap = std::map<const SyntaxNode*, std::string>;

/// Emit source text from a tree: comments dropped, one space between
/// tokens, newline after `;`, `{`, `}`, directives on their own lines.
/// Throws RewriteConflict when two rewrites target overlapping spans, and
/// Error when a rewrite target is not a node of this tree.
std::string regenerate(const SyntaxTree& tree, const RewriteMap& rewrites = {});

/// Same, rooted at an arbitrary subtree (used for function extraction).
std::string regenerate_node(const SyntaxNode& node, const RewriteMap& rewrites = {});

}  // namespace hcp::syntax
