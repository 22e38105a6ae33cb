#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hcp/syntax/tree.hpp"

namespace hcp::lse {

struct LseConfig {
  uint64_t suffix_lo = 1;  // inclusive suffix range for placeholders
  uint64_t suffix_hi = 1000;
  uint64_t seed = 0;
  bool anonymize_numbers = true;
  bool anonymize_strings = true;
  // Keep numeric and string literals verbatim so the output stays
  // compilable; identifiers are still renamed.
  bool compilable_mode = false;
  int max_parse_errors = 0;
};

enum class Role : uint8_t { Function, Variable, Array, Parameter, Number, String };

const char* role_name(Role role);

/// Per-unit bijection from original tokens to placeholder tokens. Suffixes
/// are drawn without replacement from the configured range, so two distinct
/// originals never share a replacement; every occurrence of the same
/// original maps to the same placeholder.
struct AnonymizationMap {
  struct Entry {
    std::string original;  // verbatim token text (strings keep their quotes)
    Role role;
    std::string replacement;
    uint64_t suffix;
  };
  std::vector<Entry> entries;  // discovery order
  std::unordered_map<std::string, uint32_t> index;

  const Entry* find(const std::string& original) const {
    auto it = index.find(original);
    return it == index.end() ? nullptr : &entries[it->second];
  }
};

/// Scan one parsed unit for every identifier declared in it (function
/// names, variables, parameters, arrays) plus number and string literals
/// per config, and assign randomly suffixed placeholders. Identifiers
/// without a declaration in the unit (library calls, macros) are absent.
AnonymizationMap build_anonymization_map(const syntax::SyntaxTree& tree,
                                         const LseConfig& config = {});

/// Full pipeline: parse, anonymize, regenerate. Output is comment-free,
/// whitespace-normalized, and byte-identical for identical (source, config).
/// Throws LseRejected when the source has more parse errors than the
/// configured threshold.
std::string apply_lse(const std::string& source, syntax::Language lang,
                      const LseConfig& config = {});

}  // namespace hcp::lse
