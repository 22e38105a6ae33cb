#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "hcp/syntax/token.hpp"

namespace hcp::corpus {

/// One extracted function: the corpus unit. `code` is the comment-stripped,
/// whitespace-normalized function text; `content_hash` is the SHA-256 of
/// exactly that text, and `token_count` its lexical token count.
struct FunctionRecord {
  std::string id;
  std::string repo;
  std::string path;
  syntax::Language lang = syntax::Language::C;
  std::string code;
  uint64_t token_count = 0;
  std::string content_hash;  // hex SHA-256
  bool has_openmp = false;
  std::string lse_code;  // empty until the lse stage fills it

  bool operator==(const FunctionRecord&) const = default;
};

nlohmann::json record_to_json(const FunctionRecord& rec);
FunctionRecord record_from_json(const nlohmann::json& j);

}  // namespace hcp::corpus
