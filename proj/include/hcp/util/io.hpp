#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace hcp::util {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Parse a newline-delimited JSON file. When `tolerate_partial_last` is set,
/// a trailing line that does not parse (half-written by an interrupted
/// process) is dropped instead of raising.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path,
                                       bool tolerate_partial_last = false);

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

std::vector<std::string> split(const std::string& text, char sep);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

}  // namespace hcp::util
