#include "hcp/corpus/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "hcp/error.hpp"
#include "hcp/syntax/regen.hpp"
#include "hcp/util/io.hpp"
#include "hcp/util/sha256.hpp"

namespace hcp::corpus {

using syntax::Language;
using syntax::NodeKind;
using syntax::SyntaxNode;

nlohmann::json record_to_json(const FunctionRecord& rec) {
  nlohmann::json j{{"id", rec.id},
                   {"repo", rec.repo},
                   {"path", rec.path},
                   {"lang", syntax::language_name(rec.lang)},
                   {"code", rec.code},
                   {"tokens", rec.token_count},
                   {"sha256", rec.content_hash},
                   {"openmp", rec.has_openmp}};
  if (!rec.lse_code.empty()) j["lse_code"] = rec.lse_code;
  return j;
}

FunctionRecord record_from_json(const nlohmann::json& j) {
  FunctionRecord rec;
  rec.id = j.at("id").get<std::string>();
  rec.repo = j.at("repo").get<std::string>();
  rec.path = j.at("path").get<std::string>();
  rec.lang = syntax::language_from_name(j.at("lang").get<std::string>());
  rec.code = j.at("code").get<std::string>();
  rec.token_count = j.at("tokens").get<uint64_t>();
  rec.content_hash = j.at("sha256").get<std::string>();
  rec.has_openmp = j.at("openmp").get<bool>();
  if (j.contains("lse_code")) rec.lse_code = j.at("lse_code").get<std::string>();
  return rec;
}

namespace {

bool subtree_has_omp(const SyntaxNode& node) {
  bool found = false;
  syntax::visit(node, [&](const SyntaxNode& n) {
    if (syntax::is_omp_pragma(n)) found = true;
  });
  return found;
}

void collect_function_definitions(const SyntaxNode& node,
                                  std::vector<const SyntaxNode*>& out) {
  for (const auto& child : node.children) {
    if (child.kind == NodeKind::FunctionDefinition) {
      out.push_back(&child);
      continue;
    }
    // descend through scopes that still count as "top level"
    if (child.kind == NodeKind::NamespaceDefinition ||
        child.kind == NodeKind::LinkageSpecification ||
        child.kind == NodeKind::TemplateDeclaration) {
      collect_function_definitions(child, out);
    }
  }
}

FunctionRecord make_record(const SyntaxNode& fn, Language lang, const std::string& repo,
                           const std::string& path) {
  FunctionRecord rec;
  rec.repo = repo;
  rec.path = path;
  rec.lang = lang;
  rec.code = syntax::regenerate_node(fn);
  rec.token_count = syntax::lex(rec.code, lang).size();
  rec.content_hash = util::sha256_hex(rec.code);
  rec.has_openmp = subtree_has_omp(fn);
  rec.id = repo + ":" + path + ":" + std::to_string(fn.begin);
  return rec;
}

}  // namespace

ExtractResult extract_functions(const std::string& file_text, Language lang,
                                const std::string& repo, const std::string& path) {
  ExtractResult result;
  syntax::SyntaxTree tree;
  try {
    tree = syntax::parse(file_text, lang);
  } catch (const ParseFailure&) {
    result.rejected_parse = 1;
    return result;
  }
  std::vector<const SyntaxNode*> functions;
  collect_function_definitions(tree.root, functions);
  for (const SyntaxNode* fn : functions) {
    if (syntax::contains_error(*fn)) {
      ++result.rejected_parse;
      continue;
    }
    result.records.push_back(make_record(*fn, lang, repo, path));
  }
  return result;
}

std::vector<FunctionRecord> filter_records(std::vector<FunctionRecord> records,
                                           const FilterLimits& limits,
                                           FilterCounters& counters) {
  std::vector<FunctionRecord> accepted;
  accepted.reserve(records.size());
  for (auto& rec : records) {
    if (rec.token_count <= limits.min_tokens) {
      ++counters.too_small;
      continue;
    }
    if (rec.code.size() >= limits.max_bytes) {
      ++counters.too_large;
      continue;
    }
    accepted.push_back(std::move(rec));
  }
  return accepted;
}

std::vector<FunctionRecord> deduplicate(std::vector<FunctionRecord> records,
                                        uint64_t& duplicate_count) {
  std::vector<FunctionRecord> unique;
  unique.reserve(records.size());
  std::unordered_set<std::string> seen;
  for (auto& rec : records) {
    if (seen.insert(rec.content_hash).second) {
      unique.push_back(std::move(rec));
    } else {
      ++duplicate_count;
    }
  }
  return unique;
}

namespace {

std::string strip_omp_pragmas(const std::string& code, Language lang) {
  auto tree = syntax::parse(code, lang);
  syntax::RewriteMap rewrites;
  std::vector<const SyntaxNode*> targets;
  syntax::visit(tree.root, [&](const SyntaxNode& n) {
    if (syntax::is_omp_pragma(n)) targets.push_back(&n);
  });
  for (const SyntaxNode* t : targets) rewrites.emplace(t, "");
  return syntax::regenerate(tree, rewrites);
}

}  // namespace

PartitionResult partition_openmp(const std::vector<FunctionRecord>& records, size_t cap,
                                 uint64_t seed) {
  PartitionResult result;
  std::vector<size_t> pool;
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].has_openmp) pool.push_back(i);
  }
  if (pool.size() < cap) result.insufficient = true;
  if (pool.size() > cap) {
    std::mt19937_64 engine(seed);
    std::shuffle(pool.begin(), pool.end(), engine);
    pool.resize(cap);
    std::sort(pool.begin(), pool.end());  // keep corpus order in the output
  }
  for (size_t i : pool) {
    const FunctionRecord& rec = records[i];
    result.openmp.push_back(rec);

    FunctionRecord general = rec;
    general.code = strip_omp_pragmas(rec.code, rec.lang);
    general.token_count = syntax::lex(general.code, rec.lang).size();
    general.content_hash = util::sha256_hex(general.code);
    general.has_openmp = false;
    general.lse_code.clear();
    result.general.push_back(std::move(general));
  }
  return result;
}

SplitResult split_dataset(const std::vector<FunctionRecord>& records, SplitRatios ratios,
                          uint64_t seed) {
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw BadRatios("split ratios must be nonnegative and sum to 1");
  }
  // repos in first-appearance order, then seeded shuffle
  std::vector<std::string> repos;
  std::unordered_set<std::string> seen;
  for (const auto& rec : records) {
    if (seen.insert(rec.repo).second) repos.push_back(rec.repo);
  }
  std::mt19937_64 engine(seed);
  std::shuffle(repos.begin(), repos.end(), engine);

  size_t n = repos.size();
  size_t n_validation = static_cast<size_t>(std::floor(ratios.validation * n));
  size_t n_test = static_cast<size_t>(std::floor(ratios.test * n));
  size_t n_train = n - n_validation - n_test;

  SplitResult result;
  result.degenerate = n > 0 && (n_validation == 0 || n_test == 0);
  enum class Part { Train, Validation, Test };
  std::unordered_map<std::string, Part> assignment;
  for (size_t i = 0; i < repos.size(); ++i) {
    Part part = i < n_train                ? Part::Train
                : i < n_train + n_validation ? Part::Validation
                                             : Part::Test;
    assignment.emplace(repos[i], part);
  }
  for (const auto& rec : records) {
    switch (assignment.at(rec.repo)) {
      case Part::Train: result.train.push_back(rec); break;
      case Part::Validation: result.validation.push_back(rec); break;
      case Part::Test: result.test.push_back(rec); break;
    }
  }
  return result;
}

nlohmann::json CorpusManifest::to_json() const {
  nlohmann::json per_lang = nlohmann::json::object();
  for (const auto& [lang, stats] : per_language) {
    per_lang[lang] = {{"repos", stats.repos},
                      {"bytes", stats.bytes},
                      {"files", stats.files},
                      {"functions", stats.functions}};
  }
  return {{"languages", per_lang},
          {"extracted", extracted},
          {"accepted", accepted},
          {"rejected",
           {{"too_small", rejected.too_small},
            {"too_large", rejected.too_large},
            {"duplicates", rejected.duplicates},
            {"parse", rejected.parse}}},
          {"splits",
           {{"train", train_size}, {"validation", validation_size}, {"test", test_size}}},
          {"config", config}};
}

CorpusManifest CorpusManifest::from_json(const nlohmann::json& j) {
  CorpusManifest m;
  for (const auto& [lang, stats] : j.at("languages").items()) {
    LanguageStats s;
    s.repos = stats.at("repos").get<uint64_t>();
    s.bytes = stats.at("bytes").get<uint64_t>();
    s.files = stats.at("files").get<uint64_t>();
    s.functions = stats.at("functions").get<uint64_t>();
    m.per_language[lang] = s;
  }
  m.extracted = j.at("extracted").get<uint64_t>();
  m.accepted = j.at("accepted").get<uint64_t>();
  m.rejected.too_small = j.at("rejected").at("too_small").get<uint64_t>();
  m.rejected.too_large = j.at("rejected").at("too_large").get<uint64_t>();
  m.rejected.duplicates = j.at("rejected").at("duplicates").get<uint64_t>();
  m.rejected.parse = j.at("rejected").at("parse").get<uint64_t>();
  m.train_size = j.at("splits").at("train").get<uint64_t>();
  m.validation_size = j.at("splits").at("validation").get<uint64_t>();
  m.test_size = j.at("splits").at("test").get<uint64_t>();
  m.config = j.value("config", nlohmann::json::object());
  return m;
}

std::vector<std::string> write_records_sharded(const std::string& dir,
                                               const std::string& basename,
                                               const std::vector<FunctionRecord>& records,
                                               size_t shard_cap) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;
  if (records.size() <= shard_cap) {
    std::vector<nlohmann::json> rows;
    rows.reserve(records.size());
    for (const auto& rec : records) rows.push_back(record_to_json(rec));
    std::string path = (fs::path(dir) / (basename + ".jsonl")).string();
    util::write_jsonl(path, rows);
    written.push_back(path);
    return written;
  }
  size_t shard = 0;
  for (size_t offset = 0; offset < records.size(); offset += shard_cap, ++shard) {
    std::vector<nlohmann::json> rows;
    size_t end = std::min(records.size(), offset + shard_cap);
    for (size_t i = offset; i < end; ++i) rows.push_back(record_to_json(records[i]));
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "-%05zu", shard);
    std::string path = (fs::path(dir) / (basename + suffix + ".jsonl")).string();
    util::write_jsonl(path, rows);
    written.push_back(path);
  }
  return written;
}

std::vector<FunctionRecord> read_records(const std::string& path) {
  std::vector<FunctionRecord> records;
  for (const auto& row : util::read_jsonl(path)) {
    records.push_back(record_from_json(row));
  }
  return records;
}

}  // namespace hcp::corpus
