#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hcp/corpus/record.hpp"

namespace hcp::corpus {

struct ExtractResult {
  std::vector<FunctionRecord> records;
  uint64_t rejected_parse = 0;  // definitions skipped over parse errors
};

/// One record per top-level function definition (file, namespace, and
/// extern "C" scope). Comments are stripped and whitespace normalized in
/// each record's code; definitions containing parse errors are skipped and
/// counted instead of emitted.
ExtractResult extract_functions(const std::string& file_text, syntax::Language lang,
                                const std::string& repo, const std::string& path);

struct FilterLimits {
  uint64_t min_tokens = 100;      // accepted iff token_count > min_tokens
  uint64_t max_bytes = 1048576;   // accepted iff code bytes < max_bytes
};

struct FilterCounters {
  uint64_t too_small = 0;
  uint64_t too_large = 0;
  uint64_t duplicates = 0;
  uint64_t parse = 0;

  uint64_t total() const { return too_small + too_large + duplicates + parse; }
};

std::vector<FunctionRecord> filter_records(std::vector<FunctionRecord> records,
                                           const FilterLimits& limits,
                                           FilterCounters& counters);

/// Keep the first record per content hash; input order is preserved and is
/// expected to be the stable (repo, path, offset) order from extraction.
std::vector<FunctionRecord> deduplicate(std::vector<FunctionRecord> records,
                                        uint64_t& duplicate_count);

struct PartitionResult {
  std::vector<FunctionRecord> general;  // pragma lines removed
  std::vector<FunctionRecord> openmp;   // pragmas verbatim
  bool insufficient = false;            // fewer OpenMP records than the cap
};

/// Build the General/OpenMP evaluation sets from the OpenMP-bearing
/// records: one seeded sample of up to `cap` records, rendered twice —
/// once with every `#pragma omp` line removed, once verbatim.
PartitionResult partition_openmp(const std::vector<FunctionRecord>& records,
                                 size_t cap = 20000, uint64_t seed = 0);

struct SplitRatios {
  double train = 0.98;
  double validation = 0.01;
  double test = 0.01;
};

struct SplitResult {
  std::vector<FunctionRecord> train;
  std::vector<FunctionRecord> validation;
  std::vector<FunctionRecord> test;
  bool degenerate = false;  // too few repos for a real split
};

/// Repository-disjoint split: every record of a repo lands in one part.
/// Throws BadRatios when the ratios are negative or do not sum to 1.
SplitResult split_dataset(const std::vector<FunctionRecord>& records, SplitRatios ratios,
                          uint64_t seed);

struct LanguageStats {
  uint64_t repos = 0;
  uint64_t bytes = 0;
  uint64_t files = 0;
  uint64_t functions = 0;
};

struct CorpusManifest {
  std::map<std::string, LanguageStats> per_language;  // keyed "c" / "cpp"
  uint64_t extracted = 0;
  uint64_t accepted = 0;
  FilterCounters rejected;
  uint64_t train_size = 0;
  uint64_t validation_size = 0;
  uint64_t test_size = 0;
  nlohmann::json config;

  /// accepted + every rejection counter == extracted
  bool balanced() const { return accepted + rejected.total() == extracted; }

  nlohmann::json to_json() const;
  static CorpusManifest from_json(const nlohmann::json& j);
};

/// JSONL shard writer: rolls to a numbered shard after `shard_cap` records.
/// A corpus that fits in one shard is written to exactly `basename`.
std::vector<std::string> write_records_sharded(const std::string& dir,
                                               const std::string& basename,
                                               const std::vector<FunctionRecord>& records,
                                               size_t shard_cap = 100000);

std::vector<FunctionRecord> read_records(const std::string& path);

}  // namespace hcp::corpus
