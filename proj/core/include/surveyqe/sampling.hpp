#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace surveyqe {

// Query-log frequency bands: high > 10 entries, medium 2..10, low exactly 1.
enum class Stratum { kHigh, kMedium, kLow };

std::string_view to_string(Stratum stratum);
Stratum parse_stratum(std::string_view name);
// Throws ValidationError for frequency 0.
Stratum stratum_for_frequency(std::uint64_t frequency);

struct LogEntry {
  std::string query;
  std::uint64_t frequency = 0;
};

struct Topic {
  std::string topic_id;
  std::string query;
  Stratum stratum = Stratum::kLow;
  std::uint64_t frequency = 0;
  friend bool operator==(const Topic&, const Topic&) = default;
};

struct StrataCounts {
  std::size_t high = 0;
  std::size_t medium = 0;
  std::size_t low = 0;
};

// Uniform integer in [0, bound) from raw 64-bit engine output by rejection,
// so the draw sequence is identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

// Sorts the log by frequency (descending, query ascending on ties), assigns
// strata, and draws the requested number of entries per stratum without
// replacement using a partial Fisher-Yates shuffle seeded with `seed`.
// Output order: high, medium, low; within a stratum by frequency descending
// then query. Topic ids are T001, T002, ... in output order. Throws
// ValidationError naming the stratum when it has too few entries.
std::vector<Topic> sample_topics_from_log(std::span<const LogEntry> entries, StrataCounts counts,
                                          std::uint64_t seed);

// Tab-separated "query<TAB>frequency" lines; '#' comments and blank lines
// are skipped.
std::vector<LogEntry> load_query_log(const std::filesystem::path& path);

// JSON-lines {topic_id, query, stratum, frequency}.
std::vector<Topic> load_topics_jsonl(const std::filesystem::path& path);
std::string topics_to_jsonl(std::span<const Topic> topics);

}  // namespace surveyqe
