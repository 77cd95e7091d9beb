#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace surveyqe {

enum class Stemmer { kNone, kLightSuffix };

std::string_view to_string(Stemmer stemmer);
Stemmer parse_stemmer(std::string_view name);

// Settings for the text-to-terms pipeline. One instance is shared by the
// index, the co-occurrence trainer, thesaurus label matching and query
// parsing; built artifacts carry a serialized copy.
struct AnalyzerConfig {
  bool lowercase = true;
  std::set<std::string> stopwords;
  Stemmer stemmer = Stemmer::kNone;

  // Tokens are maximal runs of Unicode letters (general category L*) or
  // decimal digits (Nd). Fixed; recorded in the JSON form for provenance.
  static constexpr std::string_view kTokenPattern = "unicode-letter-digit-runs";

  std::string to_json() const;
  static AnalyzerConfig from_json(std::string_view json);
  // Reads a JSON config file. A "stopwords_file" entry is resolved relative
  // to the config's directory and merged with any inline "stopwords" list.
  static AnalyzerConfig load(const std::filesystem::path& path);

  friend bool operator==(const AnalyzerConfig&, const AnalyzerConfig&) = default;
};

struct TermSequence {
  std::vector<std::string> terms;
  // Ordinal of each surviving term in the raw token stream, so removed
  // stopwords leave gaps.
  std::vector<std::uint32_t> positions;

  bool empty() const { return terms.empty(); }
  std::size_t size() const { return terms.size(); }
};

TermSequence analyze(std::string_view text, const AnalyzerConfig& config);

// Analyzed terms joined by single spaces. Used as the canonical key for
// multi-word labels such as thesaurus entries and controlled terms.
std::string normalize_label(std::string_view text, const AnalyzerConfig& config);

// One entry per line, '#' starts a comment line, entries are trimmed and
// lowercased. Throws IoError if the file cannot be read and ValidationError
// for a line with embedded whitespace.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

// Strips one suffix from a small fixed table; stems shorter than three code
// points are left alone.
std::string light_suffix_stem(std::string_view term);

}  // namespace surveyqe
