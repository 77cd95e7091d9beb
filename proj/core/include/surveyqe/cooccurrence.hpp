#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "surveyqe/analysis.hpp"

namespace surveyqe {

// An annotated training document: free text (title + abstract) and the
// controlled vocabulary terms an indexer assigned to it.
struct TrainingRecord {
  std::string doc_id;
  std::string text;
  std::vector<std::string> keywords;
};

// JSON-lines {doc_id, text, keywords: [...]}.
std::vector<TrainingRecord> load_training_jsonl(const std::filesystem::path& path);

enum class SimilarityMeasure { kLogJaccard, kCosine };

std::string_view to_string(SimilarityMeasure measure);
SimilarityMeasure parse_similarity_measure(std::string_view name);

// ln(df_xy) / ln(df_x + df_y - df_xy); 0 when df_xy == 0 or the union has a
// single document. Throws ValidationError unless df_x, df_y >= 1 and
// df_xy <= min(df_x, df_y).
double log_jaccard(std::uint64_t df_x, std::uint64_t df_y, std::uint64_t df_xy);

// df_xy / sqrt(df_x + df_y). Note the sum under the radical: the value is
// not bounded by 1, e.g. (8, 8, 8) gives 2. Same preconditions as
// log_jaccard.
double cosine(std::uint64_t df_x, std::uint64_t df_y, std::uint64_t df_xy);

double similarity(SimilarityMeasure measure, std::uint64_t df_x, std::uint64_t df_y,
                  std::uint64_t df_xy);

// Document-frequency statistics linking analyzed free-text terms to
// controlled terms. Controlled terms are kept as their trimmed labels.
class CooccurrenceModel {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  struct PairCount {
    std::uint32_t controlled = 0;  // index into controlled_terms()
    std::uint64_t df = 0;
    friend bool operator==(const PairCount&, const PairCount&) = default;
  };

  std::uint64_t doc_count() const { return doc_count_; }
  const AnalyzerConfig& analyzer() const { return analyzer_; }

  const std::vector<std::string>& free_terms() const { return free_terms_; }
  const std::vector<std::string>& controlled_terms() const { return controlled_terms_; }

  std::uint64_t free_df(std::string_view term) const;
  std::uint64_t controlled_df(std::string_view term) const;
  std::uint64_t pair_df(std::string_view free_term, std::string_view controlled_term) const;
  std::uint64_t controlled_df(std::uint32_t index) const { return controlled_df_.at(index); }

  // Controlled terms co-occurring with a free term, by controlled index.
  std::span<const PairCount> pairs(std::string_view free_term) const;
  std::size_t pair_count() const { return pairs_.size(); }

  std::string serialize() const;
  static CooccurrenceModel deserialize(std::string_view bytes, const std::string& source = "<memory>");
  void save(const std::filesystem::path& path) const;
  static CooccurrenceModel load(const std::filesystem::path& path);

  friend bool operator==(const CooccurrenceModel&, const CooccurrenceModel&) = default;

 private:
  friend CooccurrenceModel train_cooccurrence(std::span<const TrainingRecord>,
                                              const AnalyzerConfig&, unsigned);
  std::optional<std::size_t> free_index(std::string_view term) const;
  std::optional<std::uint32_t> controlled_index(std::string_view term) const;
  void validate(const std::string& source) const;

  AnalyzerConfig analyzer_;
  std::uint64_t doc_count_ = 0;
  std::vector<std::string> free_terms_;          // sorted
  std::vector<std::uint64_t> free_df_;
  std::vector<std::string> controlled_terms_;    // sorted
  std::vector<std::uint64_t> controlled_df_;
  std::vector<std::uint64_t> pair_offsets_;      // free_terms_.size() + 1 entries
  std::vector<PairCount> pairs_;                 // controlled index ascending per free term
};

// Throws ValidationError for an empty stream or a record without keywords.
// The result does not depend on record order or thread count.
CooccurrenceModel train_cooccurrence(std::span<const TrainingRecord> records,
                                     const AnalyzerConfig& analyzer, unsigned threads = 1);

struct Suggestion {
  std::string term;
  double score = 0.0;
  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

inline constexpr std::size_t kDefaultSuggestionCount = 20;

// Every controlled term co-occurring with query_term, scored with `measure`,
// ordered by score descending then term ascending, cut to k.
std::vector<Suggestion> suggest_terms(const CooccurrenceModel& model, std::string_view query_term,
                                      SimilarityMeasure measure,
                                      std::size_t k = kDefaultSuggestionCount);

}  // namespace surveyqe
