#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "surveyqe/analysis.hpp"
#include "surveyqe/query.hpp"

namespace surveyqe {

// One searchable short text, e.g. a survey question or sub-question.
struct DocumentRecord {
  std::string doc_id;
  std::string text;
  std::map<std::string, std::string> metadata;
};

// Reads JSON-lines {doc_id, text, metadata}. Blank lines are skipped;
// malformed lines raise ValidationError naming the line number.
std::vector<DocumentRecord> load_corpus_jsonl(const std::filesystem::path& path);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;

  // Throws ValidationError unless k1 >= 0 and 0 <= b <= 1.
  void validate() const;
};

struct Posting {
  std::uint32_t doc = 0;  // ordinal; ordinals follow doc_id order
  std::uint32_t tf = 0;
  std::uint64_t positions_offset = 0;
};

struct BuildOptions {
  unsigned threads = 1;
};

// Positional inverted index. Immutable once built; the layout is canonical
// (terms sorted, documents numbered in doc_id order) so the serialized bytes
// do not depend on ingestion order or thread count.
class InvertedIndex {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  InvertedIndex() = default;

  std::size_t doc_count() const { return doc_ids_.size(); }
  std::size_t vocabulary_size() const { return terms_.size(); }
  double avg_doc_len() const { return avg_doc_len_; }
  const AnalyzerConfig& analyzer() const { return analyzer_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& doc_id(std::uint32_t ordinal) const { return doc_ids_.at(ordinal); }
  std::optional<std::uint32_t> find_doc(std::string_view doc_id) const;
  const std::map<std::string, std::string>& metadata(std::uint32_t ordinal) const {
    return metadata_.at(ordinal);
  }

  std::uint32_t doc_len(std::uint32_t ordinal) const { return doc_lens_.at(ordinal); }
  // Throws LookupError for an unknown id.
  std::uint32_t doc_len(std::string_view doc_id) const;

  std::uint64_t doc_freq(std::string_view term) const { return postings(term).size(); }
  std::span<const Posting> postings(std::string_view term) const;
  std::span<const std::uint32_t> positions(const Posting& posting) const {
    return {positions_.data() + posting.positions_offset, posting.tf};
  }
  // 0 when the term does not occur in the document.
  std::uint32_t term_frequency(std::string_view term, std::uint32_t ordinal) const;

  std::string serialize() const;
  static InvertedIndex deserialize(std::string_view bytes, const std::string& source = "<memory>");
  void save(const std::filesystem::path& path) const;
  static InvertedIndex load(const std::filesystem::path& path);

 private:
  friend InvertedIndex build_index(std::span<const DocumentRecord>, const AnalyzerConfig&,
                                   BuildOptions);

  void finalize();

  AnalyzerConfig analyzer_;
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lens_;
  std::vector<std::map<std::string, std::string>> metadata_;
  std::vector<std::string> terms_;
  std::vector<std::uint64_t> term_offsets_;  // terms_.size() + 1 entries
  std::vector<Posting> postings_;
  std::vector<std::uint32_t> positions_;
  double avg_doc_len_ = 0.0;
  std::uint64_t fingerprint_ = 0;
};

// Throws ValidationError naming the id on an empty or duplicate doc_id.
InvertedIndex build_index(std::span<const DocumentRecord> docs, const AnalyzerConfig& analyzer,
                          BuildOptions options = {});

// Okapi BM25 with idf = ln(1 + (N - df + 0.5) / (df + 0.5)).
double bm25_idf(std::uint64_t doc_count, std::uint64_t doc_freq);
double bm25_tf_weight(double tf, double doc_len, double avg_doc_len, const Bm25Params& params);

// 0 when the term is absent from the document; LookupError for unknown ids.
double bm25_term_score(const InvertedIndex& index, std::string_view term, std::string_view doc_id,
                       const Bm25Params& params);

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;
  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

struct SearchResult {
  std::vector<ScoredDoc> hits;  // score desc, doc_id asc
  std::string query;
  std::uint64_t index_fingerprint = 0;
};

// Documents satisfying the boolean tree (AND: all children, OR: any child,
// Term: tf > 0, Phrase: consecutive positions), scored by summing the BM25
// contribution of every distinct query term present in the document.
// Throws EmptyQueryError if the query has no terms.
SearchResult search(const InvertedIndex& index, const BooleanQuery& query,
                    const Bm25Params& params, std::size_t top_n);

// Candidate document ordinals of a query, ascending. Exposed for testing.
std::vector<std::uint32_t> match_documents(const InvertedIndex& index, const BooleanQuery& query);

}  // namespace surveyqe
