#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace surveyqe {

// Relevance grades: 0 not relevant, 1 (partially) relevant, 2 very relevant.
inline constexpr int kMaxGrade = 2;

class Qrels {
 public:
  using Judgments = std::map<std::string, int, std::less<>>;

  // Throws ValidationError for a grade outside 0..2 or a repeated pair.
  void add(const std::string& topic_id, const std::string& doc_id, int grade);

  bool has_topic(std::string_view topic_id) const;
  // Grade of a judged document, 0 for unjudged ones.
  int grade(std::string_view topic_id, std::string_view doc_id) const;
  // nullptr for an unjudged topic.
  const Judgments* judgments(std::string_view topic_id) const;
  std::vector<std::string> topics() const;
  std::size_t size() const;

 private:
  std::map<std::string, Judgments, std::less<>> data_;
};

struct RunEntry {
  std::string doc_id;
  double score = 0.0;
  friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

// Ranked results per topic for one system.
class RankedRun {
 public:
  RankedRun() = default;
  explicit RankedRun(std::string tag) : tag_(std::move(tag)) {}

  const std::string& tag() const { return tag_; }
  void set_tag(std::string tag) { tag_ = std::move(tag); }

  // Sorts by score descending, doc_id ascending. Throws ValidationError on a
  // duplicate doc_id or a repeated topic.
  void add_topic(const std::string& topic_id, std::vector<RunEntry> entries);
  // Keeps the given order; scores must be non-increasing.
  void add_ranked_topic(const std::string& topic_id, std::vector<RunEntry> entries);

  bool has_topic(std::string_view topic_id) const { return topics_.contains(topic_id); }
  // Throws LookupError for an unknown topic.
  const std::vector<RunEntry>& results(std::string_view topic_id) const;
  std::vector<std::string> topics() const;

  friend bool operator==(const RankedRun&, const RankedRun&) = default;

 private:
  void insert(const std::string& topic_id, std::vector<RunEntry> entries);

  std::string tag_;
  std::map<std::string, std::vector<RunEntry>, std::less<>> topics_;
};

// Graded nDCG at cutoff n with gain 2^grade - 1 and discount log2(1 + rank).
// The ideal ordering ranks every judged document of the topic by grade.
// 0 when the topic has no document with grade >= 1. Throws LookupError if
// the topic is absent from the run.
double ndcg_at(const RankedRun& run, const Qrels& qrels, std::string_view topic_id, std::size_t n);

// (number of documents with grade >= 1 in the top n) / n.
double recall_at(const RankedRun& run, const Qrels& qrels, std::string_view topic_id, std::size_t n);

// DCG of grades listed in rank order, truncated at n.
double dcg(std::span<const int> grades, std::size_t n);

enum class MissingQrelsPolicy { kSkipWithWarning, kError };

enum class Metric { kRecall, kNdcg };
std::string metric_label(Metric metric, std::size_t cutoff);

struct TopicMetrics {
  std::string topic_id;
  std::vector<double> recall;  // aligned with MetricReport::cutoffs
  std::vector<double> ndcg;
};

struct MetricReport {
  std::string tag;
  std::vector<std::size_t> cutoffs;
  std::vector<TopicMetrics> topics;  // topic_id order
  std::vector<double> mean_recall;
  std::vector<double> mean_ndcg;
  std::vector<std::string> skipped_topics;

  // Per-topic values in topic order. Throws LookupError for an unknown cutoff.
  std::vector<double> values(Metric metric, std::size_t cutoff) const;
  double mean(Metric metric, std::size_t cutoff) const;
};

// Per-topic R@n and nDCG@n for every run topic plus arithmetic means. Topics
// without judgments are skipped (recorded in skipped_topics) or raise
// ValidationError depending on policy.
MetricReport evaluate_run(const RankedRun& run, const Qrels& qrels,
                          std::span<const std::size_t> cutoffs,
                          MissingQrelsPolicy policy = MissingQrelsPolicy::kSkipWithWarning);

}  // namespace surveyqe
