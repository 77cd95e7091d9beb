#include "surveyqe/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "surveyqe/errors.hpp"

namespace surveyqe {

void Qrels::add(const std::string& topic_id, const std::string& doc_id, int grade) {
  if (grade < 0 || grade > kMaxGrade) {
    throw ValidationError(fmt::format("grade {} for ({}, {}) outside 0..{}", grade, topic_id,
                                      doc_id, kMaxGrade));
  }
  auto [it, inserted] = data_[topic_id].emplace(doc_id, grade);
  if (!inserted) {
    throw ValidationError(fmt::format("duplicate judgment for ({}, {})", topic_id, doc_id));
  }
}

bool Qrels::has_topic(std::string_view topic_id) const { return data_.contains(topic_id); }

int Qrels::grade(std::string_view topic_id, std::string_view doc_id) const {
  const auto* j = judgments(topic_id);
  if (!j) return 0;
  auto it = j->find(doc_id);
  return it == j->end() ? 0 : it->second;
}

const Qrels::Judgments* Qrels::judgments(std::string_view topic_id) const {
  auto it = data_.find(topic_id);
  return it == data_.end() ? nullptr : &it->second;
}

std::vector<std::string> Qrels::topics() const {
  std::vector<std::string> out;
  for (const auto& [t, _] : data_) out.push_back(t);
  return out;
}

std::size_t Qrels::size() const {
  std::size_t n = 0;
  for (const auto& [_, j] : data_) n += j.size();
  return n;
}

void RankedRun::insert(const std::string& topic_id, std::vector<RunEntry> entries) {
  std::vector<std::string_view> ids;
  for (const auto& e : entries) ids.push_back(e.doc_id);
  std::sort(ids.begin(), ids.end());
  if (auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end()) {
    throw ValidationError(fmt::format("topic {}: duplicate doc_id '{}' in run", topic_id, *dup));
  }
  if (!topics_.emplace(topic_id, std::move(entries)).second) {
    throw ValidationError(fmt::format("topic {} added to run twice", topic_id));
  }
}

void RankedRun::add_topic(const std::string& topic_id, std::vector<RunEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const RunEntry& a, const RunEntry& b) {
    return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
  });
  insert(topic_id, std::move(entries));
}

void RankedRun::add_ranked_topic(const std::string& topic_id, std::vector<RunEntry> entries) {
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].score > entries[i - 1].score) {
      throw ValidationError(fmt::format("topic {}: score increases at rank {}", topic_id, i + 1));
    }
  }
  insert(topic_id, std::move(entries));
}

const std::vector<RunEntry>& RankedRun::results(std::string_view topic_id) const {
  auto it = topics_.find(topic_id);
  if (it == topics_.end()) throw LookupError(fmt::format("topic '{}' not in run", topic_id));
  return it->second;
}

std::vector<std::string> RankedRun::topics() const {
  std::vector<std::string> out;
  for (const auto& [t, _] : topics_) out.push_back(t);
  return out;
}

double dcg(std::span<const int> grades, std::size_t n) {
  double sum = 0.0;
  const auto limit = std::min(n, grades.size());
  for (std::size_t j = 1; j <= limit; ++j) {
    const auto gain = std::exp2(static_cast<double>(grades[j - 1])) - 1.0;
    sum += gain / std::log2(1.0 + static_cast<double>(j));
  }
  return sum;
}

double ndcg_at(const RankedRun& run, const Qrels& qrels, std::string_view topic_id, std::size_t n) {
  if (n == 0) throw ValidationError("cutoff must be positive");
  const auto& results = run.results(topic_id);
  const auto* judged = qrels.judgments(topic_id);
  if (!judged) return 0.0;

  std::vector<int> ideal;
  for (const auto& [_, g] : *judged) ideal.push_back(g);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  if (ideal.empty() || ideal.front() < 1) return 0.0;

  std::vector<int> actual;
  for (std::size_t j = 0; j < std::min(n, results.size()); ++j) {
    actual.push_back(qrels.grade(topic_id, results[j].doc_id));
  }
  return dcg(actual, n) / dcg(ideal, n);
}

double recall_at(const RankedRun& run, const Qrels& qrels, std::string_view topic_id,
                 std::size_t n) {
  if (n == 0) throw ValidationError("cutoff must be positive");
  const auto& results = run.results(topic_id);
  std::size_t relevant = 0;
  for (std::size_t j = 0; j < std::min(n, results.size()); ++j) {
    if (qrels.grade(topic_id, results[j].doc_id) >= 1) ++relevant;
  }
  return static_cast<double>(relevant) / static_cast<double>(n);
}

std::string metric_label(Metric metric, std::size_t cutoff) {
  return fmt::format("{}@{}", metric == Metric::kRecall ? "R" : "nDCG", cutoff);
}

namespace {

std::size_t cutoff_slot(const MetricReport& report, std::size_t cutoff) {
  auto it = std::find(report.cutoffs.begin(), report.cutoffs.end(), cutoff);
  if (it == report.cutoffs.end()) throw LookupError(fmt::format("cutoff {} not in report", cutoff));
  return static_cast<std::size_t>(it - report.cutoffs.begin());
}

}  // namespace

std::vector<double> MetricReport::values(Metric metric, std::size_t cutoff) const {
  const auto slot = cutoff_slot(*this, cutoff);
  std::vector<double> out;
  for (const auto& t : topics) out.push_back(metric == Metric::kRecall ? t.recall[slot] : t.ndcg[slot]);
  return out;
}

double MetricReport::mean(Metric metric, std::size_t cutoff) const {
  const auto slot = cutoff_slot(*this, cutoff);
  return metric == Metric::kRecall ? mean_recall[slot] : mean_ndcg[slot];
}

MetricReport evaluate_run(const RankedRun& run, const Qrels& qrels,
                          std::span<const std::size_t> cutoffs, MissingQrelsPolicy policy) {
  if (cutoffs.empty()) throw ValidationError("at least one cutoff is required");
  for (const auto c : cutoffs) {
    if (c == 0) throw ValidationError("cutoffs must be positive");
  }
  MetricReport report;
  report.tag = run.tag();
  report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
  report.mean_recall.assign(cutoffs.size(), 0.0);
  report.mean_ndcg.assign(cutoffs.size(), 0.0);

  for (const auto& topic : run.topics()) {
    if (!qrels.has_topic(topic)) {
      if (policy == MissingQrelsPolicy::kError) {
        throw ValidationError(fmt::format("run topic '{}' has no relevance judgments", topic));
      }
      report.skipped_topics.push_back(topic);
      continue;
    }
    TopicMetrics tm{topic, {}, {}};
    for (const auto c : cutoffs) {
      tm.recall.push_back(recall_at(run, qrels, topic, c));
      tm.ndcg.push_back(ndcg_at(run, qrels, topic, c));
    }
    report.topics.push_back(std::move(tm));
  }

  if (!report.topics.empty()) {
    const auto count = static_cast<double>(report.topics.size());
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
      double r = 0.0;
      double g = 0.0;
      for (const auto& t : report.topics) {
        r += t.recall[i];
        g += t.ndcg[i];
      }
      report.mean_recall[i] = r / count;
      report.mean_ndcg[i] = g / count;
    }
  }
  return report;
}

}  // namespace surveyqe
