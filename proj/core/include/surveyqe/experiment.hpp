#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "surveyqe/cooccurrence.hpp"
#include "surveyqe/evaluation.hpp"
#include "surveyqe/expansion.hpp"
#include "surveyqe/index.hpp"
#include "surveyqe/sampling.hpp"
#include "surveyqe/statistics.hpp"
#include "surveyqe/thesaurus.hpp"

namespace surveyqe {

enum class ExpansionMode { kNone, kThesaurus, kCooccurrence };

std::string_view to_string(ExpansionMode mode);
ExpansionMode parse_expansion_mode(std::string_view name);

struct ExperimentConfig {
  // Either a prebuilt index, or a corpus plus analyzer config to index in
  // memory.
  std::filesystem::path index;
  std::filesystem::path corpus;
  std::filesystem::path analyzer;

  std::filesystem::path topics;
  std::filesystem::path qrels;  // optional; enables the metric report

  ExpansionMode mode = ExpansionMode::kNone;
  std::filesystem::path thesaurus;
  std::string relations = "domain";  // "general", "domain" or a type list
  std::filesystem::path model;
  SimilarityMeasure measure = SimilarityMeasure::kCosine;
  std::size_t k = kDefaultSuggestionCount;

  Operator clause_op = Operator::kOr;
  Bm25Params bm25;
  std::vector<std::size_t> cutoffs{5, 10};

  std::filesystem::path run_out;
  std::filesystem::path report_out;  // writes <report_out>.tsv and .json
  std::string tag;                   // defaults from the mode
  std::uint64_t seed = 0;
  unsigned threads = 1;
  MissingQrelsPolicy missing_qrels = MissingQrelsPolicy::kSkipWithWarning;

  // Overlays the keys present in a JSON object; relative paths resolve
  // against base_dir.
  void merge_json(std::string_view json, const std::filesystem::path& base_dir);
  static ExperimentConfig load(const std::filesystem::path& path);
  std::string to_json() const;

  // Throws ValidationError when a field needed by the mode is missing.
  void validate() const;
  std::string effective_tag() const;
};

struct ExperimentOutput {
  RankedRun run;
  std::map<std::string, std::string> queries;  // topic_id -> executed query
  std::vector<ExpansionPlan> plans;
  std::optional<double> mean_expansion_count;  // expansion modes only
  std::optional<MetricReport> report;          // when qrels are given
  std::vector<std::string> warnings;
};

// Runs every topic: analyze, build the (expanded) query, search the top
// max(cutoffs) documents. Topics with an empty query are skipped with a
// warning. Output is ordered by topic_id regardless of thread count.
ExperimentOutput run_experiment(const ExperimentConfig& config, const InvertedIndex& index,
                                std::span<const Topic> topics, const Thesaurus* thesaurus,
                                const CooccurrenceModel* model, const Qrels* qrels);

// Loads index, topics, thesaurus / model and qrels named in the config.
ExperimentOutput run_experiment(const ExperimentConfig& config);

// Writes the run file and, if present, the TSV and JSON reports.
void write_experiment_outputs(const ExperimentOutput& output, const ExperimentConfig& config);

struct ComparisonRow {
  Metric metric = Metric::kRecall;
  std::size_t cutoff = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  TTestResult test;
};

struct Comparison {
  std::string tag_a;
  std::string tag_b;
  std::vector<std::string> topics;
  std::vector<ComparisonRow> rows;  // R@c for each cutoff, then nDCG@c
  std::vector<std::string> warnings;
};

// Evaluates both runs on their common judged topics and t-tests each metric
// (b against a). Throws ValidationError listing the symmetric difference if
// the runs cover different topics. Topics missing from the qrels are
// dropped from both systems with a warning, or rejected under kError.
Comparison compare_runs(const RankedRun& a, const RankedRun& b, const Qrels& qrels,
                        std::span<const std::size_t> cutoffs,
                        MissingQrelsPolicy policy = MissingQrelsPolicy::kSkipWithWarning);

// Results matrix, one row per system, one column per metric, p-values in a
// final row; '*' marks p < 0.1 and '**' p < 0.05.
std::string format_comparison(const Comparison& comparison);

}  // namespace surveyqe
