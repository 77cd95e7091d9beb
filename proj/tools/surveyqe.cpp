// surveyqe: command-line front end for indexing, query expansion, search and
// evaluation.
//
// Exit status: 0 success, 1 validation error, 2 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "surveyqe/analysis.hpp"
#include "surveyqe/cooccurrence.hpp"
#include "surveyqe/errors.hpp"
#include "surveyqe/evaluation.hpp"
#include "surveyqe/experiment.hpp"
#include "surveyqe/expansion.hpp"
#include "surveyqe/index.hpp"
#include "surveyqe/sampling.hpp"
#include "surveyqe/thesaurus.hpp"
#include "surveyqe/trec_io.hpp"

namespace fs = std::filesystem;
using namespace surveyqe;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::vector<std::size_t> parse_cutoffs(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    const auto item = text.substr(start, comma - start);
    if (!item.empty()) {
      std::size_t pos = 0;
      unsigned long value = 0;
      try {
        value = std::stoul(item, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != item.size() || value == 0) {
        throw ValidationError(fmt::format("bad cutoff '{}'", item));
      }
      out.push_back(value);
    }
    start = comma + 1;
  }
  if (out.empty()) throw ValidationError("no cutoffs given");
  return out;
}

MissingQrelsPolicy parse_policy(const std::string& name) {
  if (name == "skip") return MissingQrelsPolicy::kSkipWithWarning;
  if (name == "error") return MissingQrelsPolicy::kError;
  throw ValidationError(fmt::format("unknown missing-qrels policy '{}'", name));
}

void warn(const std::string& message) { fmt::print(stderr, "warning: {}\n", message); }

struct IndexArgs {
  std::string corpus;
  std::string analyzer;
  std::string out;
  unsigned threads = 1;
};

int cmd_index(const IndexArgs& args) {
  const auto analyzer = AnalyzerConfig::load(args.analyzer);
  const auto docs = load_corpus_jsonl(args.corpus);
  const auto index = build_index(docs, analyzer, {args.threads});
  index.save(args.out);
  fmt::print("doc_count={} vocabulary_size={} avg_doc_len={:.6f}\n", index.doc_count(),
             index.vocabulary_size(), index.avg_doc_len());
  return 0;
}

struct TrainArgs {
  std::string corpus;
  std::string analyzer;
  std::string out;
  unsigned threads = 1;
};

int cmd_train(const TrainArgs& args) {
  const auto analyzer = AnalyzerConfig::load(args.analyzer);
  const auto records = load_training_jsonl(args.corpus);
  const auto model = train_cooccurrence(records, analyzer, args.threads);
  model.save(args.out);
  fmt::print("doc_count={} free_terms={} controlled_terms={} pairs={}\n", model.doc_count(),
             model.free_terms().size(), model.controlled_terms().size(), model.pair_count());
  return 0;
}

struct SuggestArgs {
  std::string model;
  std::string term;
  std::string measure = "cosine";
  std::size_t k = kDefaultSuggestionCount;
};

int cmd_suggest(const SuggestArgs& args) {
  const auto model = CooccurrenceModel::load(args.model);
  const auto measure = parse_similarity_measure(args.measure);
  const auto seq = analyze(args.term, model.analyzer());
  if (seq.empty()) throw EmptyQueryError(fmt::format("empty term: '{}'", args.term));
  for (const auto& term : seq.terms) {
    const auto suggestions = suggest_terms(model, term, measure, args.k);
    for (std::size_t i = 0; i < suggestions.size(); ++i) {
      fmt::print("{}\t{}\t{}\t{:.6f}\n", term, i + 1, suggestions[i].term, suggestions[i].score);
    }
  }
  return 0;
}

struct ExpandArgs {
  std::string query;
  std::string mode = "thesaurus";
  std::string analyzer;
  std::string index;
  std::string thesaurus;
  std::string relations = "domain";
  std::string model;
  std::string measure = "cosine";
  std::size_t k = kDefaultSuggestionCount;
  std::string op = "OR";
};

int cmd_expand(const ExpandArgs& args) {
  const auto mode = parse_expansion_mode(args.mode);
  const auto op = parse_operator(args.op);
  std::optional<CooccurrenceModel> model;
  if (mode == ExpansionMode::kCooccurrence) {
    if (args.model.empty()) throw ValidationError("--model is required for cooccurrence mode");
    model = CooccurrenceModel::load(args.model);
  }
  AnalyzerConfig analyzer;
  if (!args.index.empty()) {
    analyzer = InvertedIndex::load(args.index).analyzer();
  } else if (!args.analyzer.empty()) {
    analyzer = AnalyzerConfig::load(args.analyzer);
  } else if (model) {
    analyzer = model->analyzer();
  } else {
    throw ValidationError("give --analyzer or --index to fix the analysis chain");
  }

  ExpansionPlan plan;
  switch (mode) {
    case ExpansionMode::kNone:
      plan = make_plan(args.query, analyzer, [](const std::string&) { return std::vector<std::string>{}; });
      break;
    case ExpansionMode::kThesaurus: {
      if (args.thesaurus.empty()) throw ValidationError("--thesaurus is required for thesaurus mode");
      const auto thesaurus = Thesaurus::load(args.thesaurus, analyzer);
      plan = thesaurus_plan(args.query, analyzer, thesaurus, RelationFilter::parse(args.relations));
      break;
    }
    case ExpansionMode::kCooccurrence:
      if (!(model->analyzer() == analyzer)) {
        throw ValidationError("model analyzer differs from the requested analyzer");
      }
      plan = cooccurrence_plan(args.query, analyzer, *model, parse_similarity_measure(args.measure), args.k);
      break;
  }
  for (const auto& entry : plan.entries) {
    fmt::print("{}\t{}\t{}\n", entry.term, entry.expansions.size(), fmt::join(entry.expansions, " | "));
  }
  fmt::print("query\t{}\n", to_string(build_expanded_query(args.query, analyzer, plan, op)));
  return 0;
}

struct SearchArgs {
  std::string index;
  std::string query;
  std::size_t top = 10;
  std::string op = "OR";
  double k1 = 1.2;
  double b = 0.75;
};

int cmd_search(const SearchArgs& args) {
  const auto index = InvertedIndex::load(args.index);
  const auto query = parse_query(args.query, index.analyzer(), parse_operator(args.op));
  const auto result = search(index, query, {args.k1, args.b}, args.top);
  fmt::print("# query: {}\n# index: {:016x}\n", result.query, result.index_fingerprint);
  for (std::size_t i = 0; i < result.hits.size(); ++i) {
    fmt::print("{}\t{}\t{}\n", i + 1, result.hits[i].doc_id, format_score(result.hits[i].score));
  }
  return 0;
}

struct ExperimentArgs {
  std::string config;
  std::optional<std::string> index, corpus, analyzer, topics, qrels, mode, thesaurus, relations,
      model, measure, op, cutoffs, run, report, tag, missing_qrels;
  std::optional<std::size_t> k;
  std::optional<double> k1, b;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

int cmd_run_experiment(const ExperimentArgs& args) {
  ExperimentConfig config;
  if (!args.config.empty()) config = ExperimentConfig::load(args.config);
  if (args.index) config.index = *args.index;
  if (args.corpus) config.corpus = *args.corpus;
  if (args.analyzer) config.analyzer = *args.analyzer;
  if (args.topics) config.topics = *args.topics;
  if (args.qrels) config.qrels = *args.qrels;
  if (args.mode) config.mode = parse_expansion_mode(*args.mode);
  if (args.thesaurus) config.thesaurus = *args.thesaurus;
  if (args.relations) config.relations = *args.relations;
  if (args.model) config.model = *args.model;
  if (args.measure) config.measure = parse_similarity_measure(*args.measure);
  if (args.op) config.clause_op = parse_operator(*args.op);
  if (args.cutoffs) config.cutoffs = parse_cutoffs(*args.cutoffs);
  if (args.run) config.run_out = *args.run;
  if (args.report) config.report_out = *args.report;
  if (args.tag) config.tag = *args.tag;
  if (args.missing_qrels) config.missing_qrels = parse_policy(*args.missing_qrels);
  if (args.k) config.k = *args.k;
  if (args.k1) config.bm25.k1 = *args.k1;
  if (args.b) config.bm25.b = *args.b;
  if (args.seed) config.seed = *args.seed;
  if (args.threads) config.threads = *args.threads;

  const auto output = run_experiment(config);
  for (const auto& w : output.warnings) warn(w);
  write_experiment_outputs(output, config);

  fmt::print("tag={} topics={}\n", output.run.tag(), output.run.topics().size());
  if (output.mean_expansion_count) {
    fmt::print("mean_expansion_count={:.4f}\n", *output.mean_expansion_count);
  }
  if (output.report) {
    const auto& r = *output.report;
    for (std::size_t i = 0; i < r.cutoffs.size(); ++i) {
      fmt::print("{}={:.4f} ", metric_label(Metric::kRecall, r.cutoffs[i]), r.mean_recall[i]);
    }
    for (std::size_t i = 0; i < r.cutoffs.size(); ++i) {
      fmt::print("{}={:.4f} ", metric_label(Metric::kNdcg, r.cutoffs[i]), r.mean_ndcg[i]);
    }
    fmt::print("\n");
  }
  return 0;
}

struct CompareArgs {
  std::string run_a;
  std::string run_b;
  std::string qrels;
  std::string cutoffs = "5,10";
  std::string missing_qrels = "skip";
};

int cmd_compare(const CompareArgs& args) {
  const auto a = load_run(args.run_a);
  const auto b = load_run(args.run_b);
  const auto qrels = load_qrels(args.qrels);
  const auto cutoffs = parse_cutoffs(args.cutoffs);
  const auto cmp = compare_runs(a, b, qrels, cutoffs, parse_policy(args.missing_qrels));
  for (const auto& w : cmp.warnings) warn(w);
  fmt::print("{}", format_comparison(cmp));
  return 0;
}

struct SampleArgs {
  std::string log;
  std::string config;
  std::size_t high = 27;
  std::size_t medium = 17;
  std::size_t low = 16;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_sample_topics(const SampleArgs& args) {
  std::uint64_t seed = 0;
  if (!args.config.empty()) seed = ExperimentConfig::load(args.config).seed;
  if (args.seed) seed = *args.seed;
  const auto entries = load_query_log(args.log);
  const auto topics = sample_topics_from_log(entries, {args.high, args.medium, args.low}, seed);
  const auto text = topics_to_jsonl(topics);
  if (args.out.empty()) {
    fmt::print("{}", text);
  } else {
    write_text_file(args.out, text);
    fmt::print("topics={} seed={}\n", topics.size(), seed);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Survey question retrieval with thesaurus and co-occurrence query expansion"};
  app.require_subcommand(1);

  IndexArgs index_args;
  auto* index_cmd = app.add_subcommand("index", "Build a positional BM25 index from a JSON-lines corpus");
  index_cmd->add_option("--corpus", index_args.corpus, "Corpus JSONL {doc_id, text, metadata}")->required();
  index_cmd->add_option("--analyzer", index_args.analyzer, "Analyzer config JSON")->required();
  index_cmd->add_option("--out", index_args.out, "Index file to write")->required();
  index_cmd->add_option("--threads", index_args.threads, "Build threads");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train-cooc", "Train a co-occurrence model on an annotated corpus");
  train_cmd->add_option("--corpus", train_args.corpus, "Training JSONL {doc_id, text, keywords}")->required();
  train_cmd->add_option("--analyzer", train_args.analyzer, "Analyzer config JSON")->required();
  train_cmd->add_option("--out", train_args.out, "Model file to write")->required();
  train_cmd->add_option("--threads", train_args.threads, "Training threads");

  SuggestArgs suggest_args;
  auto* suggest_cmd = app.add_subcommand("suggest", "Rank controlled terms for a query term");
  suggest_cmd->add_option("--model", suggest_args.model, "Co-occurrence model")->required();
  suggest_cmd->add_option("--term", suggest_args.term, "Query term")->required();
  suggest_cmd->add_option("--measure", suggest_args.measure, "log_jaccard or cosine");
  suggest_cmd->add_option("--k", suggest_args.k, "Number of suggestions");

  ExpandArgs expand_args;
  auto* expand_cmd = app.add_subcommand("expand", "Show the expansion plan and expanded query");
  expand_cmd->add_option("--query", expand_args.query, "Raw query")->required();
  expand_cmd->add_option("--mode", expand_args.mode, "none, thesaurus or cooccurrence");
  expand_cmd->add_option("--analyzer", expand_args.analyzer, "Analyzer config JSON");
  expand_cmd->add_option("--index", expand_args.index, "Take the analyzer from this index");
  expand_cmd->add_option("--thesaurus", expand_args.thesaurus, "Thesaurus JSON");
  expand_cmd->add_option("--relations", expand_args.relations, "general, domain or type list");
  expand_cmd->add_option("--model", expand_args.model, "Co-occurrence model");
  expand_cmd->add_option("--measure", expand_args.measure, "log_jaccard or cosine");
  expand_cmd->add_option("--k", expand_args.k, "Suggestions per term");
  expand_cmd->add_option("--operator", expand_args.op, "AND or OR between term groups");

  SearchArgs search_args;
  auto* search_cmd = app.add_subcommand("search", "Run one boolean query against an index");
  search_cmd->add_option("--index", search_args.index, "Index file")->required();
  search_cmd->add_option("--query", search_args.query, "Query: words, \"phrases\", AND, OR, ( )")->required();
  search_cmd->add_option("--top", search_args.top, "Results to return");
  search_cmd->add_option("--operator", search_args.op, "Operator between adjacent clauses");
  search_cmd->add_option("--k1", search_args.k1, "BM25 k1");
  search_cmd->add_option("--b", search_args.b, "BM25 b");

  ExperimentArgs exp_args;
  auto* exp_cmd = app.add_subcommand("run-experiment", "Search every topic, write a TREC run and metric report");
  exp_cmd->add_option("--config", exp_args.config, "Experiment config JSON");
  exp_cmd->add_option("--index", exp_args.index, "Index file");
  exp_cmd->add_option("--corpus", exp_args.corpus, "Corpus JSONL (indexed in memory)");
  exp_cmd->add_option("--analyzer", exp_args.analyzer, "Analyzer config for --corpus");
  exp_cmd->add_option("--topics", exp_args.topics, "Topics JSONL");
  exp_cmd->add_option("--qrels", exp_args.qrels, "TREC qrels");
  exp_cmd->add_option("--mode", exp_args.mode, "none, thesaurus or cooccurrence");
  exp_cmd->add_option("--thesaurus", exp_args.thesaurus, "Thesaurus JSON");
  exp_cmd->add_option("--relations", exp_args.relations, "general, domain or type list");
  exp_cmd->add_option("--model", exp_args.model, "Co-occurrence model");
  exp_cmd->add_option("--measure", exp_args.measure, "log_jaccard or cosine");
  exp_cmd->add_option("--k", exp_args.k, "Suggestions per term");
  exp_cmd->add_option("--operator", exp_args.op, "AND or OR between term groups");
  exp_cmd->add_option("--k1", exp_args.k1, "BM25 k1");
  exp_cmd->add_option("--b", exp_args.b, "BM25 b");
  exp_cmd->add_option("--cutoffs", exp_args.cutoffs, "Comma-separated cutoffs");
  exp_cmd->add_option("--run", exp_args.run, "Run file to write");
  exp_cmd->add_option("--report", exp_args.report, "Report path prefix (.tsv/.json)");
  exp_cmd->add_option("--tag", exp_args.tag, "System tag");
  exp_cmd->add_option("--seed", exp_args.seed, "Experiment seed");
  exp_cmd->add_option("--threads", exp_args.threads, "Worker threads");
  exp_cmd->add_option("--missing-qrels", exp_args.missing_qrels, "skip or error");

  CompareArgs cmp_args;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare two runs with paired t-tests");
  cmp_cmd->add_option("--run-a", cmp_args.run_a, "Reference run")->required();
  cmp_cmd->add_option("--run-b", cmp_args.run_b, "Compared run")->required();
  cmp_cmd->add_option("--qrels", cmp_args.qrels, "TREC qrels")->required();
  cmp_cmd->add_option("--cutoffs", cmp_args.cutoffs, "Comma-separated cutoffs");
  cmp_cmd->add_option("--missing-qrels", cmp_args.missing_qrels, "skip or error");

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample-topics", "Stratified topic sample from a query log");
  sample_cmd->add_option("--log", sample_args.log, "TSV query<TAB>frequency")->required();
  sample_cmd->add_option("--config", sample_args.config, "Experiment config supplying the seed");
  sample_cmd->add_option("--high", sample_args.high, "Topics from frequency > 10");
  sample_cmd->add_option("--medium", sample_args.medium, "Topics from frequency 2..10");
  sample_cmd->add_option("--low", sample_args.low, "Topics from frequency 1");
  sample_cmd->add_option("--seed", sample_args.seed, "Sampling seed");
  sample_cmd->add_option("--out", sample_args.out, "Topics JSONL to write (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (index_cmd->parsed()) return cmd_index(index_args);
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (suggest_cmd->parsed()) return cmd_suggest(suggest_args);
    if (expand_cmd->parsed()) return cmd_expand(expand_args);
    if (search_cmd->parsed()) return cmd_search(search_args);
    if (exp_cmd->parsed()) return cmd_run_experiment(exp_args);
    if (cmp_cmd->parsed()) return cmd_compare(cmp_args);
    if (sample_cmd->parsed()) return cmd_sample_topics(sample_args);
  } catch (const IoError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitIo;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitValidation;
  }
  return kExitValidation;
}
