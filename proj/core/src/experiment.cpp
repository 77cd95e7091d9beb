#include "surveyqe/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "surveyqe/errors.hpp"
#include "surveyqe/trec_io.hpp"

namespace surveyqe {

std::string_view to_string(ExpansionMode mode) {
  switch (mode) {
    case ExpansionMode::kNone:
      return "none";
    case ExpansionMode::kThesaurus:
      return "thesaurus";
    case ExpansionMode::kCooccurrence:
      return "cooccurrence";
  }
  return "none";
}

ExpansionMode parse_expansion_mode(std::string_view name) {
  if (name == "none") return ExpansionMode::kNone;
  if (name == "thesaurus") return ExpansionMode::kThesaurus;
  if (name == "cooccurrence") return ExpansionMode::kCooccurrence;
  throw ValidationError(fmt::format("unknown expansion mode '{}'", name));
}

void ExperimentConfig::merge_json(std::string_view json, const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("invalid experiment config JSON: {}", e.what()));
  }
  if (!j.is_object()) throw ValidationError("experiment config must be a JSON object");

  auto path = [&](const char* key, std::filesystem::path& dst) {
    if (!j.contains(key)) return;
    std::filesystem::path p = j.at(key).get<std::string>();
    dst = (p.empty() || p.is_absolute()) ? p : base_dir / p;
  };
  try {
    path("index", index);
    path("corpus", corpus);
    path("analyzer", analyzer);
    path("topics", topics);
    path("qrels", qrels);
    path("thesaurus", thesaurus);
    path("model", model);
    path("run", run_out);
    path("report", report_out);
    if (j.contains("mode")) mode = parse_expansion_mode(j.at("mode").get<std::string>());
    if (j.contains("relations")) relations = j.at("relations").get<std::string>();
    if (j.contains("measure")) measure = parse_similarity_measure(j.at("measure").get<std::string>());
    if (j.contains("k")) k = j.at("k").get<std::size_t>();
    if (j.contains("operator")) clause_op = parse_operator(j.at("operator").get<std::string>());
    if (j.contains("k1")) bm25.k1 = j.at("k1").get<double>();
    if (j.contains("b")) bm25.b = j.at("b").get<double>();
    if (j.contains("cutoffs")) cutoffs = j.at("cutoffs").get<std::vector<std::size_t>>();
    if (j.contains("tag")) tag = j.at("tag").get<std::string>();
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) threads = j.at("threads").get<unsigned>();
    if (j.contains("missing_qrels")) {
      const auto policy = j.at("missing_qrels").get<std::string>();
      if (policy == "skip") {
        missing_qrels = MissingQrelsPolicy::kSkipWithWarning;
      } else if (policy == "error") {
        missing_qrels = MissingQrelsPolicy::kError;
      } else {
        throw ValidationError(fmt::format("unknown missing_qrels policy '{}'", policy));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("invalid experiment config: {}", e.what()));
  }
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open experiment config '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig config;
  config.merge_json(ss.str(), path.parent_path());
  return config;
}

std::string ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["index"] = index.string();
  j["corpus"] = corpus.string();
  j["analyzer"] = analyzer.string();
  j["topics"] = topics.string();
  j["qrels"] = qrels.string();
  j["mode"] = std::string(to_string(mode));
  j["thesaurus"] = thesaurus.string();
  j["relations"] = relations;
  j["model"] = model.string();
  j["measure"] = std::string(to_string(measure));
  j["k"] = k;
  j["operator"] = std::string(to_string(clause_op));
  j["k1"] = bm25.k1;
  j["b"] = bm25.b;
  j["cutoffs"] = cutoffs;
  j["run"] = run_out.string();
  j["report"] = report_out.string();
  j["tag"] = tag;
  j["seed"] = seed;
  j["threads"] = threads;
  j["missing_qrels"] = missing_qrels == MissingQrelsPolicy::kError ? "error" : "skip";
  return j.dump(2);
}

void ExperimentConfig::validate() const {
  if (index.empty() && (corpus.empty() || analyzer.empty())) {
    throw ValidationError("config needs 'index', or both 'corpus' and 'analyzer'");
  }
  if (topics.empty()) throw ValidationError("config needs 'topics'");
  if (mode == ExpansionMode::kThesaurus && thesaurus.empty()) {
    throw ValidationError("thesaurus mode needs 'thesaurus'");
  }
  if (mode == ExpansionMode::kCooccurrence && model.empty()) {
    throw ValidationError("cooccurrence mode needs 'model'");
  }
  if (k == 0) throw ValidationError("k must be positive");
  if (cutoffs.empty()) throw ValidationError("at least one cutoff is required");
  for (const auto c : cutoffs) {
    if (c == 0) throw ValidationError("cutoffs must be positive");
  }
  bm25.validate();
  RelationFilter::parse(relations);
}

std::string ExperimentConfig::effective_tag() const {
  if (!tag.empty()) return tag;
  switch (mode) {
    case ExpansionMode::kNone:
      return "baseline";
    case ExpansionMode::kThesaurus:
      return fmt::format("QE_thesaurus_{}", relations);
    case ExpansionMode::kCooccurrence:
      return fmt::format("QE_{}", to_string(measure));
  }
  return "run";
}

namespace {

struct TopicOutcome {
  std::optional<std::vector<RunEntry>> hits;
  std::string query;
  std::optional<ExpansionPlan> plan;
  std::string warning;
};

TopicOutcome run_topic(const ExperimentConfig& config, const InvertedIndex& index,
                       const Topic& topic, const Thesaurus* thesaurus,
                       const CooccurrenceModel* model, const RelationFilter& filter,
                       std::size_t depth) {
  TopicOutcome out;
  const auto& analyzer = index.analyzer();
  try {
    std::optional<BooleanQuery> query;
    switch (config.mode) {
      case ExpansionMode::kNone:
        query = keyword_query(topic.query, analyzer, config.clause_op);
        break;
      case ExpansionMode::kThesaurus:
        out.plan = thesaurus_plan(topic.query, analyzer, *thesaurus, filter);
        query = build_expanded_query(topic.query, analyzer, *out.plan, config.clause_op);
        break;
      case ExpansionMode::kCooccurrence:
        out.plan = cooccurrence_plan(topic.query, analyzer, *model, config.measure, config.k);
        query = build_expanded_query(topic.query, analyzer, *out.plan, config.clause_op);
        break;
    }
    auto result = search(index, *query, config.bm25, depth);
    out.query = std::move(result.query);
    std::vector<RunEntry> hits;
    for (auto& h : result.hits) hits.push_back({std::move(h.doc_id), h.score});
    out.hits = std::move(hits);
  } catch (const EmptyQueryError&) {
    out.warning = fmt::format("topic {}: query '{}' is empty after analysis; skipped",
                              topic.topic_id, topic.query);
  }
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config, const InvertedIndex& index,
                                std::span<const Topic> topics, const Thesaurus* thesaurus,
                                const CooccurrenceModel* model, const Qrels* qrels) {
  config.bm25.validate();
  if (config.cutoffs.empty()) throw ValidationError("at least one cutoff is required");
  if (config.mode == ExpansionMode::kThesaurus && !thesaurus) {
    throw ValidationError("thesaurus mode without a thesaurus");
  }
  if (config.mode == ExpansionMode::kCooccurrence) {
    if (!model) throw ValidationError("cooccurrence mode without a model");
    if (!(model->analyzer() == index.analyzer())) {
      throw ValidationError("co-occurrence model and index were built with different analyzer configs");
    }
  }
  const auto filter = RelationFilter::parse(config.relations);

  std::vector<const Topic*> ordered;
  std::set<std::string_view> ids;
  for (const auto& t : topics) {
    if (!ids.insert(t.topic_id).second) {
      throw ValidationError(fmt::format("duplicate topic_id '{}'", t.topic_id));
    }
    ordered.push_back(&t);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Topic* a, const Topic* b) { return a->topic_id < b->topic_id; });

  const auto depth = *std::max_element(config.cutoffs.begin(), config.cutoffs.end());
  std::vector<TopicOutcome> outcomes(ordered.size());
  const unsigned threads =
      std::clamp<unsigned>(config.threads, 1u, std::max<unsigned>(1u, static_cast<unsigned>(ordered.size())));
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < ordered.size(); i += threads) {
          outcomes[i] = run_topic(config, index, *ordered[i], thesaurus, model, filter, depth);
        }
      });
    }
  }

  ExperimentOutput output;
  output.run.set_tag(config.effective_tag());
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    auto& o = outcomes[i];
    if (!o.hits) {
      output.warnings.push_back(std::move(o.warning));
      continue;
    }
    output.run.add_ranked_topic(ordered[i]->topic_id, std::move(*o.hits));
    output.queries[ordered[i]->topic_id] = std::move(o.query);
    if (o.plan) output.plans.push_back(std::move(*o.plan));
  }
  if (config.mode != ExpansionMode::kNone && !output.plans.empty()) {
    output.mean_expansion_count = mean_expansion_count(output.plans);
  }
  if (qrels) {
    output.report = evaluate_run(output.run, *qrels, config.cutoffs, config.missing_qrels);
    for (const auto& t : output.report->skipped_topics) {
      output.warnings.push_back(fmt::format("topic {}: no relevance judgments; excluded from report", t));
    }
  }
  return output;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.validate();
  InvertedIndex index;
  if (!config.index.empty()) {
    index = InvertedIndex::load(config.index);
  } else {
    const auto analyzer = AnalyzerConfig::load(config.analyzer);
    const auto docs = load_corpus_jsonl(config.corpus);
    index = build_index(docs, analyzer, {config.threads});
  }
  const auto topics = load_topics_jsonl(config.topics);

  std::optional<Thesaurus> thesaurus;
  std::optional<CooccurrenceModel> model;
  std::optional<Qrels> qrels;
  if (config.mode == ExpansionMode::kThesaurus) thesaurus = Thesaurus::load(config.thesaurus, index.analyzer());
  if (config.mode == ExpansionMode::kCooccurrence) model = CooccurrenceModel::load(config.model);
  if (!config.qrels.empty()) qrels = load_qrels(config.qrels);

  return run_experiment(config, index, topics, thesaurus ? &*thesaurus : nullptr,
                        model ? &*model : nullptr, qrels ? &*qrels : nullptr);
}

void write_experiment_outputs(const ExperimentOutput& output, const ExperimentConfig& config) {
  if (!config.run_out.empty()) write_text_file(config.run_out, format_run(output.run));
  if (!config.report_out.empty() && output.report) {
    auto base = config.report_out.string();
    write_text_file(base + ".tsv", report_to_tsv(*output.report));
    write_text_file(base + ".json", report_to_json(*output.report));
  }
}

Comparison compare_runs(const RankedRun& a, const RankedRun& b, const Qrels& qrels,
                        std::span<const std::size_t> cutoffs, MissingQrelsPolicy policy) {
  const auto ta = a.topics();
  const auto tb = b.topics();
  if (ta != tb) {
    std::vector<std::string> diff;
    std::set_symmetric_difference(ta.begin(), ta.end(), tb.begin(), tb.end(),
                                  std::back_inserter(diff));
    throw ValidationError(fmt::format("runs cover different topics; symmetric difference: {}",
                                      fmt::join(diff, " ")));
  }

  Comparison cmp;
  cmp.tag_a = a.tag();
  cmp.tag_b = b.tag();
  const auto ra = evaluate_run(a, qrels, cutoffs, policy);
  const auto rb = evaluate_run(b, qrels, cutoffs, policy);
  for (const auto& t : ra.skipped_topics) {
    cmp.warnings.push_back(fmt::format("topic {}: no relevance judgments; excluded from both systems", t));
  }
  for (const auto& t : ra.topics) cmp.topics.push_back(t.topic_id);

  for (const auto metric : {Metric::kRecall, Metric::kNdcg}) {
    for (const auto c : cutoffs) {
      ComparisonRow row;
      row.metric = metric;
      row.cutoff = c;
      row.mean_a = ra.mean(metric, c);
      row.mean_b = rb.mean(metric, c);
      const auto va = ra.values(metric, c);
      const auto vb = rb.values(metric, c);
      if (va.size() >= 2) {
        row.test = paired_t_test(vb, va);
      } else {
        row.test = {0.0, 0, 1.0};
        cmp.warnings.push_back(fmt::format("{}: fewer than two topics; t-test not applicable",
                                           metric_label(metric, c)));
      }
      cmp.rows.push_back(row);
    }
  }
  return cmp;
}

std::string format_comparison(const Comparison& comparison) {
  auto stars = [](double p) {
    if (p < 0.05) return "**";
    if (p < 0.1) return "*";
    return "";
  };
  const auto name_a = comparison.tag_a.empty() ? std::string("A") : comparison.tag_a;
  const auto name_b = comparison.tag_b.empty() ? std::string("B") : comparison.tag_b;
  const auto width = std::max<std::size_t>({12, name_a.size(), name_b.size()}) + 2;

  std::string out = fmt::format("{:<{}}", "system", width);
  for (const auto& row : comparison.rows) {
    fmt::format_to(std::back_inserter(out), "{:>12}", metric_label(row.metric, row.cutoff));
  }
  out += '\n';
  out += fmt::format("{:<{}}", name_a, width);
  for (const auto& row : comparison.rows) fmt::format_to(std::back_inserter(out), "{:>12.4f}", row.mean_a);
  out += '\n';
  out += fmt::format("{:<{}}", name_b, width);
  for (const auto& row : comparison.rows) {
    fmt::format_to(std::back_inserter(out), "{:>12}",
                   fmt::format("{:.4f}{}", row.mean_b, stars(row.test.p_two_sided)));
  }
  out += '\n';
  out += fmt::format("{:<{}}", "t", width);
  for (const auto& row : comparison.rows) fmt::format_to(std::back_inserter(out), "{:>12.4f}", row.test.t);
  out += '\n';
  out += fmt::format("{:<{}}", "p (paired t)", width);
  for (const auto& row : comparison.rows) {
    fmt::format_to(std::back_inserter(out), "{:>12.4f}", row.test.p_two_sided);
  }
  out += '\n';
  fmt::format_to(std::back_inserter(out), "topics: {}   * p < 0.1   ** p < 0.05\n",
                 comparison.topics.size());
  return out;
}

}  // namespace surveyqe
