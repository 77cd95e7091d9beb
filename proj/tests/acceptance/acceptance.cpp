// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "surveyqe/experiment.hpp"
#include "surveyqe/trec_io.hpp"

namespace fs = std::filesystem;
using namespace surveyqe;

namespace {

const fs::path kFixture = fs::path(SURVEYQE_FIXTURE_DIR) / "synthetic";

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome metric_oracles() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  std::size_t recall_mismatch = 0;
  for (int i = 0; i < 200; ++i) {
    const auto inst = oracle::random_eval_instance(rng, 8);
    RankedRun run("x");
    std::vector<RunEntry> entries;
    double score = 100.0;
    for (const auto& d : inst.ranking) entries.push_back({d, score--});
    run.add_ranked_topic("T", std::move(entries));
    Qrels qrels;
    for (const auto& [d, g] : inst.judged) qrels.add("T", d, g);
    for (std::size_t n : {1u, 2u, 3u, 5u, 10u, 20u}) {
      worst = std::max(worst, std::fabs(ndcg_at(run, qrels, "T", n) -
                                        oracle::permutation_ndcg(inst.ranking, inst.judged, n)));
      recall_mismatch += std::fabs(recall_at(run, qrels, "T", n) -
                                   oracle::counting_recall(inst.ranking, inst.judged, n)) > 1e-9;
    }
  }
  const double secs = seconds_since(start);
  return {worst <= 1e-9 && recall_mismatch == 0 && secs < 10.0,
          fmt::format("200 instances, max |nDCG diff|={:.2e}, recall mismatches={}, {:.2f}s", worst,
                      recall_mismatch, secs)};
}

Outcome formula_fidelity() {
  std::mt19937_64 rng(1000);
  double worst = 0.0;
  std::size_t zero_cases = 0, above_one = 0;
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t x, y, xy;
    if (i == 0) {
      x = y = xy = 8;
    } else {
      x = 1 + rng() % 1000;
      y = 1 + rng() % 1000;
      xy = (i % 10 == 0) ? 0 : rng() % (std::min(x, y) + 1);
    }
    const double dx = static_cast<double>(x), dy = static_cast<double>(y), dxy = static_cast<double>(xy);
    const double lj = log_jaccard(x, y, xy), cs = cosine(x, y, xy);
    worst = std::max({worst, std::fabs(lj - oracle::direct_log_jaccard(dx, dy, dxy)),
                      std::fabs(cs - oracle::direct_cosine(dx, dy, dxy))});
    if (xy == 0 && (lj != 0.0 || cs != 0.0)) return {false, fmt::format("df_xy=0 gave non-zero at {}", i)};
    zero_cases += xy == 0;
    above_one += cs > 1.0;
  }
  const bool edge = cosine(8, 8, 8) == 2.0 && log_jaccard(8, 8, 8) == 1.0;
  return {worst <= 1e-12 && edge,
          fmt::format("1000 triples, max diff={:.2e}, df_xy=0 cases={}, cosine>1 kept={}, (8,8,8)->{}",
                      worst, zero_cases, above_one, cosine(8, 8, 8))};
}

Outcome bm25_oracle() {
  std::mt19937_64 rng(25);
  const auto corpus = oracle::random_corpus(rng, 100, 40, 15);
  const oracle::BruteCorpus brute(corpus);
  const auto index = build_index(corpus, AnalyzerConfig{}, {.threads = 2});
  double worst = 0.0;
  std::size_t order_mismatch = 0, hits = 0;
  for (int i = 0; i < 25; ++i) {
    const auto q = oracle::random_query(rng, brute, 40);
    const auto expected = brute.search(q, 1.2, 0.75);
    const auto got = search(index, q, {}, corpus.size()).hits;
    if (got.size() != expected.size()) {
      return {false, fmt::format("query {}: {} hits, oracle {}", to_string(q), got.size(), expected.size())};
    }
    for (std::size_t r = 0; r < got.size(); ++r) {
      order_mismatch += got[r].doc_id != expected[r].doc_id;
      worst = std::max(worst, std::fabs(got[r].score - expected[r].score));
    }
    hits += got.size();
  }
  return {worst <= 1e-9 && order_mismatch == 0,
          fmt::format("25 queries, {} hits compared, max score diff={:.2e}, order mismatches={}", hits, worst,
                      order_mismatch)};
}

Outcome template_conformance() {
  const auto analyzer = AnalyzerConfig::load(kFixture / "analyzer.json");
  const auto th = Thesaurus::load(kFixture / "thesaurus.json", analyzer);
  const auto model = train_cooccurrence(load_training_jsonl(kFixture / "training.jsonl"), analyzer);
  std::vector<std::string> queries;
  for (const auto& t : load_topics_jsonl(kFixture / "topics.jsonl")) queries.push_back(t.query);
  for (const auto& t : sample_topics_from_log(load_query_log(kFixture / "query_log.tsv"), {27, 17, 16}, 1)) {
    queries.push_back(t.query);
  }
  std::size_t checked = 0, max_leaves = 0;
  for (const auto& raw : queries) {
    std::vector<std::string> terms;
    for (const auto& t : analyze(raw, analyzer).terms) {
      if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
    }
    if (terms.empty()) continue;
    std::vector<ExpansionPlan> plans{thesaurus_plan(raw, analyzer, th, RelationFilter::general()),
                                     thesaurus_plan(raw, analyzer, th, RelationFilter::domain())};
    for (const auto m : {SimilarityMeasure::kLogJaccard, SimilarityMeasure::kCosine}) {
      plans.push_back(cooccurrence_plan(raw, analyzer, model, m, kDefaultSuggestionCount));
    }
    for (const auto& plan : plans) {
      for (const auto op : {Operator::kAnd, Operator::kOr}) {
        const auto q = build_expanded_query(raw, analyzer, plan, op);
        const auto violation = oracle::template_violation(q, terms, op, kDefaultSuggestionCount);
        if (!violation.empty()) return {false, fmt::format("'{}': {} in {}", raw, violation, to_string(q))};
        if (q.is_group()) {
          for (const auto& c : terms.size() == 1 ? std::vector<BooleanQuery>{q} : q.as_group().children) {
            max_leaves = std::max(max_leaves, c.is_group() ? c.as_group().children.size() : std::size_t{1});
          }
        }
        ++checked;
      }
    }
  }
  return {checked > 0, fmt::format("{} expanded queries conform, largest group={} leaves (limit {})", checked,
                                   max_leaves, kDefaultSuggestionCount + 1)};
}

Outcome directional_replication() {
  const auto start = Clock::now();
  const auto analyzer = AnalyzerConfig::load(kFixture / "analyzer.json");
  const auto index = build_index(load_corpus_jsonl(kFixture / "corpus.jsonl"), analyzer);
  const auto topics = load_topics_jsonl(kFixture / "topics.jsonl");
  const auto qrels = load_qrels(kFixture / "qrels.txt");
  const auto th = Thesaurus::load(kFixture / "thesaurus.json", analyzer);
  const auto model = train_cooccurrence(load_training_jsonl(kFixture / "training.jsonl"), analyzer);

  const auto base = run_experiment(ExperimentConfig{}, index, topics, nullptr, nullptr, &qrels).report;
  const double base_r = base->mean(Metric::kRecall, 10), base_g = base->mean(Metric::kNdcg, 10);
  std::string detail = fmt::format("baseline R@10={:.4f} nDCG@10={:.4f}", base_r, base_g);

  bool all_recall = true, any_ndcg = false;
  auto check = [&](const ExperimentConfig& c, const Thesaurus* t, const CooccurrenceModel* m) {
    const auto report = run_experiment(c, index, topics, t, m, &qrels).report;
    const double r = report->mean(Metric::kRecall, 10), g = report->mean(Metric::kNdcg, 10);
    all_recall = all_recall && r > base_r;
    any_ndcg = any_ndcg || g >= base_g;
    detail += fmt::format("; {} R@10={:.4f} nDCG@10={:.4f}", c.effective_tag(), r, g);
  };
  for (const auto* rel : {"general", "domain"}) {
    ExperimentConfig c;
    c.mode = ExpansionMode::kThesaurus;
    c.relations = rel;
    check(c, &th, nullptr);
  }
  for (const auto m : {SimilarityMeasure::kLogJaccard, SimilarityMeasure::kCosine}) {
    ExperimentConfig c;
    c.mode = ExpansionMode::kCooccurrence;
    c.measure = m;
    check(c, nullptr, &model);
  }
  const double secs = seconds_since(start);
  detail += fmt::format("; {:.2f}s", secs);
  return {all_recall && any_ndcg && secs < 30.0, detail};
}

Outcome statistics_check() {
  // Reference values computed once with scipy.stats.ttest_rel.
  const std::vector<double> a{0.5, 0.6, 0.7, 0.8}, b{0.4, 0.5, 0.65, 0.7};
  const std::vector<double> a2{0.1502, 0.2, 0.05, 0.3, 0.41, 0.0, 0.25, 0.33, 0.12, 0.18};
  const std::vector<double> b2{0.1965, 0.25, 0.1, 0.28, 0.5, 0.1, 0.3, 0.31, 0.2, 0.2};
  const auto r1 = paired_t_test(a, b), r2 = paired_t_test(a2, b2), same = paired_t_test(a2, a2);
  const double err = std::max({std::fabs(r1.t - 6.9999999999999885), std::fabs(r1.p_two_sided - 0.005986255697707127),
                               std::fabs(r2.t + 3.4090316737989617),
                               std::fabs(r2.p_two_sided - 0.0077615063281103736)});
  return {err <= 1e-6 && same.t == 0.0 && same.p_two_sided == 1.0,
          fmt::format("max deviation from reference={:.2e}; identical inputs t={} p={}", err, same.t,
                      same.p_two_sided)};
}

Outcome reproducibility() {
  const auto dir = fs::temp_directory_path() / "surveyqe_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::size_t files = 0;
  for (const auto mode : {ExpansionMode::kNone, ExpansionMode::kThesaurus, ExpansionMode::kCooccurrence}) {
    for (int i = 0; i < 2; ++i) {
      const auto analyzer = AnalyzerConfig::load(kFixture / "analyzer.json");
      const auto model_path = dir / fmt::format("model{}.bin", i);
      train_cooccurrence(load_training_jsonl(kFixture / "training.jsonl"), analyzer, 1 + 2 * i).save(model_path);
      ExperimentConfig c;
      c.corpus = kFixture / "corpus.jsonl";
      c.analyzer = kFixture / "analyzer.json";
      c.topics = kFixture / "topics.jsonl";
      c.qrels = kFixture / "qrels.txt";
      c.thesaurus = kFixture / "thesaurus.json";
      c.model = model_path;
      c.mode = mode;
      c.seed = 7;
      c.threads = 1 + 3 * i;
      c.run_out = dir / fmt::format("{}_run{}.txt", to_string(mode), i);
      c.report_out = dir / fmt::format("{}_report{}", to_string(mode), i);
      write_experiment_outputs(run_experiment(c), c);
    }
    for (const auto* suffix : {"_run{}.txt", "_report{}.tsv", "_report{}.json"}) {
      const auto name = [&](int i) {
        return dir / (std::string(to_string(mode)) + fmt::format(fmt::runtime(suffix), i));
      };
      const auto first = slurp(name(0));
      if (first.empty() || first != slurp(name(1))) {
        return {false, fmt::format("{} differs between executions", name(0).filename().string())};
      }
      ++files;
    }
  }
  if (slurp(dir / "model0.bin") != slurp(dir / "model1.bin")) return {false, "model files differ"};
  return {true, fmt::format("{} output pairs byte-identical across 3 modes (threads 1 vs 4)", files)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"metric oracle suite", metric_oracles},
      {"formula fidelity", formula_fidelity},
      {"bm25 oracle", bm25_oracle},
      {"expansion template conformance", template_conformance},
      {"directional replication", directional_replication},
      {"statistics check", statistics_check},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failures += !o.pass;
    fmt::print("{} {:<32} {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
