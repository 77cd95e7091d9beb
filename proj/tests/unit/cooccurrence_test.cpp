#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "oracles.hpp"
#include "surveyqe/cooccurrence.hpp"
#include "surveyqe/errors.hpp"

namespace fs = std::filesystem;
using namespace surveyqe;

namespace {

const fs::path kFixture = fs::path(SURVEYQE_FIXTURE_DIR) / "synthetic";

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Nested-loop counts over raw records.
struct BruteCounts {
  std::map<std::string, std::uint64_t> free, controlled;
  std::map<std::pair<std::string, std::string>, std::uint64_t> pairs;
  std::uint64_t docs = 0;

  BruteCounts(const std::vector<TrainingRecord>& records, const AnalyzerConfig& analyzer) {
    std::vector<std::vector<std::string>> terms, keys;
    std::vector<std::string> all_terms, all_keys;
    for (const auto& r : records) {
      terms.push_back(analyze(r.text, analyzer).terms);
      keys.emplace_back();
      for (auto k : r.keywords) {
        k.erase(0, k.find_first_not_of(" \t"));
        k.erase(k.find_last_not_of(" \t") + 1);
        if (!k.empty()) keys.back().push_back(k);
      }
      for (const auto& t : terms.back()) if (!contains(all_terms, t)) all_terms.push_back(t);
      for (const auto& k : keys.back()) if (!contains(all_keys, k)) all_keys.push_back(k);
    }
    docs = records.size();
    for (const auto& t : all_terms) {
      for (std::size_t d = 0; d < docs; ++d) free[t] += contains(terms[d], t);
    }
    for (const auto& k : all_keys) {
      for (std::size_t d = 0; d < docs; ++d) controlled[k] += contains(keys[d], k);
    }
    for (const auto& t : all_terms) {
      for (const auto& k : all_keys) {
        std::uint64_t n = 0;
        for (std::size_t d = 0; d < docs; ++d) n += contains(terms[d], t) && contains(keys[d], k);
        if (n) pairs[{t, k}] = n;
      }
    }
  }
};

}  // namespace

TEST(Train, SingleDocument) {
  const std::vector<TrainingRecord> records{{"s1", "a b", {"K"}}};
  const auto model = train_cooccurrence(records, AnalyzerConfig{});
  EXPECT_EQ(model.doc_count(), 1u);
  EXPECT_EQ(model.free_df("a"), 1u);
  EXPECT_EQ(model.free_df("b"), 1u);
  EXPECT_EQ(model.controlled_df("K"), 1u);
  EXPECT_EQ(model.pair_df("a", "K"), 1u);
  EXPECT_EQ(model.pair_df("b", "K"), 1u);
  EXPECT_EQ(model.pair_count(), 2u);
}

TEST(Train, RepeatedTermCountsOncePerDocument) {
  const std::vector<TrainingRecord> records{{"s1", "x x x x x", {"K", "K"}}, {"s2", "x y", {"L"}}};
  const auto model = train_cooccurrence(records, AnalyzerConfig{});
  EXPECT_EQ(model.free_df("x"), 2u);
  EXPECT_EQ(model.controlled_df("K"), 1u);
  EXPECT_EQ(model.pair_df("x", "K"), 1u);
}

TEST(Train, RejectsEmptyInputs) {
  EXPECT_THROW(train_cooccurrence({}, AnalyzerConfig{}), ValidationError);
  const std::vector<TrainingRecord> bad{{"s1", "a", {" ", ""}}};
  EXPECT_THROW(train_cooccurrence(bad, AnalyzerConfig{}), ValidationError);
}

TEST(Train, FixtureMatchesNestedLoopCounts) {
  const auto analyzer = AnalyzerConfig::load(kFixture / "analyzer.json");
  const auto records = load_training_jsonl(kFixture / "training.jsonl");
  ASSERT_EQ(records.size(), 200u);
  const BruteCounts brute(records, analyzer);
  const auto model = train_cooccurrence(records, analyzer, 3);

  EXPECT_EQ(model.doc_count(), brute.docs);
  ASSERT_EQ(model.free_terms().size(), brute.free.size());
  for (const auto& [t, n] : brute.free) EXPECT_EQ(model.free_df(t), n) << t;
  ASSERT_EQ(model.controlled_terms().size(), brute.controlled.size());
  for (const auto& [k, n] : brute.controlled) EXPECT_EQ(model.controlled_df(k), n) << k;
  ASSERT_EQ(model.pair_count(), brute.pairs.size());
  for (const auto& [tk, n] : brute.pairs) EXPECT_EQ(model.pair_df(tk.first, tk.second), n);
}

TEST(TrainProperty, InvariantUnderOrderAndThreads) {
  const auto analyzer = AnalyzerConfig::load(kFixture / "analyzer.json");
  auto records = load_training_jsonl(kFixture / "training.jsonl");
  const auto reference = train_cooccurrence(records, analyzer, 1);
  std::mt19937_64 rng(11);
  for (unsigned threads : {1u, 2u, 7u}) {
    std::shuffle(records.begin(), records.end(), rng);
    const auto model = train_cooccurrence(records, analyzer, threads);
    EXPECT_EQ(model, reference);
    EXPECT_EQ(model.serialize(), reference.serialize());
  }
}

TEST(Model, SerializeRoundTripAndCorruption) {
  const auto analyzer = AnalyzerConfig::load(kFixture / "analyzer.json");
  const auto model = train_cooccurrence(load_training_jsonl(kFixture / "training.jsonl"), analyzer);
  const auto path = fs::temp_directory_path() / "surveyqe_model_roundtrip.bin";
  model.save(path);
  EXPECT_EQ(CooccurrenceModel::load(path), model);
  const auto bytes = model.serialize();
  EXPECT_THROW(CooccurrenceModel::deserialize(bytes.substr(0, bytes.size() / 2)), ValidationError);
  EXPECT_THROW(CooccurrenceModel::deserialize("SQEINDEX"), ValidationError);
}

TEST(Similarity, LogJaccardExamples) {
  // ln(10)/ln(140), evaluated independently.
  EXPECT_NEAR(log_jaccard(100, 50, 10), 0.46595542454855055, 1e-15);
  EXPECT_DOUBLE_EQ(log_jaccard(8, 8, 8), 1.0);
  EXPECT_EQ(log_jaccard(5, 7, 0), 0.0);
  EXPECT_EQ(log_jaccard(1, 1, 1), 0.0);
}

TEST(Similarity, CosineExamples) {
  // 10/sqrt(150), evaluated independently.
  EXPECT_NEAR(cosine(100, 50, 10), 0.816496580927726, 1e-15);
  EXPECT_DOUBLE_EQ(cosine(2, 2, 2), 1.0);
  EXPECT_EQ(cosine(4, 4, 0), 0.0);
  EXPECT_DOUBLE_EQ(cosine(8, 8, 8), 2.0);
}

TEST(Similarity, RejectsImpossibleCounts) {
  EXPECT_THROW(log_jaccard(0, 5, 0), ValidationError);
  EXPECT_THROW(cosine(5, 0, 0), ValidationError);
  EXPECT_THROW(cosine(3, 5, 4), ValidationError);
  EXPECT_THROW(parse_similarity_measure("dice"), ValidationError);
  EXPECT_EQ(parse_similarity_measure("jaccard"), SimilarityMeasure::kLogJaccard);
}

TEST(SimilarityProperty, MatchesDirectEvaluation) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 2000; ++i) {
    const auto x = 1 + rng() % 500, y = 1 + rng() % 500;
    const auto xy = rng() % (std::min(x, y) + 1);
    const double dx = static_cast<double>(x), dy = static_cast<double>(y), dxy = static_cast<double>(xy);
    EXPECT_NEAR(log_jaccard(x, y, xy), oracle::direct_log_jaccard(dx, dy, dxy), 1e-12);
    EXPECT_NEAR(cosine(x, y, xy), oracle::direct_cosine(dx, dy, dxy), 1e-12);
    const double lj = log_jaccard(x, y, xy);
    EXPECT_GE(lj, 0.0);
    EXPECT_LE(lj, 1.0 + 1e-15);
  }
}

TEST(Suggest, UnknownTermAndShortLists) {
  const std::vector<TrainingRecord> records{{"s1", "a b", {"K", "L"}}, {"s2", "a", {"M"}}};
  const auto model = train_cooccurrence(records, AnalyzerConfig{});
  EXPECT_TRUE(suggest_terms(model, "zzz", SimilarityMeasure::kCosine).empty());
  EXPECT_EQ(suggest_terms(model, "a", SimilarityMeasure::kCosine, 20).size(), 3u);
  EXPECT_EQ(suggest_terms(model, "b", SimilarityMeasure::kCosine, 1).size(), 1u);
  EXPECT_THROW(suggest_terms(model, "a", SimilarityMeasure::kCosine, 0), ValidationError);
}

TEST(Suggest, FixtureMatchesScoreAllAndSort) {
  const auto analyzer = AnalyzerConfig::load(kFixture / "analyzer.json");
  const auto records = load_training_jsonl(kFixture / "training.jsonl");
  const BruteCounts brute(records, analyzer);
  const auto model = train_cooccurrence(records, analyzer);
  for (const auto measure : {SimilarityMeasure::kLogJaccard, SimilarityMeasure::kCosine}) {
    for (const std::string term : {"youth", "unemployment", "health", "trust"}) {
      std::vector<Suggestion> expected;
      for (const auto& [k, df_k] : brute.controlled) {
        const auto it = brute.pairs.find({term, k});
        if (it == brute.pairs.end()) continue;
        const double x = static_cast<double>(brute.free.at(term));
        const double y = static_cast<double>(df_k), xy = static_cast<double>(it->second);
        expected.push_back({k, measure == SimilarityMeasure::kCosine ? oracle::direct_cosine(x, y, xy)
                                                                     : oracle::direct_log_jaccard(x, y, xy)});
      }
      std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
        return a.score != b.score ? a.score > b.score : a.term < b.term;
      });
      if (expected.size() > 20) expected.resize(20);
      ASSERT_FALSE(expected.empty()) << term;
      const auto got = suggest_terms(model, term, measure, 20);
      ASSERT_EQ(got.size(), expected.size()) << term;
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].term, expected[i].term) << term << " rank " << i;
        EXPECT_NEAR(got[i].score, expected[i].score, 1e-12);
      }
    }
  }
}
