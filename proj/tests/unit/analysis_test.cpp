#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "surveyqe/analysis.hpp"
#include "surveyqe/errors.hpp"

namespace fs = std::filesystem;
using namespace surveyqe;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const auto path = fs::temp_directory_path() / ("surveyqe_analysis_" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

AnalyzerConfig stopped(std::set<std::string> words) {
  AnalyzerConfig c;
  c.stopwords = std::move(words);
  return c;
}

}  // namespace

TEST(Analyze, EmptyInput) {
  EXPECT_TRUE(analyze("", AnalyzerConfig{}).empty());
}

TEST(Analyze, StopwordKeepsOriginalPositions) {
  const auto seq = analyze("The Labor Market", stopped({"the"}));
  EXPECT_EQ(seq.terms, (std::vector<std::string>{"labor", "market"}));
  EXPECT_EQ(seq.positions, (std::vector<std::uint32_t>{1, 2}));
}

TEST(Analyze, StopwordMatchedAfterLowercasing) {
  const auto seq = analyze("THE the The", stopped({"the"}));
  EXPECT_TRUE(seq.empty());
}

TEST(Analyze, NoLowercasing) {
  AnalyzerConfig c;
  c.lowercase = false;
  EXPECT_EQ(analyze("Labor market", c).terms, (std::vector<std::string>{"Labor", "market"}));
}

TEST(Analyze, DigitsAndLettersFormOneRun) {
  EXPECT_EQ(analyze("covid19 2020-21", AnalyzerConfig{}).terms,
            (std::vector<std::string>{"covid19", "2020", "21"}));
}

TEST(Analyze, MatchesReferenceTokenizer) {
  std::ifstream in(fs::path(SURVEYQE_FIXTURE_DIR) / "oracles" / "tokenizer_expected.json");
  ASSERT_TRUE(in);
  const auto expected = nlohmann::json::parse(in);
  const auto stop = stopped(expected["stopwords"].get<std::set<std::string>>());
  ASSERT_EQ(expected["cases"].size(), 20u);
  for (const auto& c : expected["cases"]) {
    const auto text = c["text"].get<std::string>();
    const auto plain = analyze(text, AnalyzerConfig{});
    EXPECT_EQ(plain.terms, c["terms"].get<std::vector<std::string>>()) << text;
    EXPECT_EQ(plain.positions, c["positions"].get<std::vector<std::uint32_t>>()) << text;
    const auto with_stop = analyze(text, stop);
    EXPECT_EQ(with_stop.terms, c["stopped_terms"].get<std::vector<std::string>>()) << text;
    EXPECT_EQ(with_stop.positions, c["stopped_positions"].get<std::vector<std::uint32_t>>()) << text;
  }
}

TEST(AnalyzeProperty, IdempotentOnJoinedOutput) {
  std::ifstream in(fs::path(SURVEYQE_FIXTURE_DIR) / "oracles" / "sentences.txt");
  const auto config = stopped({"the", "in", "der"});
  for (std::string line; std::getline(in, line);) {
    const auto once = analyze(line, config);
    std::string joined;
    for (const auto& t : once.terms) joined += (joined.empty() ? "" : " ") + t;
    EXPECT_EQ(analyze(joined, config).terms, once.terms) << line;
  }
}

TEST(AnalyzeProperty, PositionsStrictlyIncreasing) {
  std::ifstream in(fs::path(SURVEYQE_FIXTURE_DIR) / "oracles" / "sentences.txt");
  for (std::string line; std::getline(in, line);) {
    const auto seq = analyze(line, stopped({"the", "a"}));
    ASSERT_EQ(seq.terms.size(), seq.positions.size());
    for (std::size_t i = 1; i < seq.positions.size(); ++i) {
      EXPECT_LT(seq.positions[i - 1], seq.positions[i]) << line;
    }
  }
}

TEST(AnalyzeProperty, ConfigIsNotMutated) {
  auto config = stopped({"the"});
  config.stemmer = Stemmer::kLightSuffix;
  const auto before = config;
  analyze("The workings of markets", config);
  EXPECT_EQ(config, before);
}

TEST(LightStemmer, StripsListedSuffixes) {
  EXPECT_EQ(light_suffix_stem("markets"), "market");
  EXPECT_EQ(light_suffix_stem("studies"), "study");
  EXPECT_EQ(light_suffix_stem("working"), "work");
  EXPECT_EQ(light_suffix_stem("bildung"), "bild");
  EXPECT_EQ(light_suffix_stem("is"), "is");
}

TEST(AnalyzerConfig, JsonRoundTrip) {
  auto config = stopped({"und", "the"});
  config.stemmer = Stemmer::kLightSuffix;
  config.lowercase = false;
  EXPECT_EQ(AnalyzerConfig::from_json(config.to_json()), config);
}

TEST(AnalyzerConfig, RejectsUnknownStemmer) {
  EXPECT_THROW(AnalyzerConfig::from_json(R"({"stemmer":"porter9"})"), ValidationError);
}

TEST(NormalizeLabel, JoinsTermsWithSingleSpaces) {
  EXPECT_EQ(normalize_label("  Labour   Market ", AnalyzerConfig{}), "labour market");
}

TEST(LoadStopwords, DeduplicatesAndLowercases) {
  const auto path = write_temp("dedup.txt", "the\nThe\n# c\na\n");
  EXPECT_EQ(load_stopwords(path), (std::set<std::string>{"the", "a"}));
}

TEST(LoadStopwords, EmptyFile) {
  EXPECT_TRUE(load_stopwords(write_temp("empty.txt", "")).empty());
}

TEST(LoadStopwords, HundredLineFixture) {
  // 34 = unique lowercase non-comment entries, counted outside this code.
  EXPECT_EQ(load_stopwords(fs::path(SURVEYQE_FIXTURE_DIR) / "oracles" / "stopwords_100.txt").size(),
            34u);
}

TEST(LoadStopwords, MissingFileIsIoError) {
  EXPECT_THROW(load_stopwords("/nonexistent/stopwords.txt"), IoError);
}

TEST(LoadStopwords, EmbeddedWhitespaceNamesLine) {
  const auto path = write_temp("ws.txt", "ok\nnot ok\n");
  try {
    load_stopwords(path);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}
