#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "surveyqe/errors.hpp"
#include "surveyqe/trec_io.hpp"

using namespace surveyqe;

TEST(Qrels, ParsesTrecLines) {
  const auto q = parse_qrels("T001 0 Q0101 2\nT001 0 Q0102 0\n\nT002 0 Q0201 1\n");
  EXPECT_EQ(q.size(), 3u);
  EXPECT_EQ(q.grade("T001", "Q0101"), 2);
  EXPECT_EQ(q.grade("T002", "Q0201"), 1);
  EXPECT_EQ(q.topics(), (std::vector<std::string>{"T001", "T002"}));
}

TEST(Qrels, ErrorsNameTheLine) {
  try {
    parse_qrels("T1 0 a 1\nT1 0 b\n", "q.txt");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("q.txt:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_qrels("T1 0 a two\n"), ValidationError);
  EXPECT_THROW(parse_qrels("T1 0 a 5\n"), ValidationError);
}

TEST(Run, FormatParseRoundTrip) {
  RankedRun run("QE_cosine");
  run.add_topic("T002", {{"d9", 0.5}, {"d1", 12.25}});
  run.add_topic("T001", {{"d3", 1.0 / 3.0}});
  const auto text = format_run(run);
  EXPECT_EQ(text,
            "T001 Q0 d3 1 0.3333333333 QE_cosine\n"
            "T002 Q0 d1 1 12.25000000 QE_cosine\n"
            "T002 Q0 d9 2 0.5000000000 QE_cosine\n");
  const auto back = parse_run(text);
  EXPECT_EQ(back.tag(), "QE_cosine");
  EXPECT_EQ(back.results("T002")[0].doc_id, "d1");
  EXPECT_EQ(format_run(back), text);
}

TEST(Run, ReaderOrdersByRank) {
  const auto run = parse_run("T1 Q0 b 2 1.0 x\nT1 Q0 a 1 1.0 x\n");
  EXPECT_EQ(run.results("T1")[0].doc_id, "a");
  EXPECT_THROW(parse_run("T1 Q0 a 1 1.0\n"), ValidationError);
  EXPECT_THROW(parse_run("T1 Q0 a 1 abc x\n"), ValidationError);
}

TEST(Report, TsvAndJson) {
  MetricReport r;
  r.tag = "baseline";
  r.cutoffs = {5, 10};
  r.topics = {{"T001", {0.2, 0.1}, {0.5, 0.4}}};
  r.mean_recall = {0.2, 0.1};
  r.mean_ndcg = {0.5, 0.4};
  EXPECT_EQ(report_to_tsv(r),
            "topic\tR@5\tR@10\tnDCG@5\tnDCG@10\n"
            "T001\t0.200000\t0.100000\t0.500000\t0.400000\n"
            "mean\t0.200000\t0.100000\t0.500000\t0.400000\n");
  const auto j = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(j["tag"], "baseline");
  EXPECT_DOUBLE_EQ(j["mean"]["nDCG@10"].get<double>(), 0.4);
}
