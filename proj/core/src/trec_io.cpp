#include "surveyqe/trec_io.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "surveyqe/errors.hpp"

namespace surveyqe {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    fn(text.substr(start, end - start), line_no);
    start = end + 1;
  }
}

template <typename T>
T parse_number(std::string_view field, const std::string& source, std::size_t line_no,
               std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ValidationError(fmt::format("{}:{}: bad {} '{}'", source, line_no, what, field));
  }
  return value;
}

}  // namespace

Qrels parse_qrels(std::string_view text, const std::string& source) {
  Qrels qrels;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto f = split_fields(line);
    if (f.empty()) return;
    if (f.size() != 4) {
      throw ValidationError(fmt::format("{}:{}: expected 'topic 0 doc grade'", source, line_no));
    }
    const auto grade = parse_number<int>(f[3], source, line_no, "grade");
    try {
      qrels.add(std::string(f[0]), std::string(f[2]), grade);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  });
  return qrels;
}

Qrels load_qrels(const std::filesystem::path& path) {
  return parse_qrels(detail::read_file(path.string()), path.string());
}

RankedRun parse_run(std::string_view text, const std::string& source) {
  struct Line {
    long rank;
    std::size_t line_no;
    RunEntry entry;
  };
  std::map<std::string, std::vector<Line>> by_topic;
  std::string tag;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto f = split_fields(line);
    if (f.empty()) return;
    if (f.size() != 6) {
      throw ValidationError(
          fmt::format("{}:{}: expected 'topic Q0 doc rank score tag'", source, line_no));
    }
    const auto rank = parse_number<long>(f[3], source, line_no, "rank");
    const auto score = parse_number<double>(f[4], source, line_no, "score");
    if (tag.empty()) tag = f[5];
    by_topic[std::string(f[0])].push_back({rank, line_no, {std::string(f[2]), score}});
  });

  RankedRun run(tag);
  for (auto& [topic, lines] : by_topic) {
    std::stable_sort(lines.begin(), lines.end(),
                     [](const Line& a, const Line& b) { return a.rank < b.rank; });
    std::vector<RunEntry> entries;
    for (auto& l : lines) entries.push_back(std::move(l.entry));
    try {
      run.add_ranked_topic(topic, std::move(entries));
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}: {}", source, e.what()));
    }
  }
  return run;
}

RankedRun load_run(const std::filesystem::path& path) {
  return parse_run(detail::read_file(path.string()), path.string());
}

std::string format_score(double score) { return fmt::format("{:#.10g}", score); }

std::string format_run(const RankedRun& run) {
  const std::string tag = run.tag().empty() ? "surveyqe" : run.tag();
  std::string out;
  for (const auto& topic : run.topics()) {
    const auto& results = run.results(topic);
    for (std::size_t i = 0; i < results.size(); ++i) {
      fmt::format_to(std::back_inserter(out), "{} Q0 {} {} {} {}\n", topic, results[i].doc_id,
                     i + 1, format_score(results[i].score), tag);
    }
  }
  return out;
}

std::string report_to_tsv(const MetricReport& report) {
  std::string out = "topic";
  for (const auto c : report.cutoffs) out += '\t' + metric_label(Metric::kRecall, c);
  for (const auto c : report.cutoffs) out += '\t' + metric_label(Metric::kNdcg, c);
  out += '\n';
  auto row = [&](std::string_view name, const std::vector<double>& recall,
                 const std::vector<double>& ndcg) {
    out += name;
    for (const auto v : recall) fmt::format_to(std::back_inserter(out), "\t{:.6f}", v);
    for (const auto v : ndcg) fmt::format_to(std::back_inserter(out), "\t{:.6f}", v);
    out += '\n';
  };
  for (const auto& t : report.topics) row(t.topic_id, t.recall, t.ndcg);
  row("mean", report.mean_recall, report.mean_ndcg);
  return out;
}

std::string report_to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["tag"] = report.tag;
  j["cutoffs"] = report.cutoffs;
  j["topic_count"] = report.topics.size();
  auto metrics = [&](const std::vector<double>& recall, const std::vector<double>& ndcg) {
    nlohmann::ordered_json m;
    for (std::size_t i = 0; i < report.cutoffs.size(); ++i) {
      m[metric_label(Metric::kRecall, report.cutoffs[i])] = recall[i];
    }
    for (std::size_t i = 0; i < report.cutoffs.size(); ++i) {
      m[metric_label(Metric::kNdcg, report.cutoffs[i])] = ndcg[i];
    }
    return m;
  };
  j["mean"] = metrics(report.mean_recall, report.mean_ndcg);
  auto topics = nlohmann::ordered_json::object();
  for (const auto& t : report.topics) topics[t.topic_id] = metrics(t.recall, t.ndcg);
  j["topics"] = std::move(topics);
  j["skipped_topics"] = report.skipped_topics;
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  detail::write_file(path.string(), text);
}

}  // namespace surveyqe
