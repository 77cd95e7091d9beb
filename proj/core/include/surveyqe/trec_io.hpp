#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "surveyqe/evaluation.hpp"

namespace surveyqe {

// "topic_id 0 doc_id grade" per line, whitespace separated.
Qrels parse_qrels(std::string_view text, const std::string& source = "<qrels>");
Qrels load_qrels(const std::filesystem::path& path);

// "topic_id Q0 doc_id rank score tag" per line. Entries are ordered by the
// rank column; the tag of the first line becomes the run tag.
RankedRun parse_run(std::string_view text, const std::string& source = "<run>");
RankedRun load_run(const std::filesystem::path& path);

// Topics in topic_id order, ranks from 1, scores with ten significant digits.
std::string format_run(const RankedRun& run);
std::string format_score(double score);

// One row per topic plus a trailing "mean" row; values with six decimals.
std::string report_to_tsv(const MetricReport& report);
std::string report_to_json(const MetricReport& report);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace surveyqe
