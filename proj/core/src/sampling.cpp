#include "surveyqe/sampling.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "surveyqe/errors.hpp"

namespace surveyqe {

std::string_view to_string(Stratum stratum) {
  switch (stratum) {
    case Stratum::kHigh:
      return "high";
    case Stratum::kMedium:
      return "medium";
    case Stratum::kLow:
      return "low";
  }
  return "low";
}

Stratum parse_stratum(std::string_view name) {
  if (name == "high") return Stratum::kHigh;
  if (name == "medium") return Stratum::kMedium;
  if (name == "low") return Stratum::kLow;
  throw ValidationError(fmt::format("unknown stratum '{}'", name));
}

Stratum stratum_for_frequency(std::uint64_t frequency) {
  if (frequency == 0) throw ValidationError("log entry frequency must be at least 1");
  if (frequency > 10) return Stratum::kHigh;
  if (frequency >= 2) return Stratum::kMedium;
  return Stratum::kLow;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw ValidationError("uniform_below needs a positive bound");
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = kMax - (kMax % bound + 1) % bound;
  while (true) {
    const std::uint64_t x = rng();
    if (x <= limit) return x % bound;
  }
}

std::vector<Topic> sample_topics_from_log(std::span<const LogEntry> entries, StrataCounts counts,
                                          std::uint64_t seed) {
  std::vector<const LogEntry*> sorted;
  std::set<std::string_view> seen;
  for (const auto& e : entries) {
    if (e.query.empty()) throw ValidationError("log entry with empty query");
    stratum_for_frequency(e.frequency);
    if (!seen.insert(e.query).second) {
      throw ValidationError(fmt::format("duplicate log entry '{}'", e.query));
    }
    sorted.push_back(&e);
  }
  std::sort(sorted.begin(), sorted.end(), [](const LogEntry* a, const LogEntry* b) {
    return a->frequency != b->frequency ? a->frequency > b->frequency : a->query < b->query;
  });

  std::array<std::vector<const LogEntry*>, 3> strata;
  for (const auto* e : sorted) strata[static_cast<int>(stratum_for_frequency(e->frequency))].push_back(e);

  const std::array<std::size_t, 3> wanted{counts.high, counts.medium, counts.low};
  for (int s = 0; s < 3; ++s) {
    if (strata[s].size() < wanted[s]) {
      throw ValidationError(fmt::format("stratum '{}' has {} entries, {} requested",
                                        to_string(static_cast<Stratum>(s)), strata[s].size(),
                                        wanted[s]));
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<Topic> topics;
  for (int s = 0; s < 3; ++s) {
    auto& pool = strata[s];
    for (std::size_t i = 0; i < wanted[s]; ++i) {
      const auto j = i + uniform_below(rng, pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<const LogEntry*> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(wanted[s]));
    std::sort(chosen.begin(), chosen.end(), [](const LogEntry* a, const LogEntry* b) {
      return a->frequency != b->frequency ? a->frequency > b->frequency : a->query < b->query;
    });
    for (const auto* e : chosen) {
      topics.push_back({"", e->query, static_cast<Stratum>(s), e->frequency});
    }
  }
  for (std::size_t i = 0; i < topics.size(); ++i) topics[i].topic_id = fmt::format("T{:03}", i + 1);
  return topics;
}

std::vector<LogEntry> load_query_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open query log '{}'", path.string()));
  std::vector<LogEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ValidationError(fmt::format("{}:{}: expected 'query<TAB>frequency'", path.string(), line_no));
    }
    LogEntry e;
    e.query = line.substr(0, tab);
    const auto* first = line.data() + tab + 1;
    const auto* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, e.frequency);
    if (ec != std::errc() || ptr != last) {
      throw ValidationError(fmt::format("{}:{}: bad frequency '{}'", path.string(), line_no,
                                        std::string_view(first, static_cast<std::size_t>(last - first))));
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<Topic> load_topics_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open topics file '{}'", path.string()));
  std::vector<Topic> topics;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Topic t;
      t.topic_id = j.at("topic_id").get<std::string>();
      t.query = j.at("query").get<std::string>();
      if (auto it = j.find("stratum"); it != j.end()) t.stratum = parse_stratum(it->get<std::string>());
      if (auto it = j.find("frequency"); it != j.end()) t.frequency = it->get<std::uint64_t>();
      if (t.topic_id.empty() || t.query.empty()) {
        throw ValidationError(fmt::format("{}:{}: topic_id and query must be non-empty", path.string(), line_no));
      }
      topics.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(fmt::format("{}:{}: invalid topic: {}", path.string(), line_no, e.what()));
    }
  }
  return topics;
}

std::string topics_to_jsonl(std::span<const Topic> topics) {
  std::string out;
  for (const auto& t : topics) {
    nlohmann::ordered_json j;
    j["topic_id"] = t.topic_id;
    j["query"] = t.query;
    j["stratum"] = std::string(to_string(t.stratum));
    j["frequency"] = t.frequency;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace surveyqe
