#include "surveyqe/expansion.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "surveyqe/errors.hpp"

namespace surveyqe {
namespace {

std::vector<std::string> distinct_query_terms(std::string_view raw_query,
                                              const AnalyzerConfig& analyzer) {
  const auto seq = analyze(raw_query, analyzer);
  std::vector<std::string> terms;
  for (const auto& t : seq.terms) {
    if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
  }
  if (terms.empty()) throw EmptyQueryError(fmt::format("empty query: '{}'", raw_query));
  return terms;
}

std::vector<std::string> split_words(const std::string& label) {
  std::vector<std::string> words;
  std::size_t start = 0;
  while (start < label.size()) {
    const auto space = std::min(label.find(' ', start), label.size());
    if (space > start) words.push_back(label.substr(start, space - start));
    start = space + 1;
  }
  return words;
}

}  // namespace

const ExpansionEntry* ExpansionPlan::find(std::string_view term) const {
  for (const auto& e : entries) {
    if (e.term == term) return &e;
  }
  return nullptr;
}

ExpansionPlan make_plan(std::string_view raw_query, const AnalyzerConfig& analyzer,
                        const ExpansionSource& source) {
  ExpansionPlan plan;
  for (auto& term : distinct_query_terms(raw_query, analyzer)) {
    ExpansionEntry entry{term, {}};
    for (const auto& candidate : source(term)) {
      auto norm = normalize_label(candidate, analyzer);
      if (norm.empty() || norm == term) continue;
      if (std::find(entry.expansions.begin(), entry.expansions.end(), norm) ==
          entry.expansions.end()) {
        entry.expansions.push_back(std::move(norm));
      }
    }
    plan.entries.push_back(std::move(entry));
  }
  return plan;
}

ExpansionPlan thesaurus_plan(std::string_view raw_query, const AnalyzerConfig& analyzer,
                             const Thesaurus& thesaurus, const RelationFilter& filter) {
  return make_plan(raw_query, analyzer, [&](const std::string& term) {
    return expand_with_thesaurus(term, thesaurus, filter);
  });
}

ExpansionPlan cooccurrence_plan(std::string_view raw_query, const AnalyzerConfig& analyzer,
                                const CooccurrenceModel& model, SimilarityMeasure measure,
                                std::size_t k) {
  return make_plan(raw_query, analyzer, [&](const std::string& term) {
    std::vector<std::string> labels;
    for (auto& s : suggest_terms(model, term, measure, k)) labels.push_back(std::move(s.term));
    return labels;
  });
}

BooleanQuery build_expanded_query(std::string_view raw_query, const AnalyzerConfig& analyzer,
                                  const ExpansionPlan& plan, Operator clause_op) {
  std::vector<BooleanQuery> groups;
  for (const auto& term : distinct_query_terms(raw_query, analyzer)) {
    const auto* entry = plan.find(term);
    if (!entry || entry->expansions.empty()) {
      groups.push_back(BooleanQuery::term(term));
      continue;
    }
    std::vector<BooleanQuery> leaves{BooleanQuery::term(term)};
    for (const auto& e : entry->expansions) {
      auto words = split_words(e);
      if (words.empty()) continue;
      leaves.push_back(BooleanQuery::term_or_phrase(std::move(words)));
    }
    groups.push_back(BooleanQuery::group(Operator::kOr, std::move(leaves)));
  }
  if (groups.size() == 1) return std::move(groups.front());
  return BooleanQuery::group(clause_op, std::move(groups));
}

double mean_expansion_count(std::span<const ExpansionPlan> plans) {
  if (plans.empty()) throw ValidationError("mean_expansion_count needs at least one plan");
  std::size_t terms = 0;
  std::size_t expansions = 0;
  for (const auto& plan : plans) {
    for (const auto& e : plan.entries) {
      ++terms;
      expansions += e.expansions.size();
    }
  }
  if (terms == 0) throw ValidationError("mean_expansion_count: plans contain no query terms");
  return static_cast<double>(expansions) / static_cast<double>(terms);
}

}  // namespace surveyqe
