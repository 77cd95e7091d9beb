#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "surveyqe/analysis.hpp"
#include "surveyqe/cooccurrence.hpp"
#include "surveyqe/query.hpp"
#include "surveyqe/thesaurus.hpp"

namespace surveyqe {

struct ExpansionEntry {
  std::string term;                     // analyzed original query term
  std::vector<std::string> expansions;  // normalized, may be multi-word
  friend bool operator==(const ExpansionEntry&, const ExpansionEntry&) = default;
};

// Expansion terms per original query term, in query order. An expansion list
// never repeats an entry and never contains its own original term.
struct ExpansionPlan {
  std::vector<ExpansionEntry> entries;

  const ExpansionEntry* find(std::string_view term) const;
  friend bool operator==(const ExpansionPlan&, const ExpansionPlan&) = default;
};

using ExpansionSource = std::function<std::vector<std::string>(const std::string& term)>;

// Analyzes the raw query, asks `source` for candidates for every distinct
// term, and normalizes the candidates with the same analyzer (dropping empty,
// duplicate and self matches). Throws EmptyQueryError for an empty query.
ExpansionPlan make_plan(std::string_view raw_query, const AnalyzerConfig& analyzer,
                        const ExpansionSource& source);

ExpansionPlan thesaurus_plan(std::string_view raw_query, const AnalyzerConfig& analyzer,
                             const Thesaurus& thesaurus, const RelationFilter& filter);

ExpansionPlan cooccurrence_plan(std::string_view raw_query, const AnalyzerConfig& analyzer,
                                const CooccurrenceModel& model, SimilarityMeasure measure,
                                std::size_t k = kDefaultSuggestionCount);

// One OR group per original term holding the term and its expansions
// (multi-word expansions as phrases); groups joined by clause_op. A term
// without expansions stays a bare Term leaf, and a single-term query is its
// group alone. Throws EmptyQueryError if the query has no terms.
BooleanQuery build_expanded_query(std::string_view raw_query, const AnalyzerConfig& analyzer,
                                  const ExpansionPlan& plan, Operator clause_op);

// Mean number of expansions attached to an original query term, over all
// terms of all plans. Throws ValidationError when there are no terms.
double mean_expansion_count(std::span<const ExpansionPlan> plans);

}  // namespace surveyqe
