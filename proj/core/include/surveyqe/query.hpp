#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "surveyqe/analysis.hpp"

namespace surveyqe {

enum class Operator { kAnd, kOr };

std::string_view to_string(Operator op);
Operator parse_operator(std::string_view name);

class BooleanQuery;

struct TermClause {
  std::string term;
  friend bool operator==(const TermClause&, const TermClause&) = default;
};

// Terms that must occur at consecutive positions. Always two or more terms.
struct PhraseClause {
  std::vector<std::string> terms;
  friend bool operator==(const PhraseClause&, const PhraseClause&) = default;
};

struct GroupClause {
  Operator op = Operator::kOr;
  std::vector<BooleanQuery> children;
  friend bool operator==(const GroupClause&, const GroupClause&);
};

// A boolean query tree over already-analyzed terms. Use the factories; they
// reject empty groups, single-term phrases and empty terms.
class BooleanQuery {
 public:
  using Node = std::variant<TermClause, PhraseClause, GroupClause>;

  static BooleanQuery term(std::string term);
  static BooleanQuery phrase(std::vector<std::string> terms);
  // One term yields a Term leaf, more yield a Phrase.
  static BooleanQuery term_or_phrase(std::vector<std::string> terms);
  static BooleanQuery group(Operator op, std::vector<BooleanQuery> children);

  const Node& node() const { return node_; }

  bool is_term() const { return std::holds_alternative<TermClause>(node_); }
  bool is_phrase() const { return std::holds_alternative<PhraseClause>(node_); }
  bool is_group() const { return std::holds_alternative<GroupClause>(node_); }

  const TermClause& as_term() const { return std::get<TermClause>(node_); }
  const PhraseClause& as_phrase() const { return std::get<PhraseClause>(node_); }
  const GroupClause& as_group() const { return std::get<GroupClause>(node_); }

  // Distinct terms of every Term and Phrase leaf, sorted.
  std::vector<std::string> distinct_terms() const;
  std::size_t leaf_count() const;

  friend bool operator==(const BooleanQuery&, const BooleanQuery&) = default;

 private:
  explicit BooleanQuery(Node node) : node_(std::move(node)) {}
  Node node_;
};

inline bool operator==(const GroupClause& a, const GroupClause& b) {
  return a.op == b.op && a.children == b.children;
}

// Canonical text form: a "quoted phrase", nested groups parenthesized, the
// root group bare, e.g. (youth OR adolescent) AND "labor market".
std::string to_string(const BooleanQuery& query);

// Parses user query syntax: bare words, "quoted phrases", parentheses and the
// AND / OR keywords (case-sensitive). Adjacent clauses without an operator
// are joined with default_op; AND binds tighter than OR. Words are run
// through the analyzer; a word that yields several terms becomes a phrase and
// one that yields none is dropped. Throws EmptyQueryError when nothing
// searchable remains, ValidationError on unbalanced syntax.
BooleanQuery parse_query(std::string_view text, const AnalyzerConfig& analyzer,
                         Operator default_op = Operator::kOr);

// The raw query's analyzed terms joined with op (a single term stays a bare
// leaf). Throws EmptyQueryError if the text has no terms.
BooleanQuery keyword_query(std::string_view text, const AnalyzerConfig& analyzer, Operator op);

}  // namespace surveyqe
