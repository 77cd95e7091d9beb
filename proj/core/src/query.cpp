#include "surveyqe/query.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "surveyqe/errors.hpp"

namespace surveyqe {

std::string_view to_string(Operator op) { return op == Operator::kAnd ? "AND" : "OR"; }

Operator parse_operator(std::string_view name) {
  if (name == "AND" || name == "and") return Operator::kAnd;
  if (name == "OR" || name == "or") return Operator::kOr;
  throw ValidationError(fmt::format("unknown clause operator '{}'", name));
}

BooleanQuery BooleanQuery::term(std::string term) {
  if (term.empty()) throw ValidationError("query term must be non-empty");
  return BooleanQuery(TermClause{std::move(term)});
}

BooleanQuery BooleanQuery::phrase(std::vector<std::string> terms) {
  if (terms.size() < 2) throw ValidationError("phrase needs at least two terms");
  for (const auto& t : terms) {
    if (t.empty()) throw ValidationError("phrase term must be non-empty");
  }
  return BooleanQuery(PhraseClause{std::move(terms)});
}

BooleanQuery BooleanQuery::term_or_phrase(std::vector<std::string> terms) {
  if (terms.size() == 1) return term(std::move(terms.front()));
  return phrase(std::move(terms));
}

BooleanQuery BooleanQuery::group(Operator op, std::vector<BooleanQuery> children) {
  if (children.empty()) throw ValidationError("query group needs at least one child");
  return BooleanQuery(GroupClause{op, std::move(children)});
}

namespace {

void collect_terms(const BooleanQuery& q, std::set<std::string>& out) {
  std::visit(
      [&](const auto& clause) {
        using T = std::decay_t<decltype(clause)>;
        if constexpr (std::is_same_v<T, TermClause>) {
          out.insert(clause.term);
        } else if constexpr (std::is_same_v<T, PhraseClause>) {
          out.insert(clause.terms.begin(), clause.terms.end());
        } else {
          for (const auto& child : clause.children) collect_terms(child, out);
        }
      },
      q.node());
}

void print(const BooleanQuery& q, bool root, std::string& out) {
  std::visit(
      [&](const auto& clause) {
        using T = std::decay_t<decltype(clause)>;
        if constexpr (std::is_same_v<T, TermClause>) {
          out += clause.term;
        } else if constexpr (std::is_same_v<T, PhraseClause>) {
          out += '"';
          for (std::size_t i = 0; i < clause.terms.size(); ++i) {
            if (i) out += ' ';
            out += clause.terms[i];
          }
          out += '"';
        } else {
          const bool parens = !root && clause.children.size() > 1;
          if (parens) out += '(';
          for (std::size_t i = 0; i < clause.children.size(); ++i) {
            if (i) fmt::format_to(std::back_inserter(out), " {} ", to_string(clause.op));
            print(clause.children[i], false, out);
          }
          if (parens) out += ')';
        }
      },
      q.node());
}

// Recursive-descent parser over a small token stream.
class QueryParser {
 public:
  QueryParser(std::string_view text, const AnalyzerConfig& analyzer, Operator default_op)
      : text_(text), analyzer_(analyzer), default_op_(default_op) {}

  std::optional<BooleanQuery> parse() {
    auto q = parse_sequence();
    skip_space();
    if (pos_ != text_.size()) {
      throw ValidationError(fmt::format("unexpected ')' at offset {} in query", pos_));
    }
    return q;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool at_close() {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == ')';
  }

  std::optional<Operator> take_keyword() {
    skip_space();
    for (const Operator op : {Operator::kAnd, Operator::kOr}) {
      const auto kw = to_string(op);
      if (text_.substr(pos_).starts_with(kw)) {
        const auto end = pos_ + kw.size();
        if (end == text_.size() || text_[end] == ' ' || text_[end] == '\t' ||
            text_[end] == '(' || text_[end] == '"') {
          pos_ = end;
          return op;
        }
      }
    }
    return std::nullopt;
  }

  // Parses clauses up to ')' or end. AND binds tighter than OR; each
  // juxtaposition takes default_op.
  std::optional<BooleanQuery> parse_sequence() {
    std::vector<std::vector<std::optional<BooleanQuery>>> or_terms(1);
    bool first = true;
    while (true) {
      skip_space();
      if (pos_ == text_.size() || at_close()) break;
      Operator op = default_op_;
      if (!first) {
        if (auto kw = take_keyword()) op = *kw;
      }
      skip_space();
      if (pos_ == text_.size() || at_close()) break;
      if (!first && op == Operator::kOr) or_terms.emplace_back();
      or_terms.back().push_back(parse_primary());
      first = false;
    }

    std::vector<BooleanQuery> disjuncts;
    for (auto& conj : or_terms) {
      std::vector<BooleanQuery> kept;
      for (auto& c : conj) {
        if (c) kept.push_back(std::move(*c));
      }
      if (kept.empty()) continue;
      if (kept.size() == 1) {
        disjuncts.push_back(std::move(kept.front()));
      } else {
        disjuncts.push_back(BooleanQuery::group(Operator::kAnd, std::move(kept)));
      }
    }
    if (disjuncts.empty()) return std::nullopt;
    if (disjuncts.size() == 1) return std::move(disjuncts.front());
    return BooleanQuery::group(Operator::kOr, std::move(disjuncts));
  }

  std::optional<BooleanQuery> parse_primary() {
    skip_space();
    const char c = text_[pos_];
    if (c == '(') {
      const auto open = pos_++;
      auto inner = parse_sequence();
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')') {
        throw ValidationError(fmt::format("unbalanced '(' at offset {} in query", open));
      }
      ++pos_;
      return inner;
    }
    if (c == '"') {
      const auto open = pos_++;
      const auto close = text_.find('"', pos_);
      if (close == std::string_view::npos) {
        throw ValidationError(fmt::format("unterminated '\"' at offset {} in query", open));
      }
      auto body = text_.substr(pos_, close - pos_);
      pos_ = close + 1;
      return leaf(body);
    }
    const auto start = pos_;
    while (pos_ < text_.size()) {
      const char ch = text_[pos_];
      if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '(' || ch == ')' ||
          ch == '"') {
        break;
      }
      ++pos_;
    }
    return leaf(text_.substr(start, pos_ - start));
  }

  std::optional<BooleanQuery> leaf(std::string_view raw) {
    auto seq = analyze(raw, analyzer_);
    if (seq.empty()) return std::nullopt;
    return BooleanQuery::term_or_phrase(std::move(seq.terms));
  }

  std::string_view text_;
  const AnalyzerConfig& analyzer_;
  Operator default_op_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::string> BooleanQuery::distinct_terms() const {
  std::set<std::string> terms;
  collect_terms(*this, terms);
  return {terms.begin(), terms.end()};
}

std::size_t BooleanQuery::leaf_count() const {
  if (is_group()) {
    std::size_t n = 0;
    for (const auto& child : as_group().children) n += child.leaf_count();
    return n;
  }
  return 1;
}

std::string to_string(const BooleanQuery& query) {
  std::string out;
  print(query, true, out);
  return out;
}

BooleanQuery parse_query(std::string_view text, const AnalyzerConfig& analyzer,
                         Operator default_op) {
  auto q = QueryParser(text, analyzer, default_op).parse();
  if (!q) throw EmptyQueryError(fmt::format("empty query: '{}'", text));
  return std::move(*q);
}

BooleanQuery keyword_query(std::string_view text, const AnalyzerConfig& analyzer, Operator op) {
  const auto seq = analyze(text, analyzer);
  std::vector<BooleanQuery> leaves;
  std::set<std::string> seen;
  for (const auto& term : seq.terms) {
    if (seen.insert(term).second) leaves.push_back(BooleanQuery::term(term));
  }
  if (leaves.empty()) throw EmptyQueryError(fmt::format("empty query: '{}'", text));
  if (leaves.size() == 1) return std::move(leaves.front());
  return BooleanQuery::group(op, std::move(leaves));
}

}  // namespace surveyqe
