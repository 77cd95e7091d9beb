#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "surveyqe/analysis.hpp"

namespace surveyqe {

enum class RelationType { kSynonym, kRelated, kAssociation, kBroader, kNarrower, kPreferred };

std::string_view to_string(RelationType type);
RelationType parse_relation_type(std::string_view name);

struct Relation {
  RelationType type = RelationType::kSynonym;
  std::string target;
};

struct Concept {
  std::string preferred;
  std::vector<std::string> alternatives;
  std::vector<Relation> relations;
};

// The relation types an expansion may follow. Never empty.
class RelationFilter {
 public:
  explicit RelationFilter(std::set<RelationType> allowed);

  // Synonyms and associations: the profile used with a general-language
  // thesaurus.
  static RelationFilter general();
  // Synonyms, related and preferred terms: the profile used with a
  // descriptor-based domain thesaurus.
  static RelationFilter domain();
  // "general", "domain", or a comma-separated list of relation types.
  static RelationFilter parse(std::string_view text);

  bool allows(RelationType type) const { return allowed_.contains(type); }
  const std::set<RelationType>& allowed() const { return allowed_; }

 private:
  std::set<RelationType> allowed_;
};

// Concepts with typed relations. Labels and relation targets are normalized
// with the shared analyzer when the thesaurus is built, so lookups are exact
// matches on analyzed strings.
class Thesaurus {
 public:
  static Thesaurus from_concepts(std::vector<Concept> concepts, const AnalyzerConfig& analyzer);
  // JSON array of {preferred, alternatives: [...], relations: [{type, target}]}.
  static Thesaurus from_json(std::string_view json, const AnalyzerConfig& analyzer);
  static Thesaurus load(const std::filesystem::path& path, const AnalyzerConfig& analyzer);

  // Concepts with normalized labels and targets, in file order.
  const std::vector<Concept>& concepts() const { return concepts_; }
  // Indices of concepts whose preferred or alternative label equals `label`.
  std::span<const std::size_t> lookup(std::string_view label) const;

 private:
  std::vector<Concept> concepts_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_label_;
};

// Labels one allowed relation hop away from every concept matching the
// (already normalized) term, in concept and relation order, deduplicated,
// without the term itself. Unknown terms give an empty list.
std::vector<std::string> expand_with_thesaurus(std::string_view term, const Thesaurus& thesaurus,
                                               const RelationFilter& filter);

}  // namespace surveyqe
