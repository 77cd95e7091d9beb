#include "surveyqe/thesaurus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "surveyqe/errors.hpp"

namespace surveyqe {
namespace {

constexpr std::array<std::pair<RelationType, std::string_view>, 6> kRelationNames{{
    {RelationType::kSynonym, "synonym"},
    {RelationType::kRelated, "related"},
    {RelationType::kAssociation, "association"},
    {RelationType::kBroader, "broader"},
    {RelationType::kNarrower, "narrower"},
    {RelationType::kPreferred, "preferred"},
}};

}  // namespace

std::string_view to_string(RelationType type) {
  for (const auto& [t, name] : kRelationNames) {
    if (t == type) return name;
  }
  return "unknown";
}

RelationType parse_relation_type(std::string_view name) {
  for (const auto& [t, n] : kRelationNames) {
    if (n == name) return t;
  }
  throw ValidationError(fmt::format("unknown relation type '{}'", name));
}

RelationFilter::RelationFilter(std::set<RelationType> allowed) : allowed_(std::move(allowed)) {
  if (allowed_.empty()) throw ValidationError("relation filter must allow at least one type");
}

RelationFilter RelationFilter::general() {
  return RelationFilter({RelationType::kSynonym, RelationType::kAssociation});
}

RelationFilter RelationFilter::domain() {
  return RelationFilter({RelationType::kSynonym, RelationType::kRelated, RelationType::kPreferred});
}

RelationFilter RelationFilter::parse(std::string_view text) {
  if (text == "general") return general();
  if (text == "domain") return domain();
  std::set<RelationType> allowed;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    auto name = text.substr(start, comma - start);
    while (!name.empty() && (name.front() == ' ' || name.front() == '\t')) name.remove_prefix(1);
    while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.remove_suffix(1);
    if (!name.empty()) allowed.insert(parse_relation_type(name));
    start = comma + 1;
  }
  return RelationFilter(std::move(allowed));
}

Thesaurus Thesaurus::from_concepts(std::vector<Concept> concepts, const AnalyzerConfig& analyzer) {
  Thesaurus th;
  th.concepts_.reserve(concepts.size());
  for (auto& c : concepts) {
    if (c.preferred.empty()) throw ValidationError("thesaurus concept with empty preferred label");
    Concept norm;
    norm.preferred = normalize_label(c.preferred, analyzer);
    for (const auto& alt : c.alternatives) {
      if (alt.empty()) {
        throw ValidationError(fmt::format("concept '{}' has an empty alternative label", c.preferred));
      }
      norm.alternatives.push_back(normalize_label(alt, analyzer));
    }
    for (const auto& rel : c.relations) {
      if (rel.target.empty()) {
        throw ValidationError(fmt::format("concept '{}' has a relation with an empty target", c.preferred));
      }
      norm.relations.push_back({rel.type, normalize_label(rel.target, analyzer)});
    }
    const auto index = th.concepts_.size();
    auto add_key = [&](const std::string& label) {
      if (label.empty()) return;
      auto& slot = th.by_label_[label];
      if (slot.empty() || slot.back() != index) slot.push_back(index);
    };
    add_key(norm.preferred);
    for (const auto& alt : norm.alternatives) add_key(alt);
    th.concepts_.push_back(std::move(norm));
  }
  return th;
}

Thesaurus Thesaurus::from_json(std::string_view json, const AnalyzerConfig& analyzer) {
  std::vector<Concept> concepts;
  try {
    const auto j = nlohmann::json::parse(json);
    if (!j.is_array()) throw ValidationError("thesaurus JSON must be an array of concepts");
    for (const auto& item : j) {
      Concept c;
      c.preferred = item.at("preferred").get<std::string>();
      if (auto it = item.find("alternatives"); it != item.end()) {
        c.alternatives = it->get<std::vector<std::string>>();
      }
      if (auto it = item.find("relations"); it != item.end()) {
        for (const auto& rel : *it) {
          c.relations.push_back({parse_relation_type(rel.at("type").get<std::string>()),
                                 rel.at("target").get<std::string>()});
        }
      }
      concepts.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("invalid thesaurus: {}", e.what()));
  }
  return from_concepts(std::move(concepts), analyzer);
}

Thesaurus Thesaurus::load(const std::filesystem::path& path, const AnalyzerConfig& analyzer) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open thesaurus '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return from_json(ss.str(), analyzer);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::span<const std::size_t> Thesaurus::lookup(std::string_view label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) return {};
  return it->second;
}

std::vector<std::string> expand_with_thesaurus(std::string_view term, const Thesaurus& thesaurus,
                                               const RelationFilter& filter) {
  std::vector<std::string> out;
  for (const auto idx : thesaurus.lookup(term)) {
    for (const auto& rel : thesaurus.concepts()[idx].relations) {
      if (!filter.allows(rel.type) || rel.target.empty() || rel.target == term) continue;
      if (std::find(out.begin(), out.end(), rel.target) == out.end()) out.push_back(rel.target);
    }
  }
  return out;
}

}  // namespace surveyqe
