#include "surveyqe/cooccurrence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "surveyqe/errors.hpp"

namespace surveyqe {
namespace {

constexpr std::string_view kModelMagic = "SQECOOC1";

void check_counts(std::uint64_t df_x, std::uint64_t df_y, std::uint64_t df_xy) {
  if (df_x == 0 || df_y == 0 || df_xy > std::min(df_x, df_y)) {
    throw ValidationError(fmt::format(
        "invalid document frequencies df_x={} df_y={} df_xy={}", df_x, df_y, df_xy));
  }
}

std::string trim_copy(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  return std::string(s.substr(first, s.find_last_not_of(kSpace) - first + 1));
}

struct PartialCounts {
  std::uint64_t docs = 0;
  std::unordered_map<std::string, std::uint64_t> free;
  std::unordered_map<std::string, std::uint64_t> controlled;
  std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>> pairs;
};

void count_range(std::span<const TrainingRecord> records, const AnalyzerConfig& analyzer,
                 PartialCounts& out) {
  for (const auto& rec : records) {
    const auto seq = analyze(rec.text, analyzer);
    const std::set<std::string> terms(seq.terms.begin(), seq.terms.end());
    std::set<std::string> keywords;
    for (const auto& k : rec.keywords) {
      auto label = trim_copy(k);
      if (!label.empty()) keywords.insert(std::move(label));
    }
    ++out.docs;
    for (const auto& t : terms) ++out.free[t];
    for (const auto& k : keywords) ++out.controlled[k];
    for (const auto& t : terms) {
      auto& row = out.pairs[t];
      for (const auto& k : keywords) ++row[k];
    }
  }
}

}  // namespace

std::string_view to_string(SimilarityMeasure measure) {
  return measure == SimilarityMeasure::kLogJaccard ? "log_jaccard" : "cosine";
}

SimilarityMeasure parse_similarity_measure(std::string_view name) {
  if (name == "log_jaccard" || name == "jaccard") return SimilarityMeasure::kLogJaccard;
  if (name == "cosine") return SimilarityMeasure::kCosine;
  throw ValidationError(fmt::format("unknown similarity measure '{}'", name));
}

double log_jaccard(std::uint64_t df_x, std::uint64_t df_y, std::uint64_t df_xy) {
  check_counts(df_x, df_y, df_xy);
  if (df_xy == 0) return 0.0;
  const auto union_size = df_x + df_y - df_xy;
  if (union_size <= 1) return 0.0;
  return std::log(static_cast<double>(df_xy)) / std::log(static_cast<double>(union_size));
}

double cosine(std::uint64_t df_x, std::uint64_t df_y, std::uint64_t df_xy) {
  check_counts(df_x, df_y, df_xy);
  if (df_xy == 0) return 0.0;
  return static_cast<double>(df_xy) / std::sqrt(static_cast<double>(df_x + df_y));
}

double similarity(SimilarityMeasure measure, std::uint64_t df_x, std::uint64_t df_y,
                  std::uint64_t df_xy) {
  return measure == SimilarityMeasure::kLogJaccard ? log_jaccard(df_x, df_y, df_xy)
                                                   : cosine(df_x, df_y, df_xy);
}

std::vector<TrainingRecord> load_training_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open training corpus '{}'", path.string()));
  std::vector<TrainingRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TrainingRecord rec;
      if (auto it = j.find("doc_id"); it != j.end()) rec.doc_id = it->get<std::string>();
      rec.text = j.at("text").get<std::string>();
      rec.keywords = j.at("keywords").get<std::vector<std::string>>();
      records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(
          fmt::format("{}:{}: invalid training record: {}", path.string(), line_no, e.what()));
    }
  }
  return records;
}

std::optional<std::size_t> CooccurrenceModel::free_index(std::string_view term) const {
  auto it = std::lower_bound(free_terms_.begin(), free_terms_.end(), term);
  if (it == free_terms_.end() || *it != term) return std::nullopt;
  return static_cast<std::size_t>(it - free_terms_.begin());
}

std::optional<std::uint32_t> CooccurrenceModel::controlled_index(std::string_view term) const {
  auto it = std::lower_bound(controlled_terms_.begin(), controlled_terms_.end(), term);
  if (it == controlled_terms_.end() || *it != term) return std::nullopt;
  return static_cast<std::uint32_t>(it - controlled_terms_.begin());
}

std::uint64_t CooccurrenceModel::free_df(std::string_view term) const {
  const auto i = free_index(term);
  return i ? free_df_[*i] : 0;
}

std::uint64_t CooccurrenceModel::controlled_df(std::string_view term) const {
  const auto i = controlled_index(term);
  return i ? controlled_df_[*i] : 0;
}

std::span<const CooccurrenceModel::PairCount> CooccurrenceModel::pairs(
    std::string_view free_term) const {
  const auto i = free_index(free_term);
  if (!i) return {};
  return {pairs_.data() + pair_offsets_[*i], pairs_.data() + pair_offsets_[*i + 1]};
}

std::uint64_t CooccurrenceModel::pair_df(std::string_view free_term,
                                         std::string_view controlled_term) const {
  const auto c = controlled_index(controlled_term);
  if (!c) return 0;
  const auto row = pairs(free_term);
  auto it = std::lower_bound(row.begin(), row.end(), *c,
                             [](const PairCount& p, std::uint32_t idx) { return p.controlled < idx; });
  return it != row.end() && it->controlled == *c ? it->df : 0;
}

void CooccurrenceModel::validate(const std::string& source) const {
  auto fail = [&](const std::string& what) {
    throw ValidationError(fmt::format("{}: inconsistent co-occurrence model: {}", source, what));
  };
  for (const auto df : free_df_) {
    if (df == 0 || df > doc_count_) fail("free-term df out of range");
  }
  for (const auto df : controlled_df_) {
    if (df == 0 || df > doc_count_) fail("controlled-term df out of range");
  }
  for (std::size_t f = 0; f < free_terms_.size(); ++f) {
    for (auto i = pair_offsets_[f]; i < pair_offsets_[f + 1]; ++i) {
      const auto& p = pairs_[i];
      if (p.controlled >= controlled_terms_.size()) fail("pair references unknown controlled term");
      if (p.df == 0 || p.df > std::min(free_df_[f], controlled_df_[p.controlled])) {
        fail(fmt::format("pair ({}, {}) df exceeds marginal", free_terms_[f],
                         controlled_terms_[p.controlled]));
      }
    }
  }
}

std::string CooccurrenceModel::serialize() const {
  detail::BinaryWriter w;
  w.raw(kModelMagic);
  w.u32(kFormatVersion);
  w.str(analyzer_.to_json());
  w.u64(doc_count_);
  w.u64(controlled_terms_.size());
  for (std::size_t c = 0; c < controlled_terms_.size(); ++c) {
    w.str(controlled_terms_[c]);
    w.u64(controlled_df_[c]);
  }
  w.u64(free_terms_.size());
  for (std::size_t f = 0; f < free_terms_.size(); ++f) {
    w.str(free_terms_[f]);
    w.u64(free_df_[f]);
    w.u64(pair_offsets_[f + 1] - pair_offsets_[f]);
    for (auto i = pair_offsets_[f]; i < pair_offsets_[f + 1]; ++i) {
      w.u32(pairs_[i].controlled);
      w.u64(pairs_[i].df);
    }
  }
  return w.bytes();
}

CooccurrenceModel CooccurrenceModel::deserialize(std::string_view bytes, const std::string& source) {
  detail::BinaryReader r(bytes, source);
  if (r.raw(kModelMagic.size()) != kModelMagic) {
    throw ValidationError(fmt::format("{}: not a co-occurrence model file", source));
  }
  if (const auto version = r.u32(); version != kFormatVersion) {
    throw ValidationError(fmt::format("{}: unsupported model format version {}", source, version));
  }
  CooccurrenceModel m;
  m.analyzer_ = AnalyzerConfig::from_json(r.str());
  m.doc_count_ = r.u64();
  const auto n_controlled = r.u64();
  for (std::uint64_t c = 0; c < n_controlled; ++c) {
    m.controlled_terms_.push_back(r.str());
    m.controlled_df_.push_back(r.u64());
  }
  const auto n_free = r.u64();
  m.pair_offsets_.push_back(0);
  for (std::uint64_t f = 0; f < n_free; ++f) {
    m.free_terms_.push_back(r.str());
    m.free_df_.push_back(r.u64());
    const auto n_pairs = r.u64();
    for (std::uint64_t i = 0; i < n_pairs; ++i) {
      PairCount p;
      p.controlled = r.u32();
      p.df = r.u64();
      m.pairs_.push_back(p);
    }
    m.pair_offsets_.push_back(m.pairs_.size());
  }
  if (!r.at_end()) throw ValidationError(fmt::format("{}: trailing bytes after model", source));
  m.validate(source);
  return m;
}

void CooccurrenceModel::save(const std::filesystem::path& path) const {
  detail::write_file(path.string(), serialize());
}

CooccurrenceModel CooccurrenceModel::load(const std::filesystem::path& path) {
  return deserialize(detail::read_file(path.string()), path.string());
}

CooccurrenceModel train_cooccurrence(std::span<const TrainingRecord> records,
                                     const AnalyzerConfig& analyzer, unsigned threads) {
  if (records.empty()) throw ValidationError("co-occurrence training needs at least one document");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& kw = records[i].keywords;
    const bool any = std::any_of(kw.begin(), kw.end(),
                                 [](const std::string& k) { return !trim_copy(k).empty(); });
    if (!any) {
      throw ValidationError(fmt::format("training record {} ('{}') has no controlled terms", i + 1,
                                        records[i].doc_id));
    }
  }

  const auto n = records.size();
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(std::min<std::size_t>(n, 256)));
  std::vector<PartialCounts> partials(threads);
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      const auto begin = n * t / threads;
      const auto end = n * (t + 1) / threads;
      workers.emplace_back([&, t, begin, end] {
        count_range(records.subspan(begin, end - begin), analyzer, partials[t]);
      });
    }
  }

  // Sum into ordered maps; the sorted layout makes the model independent of
  // record order and partitioning.
  std::uint64_t docs = 0;
  std::map<std::string, std::uint64_t> free;
  std::map<std::string, std::uint64_t> controlled;
  std::map<std::string, std::map<std::string, std::uint64_t>> pairs;
  for (auto& p : partials) {
    docs += p.docs;
    for (auto& [k, v] : p.free) free[k] += v;
    for (auto& [k, v] : p.controlled) controlled[k] += v;
    for (auto& [t, row] : p.pairs) {
      auto& dst = pairs[t];
      for (auto& [k, v] : row) dst[k] += v;
    }
  }

  CooccurrenceModel m;
  m.analyzer_ = analyzer;
  m.doc_count_ = docs;
  for (auto& [k, v] : controlled) {
    m.controlled_terms_.push_back(k);
    m.controlled_df_.push_back(v);
  }
  m.pair_offsets_.push_back(0);
  for (auto& [t, df] : free) {
    m.free_terms_.push_back(t);
    m.free_df_.push_back(df);
    for (auto& [k, v] : pairs[t]) {
      m.pairs_.push_back({*m.controlled_index(k), v});
    }
    m.pair_offsets_.push_back(m.pairs_.size());
  }
  return m;
}

std::vector<Suggestion> suggest_terms(const CooccurrenceModel& model, std::string_view query_term,
                                      SimilarityMeasure measure, std::size_t k) {
  if (k == 0) throw ValidationError("suggestion count k must be positive");
  const auto df_x = model.free_df(query_term);
  if (df_x == 0) return {};
  std::vector<Suggestion> out;
  for (const auto& p : model.pairs(query_term)) {
    out.push_back({model.controlled_terms()[p.controlled],
                   similarity(measure, df_x, model.controlled_df(p.controlled), p.df)});
  }
  auto better = [](const Suggestion& a, const Suggestion& b) {
    return a.score != b.score ? a.score > b.score : a.term < b.term;
  };
  const auto keep = std::min(k, out.size());
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep), out.end(), better);
  out.resize(keep);
  return out;
}

}  // namespace surveyqe
