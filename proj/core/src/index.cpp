#include "surveyqe/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "surveyqe/errors.hpp"

namespace surveyqe {
namespace {

constexpr std::string_view kIndexMagic = "SQEINDEX";

struct DocPostings {
  std::uint32_t doc;
  std::vector<std::uint32_t> positions;
};

using PartialIndex = std::map<std::string, std::vector<DocPostings>, std::less<>>;

// Builds postings for ordinals [begin, end); per-term lists come out in
// ascending ordinal order.
PartialIndex index_range(const std::vector<const DocumentRecord*>& docs, std::uint32_t begin,
                         std::uint32_t end, const AnalyzerConfig& analyzer,
                         std::vector<std::uint32_t>& doc_lens) {
  PartialIndex partial;
  for (std::uint32_t ord = begin; ord < end; ++ord) {
    const auto seq = analyze(docs[ord]->text, analyzer);
    doc_lens[ord] = static_cast<std::uint32_t>(seq.size());
    std::map<std::string_view, std::vector<std::uint32_t>> local;
    for (std::size_t i = 0; i < seq.size(); ++i) local[seq.terms[i]].push_back(seq.positions[i]);
    for (auto& [term, positions] : local) {
      auto it = partial.find(term);
      if (it == partial.end()) it = partial.emplace(std::string(term), std::vector<DocPostings>{}).first;
      it->second.push_back({ord, std::move(positions)});
    }
  }
  return partial;
}

std::vector<std::uint32_t> intersect(const std::vector<std::uint32_t>& a,
                                     const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::uint32_t> unite(const std::vector<std::uint32_t>& a,
                                 const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

const Posting* find_posting(std::span<const Posting> postings, std::uint32_t ordinal) {
  auto it = std::lower_bound(postings.begin(), postings.end(), ordinal,
                             [](const Posting& p, std::uint32_t d) { return p.doc < d; });
  if (it == postings.end() || it->doc != ordinal) return nullptr;
  return &*it;
}

bool phrase_at(const InvertedIndex& index, const std::vector<std::span<const Posting>>& lists,
               std::uint32_t ordinal) {
  std::vector<std::span<const std::uint32_t>> pos;
  pos.reserve(lists.size());
  for (const auto& list : lists) {
    const auto* p = find_posting(list, ordinal);
    if (!p) return false;
    pos.push_back(index.positions(*p));
  }
  for (const auto start : pos.front()) {
    bool ok = true;
    for (std::size_t i = 1; i < pos.size() && ok; ++i) {
      ok = std::binary_search(pos[i].begin(), pos[i].end(),
                              start + static_cast<std::uint32_t>(i));
    }
    if (ok) return true;
  }
  return false;
}

std::vector<std::uint32_t> docs_of(std::span<const Posting> postings) {
  std::vector<std::uint32_t> out;
  out.reserve(postings.size());
  for (const auto& p : postings) out.push_back(p.doc);
  return out;
}

std::vector<std::uint32_t> evaluate(const InvertedIndex& index, const BooleanQuery& q) {
  if (q.is_term()) return docs_of(index.postings(q.as_term().term));
  if (q.is_phrase()) {
    const auto& terms = q.as_phrase().terms;
    std::vector<std::span<const Posting>> lists;
    for (const auto& t : terms) lists.push_back(index.postings(t));
    auto candidates = docs_of(lists.front());
    for (std::size_t i = 1; i < lists.size(); ++i) candidates = intersect(candidates, docs_of(lists[i]));
    std::erase_if(candidates, [&](std::uint32_t d) { return !phrase_at(index, lists, d); });
    return candidates;
  }
  const auto& group = q.as_group();
  auto acc = evaluate(index, group.children.front());
  for (std::size_t i = 1; i < group.children.size(); ++i) {
    if (group.op == Operator::kAnd && acc.empty()) break;
    const auto next = evaluate(index, group.children[i]);
    acc = group.op == Operator::kAnd ? intersect(acc, next) : unite(acc, next);
  }
  return acc;
}

}  // namespace

void Bm25Params::validate() const {
  if (!(k1 >= 0.0) || !std::isfinite(k1)) {
    throw ValidationError(fmt::format("BM25 k1 must be >= 0, got {}", k1));
  }
  if (!(b >= 0.0 && b <= 1.0)) {
    throw ValidationError(fmt::format("BM25 b must lie in [0,1], got {}", b));
  }
}

std::vector<DocumentRecord> load_corpus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open corpus '{}'", path.string()));
  std::vector<DocumentRecord> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      DocumentRecord doc;
      doc.doc_id = j.at("doc_id").get<std::string>();
      doc.text = j.at("text").get<std::string>();
      if (auto it = j.find("metadata"); it != j.end() && !it->is_null()) {
        for (const auto& [key, value] : it->items()) {
          doc.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
      }
      docs.push_back(std::move(doc));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(
          fmt::format("{}:{}: invalid corpus record: {}", path.string(), line_no, e.what()));
    }
  }
  return docs;
}

std::optional<std::uint32_t> InvertedIndex::find_doc(std::string_view doc_id) const {
  auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), doc_id);
  if (it == doc_ids_.end() || *it != doc_id) return std::nullopt;
  return static_cast<std::uint32_t>(it - doc_ids_.begin());
}

std::uint32_t InvertedIndex::doc_len(std::string_view doc_id) const {
  const auto ord = find_doc(doc_id);
  if (!ord) throw LookupError(fmt::format("unknown doc_id '{}'", doc_id));
  return doc_lens_[*ord];
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), term);
  if (it == terms_.end() || *it != term) return {};
  const auto t = static_cast<std::size_t>(it - terms_.begin());
  return {postings_.data() + term_offsets_[t], postings_.data() + term_offsets_[t + 1]};
}

std::uint32_t InvertedIndex::term_frequency(std::string_view term, std::uint32_t ordinal) const {
  const auto* p = find_posting(postings(term), ordinal);
  return p ? p->tf : 0;
}

void InvertedIndex::finalize() {
  const auto total = std::accumulate(doc_lens_.begin(), doc_lens_.end(), std::uint64_t{0});
  avg_doc_len_ = doc_lens_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(doc_lens_.size());
  fingerprint_ = detail::fnv1a64(serialize());
}

std::string InvertedIndex::serialize() const {
  detail::BinaryWriter w;
  w.raw(kIndexMagic);
  w.u32(kFormatVersion);
  w.str(analyzer_.to_json());
  w.u64(doc_ids_.size());
  for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
    w.str(doc_ids_[d]);
    w.u32(doc_lens_[d]);
    w.u32(static_cast<std::uint32_t>(metadata_[d].size()));
    for (const auto& [k, v] : metadata_[d]) {
      w.str(k);
      w.str(v);
    }
  }
  w.u64(terms_.size());
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    w.str(terms_[t]);
    w.u64(term_offsets_[t + 1] - term_offsets_[t]);
    for (auto i = term_offsets_[t]; i < term_offsets_[t + 1]; ++i) {
      const auto& p = postings_[i];
      w.u32(p.doc);
      w.u32(p.tf);
      for (auto pos : positions(p)) w.u32(pos);
    }
  }
  return w.bytes();
}

InvertedIndex InvertedIndex::deserialize(std::string_view bytes, const std::string& source) {
  detail::BinaryReader r(bytes, source);
  if (r.raw(kIndexMagic.size()) != kIndexMagic) {
    throw ValidationError(fmt::format("{}: not an index file", source));
  }
  if (const auto version = r.u32(); version != kFormatVersion) {
    throw ValidationError(fmt::format("{}: unsupported index format version {}", source, version));
  }
  InvertedIndex index;
  index.analyzer_ = AnalyzerConfig::from_json(r.str());
  const auto n_docs = r.u64();
  for (std::uint64_t d = 0; d < n_docs; ++d) {
    index.doc_ids_.push_back(r.str());
    index.doc_lens_.push_back(r.u32());
    auto& meta = index.metadata_.emplace_back();
    const auto n_meta = r.u32();
    for (std::uint32_t m = 0; m < n_meta; ++m) {
      auto key = r.str();
      meta[std::move(key)] = r.str();
    }
  }
  const auto n_terms = r.u64();
  index.term_offsets_.push_back(0);
  for (std::uint64_t t = 0; t < n_terms; ++t) {
    index.terms_.push_back(r.str());
    const auto n_postings = r.u64();
    for (std::uint64_t i = 0; i < n_postings; ++i) {
      Posting p;
      p.doc = r.u32();
      p.tf = r.u32();
      p.positions_offset = index.positions_.size();
      if (p.doc >= n_docs) throw ValidationError(fmt::format("{}: posting references doc {}", source, p.doc));
      for (std::uint32_t k = 0; k < p.tf; ++k) index.positions_.push_back(r.u32());
      index.postings_.push_back(p);
    }
    index.term_offsets_.push_back(index.postings_.size());
  }
  if (!r.at_end()) throw ValidationError(fmt::format("{}: trailing bytes after index", source));
  index.finalize();
  return index;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
  detail::write_file(path.string(), serialize());
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path.string());
  return deserialize(bytes, path.string());
}

InvertedIndex build_index(std::span<const DocumentRecord> docs, const AnalyzerConfig& analyzer,
                          BuildOptions options) {
  std::vector<const DocumentRecord*> sorted;
  sorted.reserve(docs.size());
  for (const auto& d : docs) {
    if (d.doc_id.empty()) throw ValidationError("document with empty doc_id");
    sorted.push_back(&d);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->doc_id < b->doc_id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->doc_id == sorted[i - 1]->doc_id) {
      throw ValidationError(fmt::format("duplicate doc_id '{}'", sorted[i]->doc_id));
    }
  }

  InvertedIndex index;
  index.analyzer_ = analyzer;
  const auto n = static_cast<std::uint32_t>(sorted.size());
  index.doc_lens_.assign(n, 0);

  const unsigned threads = std::clamp(options.threads, 1u, std::max(1u, n));
  std::vector<PartialIndex> partials(threads);
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      const auto begin = static_cast<std::uint32_t>(std::uint64_t{n} * t / threads);
      const auto end = static_cast<std::uint32_t>(std::uint64_t{n} * (t + 1) / threads);
      workers.emplace_back([&, t, begin, end] {
        partials[t] = index_range(sorted, begin, end, analyzer, index.doc_lens_);
      });
    }
  }

  // Partials cover ascending ordinal ranges, so appending them in order keeps
  // every posting list sorted.
  PartialIndex merged = std::move(partials.front());
  for (unsigned t = 1; t < threads; ++t) {
    for (auto& [term, list] : partials[t]) {
      auto& dst = merged[term];
      std::move(list.begin(), list.end(), std::back_inserter(dst));
    }
  }

  index.term_offsets_.push_back(0);
  for (auto& [term, list] : merged) {
    index.terms_.push_back(term);
    for (auto& dp : list) {
      index.postings_.push_back({dp.doc, static_cast<std::uint32_t>(dp.positions.size()),
                                 index.positions_.size()});
      index.positions_.insert(index.positions_.end(), dp.positions.begin(), dp.positions.end());
    }
    index.term_offsets_.push_back(index.postings_.size());
  }

  for (const auto* d : sorted) {
    index.doc_ids_.push_back(d->doc_id);
    index.metadata_.push_back(d->metadata);
  }
  index.finalize();
  return index;
}

double bm25_idf(std::uint64_t doc_count, std::uint64_t doc_freq) {
  const auto n = static_cast<double>(doc_count);
  const auto df = static_cast<double>(doc_freq);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double bm25_tf_weight(double tf, double doc_len, double avg_doc_len, const Bm25Params& params) {
  if (tf <= 0.0) return 0.0;
  const double norm = avg_doc_len > 0.0 ? doc_len / avg_doc_len : 0.0;
  return tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * norm));
}

double bm25_term_score(const InvertedIndex& index, std::string_view term, std::string_view doc_id,
                       const Bm25Params& params) {
  const auto ord = index.find_doc(doc_id);
  if (!ord) throw LookupError(fmt::format("unknown doc_id '{}'", doc_id));
  const auto list = index.postings(term);
  const auto* p = find_posting(list, *ord);
  if (!p) return 0.0;
  return bm25_idf(index.doc_count(), list.size()) *
         bm25_tf_weight(p->tf, index.doc_len(*ord), index.avg_doc_len(), params);
}

std::vector<std::uint32_t> match_documents(const InvertedIndex& index, const BooleanQuery& query) {
  return evaluate(index, query);
}

SearchResult search(const InvertedIndex& index, const BooleanQuery& query,
                    const Bm25Params& params, std::size_t top_n) {
  params.validate();
  if (top_n == 0) throw ValidationError("top_n must be positive");
  const auto terms = query.distinct_terms();
  if (terms.empty()) throw EmptyQueryError();

  SearchResult result;
  result.query = to_string(query);
  result.index_fingerprint = index.fingerprint();

  const auto candidates = evaluate(index, query);
  struct TermStats {
    std::span<const Posting> postings;
    double idf;
  };
  std::vector<TermStats> stats;
  for (const auto& t : terms) {
    const auto list = index.postings(t);
    if (!list.empty()) stats.push_back({list, bm25_idf(index.doc_count(), list.size())});
  }

  std::vector<std::pair<double, std::uint32_t>> scored;
  scored.reserve(candidates.size());
  for (const auto ord : candidates) {
    double score = 0.0;
    for (const auto& s : stats) {
      if (const auto* p = find_posting(s.postings, ord)) {
        score += s.idf * bm25_tf_weight(p->tf, index.doc_len(ord), index.avg_doc_len(), params);
      }
    }
    scored.emplace_back(score, ord);
  }
  // Ordinals follow doc_id order, so the ordinal is the tie-breaker.
  auto better = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  const auto keep = std::min(top_n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
  scored.resize(keep);
  for (const auto& [score, ord] : scored) result.hits.push_back({index.doc_id(ord), score});
  return result;
}

}  // namespace surveyqe
