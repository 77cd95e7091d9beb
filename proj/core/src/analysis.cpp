#include "surveyqe/analysis.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <array>
#include <fstream>
#include <nlohmann/json.hpp>

#include <fmt/format.h>

#include "surveyqe/errors.hpp"

namespace surveyqe {
namespace {

bool is_token_char(UChar32 c) {
  const auto category = u_charType(c);
  switch (category) {
    case U_UPPERCASE_LETTER:
    case U_LOWERCASE_LETTER:
    case U_TITLECASE_LETTER:
    case U_MODIFIER_LETTER:
    case U_OTHER_LETTER:
    case U_DECIMAL_DIGIT_NUMBER:
      return true;
    default:
      return false;
  }
}

void append_utf8(std::string& out, UChar32 c) {
  std::array<char, U8_MAX_LENGTH> buf{};
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf.data()), len, U8_MAX_LENGTH, c, error);
  if (!error) out.append(buf.data(), static_cast<std::size_t>(len));
}

std::string lowercase_utf8(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c = 0;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) continue;
    append_utf8(out, u_tolower(c));
  }
  return out;
}

std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char ch : s) {
    if ((ch & 0xC0) != 0x80) ++n;
  }
  return n;
}

struct SuffixRule {
  std::string_view suffix;
  std::string_view replacement;
};

// Longest suffixes first; the first rule that leaves a stem of at least
// three code points wins.
constexpr std::array<SuffixRule, 10> kSuffixRules{{
    {"ungen", ""},
    {"ness", ""},
    {"ings", ""},
    {"ies", "y"},
    {"ung", ""},
    {"ing", ""},
    {"ed", ""},
    {"es", ""},
    {"en", ""},
    {"s", ""},
}};

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view to_string(Stemmer stemmer) {
  switch (stemmer) {
    case Stemmer::kNone:
      return "none";
    case Stemmer::kLightSuffix:
      return "light-suffix";
  }
  return "none";
}

Stemmer parse_stemmer(std::string_view name) {
  if (name == "none") return Stemmer::kNone;
  if (name == "light-suffix") return Stemmer::kLightSuffix;
  throw ValidationError(fmt::format("unknown stemmer '{}'", name));
}

std::string light_suffix_stem(std::string_view term) {
  for (const auto& rule : kSuffixRules) {
    if (term.size() <= rule.suffix.size() || !term.ends_with(rule.suffix)) continue;
    const auto stem = term.substr(0, term.size() - rule.suffix.size());
    if (code_point_count(stem) < 3) continue;
    std::string out(stem);
    out += rule.replacement;
    return out;
  }
  return std::string(term);
}

TermSequence analyze(std::string_view text, const AnalyzerConfig& config) {
  TermSequence result;
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());

  std::string token;
  std::uint32_t ordinal = 0;
  auto flush = [&] {
    if (token.empty()) return;
    if (!config.stopwords.contains(token)) {
      result.terms.push_back(config.stemmer == Stemmer::kLightSuffix
                                 ? light_suffix_stem(token)
                                 : token);
      result.positions.push_back(ordinal);
    }
    ++ordinal;
    token.clear();
  };

  int32_t i = 0;
  while (i < length) {
    UChar32 c = 0;
    U8_NEXT(bytes, i, length, c);
    if (c >= 0 && is_token_char(c)) {
      append_utf8(token, config.lowercase ? u_tolower(c) : c);
    } else {
      flush();
    }
  }
  flush();
  return result;
}

std::string normalize_label(std::string_view text, const AnalyzerConfig& config) {
  const auto seq = analyze(text, config);
  std::string out;
  for (const auto& term : seq.terms) {
    if (!out.empty()) out += ' ';
    out += term;
  }
  return out;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open stopword file '{}'", path.string()));
  std::set<std::string> words;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    if (entry.find_first_of(" \t\f\v") != std::string_view::npos) {
      throw ValidationError(fmt::format("{}:{}: stopword entry contains whitespace: '{}'",
                                        path.string(), line_no, entry));
    }
    words.insert(lowercase_utf8(entry));
  }
  if (in.bad()) throw IoError(fmt::format("error reading '{}'", path.string()));
  return words;
}

std::string AnalyzerConfig::to_json() const {
  nlohmann::ordered_json j;
  j["lowercase"] = lowercase;
  j["stemmer"] = std::string(surveyqe::to_string(stemmer));
  j["token_pattern"] = std::string(kTokenPattern);
  j["stopwords"] = std::vector<std::string>(stopwords.begin(), stopwords.end());
  return j.dump();
}

namespace {

AnalyzerConfig from_json_object(const nlohmann::json& j,
                                const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ValidationError("analyzer config must be a JSON object");
  AnalyzerConfig config;
  try {
    if (j.contains("lowercase")) config.lowercase = j.at("lowercase").get<bool>();
    if (j.contains("stemmer")) config.stemmer = parse_stemmer(j.at("stemmer").get<std::string>());
    if (j.contains("token_pattern") &&
        j.at("token_pattern").get<std::string>() != AnalyzerConfig::kTokenPattern) {
      throw ValidationError(fmt::format("unsupported token_pattern '{}'",
                                        j.at("token_pattern").get<std::string>()));
    }
    if (j.contains("stopwords")) {
      for (const auto& word : j.at("stopwords")) {
        auto w = word.get<std::string>();
        config.stopwords.insert(config.lowercase ? lowercase_utf8(w) : w);
      }
    }
    if (j.contains("stopwords_file")) {
      std::filesystem::path file = j.at("stopwords_file").get<std::string>();
      if (file.is_relative()) file = base_dir / file;
      config.stopwords.merge(load_stopwords(file));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("invalid analyzer config: {}", e.what()));
  }
  return config;
}

}  // namespace

AnalyzerConfig AnalyzerConfig::from_json(std::string_view json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("invalid analyzer config JSON: {}", e.what()));
  }
  return from_json_object(j, std::filesystem::current_path());
}

AnalyzerConfig AnalyzerConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open analyzer config '{}'", path.string()));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
  return from_json_object(j, path.parent_path());
}

}  // namespace surveyqe
