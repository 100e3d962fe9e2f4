#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalframe/detail/jsonl.hpp"
#include "causalframe/detail/text.hpp"
#include "causalframe/error.hpp"

namespace causalframe {

// Grouping key for every per-group statistic: region (conflict) x source (outlet).
struct GroupKey {
  std::string region;
  std::string source;

  auto operator<=>(const GroupKey&) const = default;
};

struct CorpusRecord {
  std::string sentence_id;
  std::string text;
  std::string region;
  std::string source;
  std::optional<std::string> published_at;

  GroupKey group() const { return {region, source}; }
};

inline nlohmann::json to_json(const CorpusRecord& r) {
  nlohmann::json j;
  j["sentence_id"] = r.sentence_id;
  j["text"] = r.text;
  j["region"] = r.region;
  j["source"] = r.source;
  if (r.published_at) j["published_at"] = *r.published_at;
  return j;
}

inline CorpusRecord corpus_record_from_json(const nlohmann::json& j, std::size_t line = 0) {
  using namespace detail;
  CorpusRecord r;
  r.sentence_id = require_string(j, "sentence_id", line);
  if (r.sentence_id.empty()) throw SchemaError("empty sentence_id", line);
  r.text = require_string(j, "text", line);
  if (trim(r.text).empty()) throw SchemaError("empty text for '" + r.sentence_id + "'", line);
  r.region = require_string(j, "region", line);
  r.source = require_string(j, "source", line);
  if (r.region.empty() || r.source.empty()) throw SchemaError("empty region or source", line);
  if (const auto it = j.find("published_at"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("field 'published_at' must be a string", line);
    static const std::regex iso_date(R"(\d{4}-\d{2}-\d{2}([T ].*)?)");
    auto value = it->get<std::string>();
    if (!std::regex_match(value, iso_date))
      throw SchemaError("published_at is not an ISO-8601 date: " + value, line);
    r.published_at = std::move(value);
  }
  return r;
}

// Reads a JSONL corpus. When `declared_regions` is given, a record whose
// region is not in it is rejected.
inline std::vector<CorpusRecord> load_corpus(
    std::istream& in, const std::set<std::string>* declared_regions = nullptr) {
  std::vector<CorpusRecord> records;
  std::unordered_map<std::string, std::size_t> first_seen;
  detail::for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t line) {
    auto r = corpus_record_from_json(j, line);
    if (declared_regions && !declared_regions->contains(r.region))
      throw SchemaError("unknown region '" + r.region + "'", line);
    const auto [it, inserted] = first_seen.emplace(r.sentence_id, line);
    if (!inserted)
      throw SchemaError("duplicate sentence_id '" + r.sentence_id + "' on lines " +
                            std::to_string(it->second) + " and " + std::to_string(line),
                        line);
    records.push_back(std::move(r));
  });
  return records;
}

inline std::vector<CorpusRecord> load_corpus(
    const std::filesystem::path& path, const std::set<std::string>* declared_regions = nullptr) {
  auto in = detail::open_input(path);
  return load_corpus(in, declared_regions);
}

// One clause of keywords per region. A keyword may span several words; it
// matches a contiguous word sequence of the text.
class FilterDictionary {
 public:
  struct Keyword {
    std::string text;
    std::vector<std::string> words;
  };

  FilterDictionary() = default;

  static FilterDictionary from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.empty())
      throw ConfigError("filter dictionary must be a non-empty object of region -> keywords");
    FilterDictionary dict;
    for (const auto& [region, keywords] : j.items()) {
      if (!keywords.is_array() || keywords.empty())
        throw ConfigError("filter dictionary clause for region '" + region + "' is empty");
      auto& clause = dict.clauses_[region];
      for (const auto& k : keywords) {
        if (!k.is_string()) throw ConfigError("keywords for '" + region + "' must be strings");
        auto text = detail::collapse_whitespace(k.get<std::string>());
        if (text.empty()) throw ConfigError("empty keyword in clause '" + region + "'");
        if (detail::has_ascii_upper(text))
          throw ConfigError("keyword '" + text + "' must be lowercase");
        auto words = detail::split_words(text);
        if (words.empty()) throw ConfigError("keyword '" + text + "' contains no word characters");
        clause.push_back({std::move(text), std::move(words)});
      }
    }
    return dict;
  }

  static FilterDictionary load(const std::filesystem::path& path) {
    return from_json(detail::parse_json_file(path));
  }

  std::set<std::string> regions() const {
    std::set<std::string> out;
    for (const auto& [region, _] : clauses_) out.insert(region);
    return out;
  }

  const std::vector<Keyword>* clause(const std::string& region) const {
    const auto it = clauses_.find(region);
    return it == clauses_.end() ? nullptr : &it->second;
  }

  // True if any keyword of the region's clause occurs in `text`.
  bool matches(const std::string& region, std::string_view text) const {
    const auto* keywords = clause(region);
    if (keywords == nullptr) return false;
    const auto words = detail::split_words(text);
    for (const auto& k : *keywords) {
      if (k.words.size() > words.size()) continue;
      for (std::size_t i = 0; i + k.words.size() <= words.size(); ++i) {
        bool hit = true;
        for (std::size_t m = 0; m < k.words.size() && hit; ++m) hit = words[i + m] == k.words[m];
        if (hit) return true;
      }
    }
    return false;
  }

 private:
  std::map<std::string, std::vector<Keyword>> clauses_;
};

// Keeps records whose text matches their region's clause; order preserved.
// Records whose region has no clause are dropped.
inline std::vector<CorpusRecord> filter_by_dictionary(std::span<const CorpusRecord> records,
                                                      const FilterDictionary& dict) {
  std::vector<CorpusRecord> kept;
  for (const auto& r : records)
    if (dict.matches(r.region, r.text)) kept.push_back(r);
  return kept;
}

struct CorpusStatRow {
  std::string region;
  std::string source;
  std::size_t count = 0;
  double proportion = 0.0;  // within region
};

// Counts per (region, source), sorted by region then source.
inline std::vector<CorpusStatRow> corpus_stats(std::span<const CorpusRecord> records) {
  std::map<GroupKey, std::size_t> counts;
  std::map<std::string, std::size_t> region_totals;
  for (const auto& r : records) {
    ++counts[r.group()];
    ++region_totals[r.region];
  }
  std::vector<CorpusStatRow> rows;
  rows.reserve(counts.size());
  for (const auto& [key, n] : counts) {
    rows.push_back({key.region, key.source, n,
                    static_cast<double>(n) / static_cast<double>(region_totals[key.region])});
  }
  return rows;
}

}  // namespace causalframe
