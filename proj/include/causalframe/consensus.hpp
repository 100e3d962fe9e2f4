#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalframe/corpus.hpp"
#include "causalframe/detail/jsonl.hpp"
#include "causalframe/error.hpp"
#include "causalframe/spandec.hpp"

namespace causalframe {

enum class Label { Causal, NotCausal };

inline std::string_view to_string(Label l) noexcept {
  return l == Label::Causal ? "CAUSAL" : "NOT_CAUSAL";
}

inline std::optional<Label> parse_label(std::string_view s) noexcept {
  if (s == "CAUSAL") return Label::Causal;
  if (s == "NOT_CAUSAL") return Label::NotCausal;
  return std::nullopt;
}

// Half-open character range.
struct CharRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end > start ? end - start : 0; }
  auto operator<=>(const CharRange&) const = default;
};

struct AnnotationRecord {
  std::string sentence_id;
  std::string annotator_id;
  Label label = Label::NotCausal;
  std::vector<CharRange> cause_spans;
  std::vector<CharRange> effect_spans;

  const std::vector<CharRange>& spans(SpanClass c) const noexcept {
    return c == SpanClass::Cause ? cause_spans : effect_spans;
  }
};

struct ConsensusResult {
  std::string sentence_id;
  Label gold_label = Label::NotCausal;
  std::vector<CharRange> gold_cause_spans;
  std::vector<CharRange> gold_effect_spans;
  double agreement = 0.0;
};

struct MajorityLabel {
  Label label;
  double agreement;  // fraction of annotators voting for `label`
};

// Strict majority wins; an exact tie resolves to NOT_CAUSAL.
inline MajorityLabel majority_label(std::span<const AnnotationRecord> annotations) {
  if (annotations.empty()) throw ComputationError("majority vote over zero annotations");
  std::size_t causal = 0;
  for (const auto& a : annotations) causal += a.label == Label::Causal ? 1 : 0;
  const std::size_t n = annotations.size();
  const Label label = 2 * causal > n ? Label::Causal : Label::NotCausal;
  const std::size_t votes = label == Label::Causal ? causal : n - causal;
  return {label, static_cast<double>(votes) / static_cast<double>(n)};
}

// Intersection over union in characters; 0 for disjoint or empty ranges.
inline double span_iou(CharRange a, CharRange b) noexcept {
  const std::size_t lo = std::max(a.start, b.start);
  const std::size_t hi = std::min(a.end, b.end);
  const std::size_t inter = hi > lo ? hi - lo : 0;
  const std::size_t uni = a.length() + b.length() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Overlap-based consensus for one span class. Spans are visited in (start,
// end) order and join the first cluster whose hull has IoU >= tau with them.
// A cluster backed by a strict majority of the participating annotators
// emits the characters covered by at least ceil(k/2) of its k member spans.
// Overlapping outputs are merged.
inline std::vector<CharRange> consensus_spans(std::span<const AnnotationRecord> participating,
                                              SpanClass span_class, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("IoU threshold must lie in (0, 1]");
  struct Member {
    CharRange range;
    std::string annotator;
  };
  std::vector<Member> members;
  std::set<std::string> annotators;
  for (const auto& a : participating) {
    annotators.insert(a.annotator_id);
    for (const auto& r : a.spans(span_class))
      if (r.length() > 0) members.push_back({r, a.annotator_id});
  }
  std::sort(members.begin(), members.end(), [](const Member& x, const Member& y) {
    return std::tie(x.range, x.annotator) < std::tie(y.range, y.annotator);
  });

  struct Cluster {
    CharRange hull;
    std::vector<const Member*> members;
  };
  std::vector<Cluster> clusters;
  for (const auto& m : members) {
    auto it = std::find_if(clusters.begin(), clusters.end(),
                           [&](const Cluster& c) { return span_iou(c.hull, m.range) >= tau; });
    if (it == clusters.end()) {
      clusters.push_back({m.range, {&m}});
    } else {
      it->hull = {std::min(it->hull.start, m.range.start), std::max(it->hull.end, m.range.end)};
      it->members.push_back(&m);
    }
  }

  const std::size_t participants = annotators.size();
  std::vector<CharRange> gold;
  for (const auto& c : clusters) {
    std::set<std::string_view> support;
    for (const auto* m : c.members) support.insert(m->annotator);
    if (2 * support.size() <= participants) continue;
    const std::size_t k = c.members.size();
    const std::size_t needed = (k + 1) / 2;
    std::vector<std::size_t> coverage(c.hull.length(), 0);
    for (const auto* m : c.members)
      for (std::size_t i = m->range.start; i < m->range.end; ++i) ++coverage[i - c.hull.start];
    constexpr auto kNone = static_cast<std::size_t>(-1);
    std::size_t run_start = kNone;
    for (std::size_t i = 0; i <= coverage.size(); ++i) {
      const bool in = i < coverage.size() && coverage[i] >= needed;
      if (in && run_start == kNone) run_start = i;
      if (!in && run_start != kNone) {
        gold.push_back({c.hull.start + run_start, c.hull.start + i});
        run_start = kNone;
      }
    }
  }

  std::sort(gold.begin(), gold.end());
  std::vector<CharRange> merged;
  for (const auto& r : gold) {
    if (!merged.empty() && r.start < merged.back().end)
      merged.back().end = std::max(merged.back().end, r.end);
    else
      merged.push_back(r);
  }
  return merged;
}

// Gold label by majority; gold spans from annotators who agree with it.
inline ConsensusResult build_consensus(std::span<const AnnotationRecord> annotations,
                                       double tau) {
  const auto vote = majority_label(annotations);
  ConsensusResult result;
  result.sentence_id = annotations.front().sentence_id;
  result.gold_label = vote.label;
  result.agreement = vote.agreement;
  if (vote.label == Label::Causal) {
    std::vector<AnnotationRecord> agreeing;
    for (const auto& a : annotations)
      if (a.label == Label::Causal) agreeing.push_back(a);
    result.gold_cause_spans = consensus_spans(agreeing, SpanClass::Cause, tau);
    result.gold_effect_spans = consensus_spans(agreeing, SpanClass::Effect, tau);
  }
  return result;
}

// Groups by sentence in first-appearance order.
inline std::vector<std::vector<AnnotationRecord>> group_by_sentence(
    std::span<const AnnotationRecord> annotations) {
  std::vector<std::vector<AnnotationRecord>> groups;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& a : annotations) {
    const auto [it, inserted] = index.emplace(a.sentence_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(a);
  }
  return groups;
}

// ---------------------------------------------------------------------------
// JSON schemas

inline nlohmann::json to_json(std::span<const CharRange> ranges) {
  auto out = nlohmann::json::array();
  for (const auto& r : ranges) out.push_back({{"start", r.start}, {"end", r.end}});
  return out;
}

inline nlohmann::json to_json(const ConsensusResult& r) {
  return {{"sentence_id", r.sentence_id},
          {"gold_label", std::string(to_string(r.gold_label))},
          {"gold_cause_spans", to_json(std::span<const CharRange>(r.gold_cause_spans))},
          {"gold_effect_spans", to_json(std::span<const CharRange>(r.gold_effect_spans))},
          {"agreement", detail::round_significant(r.agreement)}};
}

namespace detail {

inline std::vector<CharRange> ranges_from_json(const nlohmann::json& j, std::string_view key,
                                               std::size_t line,
                                               std::optional<std::size_t> text_length) {
  const auto& arr = require(j, key, line);
  if (!arr.is_array()) throw SchemaError("field '" + std::string(key) + "' must be an array", line);
  std::vector<CharRange> ranges;
  for (const auto& r : arr) {
    if (!r.is_object()) throw SchemaError("span must be an object", line);
    CharRange range{require_index(r, "start", line), require_index(r, "end", line)};
    if (range.start >= range.end)
      throw SchemaError("span [" + std::to_string(range.start) + "," + std::to_string(range.end) +
                            ") is empty or reversed",
                        line);
    if (text_length && range.end > *text_length)
      throw SchemaError("span end " + std::to_string(range.end) + " beyond sentence length " +
                            std::to_string(*text_length),
                        line);
    ranges.push_back(range);
  }
  auto sorted = ranges;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].start < sorted[i - 1].end)
      throw SchemaError("overlapping spans in '" + std::string(key) + "'", line);
  return ranges;
}

}  // namespace detail

inline AnnotationRecord annotation_from_json(const nlohmann::json& j, std::size_t line = 0,
                                             std::optional<std::size_t> text_length = {}) {
  using namespace detail;
  AnnotationRecord a;
  a.sentence_id = require_string(j, "sentence_id", line);
  a.annotator_id = require_string(j, "annotator_id", line);
  const auto label = parse_label(require_string(j, "label", line));
  if (!label) throw SchemaError("label must be CAUSAL or NOT_CAUSAL", line);
  a.label = *label;
  a.cause_spans = ranges_from_json(j, "cause_spans", line, text_length);
  a.effect_spans = ranges_from_json(j, "effect_spans", line, text_length);
  if (a.label == Label::NotCausal && (!a.cause_spans.empty() || !a.effect_spans.empty()))
    throw SchemaError("NOT_CAUSAL annotation carries spans", line);
  return a;
}

// `text_lengths` (sentence_id -> code-point length), when given, enables
// bounds checks on every range.
inline std::vector<AnnotationRecord> load_annotations(
    const std::filesystem::path& path,
    const std::map<std::string, std::size_t>* text_lengths = nullptr) {
  std::vector<AnnotationRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  detail::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    std::optional<std::size_t> len;
    if (text_lengths) {
      const auto id = detail::require_string(j, "sentence_id", line);
      const auto it = text_lengths->find(id);
      if (it == text_lengths->end()) throw SchemaError("unknown sentence_id '" + id + "'", line);
      len = it->second;
    }
    auto a = annotation_from_json(j, line, len);
    if (!seen.emplace(a.sentence_id, a.annotator_id).second)
      throw SchemaError("annotator '" + a.annotator_id + "' annotated '" + a.sentence_id +
                            "' twice",
                        line);
    out.push_back(std::move(a));
  });
  return out;
}

inline ConsensusResult consensus_from_json(const nlohmann::json& j, std::size_t line = 0) {
  using namespace detail;
  ConsensusResult r;
  r.sentence_id = require_string(j, "sentence_id", line);
  const auto label = parse_label(require_string(j, "gold_label", line));
  if (!label) throw SchemaError("gold_label must be CAUSAL or NOT_CAUSAL", line);
  r.gold_label = *label;
  r.gold_cause_spans = ranges_from_json(j, "gold_cause_spans", line, std::nullopt);
  r.gold_effect_spans = ranges_from_json(j, "gold_effect_spans", line, std::nullopt);
  if (const auto it = j.find("agreement"); it != j.end() && it->is_number())
    r.agreement = it->get<double>();
  return r;
}

inline std::vector<ConsensusResult> load_consensus(const std::filesystem::path& path) {
  std::vector<ConsensusResult> out;
  detail::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    out.push_back(consensus_from_json(j, line));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Stratified splitting

struct SplitRatios {
  double train = 0.70;
  double test = 0.15;
  double val = 0.15;

  void validate() const {
    if (train < 0 || test < 0 || val < 0) throw ConfigError("split ratios must be nonnegative");
    if (std::fabs(train + test + val - 1.0) > 1e-9)
      throw ConfigError("split ratios must sum to 1");
  }
};

// Indices into the input, each list in ascending order.
struct SplitAssignment {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::size_t> val;
};

namespace detail {

// Unbiased draw from [0, bound) from raw engine output.
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace detail

// Largest-remainder allocation of n items; ties go to the earlier set.
inline std::array<std::size_t, 3> allocate_counts(std::size_t n, const SplitRatios& ratios) {
  const std::array<double, 3> r{ratios.train, ratios.test, ratios.val};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double quota = static_cast<double>(n) * r[i];
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    frac[i] = quota - std::floor(quota);
    assigned += counts[i];
  }
  while (assigned > n) {  // only reachable through floating-point excess
    const auto i = static_cast<std::size_t>(
        std::distance(counts.begin(), std::max_element(counts.begin(), counts.end())));
    --counts[i];
    --assigned;
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3) {
    if (r[order[k]] <= 0.0) continue;
    ++counts[order[k]];
    ++assigned;
  }
  return counts;
}

// Stratified, seeded three-way split. `stratum_of` maps a record to its
// stratum label; strata are processed in label order.
template <typename T, typename StratumFn>
SplitAssignment split_dataset(std::span<const T> records, const SplitRatios& ratios,
                              StratumFn&& stratum_of, std::uint64_t seed) {
  ratios.validate();
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < records.size(); ++i)
    strata[std::invoke(stratum_of, records[i])].push_back(i);

  std::mt19937_64 rng(seed);
  SplitAssignment out;
  for (auto& [_, idx] : strata) {
    for (std::size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[detail::bounded_draw(rng, i)]);
    const auto counts = allocate_counts(idx.size(), ratios);
    auto it = idx.begin();
    out.train.insert(out.train.end(), it, it + static_cast<std::ptrdiff_t>(counts[0]));
    it += static_cast<std::ptrdiff_t>(counts[0]);
    out.test.insert(out.test.end(), it, it + static_cast<std::ptrdiff_t>(counts[1]));
    it += static_cast<std::ptrdiff_t>(counts[1]);
    out.val.insert(out.val.end(), it, idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  std::sort(out.val.begin(), out.val.end());
  return out;
}

// Stratum label built from the named GroupKey fields ("region", "source").
inline std::string stratum_label(const GroupKey& g, std::span<const std::string> fields) {
  std::string label;
  for (const auto& f : fields) {
    if (!label.empty()) label += '|';
    if (f == "region")
      label += g.region;
    else if (f == "source")
      label += g.source;
    else
      throw ConfigError("unknown stratum field '" + f + "' (expected region or source)");
  }
  return label;
}

}  // namespace causalframe
