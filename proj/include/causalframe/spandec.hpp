#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalframe/corpus.hpp"
#include "causalframe/detail/jsonl.hpp"
#include "causalframe/detail/numeric.hpp"
#include "causalframe/detail/text.hpp"
#include "causalframe/error.hpp"

namespace causalframe {

enum class Tag { O, BeginCause, InsideCause, BeginEffect, InsideEffect };
enum class SpanClass { Cause, Effect };
enum class DecodeMode { Strict, Lenient };

inline std::string_view to_string(Tag t) noexcept {
  switch (t) {
    case Tag::O: return "O";
    case Tag::BeginCause: return "B-C";
    case Tag::InsideCause: return "I-C";
    case Tag::BeginEffect: return "B-E";
    case Tag::InsideEffect: return "I-E";
  }
  return "O";
}

inline std::optional<Tag> parse_tag(std::string_view s) noexcept {
  if (s == "O") return Tag::O;
  if (s == "B-C") return Tag::BeginCause;
  if (s == "I-C") return Tag::InsideCause;
  if (s == "B-E") return Tag::BeginEffect;
  if (s == "I-E") return Tag::InsideEffect;
  return std::nullopt;
}

inline std::string_view to_string(SpanClass c) noexcept {
  return c == SpanClass::Cause ? "CAUSE" : "EFFECT";
}

inline std::optional<SpanClass> parse_span_class(std::string_view s) noexcept {
  if (s == "CAUSE") return SpanClass::Cause;
  if (s == "EFFECT") return SpanClass::Effect;
  return std::nullopt;
}

inline std::optional<DecodeMode> parse_decode_mode(std::string_view s) noexcept {
  if (s == "strict") return DecodeMode::Strict;
  if (s == "lenient") return DecodeMode::Lenient;
  return std::nullopt;
}

// Offsets are code-point offsets into the sentence, half-open.
struct SubtokenPrediction {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
  Tag tag = Tag::O;
  double tag_prob = 0.0;  // probability of the predicted tag
};

struct SentencePrediction {
  std::string sentence_id;
  std::string text;
  GroupKey group;
  double seq_prob_causal = 0.0;
  std::vector<SubtokenPrediction> subtokens;
};

// Subtoken index range [first, last) plus its character extent.
struct DecodedSpan {
  SpanClass span_class = SpanClass::Cause;
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::optional<double> span_prob;

  std::size_t size() const noexcept { return last - first; }
};

struct WordToken {
  std::string surface;
  double prob = 0.0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
};

struct ClaimSide {
  double span_prob = 0.0;
  std::vector<WordToken> tokens;
};

struct CauseEffectPair {
  std::string sentence_id;
  GroupKey group;
  double seq_prob_causal = 0.0;
  std::size_t pair_index = 0;
  bool partial = false;
  std::optional<ClaimSide> cause;
  std::optional<ClaimSide> effect;

  const std::optional<ClaimSide>& side(SpanClass c) const noexcept {
    return c == SpanClass::Cause ? cause : effect;
  }
};

namespace detail {

inline std::optional<SpanClass> begins(Tag t) noexcept {
  if (t == Tag::BeginCause) return SpanClass::Cause;
  if (t == Tag::BeginEffect) return SpanClass::Effect;
  return std::nullopt;
}

inline std::optional<SpanClass> continues(Tag t) noexcept {
  if (t == Tag::InsideCause) return SpanClass::Cause;
  if (t == Tag::InsideEffect) return SpanClass::Effect;
  return std::nullopt;
}

}  // namespace detail

// IOB2 decoding over a tag sequence. Spans are maximal runs of B-X I-X*; O
// and any B- close the open span. In lenient mode an I-X with no open X span
// opens one; in strict mode it is a DecodeError.
inline std::vector<DecodedSpan> decode_tags(std::span<const Tag> tags, DecodeMode mode) {
  std::vector<DecodedSpan> spans;
  std::optional<DecodedSpan> open;
  auto start = [&](SpanClass cls, std::size_t i) {
    open.emplace();
    open->span_class = cls;
    open->first = i;
    open->last = i + 1;
  };
  auto close = [&] {
    if (open) spans.push_back(*open);
    open.reset();
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag t = tags[i];
    if (t == Tag::O) {
      close();
    } else if (const auto b = detail::begins(t)) {
      close();
      start(*b, i);
    } else {
      const auto cls = *detail::continues(t);
      if (open && open->span_class == cls) {
        open->last = i + 1;
        continue;
      }
      if (mode == DecodeMode::Strict)
        throw DecodeError("dangling " + std::string(to_string(t)) + " at subtoken index " +
                              std::to_string(i),
                          i);
      close();
      start(cls, i);
    }
  }
  close();
  return spans;
}

// decode_tags over predictions, filling character extents.
inline std::vector<DecodedSpan> decode_iob2(std::span<const SubtokenPrediction> subtokens,
                                            DecodeMode mode) {
  std::vector<Tag> tags;
  tags.reserve(subtokens.size());
  for (const auto& s : subtokens) tags.push_back(s.tag);
  auto spans = decode_tags(tags, mode);
  for (auto& span : spans) {
    span.char_start = subtokens[span.first].start;
    span.char_end = subtokens[span.last - 1].end;
  }
  return spans;
}

// Mean of the predicted-tag probabilities, summed in sorted order.
// Bit-identical under any permutation.
inline double mean_probability(std::vector<double> probs) {
  if (probs.empty()) throw ComputationError("span probability of an empty span");
  std::sort(probs.begin(), probs.end());
  detail::CompensatedSum sum;
  for (double p : probs) sum += p;
  const double mean = sum.value() / static_cast<double>(probs.size());
  return std::clamp(mean, probs.front(), probs.back());
}

inline double span_probability(const DecodedSpan& span,
                               std::span<const SubtokenPrediction> subtokens) {
  if (span.size() == 0) throw ComputationError("span probability of an empty span");
  if (span.last > subtokens.size()) throw ComputationError("span index range out of bounds");
  std::vector<double> probs;
  probs.reserve(span.size());
  for (std::size_t i = span.first; i < span.last; ++i) probs.push_back(subtokens[i].tag_prob);
  return mean_probability(std::move(probs));
}

// Word-reconstruction settings. Prefixes and correction keys are stored
// lowercase since they apply after lowercasing.
struct NormalizationConfig {
  std::vector<std::string> prefixes;
  std::map<std::string, std::string> corrections;
  std::string continuation_marker = "##";

  static NormalizationConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("normalization config must be a JSON object");
    NormalizationConfig cfg;
    for (const auto& [key, value] : j.items()) {
      if (key == "prefixes") {
        if (!value.is_array()) throw ConfigError("'prefixes' must be an array");
        for (const auto& p : value) {
          if (!p.is_string() || detail::trim(p.get<std::string>()).empty())
            throw ConfigError("'prefixes' entries must be non-empty strings");
          cfg.prefixes.push_back(detail::ascii_lower(detail::trim(p.get<std::string>())));
        }
      } else if (key == "corrections") {
        if (!value.is_object()) throw ConfigError("'corrections' must be an object");
        for (const auto& [from, to] : value.items()) {
          if (!to.is_string() || to.get<std::string>().empty())
            throw ConfigError("correction for '" + from + "' must be a non-empty string");
          cfg.corrections[detail::ascii_lower(from)] = to.get<std::string>();
        }
      } else if (key == "continuation_marker") {
        if (!value.is_string()) throw ConfigError("'continuation_marker' must be a string");
        cfg.continuation_marker = value.get<std::string>();
      } else {
        throw ConfigError("unknown normalization config key '" + key + "'");
      }
    }
    return cfg;
  }

  static NormalizationConfig load(const std::filesystem::path& path) {
    return from_json(detail::parse_json_file(path));
  }

  bool is_prefix(std::string_view w) const {
    return std::find(prefixes.begin(), prefixes.end(), w) != prefixes.end();
  }
};

namespace detail {

struct Word {
  std::string text;
  std::size_t start;
  std::size_t end;
};

inline bool is_joiner_only(std::string_view s) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto d = utf8::decode(s, pos);
    const auto cp = d.codepoint;
    // hyphen-minus, apostrophe, hyphen, non-breaking hyphen, right single quote
    if (cp != '-' && cp != '\'' && cp != 0x2010U && cp != 0x2011U && cp != 0x2019U) return false;
    pos += d.length;
  }
  return true;
}

inline bool has_word_char(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto d = utf8::decode(s, pos);
    if (is_word_codepoint(d.codepoint)) return true;
    pos += d.length;
  }
  return false;
}

// Step (3): glue hyphen/apostrophe pieces onto the words they touch in the
// original text; unattached joiners and punctuation-only pieces are dropped.
inline std::vector<Word> restore_joiners(std::vector<Word> words) {
  std::vector<Word> out;
  bool glue_next = false;
  for (auto& w : words) {
    const bool joiner = is_joiner_only(w.text);
    const bool touches_prev = !out.empty() && out.back().end == w.start;
    if (joiner) {
      if (touches_prev) {
        out.back().text += w.text;
        out.back().end = w.end;
      } else {
        out.push_back(std::move(w));
      }
      glue_next = true;
      continue;
    }
    if (glue_next && touches_prev) {
      out.back().text += w.text;
      out.back().end = w.end;
    } else {
      out.push_back(std::move(w));
    }
    glue_next = false;
  }
  std::erase_if(out, [](const Word& w) { return !has_word_char(w.text); });
  return out;
}

}  // namespace detail

// Maps a decoded span back to normalized word tokens. Fixed pipeline:
// lowercase, whitespace/padding repair with continuation merge, joiner
// restoration, prefix merge, correction dictionary. Every token carries the
// span probability.
inline std::vector<WordToken> reconstruct_words(const DecodedSpan& span,
                                                std::span<const SubtokenPrediction> subtokens,
                                                std::string_view sentence_text,
                                                const NormalizationConfig& norm) {
  if (span.last > subtokens.size() || span.size() == 0)
    throw SchemaError("span index range out of bounds");
  const double prob = span.span_prob ? *span.span_prob : span_probability(span, subtokens);
  const auto offsets = detail::codepoint_offsets(sentence_text);
  const std::size_t n_chars = offsets.size() - 1;

  std::vector<detail::Word> words;
  for (std::size_t i = span.first; i < span.last; ++i) {
    const auto& st = subtokens[i];
    if (st.start >= st.end || st.end > n_chars)
      throw SchemaError("subtoken " + std::to_string(i) + " offsets [" + std::to_string(st.start) +
                        "," + std::to_string(st.end) + ") out of range for sentence of length " +
                        std::to_string(n_chars));
    const auto raw =
        sentence_text.substr(offsets[st.start], offsets[st.end] - offsets[st.start]);
    // (1) lowercase
    const auto lowered = detail::ascii_lower(raw);
    // (2) padding repair; a piece with inner whitespace becomes several words
    const auto pieces = detail::split_on(detail::collapse_whitespace(lowered), ' ');
    const bool continuation = !norm.continuation_marker.empty() &&
                              std::string_view(st.text).starts_with(norm.continuation_marker);
    bool first_piece = true;
    for (const auto& piece : pieces) {
      if (piece.empty()) continue;
      if (first_piece && continuation && !words.empty()) {
        words.back().text += piece;
        words.back().end = st.end;
      } else {
        words.push_back({piece, st.start, st.end});
      }
      first_piece = false;
    }
  }

  // (3) hyphens and apostrophes
  words = detail::restore_joiners(std::move(words));

  // (4) prefix merge
  std::vector<detail::Word> merged;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (norm.is_prefix(words[i].text) && i + 1 < words.size()) {
      merged.push_back({words[i].text + words[i + 1].text, words[i].start, words[i + 1].end});
      ++i;
    } else {
      merged.push_back(std::move(words[i]));
    }
  }

  // (5) corrections
  std::vector<WordToken> tokens;
  tokens.reserve(merged.size());
  for (auto& w : merged) {
    if (const auto it = norm.corrections.find(w.text); it != norm.corrections.end())
      w.text = it->second;
    tokens.push_back({std::move(w.text), prob, w.start, w.end});
  }
  return tokens;
}

struct ClaimOptions {
  DecodeMode mode = DecodeMode::Lenient;
  // Sentences below this sequence probability yield no claims.
  std::optional<double> min_seq_prob;
};

// Decodes spans and pairs every cause with every effect, ordered by
// (cause start, effect start). With only one side present each span becomes
// a partial pair. Spans that normalize to no words are discarded.
inline std::vector<CauseEffectPair> build_claims(const SentencePrediction& pred,
                                                 const ClaimOptions& options,
                                                 const NormalizationConfig& norm) {
  auto spans = decode_iob2(pred.subtokens, options.mode);
  std::vector<CauseEffectPair> pairs;
  if (options.min_seq_prob && pred.seq_prob_causal < *options.min_seq_prob) return pairs;

  struct Side {
    std::size_t char_start;
    ClaimSide side;
  };
  std::vector<Side> causes, effects;
  for (auto& span : spans) {
    span.span_prob = span_probability(span, pred.subtokens);
    auto tokens = reconstruct_words(span, pred.subtokens, pred.text, norm);
    if (tokens.empty()) continue;
    auto& target = span.span_class == SpanClass::Cause ? causes : effects;
    target.push_back({span.char_start, ClaimSide{*span.span_prob, std::move(tokens)}});
  }
  auto by_start = [](const Side& a, const Side& b) { return a.char_start < b.char_start; };
  std::stable_sort(causes.begin(), causes.end(), by_start);
  std::stable_sort(effects.begin(), effects.end(), by_start);

  auto make_pair = [&](const Side* c, const Side* e) {
    CauseEffectPair p;
    p.sentence_id = pred.sentence_id;
    p.group = pred.group;
    p.seq_prob_causal = pred.seq_prob_causal;
    p.pair_index = pairs.size();
    p.partial = c == nullptr || e == nullptr;
    if (c) p.cause = c->side;
    if (e) p.effect = e->side;
    pairs.push_back(std::move(p));
  };
  if (!causes.empty() && !effects.empty()) {
    for (const auto& c : causes)
      for (const auto& e : effects) make_pair(&c, &e);
  } else {
    for (const auto& c : causes) make_pair(&c, nullptr);
    for (const auto& e : effects) make_pair(nullptr, &e);
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// JSON schemas

inline nlohmann::json to_json(const GroupKey& g) {
  return {{"region", g.region}, {"source", g.source}};
}

inline GroupKey group_from_json(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw SchemaError("field 'group' must be an object", line);
  return {detail::require_string(j, "region", line), detail::require_string(j, "source", line)};
}

inline SentencePrediction sentence_prediction_from_json(const nlohmann::json& j,
                                                        std::size_t line = 0) {
  using namespace detail;
  SentencePrediction p;
  p.sentence_id = require_string(j, "sentence_id", line);
  if (p.sentence_id.empty()) throw SchemaError("empty sentence_id", line);
  p.text = require_string(j, "text", line);
  p.group = group_from_json(require(j, "group", line), line);
  p.seq_prob_causal = require_number(j, "seq_prob_causal", line);
  if (!in_unit_interval(p.seq_prob_causal))
    throw SchemaError("seq_prob_causal outside [0,1]", line);
  const auto& subs = require(j, "subtokens", line);
  if (!subs.is_array()) throw SchemaError("field 'subtokens' must be an array", line);
  const std::size_t n_chars = codepoint_length(p.text);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const auto& s = subs[i];
    const auto where = "subtoken " + std::to_string(i) + ": ";
    if (!s.is_object()) throw SchemaError(where + "expected an object", line);
    SubtokenPrediction st;
    st.text = require_string(s, "text", line);
    st.start = require_index(s, "start", line);
    st.end = require_index(s, "end", line);
    const auto tag = parse_tag(require_string(s, "tag", line));
    if (!tag) throw SchemaError(where + "unknown tag", line);
    st.tag = *tag;
    st.tag_prob = require_number(s, "tag_prob", line);
    if (!in_unit_interval(st.tag_prob)) throw SchemaError(where + "tag_prob outside [0,1]", line);
    if (st.start >= st.end || st.end > n_chars)
      throw SchemaError(where + "offsets out of range", line);
    if (!p.subtokens.empty() && st.start < p.subtokens.back().end)
      throw SchemaError(where + "subtokens overlap or are unsorted", line);
    p.subtokens.push_back(std::move(st));
  }
  return p;
}

inline nlohmann::json to_json(const SentencePrediction& p) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : p.subtokens)
    subs.push_back({{"text", s.text},
                    {"start", s.start},
                    {"end", s.end},
                    {"tag", std::string(to_string(s.tag))},
                    {"tag_prob", detail::round_significant(s.tag_prob)}});
  return {{"sentence_id", p.sentence_id},
          {"text", p.text},
          {"group", to_json(p.group)},
          {"seq_prob_causal", detail::round_significant(p.seq_prob_causal)},
          {"subtokens", std::move(subs)}};
}

inline std::vector<SentencePrediction> load_predictions(const std::filesystem::path& path) {
  std::vector<SentencePrediction> out;
  std::map<std::string, std::size_t> seen;
  detail::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    auto p = sentence_prediction_from_json(j, line);
    if (const auto [it, ok] = seen.emplace(p.sentence_id, line); !ok)
      throw SchemaError("duplicate sentence_id '" + p.sentence_id + "' (first on line " +
                            std::to_string(it->second) + ")",
                        line);
    out.push_back(std::move(p));
  });
  return out;
}

inline nlohmann::json to_json(const ClaimSide& side) {
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto& t : side.tokens)
    tokens.push_back({{"surface", t.surface},
                      {"prob", detail::round_significant(t.prob)},
                      {"char_start", t.char_start},
                      {"char_end", t.char_end}});
  return {{"span_prob", detail::round_significant(side.span_prob)}, {"tokens", std::move(tokens)}};
}

inline nlohmann::json to_json(const CauseEffectPair& p) {
  nlohmann::json j;
  j["sentence_id"] = p.sentence_id;
  j["group"] = to_json(p.group);
  j["seq_prob_causal"] = detail::round_significant(p.seq_prob_causal);
  j["pair_index"] = p.pair_index;
  j["partial"] = p.partial;
  j["cause"] = p.cause ? to_json(*p.cause) : nlohmann::json(nullptr);
  j["effect"] = p.effect ? to_json(*p.effect) : nlohmann::json(nullptr);
  return j;
}

inline std::optional<ClaimSide> claim_side_from_json(const nlohmann::json& j, std::string_view key,
                                                     std::size_t line) {
  using namespace detail;
  const auto& v = require(j, key, line);
  if (v.is_null()) return std::nullopt;
  if (!v.is_object()) throw SchemaError("field '" + std::string(key) + "' must be an object", line);
  ClaimSide side;
  side.span_prob = require_number(v, "span_prob", line);
  if (!in_unit_interval(side.span_prob)) throw SchemaError("span_prob outside [0,1]", line);
  const auto& tokens = require(v, "tokens", line);
  if (!tokens.is_array()) throw SchemaError("field 'tokens' must be an array", line);
  for (const auto& t : tokens) {
    if (!t.is_object()) throw SchemaError("token must be an object", line);
    WordToken w;
    w.surface = require_string(t, "surface", line);
    w.prob = require_number(t, "prob", line);
    if (!in_unit_interval(w.prob)) throw SchemaError("token prob outside [0,1]", line);
    w.char_start = require_index(t, "char_start", line);
    w.char_end = require_index(t, "char_end", line);
    side.tokens.push_back(std::move(w));
  }
  return side;
}

inline CauseEffectPair cause_effect_pair_from_json(const nlohmann::json& j, std::size_t line = 0) {
  using namespace detail;
  CauseEffectPair p;
  p.sentence_id = require_string(j, "sentence_id", line);
  p.group = group_from_json(require(j, "group", line), line);
  p.seq_prob_causal = require_number(j, "seq_prob_causal", line);
  if (!in_unit_interval(p.seq_prob_causal))
    throw SchemaError("seq_prob_causal outside [0,1]", line);
  p.pair_index = require_index(j, "pair_index", line);
  const auto& partial = require(j, "partial", line);
  if (!partial.is_boolean()) throw SchemaError("field 'partial' must be a boolean", line);
  p.partial = partial.get<bool>();
  p.cause = claim_side_from_json(j, "cause", line);
  p.effect = claim_side_from_json(j, "effect", line);
  if (!p.cause && !p.effect) throw SchemaError("claim has neither cause nor effect", line);
  if (p.partial == (p.cause && p.effect))
    throw SchemaError("'partial' flag inconsistent with present sides", line);
  return p;
}

inline std::vector<CauseEffectPair> load_claims(const std::filesystem::path& path) {
  std::vector<CauseEffectPair> out;
  detail::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    out.push_back(cause_effect_pair_from_json(j, line));
  });
  return out;
}

}  // namespace causalframe
