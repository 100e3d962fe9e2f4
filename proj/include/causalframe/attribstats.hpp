#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalframe/corpus.hpp"
#include "causalframe/detail/jsonl.hpp"
#include "causalframe/detail/numeric.hpp"
#include "causalframe/detail/text.hpp"
#include "causalframe/error.hpp"
#include "causalframe/normal.hpp"
#include "causalframe/spandec.hpp"

namespace causalframe {

// Surface -> canonical token (e.g. russians -> russia). Canonical tokens must
// be fixed points of the map.
class TokenAggregationMap {
 public:
  TokenAggregationMap() = default;

  explicit TokenAggregationMap(std::map<std::string, std::string> entries)
      : entries_(std::move(entries)) {
    for (const auto& [surface, canonical] : entries_) {
      if (surface.empty() || canonical.empty())
        throw ConfigError("aggregation map entries must be non-empty strings");
      const auto it = entries_.find(canonical);
      if (it != entries_.end() && it->second != canonical)
        throw ConfigError("canonical token '" + canonical + "' is itself mapped to '" +
                          it->second + "'");
    }
  }

  static TokenAggregationMap from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("aggregation map must be a JSON object");
    std::map<std::string, std::string> entries;
    for (const auto& [surface, canonical] : j.items()) {
      if (!canonical.is_string())
        throw ConfigError("aggregation target for '" + surface + "' must be a string");
      entries.emplace(surface, canonical.get<std::string>());
    }
    return TokenAggregationMap(std::move(entries));
  }

  static TokenAggregationMap load(const std::filesystem::path& path) {
    return from_json(detail::parse_json_file(path));
  }

  std::string canonical(std::string_view token) const {
    const auto it = entries_.find(std::string(token));
    return it == entries_.end() ? std::string(token) : it->second;
  }

  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::map<std::string, std::string> entries_;
};

inline std::vector<WordToken> aggregate_tokens(std::span<const WordToken> tokens,
                                               const TokenAggregationMap& map) {
  std::vector<WordToken> out(tokens.begin(), tokens.end());
  for (auto& t : out) t.surface = map.canonical(t.surface);
  return out;
}

// Which GroupKey fields define a group. A field left out is reported as "*".
struct GroupBy {
  bool region = true;
  bool source = true;

  static GroupBy parse(std::span<const std::string> fields) {
    GroupBy g{false, false};
    for (const auto& f : fields) {
      if (f == "region")
        g.region = true;
      else if (f == "source")
        g.source = true;
      else
        throw ConfigError("unknown group-by field '" + f + "' (expected region or source)");
    }
    return g;
  }

  GroupKey apply(const GroupKey& k) const {
    return {region ? k.region : "*", source ? k.source : "*"};
  }
};

struct TokenSoftCounts {
  double y_cause = 0.0;
  double y_effect = 0.0;
};

struct GroupSoftCounts {
  std::map<std::string, TokenSoftCounts> tokens;
  double n_cause = 0.0;
  double n_effect = 0.0;
};

using GroupedSoftCounts = std::map<GroupKey, GroupSoftCounts>;

// Soft counts per (group, canonical token, span class): every token
// occurrence contributes its probability. Sums are compensated and taken
// in claim order.
inline GroupedSoftCounts soft_counts(std::span<const CauseEffectPair> claims,
                                     const GroupBy& group_by,
                                     const TokenAggregationMap& map = {}) {
  struct Acc {
    detail::CompensatedSum cause, effect;
  };
  struct GroupAcc {
    std::map<std::string, Acc> tokens;
    detail::CompensatedSum n_cause, n_effect;
  };
  std::map<GroupKey, GroupAcc> acc;
  for (const auto& claim : claims) {
    auto& g = acc[group_by.apply(claim.group)];
    for (const auto cls : {SpanClass::Cause, SpanClass::Effect}) {
      const auto& side = claim.side(cls);
      if (!side) continue;
      for (const auto& t : side->tokens) {
        auto& a = g.tokens[map.canonical(t.surface)];
        if (cls == SpanClass::Cause) {
          a.cause += t.prob;
          g.n_cause += t.prob;
        } else {
          a.effect += t.prob;
          g.n_effect += t.prob;
        }
      }
    }
  }
  GroupedSoftCounts out;
  for (const auto& [key, g] : acc) {
    auto& dst = out[key];
    dst.n_cause = g.n_cause.value();
    dst.n_effect = g.n_effect.value();
    for (const auto& [token, a] : g.tokens) dst.tokens[token] = {a.cause.value(), a.effect.value()};
  }
  return out;
}

// Token's share of all soft mass (cause + effect) in its group.
inline double background_share(double y_cause, double y_effect, double n_cause, double n_effect) {
  const double total = n_cause + n_effect;
  if (!(total > 0.0)) throw ComputationError("background share with zero class totals");
  return (y_cause + y_effect) / total;
}

struct PriorSpec {
  double alpha0 = 1.0;
  double p_background = 0.0;
  double alpha_present = 0.0;
  double alpha_absent = 1.0;
};

// Splits prior strength alpha0 between present and absent cells.
inline PriorSpec make_prior(double alpha0, double p_background) {
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0))
    throw ConfigError("prior strength alpha0 must be positive and finite");
  if (!(p_background >= 0.0 && p_background <= 1.0))
    throw ComputationError("background share outside [0, 1]");
  const double present = alpha0 * p_background;
  return {alpha0, p_background, present, alpha0 - present};
}

struct ContingencyTable {
  double a = 0.0;  // cause, present
  double b = 0.0;  // cause, absent
  double c = 0.0;  // effect, present
  double d = 0.0;  // effect, absent
};

inline ContingencyTable smoothed_table(double y_cause, double y_effect, double n_cause,
                                       double n_effect, const PriorSpec& prior) {
  if (y_cause < 0.0 || y_effect < 0.0) throw ComputationError("negative soft count");
  ContingencyTable t{y_cause + prior.alpha_present, (n_cause - y_cause) + prior.alpha_absent,
                     y_effect + prior.alpha_present, (n_effect - y_effect) + prior.alpha_absent};
  if (!(t.a > 0.0 && t.b > 0.0 && t.c > 0.0 && t.d > 0.0))
    throw ComputationError("degenerate prior: smoothed cell is not positive (a=" +
                           detail::format_number(t.a) + ", b=" + detail::format_number(t.b) +
                           ", c=" + detail::format_number(t.c) + ", d=" +
                           detail::format_number(t.d) + ")");
  return t;
}

struct WaldResult {
  double odds_cause = 0.0;
  double odds_effect = 0.0;
  double odds_ratio = 0.0;
  double delta = 0.0;  // log odds ratio
  double se = 0.0;
  double z = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double p_value = 1.0;
  double confidence = 0.95;
};

// Log odds ratio with Wald standard error, interval and two-sided p.
inline WaldResult wald_log_odds(const ContingencyTable& t, double confidence) {
  if (!(t.a > 0.0 && t.b > 0.0 && t.c > 0.0 && t.d > 0.0))
    throw ComputationError("Wald inference needs strictly positive cells");
  const double crit = normal::two_sided_critical(confidence);
  WaldResult r;
  r.confidence = confidence;
  r.odds_cause = t.a / t.b;
  r.odds_effect = t.c / t.d;
  r.odds_ratio = r.odds_cause / r.odds_effect;
  // exchanging (a,b) with (c,d) negates delta bit for bit
  r.delta = (std::log(t.a) + std::log(t.d)) - (std::log(t.b) + std::log(t.c));
  r.se = std::sqrt((1.0 / t.a + 1.0 / t.d) + (1.0 / t.b + 1.0 / t.c));
  r.z = r.delta / r.se;
  r.ci_lower = r.delta - crit * r.se;
  r.ci_upper = r.delta + crit * r.se;
  r.p_value = normal::two_sided_p(r.z);
  return r;
}

struct LogOddsRow {
  GroupKey group;
  std::string token;
  WaldResult wald;
  ContingencyTable table;
  PriorSpec prior;
  double y_cause = 0.0;
  double y_effect = 0.0;
  double n_cause = 0.0;
  double n_effect = 0.0;
};

// A (group, token) pair for which no row could be computed.
struct SkippedRow {
  GroupKey group;
  std::string token;
  std::string reason;
};

struct LogOddsReport {
  std::vector<LogOddsRow> rows;      // sorted by (region, token, source)
  std::vector<SkippedRow> skipped;   // same order
};

struct LogOddsOptions {
  double alpha0 = 1.0;
  double confidence = 0.95;
  GroupBy group_by;
};

// Full chain per (group, token): soft counts, background share, prior,
// smoothed table, Wald inference. Groups are those present in `claims`.
inline LogOddsReport logodds_report(std::span<const CauseEffectPair> claims,
                                    std::span<const std::string> tokens,
                                    const LogOddsOptions& options,
                                    const TokenAggregationMap& map = {}) {
  if (tokens.empty()) throw ConfigError("no tokens of interest given");
  (void)make_prior(options.alpha0, 0.0);
  (void)normal::two_sided_critical(options.confidence);

  std::vector<std::string> canonical;
  for (const auto& t : tokens) canonical.push_back(map.canonical(detail::ascii_lower(t)));
  std::sort(canonical.begin(), canonical.end());
  canonical.erase(std::unique(canonical.begin(), canonical.end()), canonical.end());

  const auto counts = soft_counts(claims, options.group_by, map);
  LogOddsReport report;
  for (const auto& [group, g] : counts) {
    for (const auto& token : canonical) {
      TokenSoftCounts y;
      if (const auto it = g.tokens.find(token); it != g.tokens.end()) y = it->second;
      auto skip = [&](std::string reason) {
        report.skipped.push_back({group, token, std::move(reason)});
      };
      if (!(g.n_cause + g.n_effect > 0.0)) {
        skip("group has no span mass");
        continue;
      }
      const double p = background_share(y.y_cause, y.y_effect, g.n_cause, g.n_effect);
      if (p == 0.0) {
        skip("zero background share");
        continue;
      }
      try {
        LogOddsRow row;
        row.group = group;
        row.token = token;
        row.prior = make_prior(options.alpha0, p);
        row.table = smoothed_table(y.y_cause, y.y_effect, g.n_cause, g.n_effect, row.prior);
        row.wald = wald_log_odds(row.table, options.confidence);
        row.y_cause = y.y_cause;
        row.y_effect = y.y_effect;
        row.n_cause = g.n_cause;
        row.n_effect = g.n_effect;
        report.rows.push_back(std::move(row));
      } catch (const ComputationError& e) {
        skip(e.what());
      }
    }
  }
  auto key = [](const GroupKey& g, const std::string& t) { return std::tie(g.region, t, g.source); };
  std::sort(report.rows.begin(), report.rows.end(), [&](const auto& x, const auto& y) {
    return key(x.group, x.token) < key(y.group, y.token);
  });
  std::sort(report.skipped.begin(), report.skipped.end(), [&](const auto& x, const auto& y) {
    return key(x.group, x.token) < key(y.group, y.token);
  });
  return report;
}

enum class SubsetScope { EitherSpan, Cause, Effect, SentenceText };

inline std::optional<SubsetScope> parse_subset_scope(std::string_view s) noexcept {
  if (s == "either_span") return SubsetScope::EitherSpan;
  if (s == "cause") return SubsetScope::Cause;
  if (s == "effect") return SubsetScope::Effect;
  if (s == "sentence_text") return SubsetScope::SentenceText;
  return std::nullopt;
}

// Claims whose chosen scope contains `query` (after canonicalization). The
// sentence_text scope needs `texts` (sentence_id -> text).
inline std::vector<CauseEffectPair> subset_claims(
    std::span<const CauseEffectPair> claims, std::string_view query, SubsetScope scope,
    const TokenAggregationMap& map = {},
    const std::map<std::string, std::string>* texts = nullptr) {
  const auto target = map.canonical(detail::ascii_lower(query));
  auto side_has = [&](const std::optional<ClaimSide>& side) {
    if (!side) return false;
    return std::any_of(side->tokens.begin(), side->tokens.end(),
                       [&](const WordToken& t) { return map.canonical(t.surface) == target; });
  };
  if (scope == SubsetScope::SentenceText && texts == nullptr)
    throw ConfigError("sentence_text scope needs sentence texts");

  std::vector<CauseEffectPair> out;
  for (const auto& c : claims) {
    bool keep = false;
    switch (scope) {
      case SubsetScope::EitherSpan: keep = side_has(c.cause) || side_has(c.effect); break;
      case SubsetScope::Cause: keep = side_has(c.cause); break;
      case SubsetScope::Effect: keep = side_has(c.effect); break;
      case SubsetScope::SentenceText: {
        const auto it = texts->find(c.sentence_id);
        if (it == texts->end())
          throw SchemaError("no text for sentence '" + c.sentence_id + "'");
        const auto words = detail::split_words(it->second);
        keep = std::any_of(words.begin(), words.end(),
                           [&](const std::string& w) { return map.canonical(w) == target; });
        break;
      }
    }
    if (keep) out.push_back(c);
  }
  return out;
}

}  // namespace causalframe
