#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "causalframe/detail/numeric.hpp"
#include "causalframe/error.hpp"
#include "causalframe/spandec.hpp"

namespace causalframe {

// Precision/recall/F1 triple. A metric whose denominator is zero is 0 and
// the matching flag is set.
struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;

  bool any_undefined() const noexcept {
    return precision_undefined || recall_undefined || f1_undefined;
  }
};

inline PrfScore prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  PrfScore s;
  if (tp + fp == 0)
    s.precision_undefined = true;
  else
    s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn == 0)
    s.recall_undefined = true;
  else
    s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (s.precision + s.recall == 0.0)
    s.f1_undefined = true;
  else
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

struct Averages {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct LabelScore {
  std::string label;
  PrfScore score;
  std::size_t support = 0;  // gold count
};

struct ClassReport {
  std::vector<LabelScore> per_label;  // sorted by label
  double accuracy = 0.0;
  Averages macro;
  Averages weighted;
  std::size_t total = 0;
  bool zero_division = false;
};

namespace detail {

template <typename Rows>
Averages macro_average(const Rows& rows) {
  Averages a;
  if (rows.empty()) return a;
  for (const auto& r : rows) {
    a.precision += r.score.precision;
    a.recall += r.score.recall;
    a.f1 += r.score.f1;
  }
  const auto n = static_cast<double>(rows.size());
  return {a.precision / n, a.recall / n, a.f1 / n};
}

template <typename Rows>
Averages support_weighted_average(const Rows& rows, bool& zero_division) {
  Averages a;
  std::size_t total = 0;
  for (const auto& r : rows) {
    const auto w = static_cast<double>(r.support);
    a.precision += w * r.score.precision;
    a.recall += w * r.score.recall;
    a.f1 += w * r.score.f1;
    total += r.support;
  }
  if (total == 0) {
    zero_division = true;
    return {};
  }
  const auto n = static_cast<double>(total);
  return {a.precision / n, a.recall / n, a.f1 / n};
}

}  // namespace detail

// Per-label scores over the union of observed labels plus macro and
// support-weighted averages.
inline ClassReport classification_report(std::span<const std::string> predicted,
                                         std::span<const std::string> gold) {
  if (predicted.size() != gold.size())
    throw ConfigError("prediction and gold label lists differ in length (" +
                      std::to_string(predicted.size()) + " vs " + std::to_string(gold.size()) +
                      ")");
  std::set<std::string> labels(gold.begin(), gold.end());
  labels.insert(predicted.begin(), predicted.end());

  ClassReport report;
  report.total = gold.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) correct += predicted[i] == gold[i] ? 1 : 0;
  if (report.total == 0)
    report.zero_division = true;
  else
    report.accuracy = static_cast<double>(correct) / static_cast<double>(report.total);

  for (const auto& label : labels) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool p = predicted[i] == label, g = gold[i] == label;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
    }
    auto score = prf_from_counts(tp, fp, fn);
    report.zero_division = report.zero_division || score.any_undefined();
    report.per_label.push_back({label, score, tp + fn});
  }
  report.macro = detail::macro_average(report.per_label);
  report.weighted = detail::support_weighted_average(report.per_label, report.zero_division);
  return report;
}

// A span identified by sentence, class and character boundaries.
struct LabeledSpan {
  std::string sentence_id;
  SpanClass span_class = SpanClass::Cause;
  std::size_t start = 0;
  std::size_t end = 0;

  auto operator<=>(const LabeledSpan&) const = default;
};

struct SpanClassScore {
  SpanClass span_class;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  PrfScore score;
  std::size_t support = 0;  // gold spans
};

struct SpanReport {
  std::array<SpanClassScore, 2> per_class{SpanClassScore{SpanClass::Cause, 0, 0, 0, {}, 0},
                                          SpanClassScore{SpanClass::Effect, 0, 0, 0, {}, 0}};
  PrfScore micro;
  Averages macro;
  Averages weighted;
  bool zero_division = false;
};

// Exact-match span scoring: a prediction is a hit iff an unconsumed gold
// span with the same sentence, class and boundaries exists.
inline SpanReport span_exact_match_report(std::span<const LabeledSpan> predicted,
                                          std::span<const LabeledSpan> gold) {
  std::map<LabeledSpan, std::size_t> available;
  for (const auto& g : gold) ++available[g];

  SpanReport report;
  auto& cls = report.per_class;
  auto slot = [&](SpanClass c) -> SpanClassScore& { return cls[c == SpanClass::Cause ? 0 : 1]; };
  for (const auto& p : predicted) {
    auto it = available.find(p);
    if (it != available.end() && it->second > 0) {
      --it->second;
      ++slot(p.span_class).true_positives;
    } else {
      ++slot(p.span_class).false_positives;
    }
  }
  for (const auto& g : gold) ++slot(g.span_class).support;

  std::size_t tp = 0, fp = 0, fn = 0;
  for (auto& c : cls) {
    c.false_negatives = c.support - c.true_positives;
    c.score = prf_from_counts(c.true_positives, c.false_positives, c.false_negatives);
    report.zero_division = report.zero_division || c.score.any_undefined();
    tp += c.true_positives;
    fp += c.false_positives;
    fn += c.false_negatives;
  }
  report.micro = prf_from_counts(tp, fp, fn);
  report.zero_division = report.zero_division || report.micro.any_undefined();
  report.macro = detail::macro_average(cls);
  report.weighted = detail::support_weighted_average(cls, report.zero_division);
  return report;
}

// Gold spans from consensus results, predicted spans from decoded predictions.
inline std::vector<LabeledSpan> labeled_spans(const SentencePrediction& pred, DecodeMode mode) {
  std::vector<LabeledSpan> out;
  for (const auto& s : decode_iob2(pred.subtokens, mode))
    out.push_back({pred.sentence_id, s.span_class, s.char_start, s.char_end});
  return out;
}

// ---------------------------------------------------------------------------
// Sequence vs span probability agreement

struct AgreementPair {
  std::string sentence_id;
  SpanClass span_class;
  double seq_prob;
  double span_prob;
};

// One (sequence, span) observation per present span of every claim.
inline std::vector<AgreementPair> agreement_pairs(std::span<const CauseEffectPair> claims) {
  std::vector<AgreementPair> out;
  for (const auto& c : claims) {
    if (c.cause) out.push_back({c.sentence_id, SpanClass::Cause, c.seq_prob_causal, c.cause->span_prob});
    if (c.effect)
      out.push_back({c.sentence_id, SpanClass::Effect, c.seq_prob_causal, c.effect->span_prob});
  }
  return out;
}

struct AgreementStats {
  std::size_t n = 0;
  double bias = 0.0;
  double sd = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

inline constexpr double kLimitsOfAgreementZ = 1.96;

// Bland-Altman on differences y - x (span minus sequence), sample SD.
inline AgreementStats bland_altman(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2)
    throw ComputationError("Bland-Altman analysis needs at least 2 pairs, got " +
                           std::to_string(pairs.size()));
  detail::CompensatedSum sum;
  for (const auto& [x, y] : pairs) sum += y - x;
  const auto n = static_cast<double>(pairs.size());
  const double bias = sum.value() / n;
  detail::CompensatedSum sq;
  for (const auto& [x, y] : pairs) {
    const double dev = (y - x) - bias;
    sq += dev * dev;
  }
  const double sd = std::sqrt(sq.value() / (n - 1.0));
  return {pairs.size(), bias, sd, bias - kLimitsOfAgreementZ * sd, bias + kLimitsOfAgreementZ * sd};
}

inline std::vector<std::pair<double, double>> pairs_for_class(std::span<const AgreementPair> rows,
                                                              SpanClass c) {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : rows)
    if (r.span_class == c) out.emplace_back(r.seq_prob, r.span_prob);
  return out;
}

}  // namespace causalframe
