#pragma once

#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "causalframe/attribstats.hpp"
#include "causalframe/corpus.hpp"
#include "causalframe/detail/numeric.hpp"
#include "causalframe/metrics.hpp"

namespace causalframe::report {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string num(double x) { return detail::format_number(x); }

inline constexpr std::string_view kLogOddsHeader =
    "region,token,source,log_delta,se,z,ci_lower,ci_upper,p_value,odds_cause,odds_effect,"
    "y_cause,y_effect,n_cause,n_effect,alpha0,confidence";

inline void write_logodds_csv(std::ostream& out, std::span<const LogOddsRow> rows) {
  out << kLogOddsHeader << '\n';
  for (const auto& r : rows) {
    const auto& w = r.wald;
    out << csv_field(r.group.region) << ',' << csv_field(r.token) << ','
        << csv_field(r.group.source) << ',' << num(w.delta) << ',' << num(w.se) << ','
        << num(w.z) << ',' << num(w.ci_lower) << ',' << num(w.ci_upper) << ','
        << num(w.p_value) << ',' << num(w.odds_cause) << ',' << num(w.odds_effect) << ','
        << num(r.y_cause) << ',' << num(r.y_effect) << ',' << num(r.n_cause) << ','
        << num(r.n_effect) << ',' << num(r.prior.alpha0) << ',' << num(w.confidence) << '\n';
  }
}

inline void write_skipped_csv(std::ostream& out, std::span<const SkippedRow> rows) {
  out << "region,token,source,reason\n";
  for (const auto& s : rows)
    out << csv_field(s.group.region) << ',' << csv_field(s.token) << ','
        << csv_field(s.group.source) << ',' << csv_field(s.reason) << '\n';
}

inline void write_corpus_stats_csv(std::ostream& out, std::span<const CorpusStatRow> rows) {
  out << "region,source,count,proportion\n";
  for (const auto& r : rows)
    out << csv_field(r.region) << ',' << csv_field(r.source) << ',' << r.count << ','
        << num(r.proportion) << '\n';
}

// label,precision,recall,f1,support rows, then accuracy / macro / weighted.
inline void write_class_report_csv(std::ostream& out, const ClassReport& r) {
  out << "label,precision,recall,f1,support\n";
  for (const auto& l : r.per_label)
    out << csv_field(l.label) << ',' << num(l.score.precision) << ',' << num(l.score.recall)
        << ',' << num(l.score.f1) << ',' << l.support << '\n';
  out << "accuracy,,," << num(r.accuracy) << ',' << r.total << '\n';
  out << "macro avg," << num(r.macro.precision) << ',' << num(r.macro.recall) << ','
      << num(r.macro.f1) << ',' << r.total << '\n';
  out << "weighted avg," << num(r.weighted.precision) << ',' << num(r.weighted.recall) << ','
      << num(r.weighted.f1) << ',' << r.total << '\n';
}

inline nlohmann::json to_json(const PrfScore& s) {
  return {{"precision", detail::round_significant(s.precision)},
          {"recall", detail::round_significant(s.recall)},
          {"f1", detail::round_significant(s.f1)},
          {"undefined",
           {{"precision", s.precision_undefined},
            {"recall", s.recall_undefined},
            {"f1", s.f1_undefined}}}};
}

inline nlohmann::json to_json(const Averages& a) {
  return {{"precision", detail::round_significant(a.precision)},
          {"recall", detail::round_significant(a.recall)},
          {"f1", detail::round_significant(a.f1)}};
}

inline nlohmann::json to_json(const ClassReport& r) {
  auto labels = nlohmann::json::array();
  for (const auto& l : r.per_label) {
    auto j = to_json(l.score);
    j["label"] = l.label;
    j["support"] = l.support;
    labels.push_back(std::move(j));
  }
  return {{"labels", std::move(labels)},
          {"accuracy", detail::round_significant(r.accuracy)},
          {"macro", to_json(r.macro)},
          {"weighted", to_json(r.weighted)},
          {"total", r.total},
          {"zero_division", r.zero_division}};
}

inline void write_span_report_csv(std::ostream& out, const SpanReport& r) {
  out << "label,precision,recall,f1,support,tp,fp,fn\n";
  std::size_t tp = 0, fp = 0, fn = 0, support = 0;
  for (const auto& c : r.per_class) {
    out << to_string(c.span_class) << ',' << num(c.score.precision) << ','
        << num(c.score.recall) << ',' << num(c.score.f1) << ',' << c.support << ','
        << c.true_positives << ',' << c.false_positives << ',' << c.false_negatives << '\n';
    tp += c.true_positives;
    fp += c.false_positives;
    fn += c.false_negatives;
    support += c.support;
  }
  out << "micro avg," << num(r.micro.precision) << ',' << num(r.micro.recall) << ','
      << num(r.micro.f1) << ',' << support << ',' << tp << ',' << fp << ',' << fn << '\n';
  out << "macro avg," << num(r.macro.precision) << ',' << num(r.macro.recall) << ','
      << num(r.macro.f1) << ',' << support << ",,,\n";
  out << "weighted avg," << num(r.weighted.precision) << ',' << num(r.weighted.recall) << ','
      << num(r.weighted.f1) << ',' << support << ",,,\n";
}

inline nlohmann::json to_json(const SpanReport& r) {
  auto classes = nlohmann::json::array();
  for (const auto& c : r.per_class) {
    auto j = to_json(c.score);
    j["label"] = std::string(to_string(c.span_class));
    j["support"] = c.support;
    j["tp"] = c.true_positives;
    j["fp"] = c.false_positives;
    j["fn"] = c.false_negatives;
    classes.push_back(std::move(j));
  }
  return {{"classes", std::move(classes)},
          {"micro", to_json(r.micro)},
          {"macro", to_json(r.macro)},
          {"weighted", to_json(r.weighted)},
          {"zero_division", r.zero_division}};
}

inline void write_agreement_pairs_csv(std::ostream& out, std::span<const AgreementPair> rows) {
  out << "sentence_id,span_class,seq_prob,span_prob\n";
  for (const auto& p : rows)
    out << csv_field(p.sentence_id) << ',' << to_string(p.span_class) << ',' << num(p.seq_prob)
        << ',' << num(p.span_prob) << '\n';
}

}  // namespace causalframe::report
