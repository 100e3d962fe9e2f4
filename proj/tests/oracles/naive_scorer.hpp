#pragma once

// Brute-force scorers used as oracles for the metrics module: explicit
// per-label loops for classification and O(n^2) matching with consumed flags
// for exact-match spans.

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct NaivePrf {
  double p = 0, r = 0, f1 = 0;
  std::size_t support = 0;
};

inline NaivePrf naive_prf(std::size_t tp, std::size_t fp, std::size_t fn) {
  NaivePrf s;
  s.p = (tp + fp) ? double(tp) / double(tp + fp) : 0.0;
  s.r = (tp + fn) ? double(tp) / double(tp + fn) : 0.0;
  s.f1 = (s.p + s.r) > 0 ? 2 * s.p * s.r / (s.p + s.r) : 0.0;
  s.support = tp + fn;
  return s;
}

struct NaiveClassReport {
  std::vector<std::string> labels;
  std::vector<NaivePrf> per_label;
  double accuracy = 0, macro_f1 = 0, weighted_f1 = 0, macro_p = 0, weighted_p = 0;
};

inline NaiveClassReport naive_classification(const std::vector<std::string>& pred,
                                             const std::vector<std::string>& gold) {
  NaiveClassReport out;
  std::set<std::string> labels(gold.begin(), gold.end());
  labels.insert(pred.begin(), pred.end());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (pred[i] == gold[i]) ++hits;
  out.accuracy = gold.empty() ? 0.0 : double(hits) / double(gold.size());
  double total_support = 0;
  for (const auto& l : labels) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (pred[i] == l && gold[i] == l) ++tp;
      if (pred[i] == l && gold[i] != l) ++fp;
      if (pred[i] != l && gold[i] == l) ++fn;
    }
    out.labels.push_back(l);
    out.per_label.push_back(naive_prf(tp, fp, fn));
  }
  for (const auto& s : out.per_label) {
    out.macro_f1 += s.f1;
    out.macro_p += s.p;
    out.weighted_f1 += double(s.support) * s.f1;
    out.weighted_p += double(s.support) * s.p;
    total_support += double(s.support);
  }
  out.macro_f1 /= double(out.per_label.size());
  out.macro_p /= double(out.per_label.size());
  if (total_support > 0) {
    out.weighted_f1 /= total_support;
    out.weighted_p /= total_support;
  } else {
    out.weighted_f1 = out.weighted_p = 0;
  }
  return out;
}

struct NaiveSpanItem {
  std::string sentence;
  int cls;
  std::size_t start, end;
};

struct NaiveSpanCounts {
  std::size_t tp[2] = {0, 0}, fp[2] = {0, 0}, fn[2] = {0, 0};
};

inline NaiveSpanCounts naive_span_counts(const std::vector<NaiveSpanItem>& pred,
                                         const std::vector<NaiveSpanItem>& gold) {
  NaiveSpanCounts c;
  std::vector<bool> used(gold.size(), false);
  for (const auto& p : pred) {
    bool hit = false;
    for (std::size_t g = 0; g < gold.size() && !hit; ++g) {
      if (used[g]) continue;
      if (gold[g].sentence == p.sentence && gold[g].cls == p.cls && gold[g].start == p.start &&
          gold[g].end == p.end) {
        used[g] = true;
        hit = true;
      }
    }
    if (hit)
      ++c.tp[p.cls];
    else
      ++c.fp[p.cls];
  }
  for (std::size_t g = 0; g < gold.size(); ++g)
    if (!used[g]) ++c.fn[gold[g].cls];
  return c;
}

}  // namespace oracle
