#pragma once

// Synthetic prediction corpus with known ground truth, plus a brute-force
// log-odds oracle that works from the ground truth (word lists and subtoken
// probabilities) rather than from decoded claims.

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles/highprec_wald.hpp"

namespace oracle {

struct TruthSpan {
  char cls;                              // 'C' or 'E'
  std::vector<std::string> words;        // canonical (lowercased, aggregated)
  std::vector<double> subtoken_probs;    // one per subtoken
};

struct TruthSentence {
  std::string id;
  std::string region;
  std::string source;
  double seq_prob;
  std::vector<TruthSpan> spans;
  nlohmann::json prediction;  // SentencePrediction JSON line
};

inline const std::map<std::string, std::string>& synthetic_aggregation() {
  static const std::map<std::string, std::string> m{
      {"russian", "russia"}, {"russians", "russia"}, {"israeli", "israel"},
      {"ukrainian", "ukraine"}, {"palestinians", "palestine"}};
  return m;
}

inline std::string canonical(const std::string& w) {
  const auto& m = synthetic_aggregation();
  const auto it = m.find(w);
  return it == m.end() ? w : it->second;
}

// Builds `n` sentences. Words are space separated; roughly a third of the
// span words are split into two "##" pieces; capitalization varies.
inline std::vector<TruthSentence> make_synthetic_corpus(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> span_vocab{
      "russia", "russians", "russian", "ukraine", "ukrainian", "israel", "israeli",
      "hamas", "palestine", "palestinians", "attack", "strike", "hospital", "killed",
      "civilians", "children", "talks", "sanctions", "missile", "drone"};
  static const std::vector<std::string> filler{"after", "says", "as", "amid", "over"};
  static const std::vector<std::pair<std::string, std::string>> groups{
      {"EE", "AJ"}, {"EE", "BBC"}, {"EE", "CNN"}, {"ME", "AJ"}, {"ME", "BBC"}, {"ME", "CNN"}};

  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto pick = [&](std::size_t k) { return std::uniform_int_distribution<std::size_t>(0, k - 1)(rng); };

  std::vector<TruthSentence> out;
  for (std::size_t s = 0; s < n; ++s) {
    TruthSentence t;
    t.id = "s" + std::to_string(s);
    const auto& g = groups[pick(groups.size())];
    t.region = g.first;
    t.source = g.second;
    t.seq_prob = uniform(0.0, 1.0);

    std::string text;
    nlohmann::json subtokens = nlohmann::json::array();
    auto append_word = [&](const std::string& word, const std::string& b_tag,
                           const std::string& i_tag, std::vector<double>* probs, bool split) {
      if (!text.empty()) text += ' ';
      std::string surface = word;
      if (pick(3) == 0) surface[0] = static_cast<char>(std::toupper(surface[0]));
      const std::size_t start = text.size();
      text += surface;
      std::vector<std::pair<std::size_t, std::size_t>> pieces;
      if (split && surface.size() >= 4) {
        const std::size_t cut = surface.size() / 2;
        pieces = {{start, start + cut}, {start + cut, start + surface.size()}};
      } else {
        pieces = {{start, start + surface.size()}};
      }
      for (std::size_t k = 0; k < pieces.size(); ++k) {
        const auto [a, b] = pieces[k];
        const double p = uniform(0.3, 1.0);
        if (probs) probs->push_back(p);
        std::string piece_text = text.substr(a, b - a);
        if (k > 0) piece_text = "##" + piece_text;
        subtokens.push_back({{"text", piece_text},
                             {"start", a},
                             {"end", b},
                             {"tag", k == 0 ? b_tag : i_tag},
                             {"tag_prob", p}});
      }
    };

    const std::size_t n_spans = pick(4);  // 0..3 spans
    if (pick(2) == 0) append_word(filler[pick(filler.size())], "O", "O", nullptr, false);
    for (std::size_t k = 0; k < n_spans; ++k) {
      TruthSpan span;
      span.cls = pick(2) == 0 ? 'C' : 'E';
      const std::string b = span.cls == 'C' ? "B-C" : "B-E";
      const std::string i = span.cls == 'C' ? "I-C" : "I-E";
      const std::size_t len = 1 + pick(3);
      for (std::size_t w = 0; w < len; ++w) {
        const auto& word = span_vocab[pick(span_vocab.size())];
        span.words.push_back(canonical(word));
        append_word(word, w == 0 ? b : i, i, &span.subtoken_probs, pick(3) == 0);
      }
      t.spans.push_back(std::move(span));
      append_word(filler[pick(filler.size())], "O", "O", nullptr, false);
    }
    if (text.empty()) append_word(filler[pick(filler.size())], "O", "O", nullptr, false);

    t.prediction = {{"sentence_id", t.id},
                    {"text", text},
                    {"group", {{"region", t.region}, {"source", t.source}}},
                    {"seq_prob_causal", t.seq_prob},
                    {"subtokens", subtokens}};
    out.push_back(std::move(t));
  }
  return out;
}

struct OracleRow {
  std::string region, token, source;
  hp delta, se, ci_lower, ci_upper, p_value;
  hp y_cause, y_effect, n_cause, n_effect;
};

// Direct summation over the truth. Pairing multiplicity: with C cause and E
// effect spans (both > 0) each cause span appears in E claims and each effect
// span in C claims; otherwise each span appears once.
inline std::vector<OracleRow> bruteforce_logodds(const std::vector<TruthSentence>& corpus,
                                                 const std::vector<std::string>& tokens,
                                                 const hp& alpha0, const hp& crit) {
  struct Group {
    std::map<std::string, std::pair<hp, hp>> y;
    hp n_cause = 0, n_effect = 0;
  };
  std::map<std::pair<std::string, std::string>, Group> groups;
  for (const auto& s : corpus) {
    std::size_t nc = 0, ne = 0;
    for (const auto& sp : s.spans) (sp.cls == 'C' ? nc : ne) += 1;
    if (nc + ne == 0) continue;
    auto& g = groups[{s.region, s.source}];
    for (const auto& sp : s.spans) {
      hp mean = 0;
      for (double p : sp.subtoken_probs) mean += hp(p);
      mean /= hp(sp.subtoken_probs.size());
      const std::size_t mult = (nc > 0 && ne > 0) ? (sp.cls == 'C' ? ne : nc) : 1;
      for (const auto& w : sp.words) {
        for (std::size_t m = 0; m < mult; ++m) {
          if (sp.cls == 'C') {
            g.y[w].first += mean;
            g.n_cause += mean;
          } else {
            g.y[w].second += mean;
            g.n_effect += mean;
          }
        }
      }
    }
  }
  std::vector<OracleRow> rows;
  for (const auto& [key, g] : groups) {
    for (const auto& tok : tokens) {
      hp yc = 0, ye = 0;
      if (const auto it = g.y.find(tok); it != g.y.end()) {
        yc = it->second.first;
        ye = it->second.second;
      }
      const hp share = (yc + ye) / (g.n_cause + g.n_effect);
      if (share == 0) continue;
      const hp present = alpha0 * share;
      const hp absent = alpha0 - present;
      const auto w = highprec_wald(yc + present, g.n_cause - yc + absent, ye + present,
                                   g.n_effect - ye + absent, crit);
      rows.push_back({key.first, tok, key.second, w.delta, w.se, w.ci_lower, w.ci_upper,
                      w.p_value, yc, ye, g.n_cause, g.n_effect});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const OracleRow& a, const OracleRow& b) {
    return std::tie(a.region, a.token, a.source) < std::tie(b.region, b.token, b.source);
  });
  return rows;
}

}  // namespace oracle
