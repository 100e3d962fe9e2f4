// causalframe: command-line pipeline over causal claim predictions,
// annotations and corpora. Every command writes its outputs plus a
// <command>.meta.json sidecar under --out-dir.

#include <openssl/evp.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "causalframe/causalframe.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace causalframe;

namespace {

enum ExitCode : int { kOk = 0, kConfig = 2, kSchema = 3, kComputation = 4 };

struct PipelineConfig {
  std::string corpus;
  std::string predictions;
  std::string annotations;
  std::string dictionary;
  std::string norm_config;
  std::string aggregation_map;
  std::string claims;
  std::string gold;
  std::string texts;
  std::string records;
  std::string out_dir = ".";

  double alpha0 = 1.0;
  double confidence = 0.95;
  double iou_threshold = 0.5;
  std::vector<double> ratios{0.70, 0.15, 0.15};
  std::uint64_t seed = 0;
  std::string mode = "lenient";
  std::string scope = "either_span";
  std::vector<std::string> group_by{"region", "source"};
  std::vector<std::string> strata{"region", "source"};
  std::vector<std::string> tokens;
  std::string query;
  std::optional<double> min_seq_prob;
  double threshold = 0.5;
};

template <typename T>
T config_value(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

// Flat JSON object whose keys are option names (dashes or underscores).
void apply_config_file(PipelineConfig& cfg, const fs::path& path) {
  const auto j = detail::parse_json_file(path);
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object: " + path.string());
  std::map<std::string, std::function<void(const json&, const std::string&)>> setters;
  auto str = [&](std::string& field) {
    return [&field](const json& v, const std::string& k) { field = config_value<std::string>(v, k); };
  };
  auto strs = [&](std::vector<std::string>& field) {
    return [&field](const json& v, const std::string& k) {
      field = config_value<std::vector<std::string>>(v, k);
    };
  };
  auto real = [&](double& field) {
    return [&field](const json& v, const std::string& k) { field = config_value<double>(v, k); };
  };
  setters["corpus"] = str(cfg.corpus);
  setters["predictions"] = str(cfg.predictions);
  setters["annotations"] = str(cfg.annotations);
  setters["dictionary"] = str(cfg.dictionary);
  setters["norm_config"] = str(cfg.norm_config);
  setters["aggregation_map"] = str(cfg.aggregation_map);
  setters["claims"] = str(cfg.claims);
  setters["gold"] = str(cfg.gold);
  setters["texts"] = str(cfg.texts);
  setters["records"] = str(cfg.records);
  setters["out_dir"] = str(cfg.out_dir);
  setters["mode"] = str(cfg.mode);
  setters["scope"] = str(cfg.scope);
  setters["query"] = str(cfg.query);
  setters["alpha0"] = real(cfg.alpha0);
  setters["confidence"] = real(cfg.confidence);
  setters["iou_threshold"] = real(cfg.iou_threshold);
  setters["threshold"] = real(cfg.threshold);
  setters["group_by"] = strs(cfg.group_by);
  setters["strata"] = strs(cfg.strata);
  setters["tokens"] = strs(cfg.tokens);
  setters["ratios"] = [&](const json& v, const std::string& k) {
    cfg.ratios = config_value<std::vector<double>>(v, k);
  };
  setters["seed"] = [&](const json& v, const std::string& k) {
    cfg.seed = config_value<std::uint64_t>(v, k);
  };
  setters["min_seq_prob"] = [&](const json& v, const std::string& k) {
    cfg.min_seq_prob = config_value<double>(v, k);
  };
  for (const auto& [raw_key, value] : j.items()) {
    auto key = raw_key;
    std::replace(key.begin(), key.end(), '-', '_');
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + raw_key + "'");
    it->second(value, raw_key);
  }
}

// Locates --config ahead of the main parse; explicit flags win.
std::optional<std::string> prescan_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (arg.starts_with("--config=")) return std::string(arg.substr(9));
  }
  return std::nullopt;
}

std::string sha256_file(const fs::path& path) {
  auto in = detail::open_input(path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

// Tracks inputs/outputs of one command and writes the metadata sidecar.
class Run {
 public:
  Run(std::string command, const PipelineConfig& cfg) : command_(std::move(command)), cfg_(cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + cfg.out_dir + ": " + ec.message());
  }

  const std::string& input(const std::string& path, const std::string& what) {
    if (path.empty()) throw ConfigError("missing required input: --" + what);
    if (!fs::is_regular_file(path)) throw ConfigError("input file not found: " + path);
    inputs_.push_back({{"role", what}, {"path", path}, {"sha256", sha256_file(path)}});
    return path;
  }

  std::ofstream output(const std::string& name) {
    const auto path = fs::path(cfg_.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path.string());
    outputs_.push_back(name);
    return out;
  }

  json& parameters() { return parameters_; }

  void finish() {
    json meta;
    meta["artifact"] = "causalframe";
    meta["version"] = std::string(kVersion);
    meta["command"] = command_;
    meta["parameters"] = parameters_;
    meta["inputs"] = inputs_;
    meta["outputs"] = outputs_;
    meta["float_format"] = "%.12g";
    std::ofstream out(fs::path(cfg_.out_dir) / (command_ + ".meta.json"), std::ios::binary);
    out << meta.dump(2) << '\n';
  }

 private:
  std::string command_;
  const PipelineConfig& cfg_;
  json parameters_ = json::object();
  json inputs_ = json::array();
  json outputs_ = json::array();
};

void write_jsonl(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

DecodeMode decode_mode(const std::string& s) {
  const auto m = parse_decode_mode(s);
  if (!m) throw ConfigError("--mode must be strict or lenient, got '" + s + "'");
  return *m;
}

// --------------------------------------------------------------------------
// commands

int cmd_stats(const PipelineConfig& cfg) {
  Run run("stats", cfg);
  const auto records = load_corpus(run.input(cfg.corpus, "corpus"));
  auto out = run.output("corpus_stats.csv");
  report::write_corpus_stats_csv(out, corpus_stats(records));
  run.finish();
  return kOk;
}

int cmd_filter(const PipelineConfig& cfg) {
  Run run("filter", cfg);
  const auto dict = FilterDictionary::load(run.input(cfg.dictionary, "dictionary"));
  const auto regions = dict.regions();
  const auto records = load_corpus(run.input(cfg.corpus, "corpus"), &regions);
  const auto kept = filter_by_dictionary(records, dict);
  auto out = run.output("filtered.jsonl");
  for (const auto& r : kept) write_jsonl(out, to_json(r));
  auto stats = run.output("corpus_stats.csv");
  report::write_corpus_stats_csv(stats, corpus_stats(kept));
  run.parameters()["records_in"] = records.size();
  run.parameters()["records_kept"] = kept.size();
  run.finish();
  std::cout << "kept " << kept.size() << " of " << records.size() << " records\n";
  return kOk;
}

int cmd_decode(const PipelineConfig& cfg) {
  Run run("decode", cfg);
  ClaimOptions options;
  options.mode = decode_mode(cfg.mode);
  options.min_seq_prob = cfg.min_seq_prob;
  NormalizationConfig norm;
  if (!cfg.norm_config.empty()) norm = NormalizationConfig::load(run.input(cfg.norm_config, "norm-config"));
  const auto& pred_path = run.input(cfg.predictions, "predictions");

  auto out = run.output("claims.jsonl");
  std::size_t sentences = 0, claims = 0, partial = 0;
  std::map<std::string, std::size_t> seen;
  detail::for_each_jsonl(fs::path(pred_path), [&](const json& j, std::size_t line) {
    const auto pred = sentence_prediction_from_json(j, line);
    if (const auto [it, ok] = seen.emplace(pred.sentence_id, line); !ok)
      throw SchemaError("duplicate sentence_id '" + pred.sentence_id + "' (first on line " +
                            std::to_string(it->second) + ")",
                        line);
    std::vector<CauseEffectPair> pairs;
    try {
      pairs = build_claims(pred, options, norm);
    } catch (const DecodeError& e) {
      throw SchemaError(std::string(e.what()) + " in sentence '" + pred.sentence_id + "'", line);
    }
    ++sentences;
    for (const auto& p : pairs) {
      write_jsonl(out, to_json(p));
      ++claims;
      partial += p.partial ? 1 : 0;
    }
  });
  run.parameters()["mode"] = cfg.mode;
  run.parameters()["min_seq_prob"] = cfg.min_seq_prob ? json(*cfg.min_seq_prob) : json(nullptr);
  run.finish();
  std::cout << "sentences=" << sentences << " claims=" << claims << " partial=" << partial << '\n';
  return kOk;
}

std::map<std::string, std::string> load_texts(const std::string& path) {
  std::map<std::string, std::string> texts;
  detail::for_each_jsonl(fs::path(path), [&](const json& j, std::size_t line) {
    texts[detail::require_string(j, "sentence_id", line)] = detail::require_string(j, "text", line);
  });
  return texts;
}

int cmd_consensus(const PipelineConfig& cfg) {
  Run run("consensus", cfg);
  std::optional<std::map<std::string, std::size_t>> lengths;
  if (!cfg.corpus.empty()) {
    lengths.emplace();
    for (const auto& [id, text] : load_texts(run.input(cfg.corpus, "corpus")))
      (*lengths)[id] = detail::codepoint_length(text);
  }
  const auto annotations =
      load_annotations(run.input(cfg.annotations, "annotations"), lengths ? &*lengths : nullptr);
  auto out = run.output("consensus.jsonl");
  std::size_t causal = 0, total = 0;
  for (const auto& group : group_by_sentence(annotations)) {
    const auto result = build_consensus(group, cfg.iou_threshold);
    write_jsonl(out, to_json(result));
    ++total;
    causal += result.gold_label == Label::Causal ? 1 : 0;
  }
  run.parameters()["iou_threshold"] = cfg.iou_threshold;
  run.finish();
  std::cout << "sentences=" << total << " causal=" << causal << '\n';
  return kOk;
}

int cmd_split(const PipelineConfig& cfg) {
  Run run("split", cfg);
  if (cfg.ratios.size() != 3) throw ConfigError("--ratios needs exactly three values");
  const SplitRatios ratios{cfg.ratios[0], cfg.ratios[1], cfg.ratios[2]};
  ratios.validate();
  const auto& path = cfg.records.empty() ? cfg.corpus : cfg.records;
  const auto records = load_corpus(run.input(path, "records"));
  for (const auto& f : cfg.strata) (void)stratum_label({}, std::vector<std::string>{f});
  const auto split = split_dataset(
      std::span<const CorpusRecord>(records), ratios,
      [&](const CorpusRecord& r) { return stratum_label(r.group(), cfg.strata); }, cfg.seed);

  auto write_set = [&](const std::string& name, const std::vector<std::size_t>& idx) {
    auto out = run.output(name);
    for (const auto i : idx) write_jsonl(out, to_json(records[i]));
  };
  write_set("train.jsonl", split.train);
  write_set("test.jsonl", split.test);
  write_set("val.jsonl", split.val);

  std::map<std::string, std::array<std::size_t, 3>> per_stratum;
  auto tally = [&](const std::vector<std::size_t>& idx, std::size_t set) {
    for (const auto i : idx) ++per_stratum[stratum_label(records[i].group(), cfg.strata)][set];
  };
  tally(split.train, 0);
  tally(split.test, 1);
  tally(split.val, 2);
  auto stats = run.output("split_stats.csv");
  stats << "stratum,train,test,val\n";
  for (const auto& [s, c] : per_stratum)
    stats << report::csv_field(s) << ',' << c[0] << ',' << c[1] << ',' << c[2] << '\n';
  stats << "TOTAL," << split.train.size() << ',' << split.test.size() << ',' << split.val.size()
        << '\n';
  run.parameters()["ratios"] = cfg.ratios;
  run.parameters()["seed"] = cfg.seed;
  run.parameters()["strata"] = cfg.strata;
  run.finish();
  std::cout << "train=" << split.train.size() << " test=" << split.test.size()
            << " val=" << split.val.size() << '\n';
  return kOk;
}

int cmd_eval_seq(const PipelineConfig& cfg) {
  Run run("eval-seq", cfg);
  const auto preds = load_predictions(run.input(cfg.predictions, "predictions"));
  const auto gold = load_consensus(run.input(cfg.gold, "gold"));
  std::map<std::string, double> seq;
  for (const auto& p : preds) seq[p.sentence_id] = p.seq_prob_causal;
  std::vector<std::string> predicted, expected;
  for (const auto& g : gold) {
    const auto it = seq.find(g.sentence_id);
    if (it == seq.end()) throw SchemaError("no prediction for gold sentence '" + g.sentence_id + "'");
    predicted.emplace_back(to_string(it->second >= cfg.threshold ? Label::Causal : Label::NotCausal));
    expected.emplace_back(to_string(g.gold_label));
  }
  const auto rep = classification_report(predicted, expected);
  auto csv = run.output("seq_report.csv");
  report::write_class_report_csv(csv, rep);
  auto js = run.output("seq_report.json");
  js << report::to_json(rep).dump(2) << '\n';
  run.parameters()["threshold"] = cfg.threshold;
  run.finish();
  std::cout << "accuracy=" << report::num(rep.accuracy) << " macro_f1=" << report::num(rep.macro.f1)
            << " weighted_f1=" << report::num(rep.weighted.f1) << '\n';
  return kOk;
}

int cmd_eval_span(const PipelineConfig& cfg) {
  Run run("eval-span", cfg);
  const auto mode = decode_mode(cfg.mode);
  const auto preds = load_predictions(run.input(cfg.predictions, "predictions"));
  const auto gold = load_consensus(run.input(cfg.gold, "gold"));
  std::map<std::string, const SentencePrediction*> by_id;
  for (const auto& p : preds) by_id[p.sentence_id] = &p;
  std::vector<LabeledSpan> predicted, expected;
  for (const auto& g : gold) {
    const auto it = by_id.find(g.sentence_id);
    if (it == by_id.end()) throw SchemaError("no prediction for gold sentence '" + g.sentence_id + "'");
    for (auto& s : labeled_spans(*it->second, mode)) predicted.push_back(std::move(s));
    for (const auto& r : g.gold_cause_spans)
      expected.push_back({g.sentence_id, SpanClass::Cause, r.start, r.end});
    for (const auto& r : g.gold_effect_spans)
      expected.push_back({g.sentence_id, SpanClass::Effect, r.start, r.end});
  }
  const auto rep = span_exact_match_report(predicted, expected);
  auto csv = run.output("span_report.csv");
  report::write_span_report_csv(csv, rep);
  auto js = run.output("span_report.json");
  js << report::to_json(rep).dump(2) << '\n';
  run.parameters()["mode"] = cfg.mode;
  run.finish();
  std::cout << "macro_f1=" << report::num(rep.macro.f1) << '\n';
  return kOk;
}

int cmd_agreement(const PipelineConfig& cfg) {
  Run run("agreement", cfg);
  const auto claims = load_claims(run.input(cfg.claims, "claims"));
  const auto pairs = agreement_pairs(claims);
  auto out = run.output("agreement_pairs.csv");
  report::write_agreement_pairs_csv(out, pairs);
  auto ba = run.output("bland_altman.csv");
  ba << "span_class,n,bias,sd,lower,upper\n";
  for (const auto cls : {SpanClass::Cause, SpanClass::Effect}) {
    const auto xy = pairs_for_class(pairs, cls);
    if (xy.size() < 2) {
      std::cerr << "warning: " << to_string(cls) << " has " << xy.size()
                << " pairs; Bland-Altman needs at least 2\n";
      continue;
    }
    const auto s = bland_altman(xy);
    ba << to_string(cls) << ',' << s.n << ',' << report::num(s.bias) << ',' << report::num(s.sd)
       << ',' << report::num(s.lower) << ',' << report::num(s.upper) << '\n';
  }
  run.finish();
  return kOk;
}

LogOddsOptions logodds_options(const PipelineConfig& cfg) {
  LogOddsOptions o;
  o.alpha0 = cfg.alpha0;
  o.confidence = cfg.confidence;
  o.group_by = GroupBy::parse(cfg.group_by);
  return o;
}

void write_logodds(Run& run, const PipelineConfig& cfg, std::span<const CauseEffectPair> claims,
                   const TokenAggregationMap& map) {
  const auto rep = logodds_report(claims, cfg.tokens, logodds_options(cfg), map);
  auto out = run.output("logodds.csv");
  report::write_logodds_csv(out, rep.rows);
  auto skipped = run.output("logodds_skipped.csv");
  report::write_skipped_csv(skipped, rep.skipped);
  run.parameters()["alpha0"] = cfg.alpha0;
  run.parameters()["confidence"] = cfg.confidence;
  run.parameters()["group_by"] = cfg.group_by;
  run.parameters()["tokens"] = cfg.tokens;
  run.parameters()["phi_method"] = std::string(normal::kMethod);
  for (const auto& s : rep.skipped)
    std::cerr << "skipped " << s.group.region << '/' << s.group.source << '/' << s.token << ": "
              << s.reason << '\n';
  std::cout << "rows=" << rep.rows.size() << " skipped=" << rep.skipped.size() << '\n';
}

int cmd_logodds(const PipelineConfig& cfg) {
  Run run("logodds", cfg);
  if (cfg.tokens.empty()) throw ConfigError("--tokens is required");
  TokenAggregationMap map;
  if (!cfg.aggregation_map.empty())
    map = TokenAggregationMap::load(run.input(cfg.aggregation_map, "aggregation-map"));
  const auto claims = load_claims(run.input(cfg.claims, "claims"));
  write_logodds(run, cfg, claims, map);
  run.finish();
  return kOk;
}

int cmd_subset_logodds(const PipelineConfig& cfg) {
  Run run("subset-logodds", cfg);
  if (cfg.tokens.empty()) throw ConfigError("--tokens is required");
  if (cfg.query.empty()) throw ConfigError("--query is required");
  const auto scope = parse_subset_scope(cfg.scope);
  if (!scope)
    throw ConfigError("--scope must be either_span, cause, effect or sentence_text, got '" +
                      cfg.scope + "'");
  TokenAggregationMap map;
  if (!cfg.aggregation_map.empty())
    map = TokenAggregationMap::load(run.input(cfg.aggregation_map, "aggregation-map"));
  std::optional<std::map<std::string, std::string>> texts;
  if (*scope == SubsetScope::SentenceText) texts = load_texts(run.input(cfg.texts, "texts"));
  const auto claims = load_claims(run.input(cfg.claims, "claims"));
  const auto subset = subset_claims(claims, cfg.query, *scope, map, texts ? &*texts : nullptr);
  auto out = run.output("subset_claims.jsonl");
  for (const auto& c : subset) write_jsonl(out, to_json(c));
  std::cout << "subset=" << subset.size() << " of " << claims.size() << " claims\n";
  run.parameters()["query"] = cfg.query;
  run.parameters()["scope"] = cfg.scope;
  run.parameters()["subset_size"] = subset.size();
  write_logodds(run, cfg, subset, map);
  run.finish();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  PipelineConfig cfg;
  CLI::App app{"causalframe: causal claim extraction and cause/effect attribution analysis"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; explicit flags override it");
  app.add_option("--out-dir", cfg.out_dir, "Directory for all outputs")->capture_default_str();

  auto add_input = [](CLI::App* sub, const std::string& flag, std::string& field,
                      const std::string& help) { sub->add_option(flag, field, help); };

  auto* stats = app.add_subcommand("stats", "Corpus counts per region and source");
  add_input(stats, "--corpus", cfg.corpus, "Corpus JSONL");

  auto* filter = app.add_subcommand("filter", "Keep records matching the region keyword dictionary");
  add_input(filter, "--corpus", cfg.corpus, "Corpus JSONL");
  add_input(filter, "--dictionary", cfg.dictionary, "Filter dictionary JSON (region -> keywords)");

  auto* decode = app.add_subcommand("decode", "Decode IOB2 predictions into cause-effect claims");
  add_input(decode, "--predictions", cfg.predictions, "Prediction JSONL");
  add_input(decode, "--norm-config", cfg.norm_config, "Normalization config JSON");
  decode->add_option("--mode", cfg.mode, "IOB2 decoding: strict|lenient")->capture_default_str();
  decode->add_option("--min-seq-prob", cfg.min_seq_prob,
                     "Drop sentences whose sequence probability is below this value");

  auto* consensus = app.add_subcommand("consensus", "Aggregate annotations into gold labels and spans");
  add_input(consensus, "--annotations", cfg.annotations, "Annotation JSONL");
  add_input(consensus, "--corpus", cfg.corpus, "Optional corpus JSONL for span bounds checks");
  consensus->add_option("--iou-threshold", cfg.iou_threshold, "Span clustering IoU threshold")
      ->capture_default_str();

  auto* split = app.add_subcommand("split", "Stratified train/test/validation split");
  add_input(split, "--records", cfg.records, "Records JSONL (corpus schema)");
  split->add_option("--ratios", cfg.ratios, "train,test,val ratios")
      ->delimiter(',')
      ->expected(3)
      ->capture_default_str();
  split->add_option("--seed", cfg.seed, "Shuffle seed")->capture_default_str();
  split->add_option("--strata", cfg.strata, "Stratum fields: region,source")
      ->delimiter(',')
      ->capture_default_str();

  auto* eval_seq = app.add_subcommand("eval-seq", "Sequence classification report against gold");
  add_input(eval_seq, "--predictions", cfg.predictions, "Prediction JSONL");
  add_input(eval_seq, "--gold", cfg.gold, "Consensus JSONL");
  eval_seq->add_option("--threshold", cfg.threshold, "Causal if seq_prob_causal >= threshold")
      ->capture_default_str();

  auto* eval_span = app.add_subcommand("eval-span", "Exact-match span report against gold");
  add_input(eval_span, "--predictions", cfg.predictions, "Prediction JSONL");
  add_input(eval_span, "--gold", cfg.gold, "Consensus JSONL");
  eval_span->add_option("--mode", cfg.mode, "IOB2 decoding: strict|lenient")->capture_default_str();

  auto* agreement = app.add_subcommand("agreement", "Sequence vs span probability agreement");
  add_input(agreement, "--claims", cfg.claims, "Claims JSONL");

  auto add_logodds_flags = [&](CLI::App* sub) {
    add_input(sub, "--claims", cfg.claims, "Claims JSONL");
    add_input(sub, "--aggregation-map", cfg.aggregation_map, "Token aggregation map JSON");
    sub->add_option("--tokens", cfg.tokens, "Tokens of interest, comma separated")->delimiter(',');
    sub->add_option("--alpha0", cfg.alpha0, "Prior strength")->capture_default_str();
    sub->add_option("--confidence", cfg.confidence, "Confidence level")->capture_default_str();
    sub->add_option("--group-by", cfg.group_by, "Group fields: region,source")
        ->delimiter(',')
        ->capture_default_str();
  };
  auto* logodds = app.add_subcommand("logodds", "Token log-odds of cause vs effect attribution");
  add_logodds_flags(logodds);
  auto* subset = app.add_subcommand("subset-logodds", "Log-odds over claims containing a query token");
  add_logodds_flags(subset);
  subset->add_option("--query", cfg.query, "Token held constant");
  subset->add_option("--scope", cfg.scope, "either_span|cause|effect|sentence_text")
      ->capture_default_str();
  add_input(subset, "--texts", cfg.texts, "JSONL with sentence_id and text (sentence_text scope)");

  try {
    if (const auto path = prescan_config(argc, argv)) apply_config_file(cfg, *path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  const std::map<CLI::App*, std::function<int(const PipelineConfig&)>> commands{
      {stats, cmd_stats},         {filter, cmd_filter},       {decode, cmd_decode},
      {consensus, cmd_consensus}, {split, cmd_split},         {eval_seq, cmd_eval_seq},
      {eval_span, cmd_eval_span}, {agreement, cmd_agreement}, {logodds, cmd_logodds},
      {subset, cmd_subset_logodds}};
  try {
    for (const auto& [sub, fn] : commands)
      if (sub->parsed()) return fn(cfg);
    return kConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const SchemaError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kSchema;
  } catch (const Error& e) {
    std::cerr << "computation error: " << e.what() << '\n';
    return kComputation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kComputation;
  }
}
