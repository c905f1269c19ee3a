#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pic/dataset.hpp"
#include "pic/eval.hpp"
#include "pic/index.hpp"
#include "pic/oracle.hpp"
#include "pic/report_io.hpp"
#include "pic/search.hpp"
#include "pic/threadpool.hpp"
#include "pic/types.hpp"

namespace pic::cli {

// Exit codes: 0 ok, 1 semantic disagreement (oracle-check), 2 I/O or parse
// trouble, 3 bad configuration.
inline constexpr int kOk = 0;
inline constexpr int kDisagreement = 1;
inline constexpr int kIoError = 2;
inline constexpr int kConfigError = 3;

namespace detail {

struct Options {
  std::string data_path;
  std::string test_path;
  std::string ours_path;
  std::string theirs_path;
  std::string output_path;
  std::string histogram_path;
  std::string format = "json";
  std::string target;
  std::string missing = "?";
  std::string delimiter = ",";
  std::string engine = "pic";
  double alpha = 0.9;
  std::uint32_t max_length = 100;
  int bins = 5;
  std::vector<std::string> bins_for;      // name=count
  std::vector<std::string> categorical;   // kind overrides
  std::vector<std::string> numeric;
  bool all_categorical = false;
  std::uint32_t folds = 5;
  std::uint32_t repeats = 5;
  std::uint64_t seed = 1;
  bool no_stratify = false;
  unsigned threads = 1;
};

inline void add_data_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--data", o.data_path, "training dataset (delimited text with header)")
      ->required();
  cmd.add_option("--target", o.target, "target column name (default: last column)")
      ->envname("PIC_TARGET");
  cmd.add_option("--delimiter", o.delimiter, "field delimiter (default ',')")
      ->envname("PIC_DELIMITER");
  cmd.add_option("--missing", o.missing, "missing-value token (default '?')")
      ->envname("PIC_MISSING");
  cmd.add_option("--bins", o.bins, "equal-width bins for numeric features (default 5)")
      ->envname("PIC_BINS");
  cmd.add_option("--bins-for", o.bins_for, "per-feature bin count, as name=count (repeatable)");
  cmd.add_option("--categorical", o.categorical, "treat this feature as categorical (repeatable)");
  cmd.add_option("--numeric", o.numeric, "treat this feature as numeric (repeatable)");
  cmd.add_flag("--all-categorical", o.all_categorical,
               "treat every feature as categorical (integer-coded datasets)");
}

inline void add_search_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--alpha", o.alpha, "precision weight in the rule score (default 0.9)")
      ->check(CLI::Range(0.0, 1.0))
      ->envname("PIC_ALPHA");
  cmd.add_option("--max-length", o.max_length, "maximum rule length (default 100)")
      ->check(CLI::Range(std::uint32_t{1}, std::uint32_t{1u << 20}))
      ->envname("PIC_MAX_LENGTH");
  cmd.add_option("--engine", o.engine, "search engine: pic or naive")
      ->check(CLI::IsMember({"pic", "naive"}))
      ->envname("PIC_ENGINE");
  cmd.add_option("--threads", o.threads, "worker threads; 0 = all cores (default 1)")
      ->envname("PIC_THREADS");
}

inline void add_output_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--output", o.output_path, "write results here instead of stdout");
  cmd.add_option("--format", o.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->envname("PIC_FORMAT");
}

inline LoadConfig load_config(const Options& o) {
  if (o.delimiter.size() != 1)
    throw ConfigError("--delimiter must be a single character, got '" + o.delimiter + "'");
  LoadConfig cfg;
  cfg.delimiter = o.delimiter[0];
  cfg.missing_token = o.missing;
  cfg.target = o.target;
  cfg.default_bins = o.bins;
  for (const auto& kv : o.bins_for) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == kv.size())
      throw ConfigError("--bins-for expects name=count, got '" + kv + "'");
    int count = 0;
    if (!CLI::detail::lexical_cast(kv.substr(eq + 1), count) || count < 2)
      throw ConfigError("--bins-for '" + kv + "': count must be an integer >= 2");
    cfg.bins_override[kv.substr(0, eq)] = count;
  }
  for (const auto& name : o.categorical) cfg.kind_override[name] = FeatureKind::categorical;
  for (const auto& name : o.numeric) {
    if (cfg.kind_override.count(name))
      throw ConfigError("feature '" + name + "' is both --categorical and --numeric");
    cfg.kind_override[name] = FeatureKind::numeric;
  }
  cfg.all_categorical = o.all_categorical;
  return cfg;
}

inline SearchParams search_params(const Options& o) {
  SearchParams sp;
  sp.score.alpha = o.alpha;
  sp.max_length = o.max_length;
  sp.engine = o.engine == "naive" ? Engine::naive : Engine::pic;
  return sp;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

inline RawDataset load_training(const Options& o, const LoadConfig& cfg) {
  auto in = open_input(o.data_path);
  try {
    return load_dataset(in, cfg);
  } catch (const ParseError& e) {
    throw ParseError(o.data_path + ": " + e.what());
  }
}

inline std::vector<std::vector<std::string>> load_test(const Options& o, const Schema& schema,
                                                       const LoadConfig& cfg) {
  auto in = open_input(o.test_path);
  try {
    return load_test_rows(in, schema, cfg);
  } catch (const ParseError& e) {
    throw ParseError(o.test_path + ": " + e.what());
  }
}

// Routes writes to --output or the caller's stream, and keeps file and
// stdout bytes identical for the same inputs.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ParseError("cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }
  bool is_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

inline int cmd_predict(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(o);
  const auto raw = load_training(o, cfg);
  const auto test_rows = load_test(o, raw.schema, cfg);
  const auto sp = search_params(o);

  const auto ids = all_row_ids(raw);
  const auto disc = fit_discretizer(raw, ids, cfg.missing_token);
  const auto enc = Encoder::fit(raw, ids, disc, cfg.missing_token);
  const auto ds = encode(raw, ids, enc);
  const auto idx = build_index(ds);

  std::vector<SearchResult> results(test_rows.size());
  parallel_for(test_rows.size(), o.threads, [&](std::size_t i) {
    results[i] = predict(enc.encode_row(test_rows[i]), ds, idx, sp);
  });

  OutputTarget target(o.output_path, out);
  if (o.format == "csv") {
    write_explanations_csv(target.stream(), results, enc);
  } else {
    nlohmann::json records = nlohmann::json::array();
    for (std::size_t i = 0; i < results.size(); ++i)
      records.push_back(explanation_to_json(i, results[i], enc));
    target.stream() << records.dump(2) << "\n";
  }
  if (target.is_file())
    err << "wrote " << results.size() << " predictions to " << o.output_path << "\n";
  return kOk;
}

inline int cmd_crossval(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(o);
  const auto raw = load_training(o, cfg);

  CvConfig cv;
  cv.folds = o.folds;
  cv.repeats = o.repeats;
  cv.seed = o.seed;
  cv.stratified = !o.no_stratify;
  cv.search = search_params(o);
  cv.threads = o.threads;

  const auto report = run_cv(raw, cv, cfg);

  OutputTarget target(o.output_path, out);
  if (o.format == "csv")
    write_report_csv(target.stream(), report);
  else
    target.stream() << report_to_json(report, cv).dump(2) << "\n";
  if (!o.histogram_path.empty()) {
    OutputTarget hist(o.histogram_path, out);
    write_histogram_csv(hist.stream(), report);
  }
  if (target.is_file()) out << "accuracy_mean " << format_double(report.accuracy_mean) << "\n";
  err << "wall_time_sec " << format_double(report.wall_time_sec) << "\n";
  return kOk;
}

inline int cmd_oracle_check(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(o);
  const auto raw = load_training(o, cfg);
  if (raw.schema.feature_count() > 20) {
    err << "oracle-check: " << raw.schema.feature_count()
        << " features would need 2^M exhaustive enumeration; limit is 20\n";
    return kIoError;
  }
  const auto test_rows = load_test(o, raw.schema, cfg);
  const auto sp = search_params(o);

  const auto ids = all_row_ids(raw);
  const auto disc = fit_discretizer(raw, ids, cfg.missing_token);
  const auto enc = Encoder::fit(raw, ids, disc, cfg.missing_token);
  const auto ds = encode(raw, ids, enc);
  const auto idx = build_index(ds);

  std::size_t disagreements = 0;
  for (std::size_t i = 0; i < test_rows.size(); ++i) {
    const auto x = enc.encode_row(test_rows[i]);
    const auto pic_res = run_pic(x, ds, idx, sp);
    const auto naive_res = run_naive(x, ds, idx, sp);
    const auto oracle_res = run_oracle(x, ds, sp.score, sp.max_length);

    const bool have = pic_res.best.has_value();
    bool agree = have == naive_res.best.has_value() &&
                 have == oracle_res.greedy_choice.has_value();
    if (agree && have) {
      agree = pic_res.best->a_score == naive_res.best->a_score &&
              pic_res.best->a_score == oracle_res.greedy_choice->a_score &&
              pic_res.best->rule.itemset == naive_res.best->rule.itemset &&
              pic_res.best->rule.itemset == oracle_res.greedy_choice->itemset &&
              pic_res.best->rule.label == naive_res.best->rule.label &&
              pic_res.best->rule.label == oracle_res.greedy_choice->label;
    }
    if (!agree) {
      ++disagreements;
      auto describe = [&](const std::optional<ScoredCandidate>& c) {
        return c ? decode_rule(c->rule, enc).text() + " a=" + format_double(c->a_score)
                 : std::string("(none)");
      };
      out << "row " << i << ": pic " << describe(pic_res.best) << " | naive "
          << describe(naive_res.best) << " | oracle ";
      if (oracle_res.greedy_choice) {
        Rule r{oracle_res.greedy_choice->itemset, oracle_res.greedy_choice->label};
        out << decode_rule(r, enc).text() << " a=" << format_double(oracle_res.greedy_choice->a_score);
      } else {
        out << "(none)";
      }
      out << "\n";
    }
  }
  if (disagreements) {
    out << disagreements << " of " << test_rows.size() << " rows disagree\n";
    return kDisagreement;
  }
  out << "ok: pic, naive, and oracle agree on " << test_rows.size() << " rows\n";
  return kOk;
}

inline int cmd_rules_compare(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(o);
  const auto raw = load_training(o, cfg);
  const auto vocab = vocabulary_of(raw, cfg);

  auto read_rules = [&](const std::string& path) {
    auto in = open_input(path);
    try {
      auto rules = parse_external_rules(in);
      validate_rules(rules, vocab);
      return rules;
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what());
    }
  };
  const auto ours = read_rules(o.ours_path);
  const auto theirs = read_rules(o.theirs_path);

  const auto cmp = compare_rule_sets(ours, theirs);
  out << "common " << cmp.common.size() << "\n";
  out << "personalized " << cmp.personalized.size() << "\n";
  for (const auto& r : cmp.common) out << "common: " << r.text() << "\n";
  for (const auto& r : cmp.personalized) out << "personalized: " << r.text() << "\n";

  if (!o.output_path.empty()) {
    OutputTarget target(o.output_path, out);
    nlohmann::json doc{{"common", nlohmann::json::array()},
                       {"personalized", nlohmann::json::array()}};
    for (const auto& r : cmp.common) doc["common"].push_back(rule_to_json(r));
    for (const auto& r : cmp.personalized) doc["personalized"].push_back(rule_to_json(r));
    target.stream() << doc.dump(2) << "\n";
    err << "wrote comparison to " << o.output_path << "\n";
  }
  return kOk;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  detail::Options o;
  CLI::App app{"per-sample rule search: one short conjunctive rule per prediction"};
  app.name("pic");
  app.require_subcommand(1);

  auto* predict = app.add_subcommand("predict", "classify test rows, one explained rule each");
  detail::add_data_flags(*predict, o);
  detail::add_search_flags(*predict, o);
  detail::add_output_flags(*predict, o);
  predict->add_option("--test", o.test_path, "rows to classify")->required();

  auto* crossval = app.add_subcommand("crossval", "repeated stratified k-fold cross-validation");
  detail::add_data_flags(*crossval, o);
  detail::add_search_flags(*crossval, o);
  detail::add_output_flags(*crossval, o);
  crossval->add_option("--folds", o.folds, "fold count (default 5)")->envname("PIC_FOLDS");
  crossval->add_option("--repeats", o.repeats, "repetitions (default 5)")->envname("PIC_REPEATS");
  crossval->add_option("--seed", o.seed, "shuffle seed (default 1)")->envname("PIC_SEED");
  crossval->add_flag("--no-stratify", o.no_stratify, "plain shuffled folds");
  crossval->add_option("--histogram", o.histogram_path, "also write rule,count CSV here");

  auto* oracle = app.add_subcommand(
      "oracle-check", "verify pruned, naive, and exhaustive search agree on every test row");
  detail::add_data_flags(*oracle, o);
  detail::add_search_flags(*oracle, o);
  oracle->add_option("--test", o.test_path, "rows to check")->required();

  auto* rules = app.add_subcommand("rules-compare",
                                   "split our rules into common vs personalized against another "
                                   "method's rule set");
  detail::add_data_flags(*rules, o);
  rules->add_option("--ours", o.ours_path, "our rules (JSON; crossval report works)")->required();
  rules->add_option("--theirs", o.theirs_path, "external rule set (JSON)")->required();
  rules->add_option("--output", o.output_path, "write JSON comparison here");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("pic");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "pic: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (predict->parsed()) return detail::cmd_predict(o, out, err);
    if (crossval->parsed()) return detail::cmd_crossval(o, out, err);
    if (oracle->parsed()) return detail::cmd_oracle_check(o, out, err);
    return detail::cmd_rules_compare(o, out, err);
  } catch (const ConfigError& e) {
    err << "pic: " << e.what() << "\n";
    return kConfigError;
  } catch (const ParseError& e) {
    err << "pic: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "pic: " << e.what() << "\n";
    return kIoError;
  }
}

}  // namespace pic::cli
