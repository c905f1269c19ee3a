#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pic/dataset.hpp"
#include "pic/index.hpp"
#include "pic/rng.hpp"
#include "pic/search.hpp"
#include "pic/threadpool.hpp"
#include "pic/types.hpp"

namespace pic {

struct CvConfig {
  std::uint32_t folds = 5;
  std::uint32_t repeats = 5;
  std::uint64_t seed = 1;
  bool stratified = true;
  SearchParams search;
  unsigned threads = 1;
};

// A rule in display vocabulary: (feature name, value label) pairs plus the
// class label. Rules from different folds are only comparable after
// decoding, since each fold builds its own value dictionaries.
struct DecodedRule {
  std::vector<std::pair<std::string, std::string>> predicates;  // schema feature order
  std::string label;

  std::string text() const {
    std::string out;
    for (const auto& [f, v] : predicates) {
      out += "{";
      out += f;
      out += "=";
      out += v;
      out += "} ";
    }
    out += "-> ";
    out += label;
    return out;
  }
};

struct RuleStat {
  DecodedRule rule;
  std::string text;
  std::uint64_t count = 0;
};

struct EvalReport {
  double accuracy_mean = 0;
  std::vector<double> accuracy_per_run;
  std::uint64_t total_predictions = 0;
  std::uint64_t correct_predictions = 0;
  std::uint64_t fallbacks = 0;
  double fallback_rate = 0;
  double avg_rule_length = 0;         // mean over returned-rule instances
  std::uint64_t n_distinct_rules = 0; // pooled over the whole procedure
  double distinct_rules_per_run_mean = 0;
  std::vector<RuleStat> rules;        // count desc, then text asc
  double wall_time_sec = 0;           // never serialized: outputs stay byte-reproducible
};

inline DecodedRule decode_rule(const Rule& r, const Encoder& enc) {
  DecodedRule out;
  out.predicates.reserve(r.itemset.size());
  for (const auto& p : r.itemset)
    out.predicates.emplace_back(enc.schema().features[p.feature].name,
                                enc.value_label(p.feature, p.value));
  out.label = enc.class_label(r.label);
  return out;
}

inline std::vector<std::uint32_t> assign_folds(std::span<const ClassId> labels,
                                               std::size_t num_classes, std::uint32_t folds,
                                               bool stratified, Rng& rng) {
  std::vector<std::uint32_t> fold_of(labels.size());
  std::size_t cursor = 0;
  auto deal = [&](std::vector<std::uint32_t>& ids) {
    rng.shuffle(ids);
    for (auto i : ids) fold_of[i] = static_cast<std::uint32_t>(cursor++ % folds);
  };
  if (stratified) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      std::vector<std::uint32_t> ids;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == c) ids.push_back(static_cast<std::uint32_t>(i));
      deal(ids);
    }
  } else {
    std::vector<std::uint32_t> ids(labels.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::uint32_t>(i);
    deal(ids);
  }
  return fold_of;
}

inline EvalReport run_cv(const RawDataset& raw, const CvConfig& cfg,
                         const LoadConfig& load_cfg = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.folds < 2) throw ConfigError("folds must be >= 2");
  if (cfg.repeats < 1) throw ConfigError("repeats must be >= 1");
  if (cfg.folds > raw.size()) throw ConfigError("more folds than rows");
  const std::size_t num_classes = raw.schema.class_count();
  if (cfg.stratified) {
    std::vector<std::size_t> per_class(num_classes, 0);
    for (auto y : raw.labels) ++per_class[y];
    for (std::size_t c = 0; c < num_classes; ++c)
      if (per_class[c] < cfg.folds)
        throw ConfigError("class '" + raw.schema.classes[c] + "' has " +
                          std::to_string(per_class[c]) + " rows, fewer than " +
                          std::to_string(cfg.folds) + " folds; stratification impossible");
  }

  EvalReport report;
  std::map<std::string, RuleStat> pooled;
  std::uint64_t total_rule_length = 0;
  std::uint64_t rules_returned = 0;

  struct Prediction {
    ClassId label;
    bool fallback;
    std::optional<Rule> rule;
  };

  for (std::uint32_t rep = 0; rep < cfg.repeats; ++rep) {
    Rng rng(mix_seed(cfg.seed, rep));
    const auto fold_of = assign_folds(raw.labels, num_classes, cfg.folds, cfg.stratified, rng);
    std::uint64_t rep_correct = 0, rep_total = 0;
    std::set<std::string> rep_distinct;

    for (std::uint32_t fold = 0; fold < cfg.folds; ++fold) {
      std::vector<std::uint32_t> train_ids, test_ids;
      for (std::size_t i = 0; i < raw.size(); ++i)
        (fold_of[i] == fold ? test_ids : train_ids).push_back(static_cast<std::uint32_t>(i));
      if (test_ids.empty()) continue;

      const auto disc = fit_discretizer(raw, train_ids, load_cfg.missing_token);
      const auto enc = Encoder::fit(raw, train_ids, disc, load_cfg.missing_token);
      const auto ds = encode(raw, train_ids, enc);
      const auto idx = build_index(ds);

      std::vector<Prediction> results(test_ids.size());
      parallel_for(test_ids.size(), cfg.threads, [&](std::size_t i) {
        const auto x = enc.encode_row(raw.rows[test_ids[i]]);
        auto res = predict(x, ds, idx, cfg.search);
        results[i] = {res.predicted, res.fallback,
                      res.best ? std::optional<Rule>(res.best->rule) : std::nullopt};
      });

      for (std::size_t i = 0; i < test_ids.size(); ++i) {
        const auto& pred = results[i];
        ++rep_total;
        if (pred.label == raw.labels[test_ids[i]]) ++rep_correct;
        if (pred.fallback) {
          ++report.fallbacks;
          continue;
        }
        const auto decoded = decode_rule(*pred.rule, enc);
        const auto text = decoded.text();
        auto [it, inserted] = pooled.emplace(text, RuleStat{decoded, text, 0});
        ++it->second.count;
        rep_distinct.insert(text);
        total_rule_length += pred.rule->itemset.size();
        ++rules_returned;
      }
    }

    report.accuracy_per_run.push_back(double(rep_correct) / rep_total);
    report.total_predictions += rep_total;
    report.correct_predictions += rep_correct;
    report.distinct_rules_per_run_mean += double(rep_distinct.size());
  }

  report.accuracy_mean = 0;
  for (double a : report.accuracy_per_run) report.accuracy_mean += a;
  report.accuracy_mean /= report.accuracy_per_run.size();
  report.distinct_rules_per_run_mean /= cfg.repeats;
  report.fallback_rate = double(report.fallbacks) / report.total_predictions;
  report.avg_rule_length = rules_returned ? double(total_rule_length) / rules_returned : 0;
  report.n_distinct_rules = pooled.size();
  report.rules.reserve(pooled.size());
  for (auto& [text, stat] : pooled) report.rules.push_back(std::move(stat));
  std::sort(report.rules.begin(), report.rules.end(), [](const RuleStat& a, const RuleStat& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.text < b.text;
  });
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline std::vector<std::pair<std::string, std::uint64_t>> rule_frequency_histogram(
    const EvalReport& report) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  out.reserve(report.rules.size());
  for (const auto& r : report.rules) out.emplace_back(r.text, r.count);
  return out;
}

// ---- common vs personalized rules ----

namespace detail {

inline std::vector<std::pair<std::string, std::string>> sorted_predicates(const DecodedRule& r) {
  auto preds = r.predicates;
  std::sort(preds.begin(), preds.end());
  return preds;
}

inline bool predicates_subset(const std::vector<std::pair<std::string, std::string>>& small,
                              const std::vector<std::pair<std::string, std::string>>& big) {
  std::size_t i = 0;
  for (const auto& p : big) {
    if (i == small.size()) break;
    if (small[i] == p) ++i;
  }
  return i == small.size();
}

}  // namespace detail

struct RuleSetComparison {
  std::vector<DecodedRule> common;
  std::vector<DecodedRule> personalized;
};

// A rule of ours is "common" when some external rule with the same label
// carries a superset of its predicates; everything else is personalized.
inline RuleSetComparison compare_rule_sets(std::span<const DecodedRule> ours,
                                           std::span<const DecodedRule> theirs) {
  std::vector<std::vector<std::pair<std::string, std::string>>> theirs_sorted;
  theirs_sorted.reserve(theirs.size());
  for (const auto& r : theirs) theirs_sorted.push_back(detail::sorted_predicates(r));

  RuleSetComparison out;
  for (const auto& r : ours) {
    const auto mine = detail::sorted_predicates(r);
    bool covered = false;
    for (std::size_t t = 0; t < theirs.size() && !covered; ++t)
      covered = theirs[t].label == r.label && detail::predicates_subset(mine, theirs_sorted[t]);
    (covered ? out.common : out.personalized).push_back(r);
  }
  return out;
}

// Display vocabulary of a dataset: every value label a decoded rule could
// legally mention. Numeric features contribute their positional bin names.
struct Vocabulary {
  std::map<std::string, std::set<std::string>> values;  // feature name -> labels
  std::set<std::string> labels;
};

inline Vocabulary vocabulary_of(const RawDataset& raw, const LoadConfig& cfg) {
  Vocabulary v;
  for (std::size_t j = 0; j < raw.schema.feature_count(); ++j) {
    const auto& spec = raw.schema.features[j];
    auto& vals = v.values[spec.name];
    if (spec.kind == FeatureKind::numeric) {
      for (int b = 0; b < spec.bins; ++b) vals.insert("b" + std::to_string(b));
      for (const auto& row : raw.rows)
        if (row[j] == cfg.missing_token) {
          vals.insert(cfg.missing_token);
          break;
        }
    } else {
      for (const auto& row : raw.rows) vals.insert(row[j]);
    }
  }
  for (const auto& c : raw.schema.classes) v.labels.insert(c);
  return v;
}

inline void validate_rules(std::span<const DecodedRule> rules, const Vocabulary& vocab) {
  for (const auto& r : rules) {
    for (const auto& [feature, value] : r.predicates) {
      auto it = vocab.values.find(feature);
      if (it == vocab.values.end()) throw ParseError("unknown feature '" + feature + "' in rule");
      if (!it->second.contains(value))
        throw ParseError("unknown value '" + value + "' for feature '" + feature + "' in rule");
    }
    if (!vocab.labels.contains(r.label))
      throw ParseError("unknown class label '" + r.label + "' in rule");
  }
}

}  // namespace pic
