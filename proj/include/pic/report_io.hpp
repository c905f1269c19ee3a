#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pic/eval.hpp"
#include "pic/search.hpp"
#include "pic/types.hpp"

namespace pic {

// Shortest round-trip decimal form, the same on every run and platform.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline nlohmann::json rule_to_json(const DecodedRule& r) {
  nlohmann::json preds = nlohmann::json::array();
  for (const auto& [feature, value] : r.predicates)
    preds.push_back({{"feature", feature}, {"value", value}});
  return {{"predicates", std::move(preds)}, {"label", r.label}, {"text", r.text()}};
}

inline nlohmann::json report_to_json(const EvalReport& report, const CvConfig& cfg) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& stat : report.rules) {
    auto r = rule_to_json(stat.rule);
    r["count"] = stat.count;
    rules.push_back(std::move(r));
  }
  // wall time and thread count stay out: reports with equal seeds compare equal
  return {
      {"config",
       {{"folds", cfg.folds},
        {"repeats", cfg.repeats},
        {"seed", cfg.seed},
        {"stratified", cfg.stratified},
        {"alpha", cfg.search.score.alpha},
        {"max_length", cfg.search.max_length},
        {"engine", cfg.search.engine == Engine::naive ? "naive" : "pic"}}},
      {"accuracy_mean", report.accuracy_mean},
      {"accuracy_per_run", report.accuracy_per_run},
      {"total_predictions", report.total_predictions},
      {"correct_predictions", report.correct_predictions},
      {"fallbacks", report.fallbacks},
      {"fallback_rate", report.fallback_rate},
      {"avg_rule_length", report.avg_rule_length},
      {"n_distinct_rules", report.n_distinct_rules},
      {"distinct_rules_per_run_mean", report.distinct_rules_per_run_mean},
      {"rules", std::move(rules)},
  };
}

inline void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "run,accuracy\n";
  for (std::size_t i = 0; i < report.accuracy_per_run.size(); ++i)
    out << i << "," << format_double(report.accuracy_per_run[i]) << "\n";
}

inline void write_histogram_csv(std::ostream& out, const EvalReport& report) {
  out << "rule,count\n";
  for (const auto& [text, count] : rule_frequency_histogram(report))
    out << text << "," << count << "\n";
}

// Explanation record for one classified sample.
inline nlohmann::json explanation_to_json(std::size_t row, const SearchResult& res,
                                          const Encoder& enc) {
  nlohmann::json rec{
      {"row", row},
      {"predicted_label", enc.class_label(res.predicted)},
      {"fallback", res.fallback ? "majority_class" : "none"},
      {"stopped_at_level", res.stopped_at_level},
      {"counters",
       {{"generated", res.counters.generated},
        {"scored", res.counters.scored},
        {"pruned_by_ub", res.counters.pruned_by_ub},
        {"pruned_by_con", res.counters.pruned_by_con},
        {"pruned_by_subrule", res.counters.pruned_by_subrule}}},
  };
  if (res.best) {
    const auto& b = *res.best;
    rec["a_score"] = b.a_score;
    rec["precision"] = b.precision;
    rec["recall"] = b.recall;
    auto rule = rule_to_json(decode_rule(b.rule, enc));
    rule["a_score"] = b.a_score;
    rule["precision"] = b.precision;
    rule["recall"] = b.recall;
    rule["con"] = b.con;
    rule["coverage"] = b.coverage;
    rule["positive"] = b.positive;
    rule["length"] = b.rule.itemset.size();
    rec["rule"] = std::move(rule);
  } else {
    rec["a_score"] = nullptr;
    rec["precision"] = nullptr;
    rec["recall"] = nullptr;
    rec["rule"] = nullptr;
  }
  return rec;
}

inline void write_explanations_csv(std::ostream& out, std::span<const SearchResult> results,
                                   const Encoder& enc) {
  out << "row,predicted,fallback,stopped_at_level,a_score,precision,recall,rule,"
         "generated,scored,pruned_by_ub,pruned_by_con,pruned_by_subrule\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& res = results[i];
    out << i << "," << enc.class_label(res.predicted) << ","
        << (res.fallback ? "majority_class" : "none") << "," << res.stopped_at_level << ",";
    if (res.best) {
      out << format_double(res.best->a_score) << "," << format_double(res.best->precision) << ","
          << format_double(res.best->recall) << "," << decode_rule(res.best->rule, enc).text();
    } else {
      out << ",,,";
    }
    const auto& ct = res.counters;
    out << "," << ct.generated << "," << ct.scored << "," << ct.pruned_by_ub << ","
        << ct.pruned_by_con << "," << ct.pruned_by_subrule << "\n";
  }
}

// External rule sets arrive as a JSON array of {predicates, label} records;
// a full crossval report (object with a "rules" array) is accepted too.
inline std::vector<DecodedRule> parse_external_rules(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rule file is not valid JSON: ") + e.what());
  }
  const nlohmann::json* rules = &doc;
  if (doc.is_object()) {
    auto it = doc.find("rules");
    if (it == doc.end()) throw ParseError("rule file object has no 'rules' array");
    rules = &*it;
  }
  if (!rules->is_array()) throw ParseError("rule file must be a JSON array of rules");

  auto as_string = [](const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };

  std::vector<DecodedRule> out;
  out.reserve(rules->size());
  for (const auto& entry : *rules) {
    if (!entry.is_object() || !entry.contains("predicates") || !entry.contains("label"))
      throw ParseError("each rule needs 'predicates' and 'label' fields");
    DecodedRule r;
    r.label = as_string(entry["label"]);
    for (const auto& p : entry["predicates"]) {
      if (!p.is_object() || !p.contains("feature") || !p.contains("value"))
        throw ParseError("each predicate needs 'feature' and 'value' fields");
      r.predicates.emplace_back(as_string(p["feature"]), as_string(p["value"]));
    }
    if (r.predicates.empty()) throw ParseError("rule with empty predicate list");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace pic
