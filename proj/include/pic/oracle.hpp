#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pic/dataset.hpp"
#include "pic/rule.hpp"
#include "pic/scoring.hpp"
#include "pic/search.hpp"
#include "pic/types.hpp"

namespace pic {

// Exhaustive reference for testing the engines. Deliberately shares nothing
// with the index or the pruning code: plain row scans, full enumeration of
// every non-empty subset of the test predicates.

struct OracleEntry {
  Itemset itemset;
  std::uint32_t coverage = 0;
  std::uint32_t positive = 0;
  ClassId label = 0;
  double a_score = 0;
  std::vector<double> per_class_support;
};

struct OracleResult {
  // every coverage > 0 itemset, levels ascending, lexicographic within level
  std::vector<OracleEntry> entries;
  // true best per level (index k-1), absent when the level has no coverage
  std::vector<std::optional<OracleEntry>> level_best;
  // what the level-wise stopping rule returns, simulated on the true bests
  std::optional<OracleEntry> greedy_choice;
  std::uint32_t greedy_stop_level = 0;
  ClassId predicted = 0;
  bool fallback = false;
};

inline OracleResult run_oracle(std::span<const ValueId> x, const Dataset& ds, ScoreParams params,
                               std::uint32_t max_length = 100) {
  const std::size_t m = ds.num_features;
  if (m > 20) throw ConfigError("oracle enumeration is limited to 20 features (2^M subsets)");

  OracleResult res;
  res.level_best.resize(m);
  std::vector<std::uint32_t> counts(ds.num_classes);

  for (std::size_t k = 1; k <= m; ++k) {
    detail::for_each_combination(m, k, [&](std::span<const std::uint32_t> feats) {
      std::vector<Predicate> preds;
      preds.reserve(k);
      for (auto j : feats) preds.push_back({j, x[j]});
      Itemset s(std::move(preds));

      std::fill(counts.begin(), counts.end(), 0);
      std::uint32_t coverage = 0;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (!match(s, ds.row(i))) continue;
        ++counts[ds.labels[i]];
        ++coverage;
      }
      if (coverage == 0) return;

      OracleEntry e;
      e.itemset = std::move(s);
      e.coverage = coverage;
      e.per_class_support.resize(ds.num_classes);
      double best_a = -1;
      for (ClassId c = 0; c < ds.num_classes; ++c) {
        e.per_class_support[c] =
            ds.class_counts[c] == 0 ? 0.0 : double(counts[c]) / ds.class_counts[c];
        if (ds.class_counts[c] == 0) continue;
        const double prec = double(counts[c]) / coverage;
        const double rec = double(counts[c]) / ds.class_counts[c];
        const double a = params.alpha * prec + (1 - params.alpha) * rec;
        if (a > best_a || (a == best_a && counts[c] > e.positive)) {
          e.label = c;
          e.positive = counts[c];
          best_a = a;
        }
      }
      e.a_score = best_a;

      auto& lb = res.level_best[k - 1];
      if (!lb || e.a_score > lb->a_score) lb = e;
      res.entries.push_back(std::move(e));
    });
  }

  // Simulate the engines' stopping rule on the per-level true bests: continue
  // only while the level best strictly improves, stop at the length cap.
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double prev_a = kNegInf;
  double inc_a = kNegInf;
  const std::uint32_t cap = std::min<std::uint32_t>(max_length, static_cast<std::uint32_t>(m));
  std::uint32_t k = 1;
  for (;; ++k) {
    const auto& lb = res.level_best[k - 1];
    const double level_a = lb ? lb->a_score : kNegInf;
    if (level_a <= prev_a) break;
    if (level_a > inc_a) {
      inc_a = level_a;
      res.greedy_choice = lb;
    }
    prev_a = level_a;
    if (k >= cap) break;
  }
  res.greedy_stop_level = k;

  if (res.greedy_choice) {
    res.predicted = res.greedy_choice->label;
  } else {
    res.fallback = true;
    res.predicted = ds.majority_class();
  }
  return res;
}

}  // namespace pic
