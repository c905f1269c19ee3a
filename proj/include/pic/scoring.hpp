#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pic/bitset.hpp"
#include "pic/index.hpp"
#include "pic/rule.hpp"
#include "pic/types.hpp"

namespace pic {

struct ScoreParams {
  double alpha = 0.9;  // weight of precision; 1 - alpha weighs recall
};

struct CoverageCounts {
  std::uint32_t coverage = 0;
  std::vector<std::uint32_t> per_class;
};

// Rows matching every predicate, split by class. All-bitset: intersect the
// coverage bitsets, then popcount the intersection against each class.
inline CoverageCounts count_coverage(const Itemset& s, const PredicateIndex& idx) {
  CoverageCounts out;
  out.per_class.assign(idx.num_classes(), 0);
  std::vector<const PredicateIndex::Entry*> entries;
  entries.reserve(s.size());
  for (const auto& p : s) {
    const auto* e = idx.entry(p.feature, p.value);
    if (!e) return out;  // unseen value: nothing matches
    entries.push_back(e);
  }
  Bitset acc = entries.front()->coverage;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    acc &= entries[i]->coverage;
    if (!acc.any()) return out;
  }
  for (ClassId c = 0; c < idx.num_classes(); ++c) {
    out.per_class[c] = static_cast<std::uint32_t>(acc.count_and(entries.front()->per_class[c]));
    out.coverage += out.per_class[c];
  }
  return out;
}

// A rule with everything the search needs cached alongside it.
struct ScoredCandidate {
  Rule rule;
  std::uint32_t coverage = 0;
  std::uint32_t positive = 0;                 // rows matching the itemset with the rule's label
  std::vector<double> per_class_support;      // positive_c / class_count_c
  double precision = 0;
  double recall = 0;
  double a_score = 0;                         // alpha * precision + (1 - alpha) * recall
  double con = 0;                             // bound on every super-rule's score
};

inline ScoredCandidate score(const Rule& rule, const CoverageCounts& counts,
                             std::span<const std::uint32_t> class_counts, ScoreParams params) {
  if (counts.coverage == 0)
    throw std::invalid_argument("score is undefined for zero-coverage rules");
  ScoredCandidate out;
  out.rule = rule;
  out.coverage = counts.coverage;
  out.positive = counts.per_class[rule.label];
  out.per_class_support.resize(class_counts.size());
  double max_support = 0;
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    out.per_class_support[c] =
        class_counts[c] == 0 ? 0.0 : double(counts.per_class[c]) / class_counts[c];
    max_support = std::max(max_support, out.per_class_support[c]);
  }
  out.precision = double(out.positive) / out.coverage;
  out.recall = out.per_class_support[rule.label];
  out.a_score = params.alpha * out.precision + (1 - params.alpha) * out.recall;
  out.con = params.alpha + (1 - params.alpha) * max_support;
  return out;
}

// Labels the itemset with its best class: argmax of the score, ties broken
// by larger positive count, then smaller class id.
inline ScoredCandidate best_label_for(const Itemset& s, const CoverageCounts& counts,
                                      std::span<const std::uint32_t> class_counts,
                                      ScoreParams params) {
  if (counts.coverage == 0)
    throw std::invalid_argument("score is undefined for zero-coverage itemsets");
  ClassId best = 0;
  double best_a = -1;
  std::uint32_t best_pos = 0;
  for (ClassId c = 0; c < class_counts.size(); ++c) {
    if (class_counts[c] == 0) continue;  // class absent from this training fold
    const double prec = double(counts.per_class[c]) / counts.coverage;
    const double rec = double(counts.per_class[c]) / class_counts[c];
    const double a = params.alpha * prec + (1 - params.alpha) * rec;
    if (a > best_a || (a == best_a && counts.per_class[c] > best_pos)) {
      best = c;
      best_a = a;
      best_pos = counts.per_class[c];
    }
  }
  return score(Rule{s, best}, counts, class_counts, params);
}

// Pre-scan bound on the score of a length-(k+1) candidate, computed from the
// cached supports of its k+1 sub-itemsets of length k: support is
// anti-monotone, so for each class the smallest sub-support already bounds
// the candidate's support, and precision is at most 1.
inline double upper_bound(const std::vector<const std::vector<double>*>& sub_supports,
                          ScoreParams params) {
  if (sub_supports.empty())
    throw std::invalid_argument("upper_bound needs at least one sub-itemset");
  const std::size_t classes = sub_supports.front()->size();
  double best = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    double m = (*sub_supports.front())[c];
    for (std::size_t i = 1; i < sub_supports.size(); ++i)
      m = std::min(m, (*sub_supports[i])[c]);
    best = std::max(best, m);
  }
  return params.alpha + (1 - params.alpha) * best;
}

// Looser diagnostic bound: the smallest con among the sub-itemsets. Sound for
// the same reason, but it maximizes over classes before minimizing over
// sub-itemsets, so it can only be >= upper_bound (max-min <= min-max).
inline double min_con_bound(const std::vector<const std::vector<double>*>& sub_supports,
                            ScoreParams params) {
  if (sub_supports.empty())
    throw std::invalid_argument("min_con_bound needs at least one sub-itemset");
  double best = 1;
  for (const auto* sup : sub_supports) {
    double m = 0;
    for (double v : *sup) m = std::max(m, v);
    best = std::min(best, params.alpha + (1 - params.alpha) * m);
  }
  return best;
}

}  // namespace pic
