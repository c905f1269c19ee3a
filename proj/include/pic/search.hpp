#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pic/dataset.hpp"
#include "pic/index.hpp"
#include "pic/rule.hpp"
#include "pic/scoring.hpp"
#include "pic/types.hpp"

namespace pic {

enum class Engine { pic, naive };

struct SearchParams {
  ScoreParams score;
  std::uint32_t max_length = 100;
  Engine engine = Engine::pic;
  // Replace the max-min upper bound with the min-of-con variant. Looser, so
  // it prunes less; kept for bound-comparison diagnostics only.
  bool diagnostic_min_con_bound = false;
};

struct SearchCounters {
  std::uint64_t generated = 0;           // candidates produced, pruned or not
  std::uint64_t scored = 0;              // candidates that reached scoring with coverage > 0
  std::uint64_t pruned_by_ub = 0;        // dropped before counting: bound <= incumbent score
  std::uint64_t pruned_by_con = 0;       // removed from the level after scoring: no super-rule can win
  std::uint64_t pruned_by_subrule = 0;   // joins rejected because a sub-itemset did not survive
};

// Optional capture of what pruning removed, for soundness cross-checks.
struct PruneLog {
  std::vector<Itemset> ub_removed;   // never scored; all their super-itemsets were blocked too
  std::vector<Itemset> con_removed;  // scored, but barred from generating super-itemsets
};

struct SearchResult {
  std::optional<ScoredCandidate> best;
  ClassId predicted = 0;
  bool fallback = false;  // no predicate covered anything; predicted = training majority
  std::uint32_t stopped_at_level = 0;
  SearchCounters counters;
};

namespace detail {

inline std::string feature_key(const Itemset& s, std::size_t skip = std::size_t(-1)) {
  std::string key;
  key.reserve(s.size() * 4);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == skip) continue;
    const std::uint32_t f = s[i].feature;
    key.append(reinterpret_cast<const char*>(&f), 4);
  }
  return key;
}

// All k-element subsets of {0..m-1} in lexicographic order.
template <typename Fn>
void for_each_combination(std::size_t m, std::size_t k, Fn&& fn) {
  if (k > m || k == 0) return;
  std::vector<std::uint32_t> ix(k);
  for (std::size_t i = 0; i < k; ++i) ix[i] = static_cast<std::uint32_t>(i);
  for (;;) {
    fn(std::span<const std::uint32_t>(ix));
    std::size_t i = k;
    while (i > 0 && ix[i - 1] == m - k + i - 1) --i;
    if (i == 0) return;
    ++ix[i - 1];
    for (std::size_t j = i; j < k; ++j) ix[j] = ix[j - 1] + 1;
  }
}

}  // namespace detail

// Length-1 candidates: one per feature whose test predicate covers anything.
// Emitted in ascending feature order, which fixes every later tie-break.
inline std::vector<ScoredCandidate> seed_level_one(std::span<const ValueId> x, const Dataset& ds,
                                                   const PredicateIndex& idx, ScoreParams params) {
  std::vector<ScoredCandidate> level;
  for (std::uint32_t j = 0; j < ds.num_features; ++j) {
    Itemset s(std::vector<Predicate>{{j, x[j]}});
    auto counts = count_coverage(s, idx);
    if (counts.coverage == 0) continue;
    level.push_back(best_label_for(s, counts, ds.class_counts, params));
  }
  return level;
}

struct GeneratedCandidates {
  std::vector<Itemset> itemsets;
  std::uint64_t blocked = 0;  // joins rejected by the all-sub-itemsets test
};

// Apriori join: merge pairs of surviving length-k itemsets that share their
// first k-1 predicates, then keep the merge only if every length-k
// sub-itemset also survived. Output order is lexicographic by feature.
inline GeneratedCandidates generate_candidates(std::span<const ScoredCandidate> level,
                                               std::size_t k) {
  GeneratedCandidates out;
  std::unordered_set<std::string> surviving;
  surviving.reserve(level.size() * 2);
  for (const auto& c : level) surviving.insert(detail::feature_key(c.rule.itemset));

  for (std::size_t i = 0; i < level.size(); ++i) {
    const Itemset& a = level[i].rule.itemset;
    for (std::size_t j = i + 1; j < level.size(); ++j) {
      const Itemset& b = level[j].rule.itemset;
      bool same_prefix = true;
      for (std::size_t t = 0; t + 1 < k && same_prefix; ++t) same_prefix = a[t] == b[t];
      if (!same_prefix) break;  // level is sorted; later j cannot share the prefix either

      std::vector<Predicate> merged(a.begin(), a.end());
      merged.push_back(b[k - 1]);
      Itemset candidate(std::move(merged));

      // dropping either of the last two positions yields a parent, already
      // known to survive; the prefix drops are the ones to verify
      bool ok = true;
      for (std::size_t skip = 0; skip + 2 < candidate.size() && ok; ++skip)
        ok = surviving.contains(detail::feature_key(candidate, skip));
      if (ok)
        out.itemsets.push_back(std::move(candidate));
      else
        ++out.blocked;
    }
  }
  return out;
}

namespace detail {

inline SearchResult run_level_search(std::span<const ValueId> x, const Dataset& ds,
                                     const PredicateIndex& idx, const SearchParams& params,
                                     bool prune, PruneLog* log) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  SearchResult res;
  auto& ct = res.counters;
  const std::size_t m = ds.num_features;
  const ScoreParams sp = params.score;

  std::optional<ScoredCandidate> incumbent;  // best rule across all levels so far
  double incumbent_a = kNegInf;
  auto offer = [&](const ScoredCandidate& c) {
    // strict improvement only: on ties the earlier (and shorter) rule stays
    if (c.a_score > incumbent_a) {
      incumbent_a = c.a_score;
      incumbent = c;
    }
  };

  std::vector<ScoredCandidate> level = seed_level_one(x, ds, idx, sp);
  ct.generated += m;
  ct.scored += level.size();
  double level_a = kNegInf;
  for (const auto& c : level) {
    if (c.a_score > level_a) level_a = c.a_score;
    offer(c);
  }

  double prev_a = kNegInf;  // score of the best rule of the previous level
  std::uint32_t k = 1;
  for (;;) {
    if (level_a <= prev_a) {  // no strict improvement: the shorter best wins
      res.stopped_at_level = k;
      break;
    }
    prev_a = level_a;
    if (k >= params.max_length) {
      res.stopped_at_level = k;
      break;
    }

    std::vector<Itemset> cands;
    if (prune) {
      // no super-rule of a candidate can outscore con; drop the hopeless
      // ones from the join set (they stay eligible as the returned best)
      std::erase_if(level, [&](const ScoredCandidate& c) {
        if (c.con <= incumbent_a) {
          ++ct.pruned_by_con;
          if (log) log->con_removed.push_back(c.rule.itemset);
          return true;
        }
        return false;
      });
      auto gen = generate_candidates(level, k);
      ct.pruned_by_subrule += gen.blocked;
      cands = std::move(gen.itemsets);
    } else {
      detail::for_each_combination(m, k + 1, [&](std::span<const std::uint32_t> feats) {
        std::vector<Predicate> preds;
        preds.reserve(feats.size());
        for (auto j : feats) preds.push_back({j, x[j]});
        cands.emplace_back(std::move(preds));
      });
    }
    if (cands.empty()) {  // no level k+1 exists
      res.stopped_at_level = k;
      break;
    }

    std::unordered_map<std::string, const std::vector<double>*> supports;
    if (prune) {
      supports.reserve(level.size() * 2);
      for (const auto& c : level)
        supports.emplace(feature_key(c.rule.itemset), &c.per_class_support);
    }

    std::vector<ScoredCandidate> next;
    double next_a = kNegInf;
    std::vector<const std::vector<double>*> subs;
    for (auto& s : cands) {
      ++ct.generated;
      if (prune) {
        subs.clear();
        for (std::size_t skip = 0; skip < s.size(); ++skip) {
          auto it = supports.find(feature_key(s, skip));
          if (it == supports.end())
            throw std::logic_error("sub-itemset missing from the support cache");
          subs.push_back(it->second);
        }
        const double bound = params.diagnostic_min_con_bound ? min_con_bound(subs, sp)
                                                             : upper_bound(subs, sp);
        if (bound <= incumbent_a) {
          ++ct.pruned_by_ub;
          if (log) log->ub_removed.push_back(std::move(s));
          continue;
        }
      }
      auto counts = count_coverage(s, idx);
      if (counts.coverage == 0) continue;
      auto cand = best_label_for(s, counts, ds.class_counts, sp);
      ++ct.scored;
      if (cand.a_score > next_a) next_a = cand.a_score;
      offer(cand);
      next.push_back(std::move(cand));
    }
    level = std::move(next);
    level_a = next_a;
    ++k;
  }

  res.best = std::move(incumbent);
  if (res.best) {
    res.predicted = res.best->rule.label;
  } else {
    res.fallback = true;
    res.predicted = ds.majority_class();
  }
  return res;
}

}  // namespace detail

// Level-wise search with all three pruning strategies: pre-scan upper bound,
// all-sub-itemsets candidate generation, and con-based level thinning.
inline SearchResult run_pic(std::span<const ValueId> x, const Dataset& ds,
                            const PredicateIndex& idx, const SearchParams& params,
                            PruneLog* log = nullptr) {
  return detail::run_level_search(x, ds, idx, params, true, log);
}

// Same level-wise loop and stopping rule, but every subset of the test
// predicates is enumerated and scored. The reference the pruning must match.
inline SearchResult run_naive(std::span<const ValueId> x, const Dataset& ds,
                              const PredicateIndex& idx, const SearchParams& params) {
  return detail::run_level_search(x, ds, idx, params, false, nullptr);
}

inline SearchResult predict(std::span<const ValueId> x, const Dataset& ds,
                            const PredicateIndex& idx, const SearchParams& params) {
  return params.engine == Engine::naive ? run_naive(x, ds, idx, params)
                                        : run_pic(x, ds, idx, params);
}

}  // namespace pic
