#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pic/types.hpp"

namespace pic {

// One equality test: feature j has value v.
struct Predicate {
  std::uint32_t feature = 0;
  ValueId value = 0;

  friend auto operator<=>(const Predicate&, const Predicate&) = default;
};

// A conjunction of predicates, at most one per feature, kept sorted by
// feature index so itemsets compare and join cheaply.
class Itemset {
 public:
  Itemset() = default;

  explicit Itemset(std::vector<Predicate> preds) : preds_(std::move(preds)) {
    std::sort(preds_.begin(), preds_.end());
    for (std::size_t i = 1; i < preds_.size(); ++i)
      if (preds_[i].feature == preds_[i - 1].feature)
        throw std::invalid_argument("itemset has two predicates on one feature");
  }

  std::size_t size() const { return preds_.size(); }
  bool empty() const { return preds_.empty(); }
  const Predicate& operator[](std::size_t i) const { return preds_[i]; }
  auto begin() const { return preds_.begin(); }
  auto end() const { return preds_.end(); }

  bool subset_of(const Itemset& other) const {
    std::size_t i = 0;
    for (const auto& p : other.preds_) {
      if (i == preds_.size()) break;
      if (preds_[i] == p) ++i;
    }
    return i == preds_.size();
  }

  friend bool operator==(const Itemset&, const Itemset&) = default;

 private:
  std::vector<Predicate> preds_;
};

struct Rule {
  Itemset itemset;
  ClassId label = 0;
};

inline bool match(const Itemset& s, std::span<const ValueId> x) {
  for (const auto& p : s)
    if (x[p.feature] != p.value) return false;
  return true;
}

}  // namespace pic
