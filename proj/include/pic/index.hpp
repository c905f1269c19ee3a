#pragma once

#include <vector>

#include "pic/bitset.hpp"
#include "pic/dataset.hpp"
#include "pic/types.hpp"

namespace pic {

// For each (feature, value): which rows carry it, overall and per class.
// Built once per training fold, then shared read-only by every search.
class PredicateIndex {
 public:
  struct Entry {
    Bitset coverage;
    std::vector<Bitset> per_class;
  };

  std::size_t num_rows() const { return num_rows_; }
  std::size_t num_classes() const { return num_classes_; }

  // nullptr for kUnseen or any id outside the feature's dictionary: such a
  // predicate matches no training row.
  const Entry* entry(std::uint32_t feature, ValueId value) const {
    const auto& column = by_feature_[feature];
    if (value >= column.size()) return nullptr;
    return &column[value];
  }

  friend PredicateIndex build_index(const Dataset& ds);

 private:
  std::size_t num_rows_ = 0;
  std::size_t num_classes_ = 0;
  std::vector<std::vector<Entry>> by_feature_;
};

inline PredicateIndex build_index(const Dataset& ds) {
  PredicateIndex idx;
  idx.num_rows_ = ds.size();
  idx.num_classes_ = ds.num_classes;
  idx.by_feature_.resize(ds.num_features);
  for (std::size_t j = 0; j < ds.num_features; ++j) {
    auto& column = idx.by_feature_[j];
    column.resize(ds.domain_sizes[j]);
    for (auto& e : column) {
      e.coverage = Bitset(ds.size());
      e.per_class.assign(ds.num_classes, Bitset(ds.size()));
    }
  }
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto row = ds.row(i);
    const ClassId y = ds.labels[i];
    for (std::size_t j = 0; j < ds.num_features; ++j) {
      auto& e = idx.by_feature_[j][row[j]];
      e.coverage.set(i);
      e.per_class[y].set(i);
    }
  }
  return idx;
}

}  // namespace pic
