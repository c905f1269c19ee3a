#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pic/csv.hpp"
#include "pic/types.hpp"

namespace pic {

enum class FeatureKind { categorical, numeric };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::categorical;
  int bins = 5;  // used only when kind == numeric
};

struct Schema {
  std::vector<FeatureSpec> features;
  std::vector<std::string> classes;  // first-appearance order
  std::string target;

  std::size_t feature_count() const { return features.size(); }
  std::size_t class_count() const { return classes.size(); }

  std::size_t feature_index(const std::string& name) const {
    for (std::size_t j = 0; j < features.size(); ++j)
      if (features[j].name == name) return j;
    throw ParseError("unknown feature '" + name + "'");
  }
};

struct LoadConfig {
  char delimiter = ',';
  std::string missing_token = "?";
  std::string target;  // empty: last column
  int default_bins = 5;
  std::map<std::string, int> bins_override;           // feature name -> g_j
  std::map<std::string, FeatureKind> kind_override;   // feature name -> kind
  bool all_categorical = false;
};

// Parsed but not yet encoded: feature values are the original strings.
struct RawDataset {
  Schema schema;
  std::vector<std::vector<std::string>> rows;  // schema feature order
  std::vector<ClassId> labels;

  std::size_t size() const { return rows.size(); }
};

// Strict full-token number parse; "3.5" yes, "3.5x" or "" no.
inline bool parse_number(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline RawDataset load_dataset(std::istream& in, const LoadConfig& cfg) {
  auto table = read_delimited(in, cfg.delimiter);
  if (table.rows.empty()) throw ParseError("dataset has a header but no rows");

  const std::string target = cfg.target.empty() ? table.header.back() : cfg.target;
  std::size_t target_col = table.header.size();
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c] == target) target_col = c;
  if (target_col == table.header.size())
    throw ParseError("target column not found: '" + target + "'");

  RawDataset raw;
  raw.schema.target = target;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == target_col) continue;
    feature_cols.push_back(c);
    raw.schema.features.push_back({table.header[c], FeatureKind::categorical, cfg.default_bins});
  }
  if (raw.schema.features.empty()) throw ParseError("dataset has no feature columns");

  // kind: explicit override > --all-categorical > inference (numeric iff the
  // column has a non-missing value and every non-missing value is a number)
  for (std::size_t j = 0; j < feature_cols.size(); ++j) {
    auto& spec = raw.schema.features[j];
    if (auto it = cfg.bins_override.find(spec.name); it != cfg.bins_override.end())
      spec.bins = it->second;
    if (spec.bins < 2) throw ConfigError("bins for '" + spec.name + "' must be >= 2");

    auto forced = cfg.kind_override.find(spec.name);
    if (forced != cfg.kind_override.end()) {
      spec.kind = forced->second;
      if (spec.kind == FeatureKind::numeric) {
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
          const std::string& v = table.rows[i][feature_cols[j]];
          double d;
          if (v != cfg.missing_token && !parse_number(v, d))
            throw ParseError("line " + std::to_string(table.line_numbers[i]) + ": feature '" +
                             spec.name + "' is configured numeric but value '" + v +
                             "' is not a number");
        }
      }
      continue;
    }
    if (cfg.all_categorical) continue;  // default kind is categorical
    bool numeric = false;
    for (const auto& row : table.rows) {
      const std::string& v = row[feature_cols[j]];
      if (v == cfg.missing_token) continue;
      double d;
      if (!parse_number(v, d)) {
        numeric = false;
        break;
      }
      numeric = true;
    }
    if (numeric) spec.kind = FeatureKind::numeric;
  }

  std::unordered_map<std::string, ClassId> class_ids;
  raw.rows.reserve(table.rows.size());
  raw.labels.reserve(table.rows.size());
  for (auto& fields : table.rows) {
    const std::string& y = fields[target_col];
    auto [it, inserted] = class_ids.emplace(y, static_cast<ClassId>(raw.schema.classes.size()));
    if (inserted) raw.schema.classes.push_back(y);
    raw.labels.push_back(it->second);
    std::vector<std::string> row;
    row.reserve(feature_cols.size());
    for (auto c : feature_cols) row.push_back(std::move(fields[c]));
    raw.rows.push_back(std::move(row));
  }
  return raw;
}

// Reads rows to classify. Columns are aligned to the training schema by
// header name; the target column, if present, is ignored (it may hold "?").
inline std::vector<std::vector<std::string>> load_test_rows(std::istream& in, const Schema& schema,
                                                            const LoadConfig& cfg) {
  auto table = read_delimited(in, cfg.delimiter);
  std::vector<std::size_t> source_col(schema.feature_count(), table.header.size());
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    for (std::size_t j = 0; j < schema.feature_count(); ++j)
      if (table.header[c] == schema.features[j].name) source_col[j] = c;
  }
  for (std::size_t j = 0; j < schema.feature_count(); ++j)
    if (source_col[j] == table.header.size())
      throw ParseError("test file is missing feature column '" + schema.features[j].name + "'");

  std::vector<std::vector<std::string>> rows;
  rows.reserve(table.rows.size());
  for (auto& fields : table.rows) {
    std::vector<std::string> row;
    row.reserve(schema.feature_count());
    for (std::size_t j = 0; j < schema.feature_count(); ++j)
      row.push_back(std::move(fields[source_col[j]]));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Equal-width bin edges per numeric feature, fitted on training rows only.
struct Discretizer {
  struct Edges {
    double lo = 0, hi = 0;
    int bins = 2;
  };
  std::vector<std::optional<Edges>> features;  // nullopt for categorical

  // Total mapping: every real lands in [0, bins). Values outside [lo, hi]
  // clamp to the edge bins; lo == hi sends everything to bin 0.
  int bin_of(std::size_t j, double x) const {
    const Edges& e = *features[j];
    if (e.hi <= e.lo) return 0;
    if (x <= e.lo) return 0;
    if (x >= e.hi) return e.bins - 1;
    const double width = (e.hi - e.lo) / e.bins;
    const int b = static_cast<int>(std::floor((x - e.lo) / width));
    return std::min(b, e.bins - 1);
  }
};

inline Discretizer fit_discretizer(const RawDataset& raw, std::span<const std::uint32_t> row_ids,
                                   const std::string& missing_token = "?") {
  Discretizer disc;
  disc.features.resize(raw.schema.feature_count());
  for (std::size_t j = 0; j < raw.schema.feature_count(); ++j) {
    if (raw.schema.features[j].kind != FeatureKind::numeric) continue;
    double lo = 0, hi = 0;
    bool seen = false;
    for (auto i : row_ids) {
      const std::string& v = raw.rows[i][j];
      if (v == missing_token) continue;
      double d;
      if (!parse_number(v, d)) continue;  // load_dataset already validated kinds
      if (!seen) {
        lo = hi = d;
        seen = true;
      } else {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    }
    if (!seen)
      throw ConfigError("numeric feature '" + raw.schema.features[j].name +
                        "' has no non-missing training values");
    disc.features[j] = Discretizer::Edges{lo, hi, raw.schema.features[j].bins};
  }
  return disc;
}

// Encoded training matrix. Kept deliberately small: search and scoring see
// only ids and counts, never strings.
struct Dataset {
  std::size_t num_features = 0;
  std::size_t num_classes = 0;
  std::vector<ValueId> values;  // row-major, size() * num_features
  std::vector<ClassId> labels;
  std::vector<std::uint32_t> class_counts;
  std::vector<std::uint32_t> domain_sizes;  // value ids per feature

  std::size_t size() const { return labels.size(); }

  std::span<const ValueId> row(std::size_t i) const {
    return {values.data() + i * num_features, num_features};
  }

  ClassId majority_class() const {
    ClassId best = 0;
    for (ClassId c = 1; c < class_counts.size(); ++c)
      if (class_counts[c] > class_counts[best]) best = c;
    return best;
  }

  static Dataset from_rows(const std::vector<std::vector<ValueId>>& rows,
                           std::vector<ClassId> labels, std::size_t num_classes) {
    Dataset ds;
    ds.num_features = rows.empty() ? 0 : rows.front().size();
    ds.num_classes = num_classes;
    ds.labels = std::move(labels);
    ds.class_counts.assign(num_classes, 0);
    for (auto y : ds.labels) ++ds.class_counts[y];
    ds.domain_sizes.assign(ds.num_features, 0);
    ds.values.reserve(rows.size() * ds.num_features);
    for (const auto& r : rows)
      for (std::size_t j = 0; j < ds.num_features; ++j) {
        ds.values.push_back(r[j]);
        ds.domain_sizes[j] = std::max(ds.domain_sizes[j], r[j] + 1);
      }
    return ds;
  }
};

// Per-fold value codec: feature dictionaries in first-appearance order over
// the training rows, plus the fitted discretizer. Class ids are global
// (schema order); class_counts still come from the training rows alone.
class Encoder {
 public:
  static Encoder fit(const RawDataset& raw, std::span<const std::uint32_t> row_ids,
                     Discretizer disc, std::string missing_token = "?") {
    Encoder enc;
    enc.schema_ = raw.schema;
    enc.disc_ = std::move(disc);
    enc.missing_ = std::move(missing_token);
    const std::size_t m = raw.schema.feature_count();
    enc.dicts_.resize(m);
    enc.dict_order_.resize(m);
    enc.numeric_missing_id_.assign(m, kUnseen);
    for (std::size_t j = 0; j < m; ++j) {
      if (raw.schema.features[j].kind == FeatureKind::categorical) {
        for (auto i : row_ids) {
          const std::string& v = raw.rows[i][j];
          auto [it, inserted] =
              enc.dicts_[j].emplace(v, static_cast<ValueId>(enc.dict_order_[j].size()));
          if (inserted) enc.dict_order_[j].push_back(v);
        }
      } else {
        // bins own ids [0, g); a missing token seen in training gets id g
        for (auto i : row_ids) {
          if (raw.rows[i][j] == enc.missing_) {
            enc.numeric_missing_id_[j] = static_cast<ValueId>(raw.schema.features[j].bins);
            break;
          }
        }
      }
    }
    return enc;
  }

  ValueId encode_value(std::size_t j, const std::string& v) const {
    if (schema_.features[j].kind == FeatureKind::categorical) {
      auto it = dicts_[j].find(v);
      return it == dicts_[j].end() ? kUnseen : it->second;
    }
    if (v == missing_) return numeric_missing_id_[j];
    double d;
    if (!parse_number(v, d))
      throw ParseError("feature '" + schema_.features[j].name + "': expected a number, got '" +
                       v + "'");
    return static_cast<ValueId>(disc_.bin_of(j, d));
  }

  std::vector<ValueId> encode_row(const std::vector<std::string>& row) const {
    std::vector<ValueId> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = encode_value(j, row[j]);
    return out;
  }

  std::size_t domain_size(std::size_t j) const {
    if (schema_.features[j].kind == FeatureKind::categorical) return dict_order_[j].size();
    const std::size_t bins = static_cast<std::size_t>(schema_.features[j].bins);
    return numeric_missing_id_[j] == kUnseen ? bins : bins + 1;
  }

  // Decoded display value. Numeric bins are positional ("b0".."b4"): the
  // edges differ per training fold, so edge values would make identical
  // rules from different folds look distinct.
  std::string value_label(std::size_t j, ValueId v) const {
    if (schema_.features[j].kind == FeatureKind::categorical) return dict_order_[j][v];
    if (v == numeric_missing_id_[j]) return missing_;
    return "b" + std::to_string(v);
  }

  const std::string& class_label(ClassId c) const { return schema_.classes[c]; }
  const Schema& schema() const { return schema_; }
  const Discretizer& discretizer() const { return disc_; }

 private:
  Schema schema_;
  Discretizer disc_;
  std::string missing_;
  std::vector<std::unordered_map<std::string, ValueId>> dicts_;
  std::vector<std::vector<std::string>> dict_order_;
  std::vector<ValueId> numeric_missing_id_;
};

inline Dataset encode(const RawDataset& raw, std::span<const std::uint32_t> row_ids,
                      const Encoder& enc) {
  Dataset ds;
  ds.num_features = raw.schema.feature_count();
  ds.num_classes = raw.schema.class_count();
  ds.class_counts.assign(ds.num_classes, 0);
  ds.domain_sizes.resize(ds.num_features);
  for (std::size_t j = 0; j < ds.num_features; ++j)
    ds.domain_sizes[j] = static_cast<std::uint32_t>(enc.domain_size(j));
  ds.values.reserve(row_ids.size() * ds.num_features);
  ds.labels.reserve(row_ids.size());
  for (auto i : row_ids) {
    for (std::size_t j = 0; j < ds.num_features; ++j)
      ds.values.push_back(enc.encode_value(j, raw.rows[i][j]));
    ds.labels.push_back(raw.labels[i]);
    ++ds.class_counts[raw.labels[i]];
  }
  return ds;
}

inline std::vector<std::uint32_t> all_row_ids(const RawDataset& raw) {
  std::vector<std::uint32_t> ids(raw.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::uint32_t>(i);
  return ids;
}

}  // namespace pic
