// Dataset loading, splitting, encoding and input discretization.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rgann/common.hpp"

namespace rgann {

enum class AttributeKind { continuous, categorical };

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::continuous;
  std::vector<std::string> categories;  // categorical only
  double min = 0.0;                     // observed range, continuous only
  double max = 0.0;

  bool categorical() const noexcept { return kind == AttributeKind::categorical; }
  /// Index of `value` in `categories`, or -1.
  int category_index(std::string_view value) const;
};

/// Marker for a missing raw value.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Raw values per attribute: the number itself for continuous attributes,
/// the category index for categorical ones.
struct Pattern {
  std::vector<double> values;
  int label = 0;

  bool operator==(const Pattern&) const = default;
};

struct Dataset {
  std::vector<Attribute> attributes;
  std::vector<std::string> classes;
  std::vector<Pattern> patterns;

  std::size_t size() const noexcept { return patterns.size(); }
  bool empty() const noexcept { return patterns.empty(); }
  std::size_t class_count() const noexcept { return classes.size(); }
  int class_index(std::string_view name) const;

  /// Same schema, patterns [begin, end).
  Dataset slice(std::size_t begin, std::size_t end) const;
  /// Same schema, no patterns.
  Dataset empty_copy() const;
  /// Throws DataError if any invariant is violated. Missing values are allowed.
  void validate() const;
  /// Class frequencies.
  std::vector<std::size_t> class_counts() const;
};

struct Schema {
  std::vector<Attribute> attributes;
  std::vector<std::string> classes;
  std::string missing_token = "?";
  bool header = false;
};

/// Parses the JSON sidecar describing attributes and classes.
Schema parse_schema(std::string_view json_text);
Schema load_schema(const std::string& path);

/// Reads comma-separated rows (last column = class). Continuous ranges are
/// taken from the observed values. Errors carry the 1-based line number.
Dataset load_dataset(std::istream& source, const Schema& schema);
Dataset load_dataset(const std::string& path, const Schema& schema);

struct SplitSpec {
  std::size_t train = 0;
  std::size_t test = 0;
  double validation_fraction = 0.2;
};

/// File-order split. `train` and `validation` together form the train block.
struct Splits {
  Dataset train;
  Dataset validation;
  Dataset test;

  /// Concatenation of train and validation (the outer training split).
  Dataset train_block() const;
};

/// First `spec.train` patterns form the train block, the next `spec.test`
/// the test set. The last round(fraction * train) patterns of the train block
/// become the validation set.
Splits split_dataset(const Dataset& ds, const SplitSpec& spec);

/// Median (continuous) / mode (categorical) imputation fitted on one split.
class Imputer {
 public:
  static Imputer fit(const Dataset& train);
  Dataset apply(const Dataset& ds) const;
  const std::vector<double>& fill_values() const noexcept { return fill_; }

 private:
  std::vector<double> fill_;
};

/// Network-ready patterns: inputs (n reals) and one-hot targets (C reals).
struct EncodedSet {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> targets;
  std::vector<int> labels;

  std::size_t size() const noexcept { return inputs.size(); }
  bool empty() const noexcept { return inputs.empty(); }
  void append(const EncodedSet& other);
};

/// Continuous attributes min/max scaled with train statistics, categorical
/// attributes one-hot, targets one-hot.
class Encoder {
 public:
  static Encoder fit(const Dataset& train);

  std::size_t input_size() const noexcept { return input_size_; }
  std::size_t output_size() const noexcept { return classes_; }

  std::vector<double> encode_input(const Pattern& p) const;
  std::vector<double> encode_target(int label) const;
  EncodedSet encode(const Dataset& ds) const;

  double scale(std::size_t attribute, double raw) const;
  double unscale(std::size_t attribute, double scaled) const;
  /// Recovers a category from its one-hot sub-vector (argmax).
  int decode_category(std::size_t attribute, std::span<const double> input) const;

  /// Attribute owning encoded input `i`.
  std::size_t attribute_of_input(std::size_t i) const { return input_attribute_[i]; }
  /// First encoded input of attribute `a` and its width.
  std::size_t first_input(std::size_t a) const { return offsets_[a]; }
  std::size_t width(std::size_t a) const { return widths_[a]; }
  std::size_t attribute_count() const noexcept { return offsets_.size(); }

 private:
  std::vector<AttributeKind> kinds_;
  std::vector<double> mins_;
  std::vector<double> maxs_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> input_attribute_;
  std::size_t input_size_ = 0;
  std::size_t classes_ = 0;
};

struct CutPolicy {
  int max_intervals = 3;
  double min_gain = 1e-9;  // minimum reduction of weighted class entropy (bits)
};

/// Per continuous attribute: ascending cut points. A value v falls in interval
/// i when cut[i-1] < v <= cut[i]. Categorical attributes map to their index.
class DiscretizationScheme {
 public:
  DiscretizationScheme() = default;
  DiscretizationScheme(std::vector<AttributeKind> kinds, std::vector<std::vector<double>> cuts,
                       std::vector<std::size_t> category_counts);

  std::size_t attribute_count() const noexcept { return kinds_.size(); }
  const std::vector<double>& cuts(std::size_t a) const { return cuts_[a]; }
  bool ordinal(std::size_t a) const { return kinds_[a] == AttributeKind::continuous; }
  /// Number of discrete values of attribute `a`.
  int cardinality(std::size_t a) const;
  int interval_of(std::size_t a, double raw) const;
  std::vector<int> discretize(const Pattern& p) const;

 private:
  std::vector<AttributeKind> kinds_;
  std::vector<std::vector<double>> cuts_;
  std::vector<std::size_t> category_counts_;
};

/// Recursive class-entropy cuts on the continuous attributes of `train`.
DiscretizationScheme discretize_inputs(const Dataset& train, const CutPolicy& policy);

}  // namespace rgann
