#include "rgann/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rgann {

namespace {

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string row_error(std::size_t row, const std::string& what) {
  return "row " + std::to_string(row) + ": " + what;
}

std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

double entropy_bits(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

struct CutCandidate {
  std::size_t position = 0;  // first index of the upper half
  double gain = 0.0;         // entropy reduction inside the segment
  bool valid = false;
};

// Best binary cut of sorted[begin, end) by weighted class entropy.
CutCandidate best_cut(const std::vector<std::pair<double, int>>& sorted, std::size_t begin,
                      std::size_t end, std::size_t classes) {
  CutCandidate best;
  std::size_t n = end - begin;
  if (n < 2) return best;
  std::vector<std::size_t> total(classes, 0);
  for (std::size_t i = begin; i < end; ++i) ++total[static_cast<std::size_t>(sorted[i].second)];
  double parent = entropy_bits(total, n);
  std::vector<std::size_t> left(classes, 0);
  std::vector<std::size_t> right = total;
  double best_weighted = parent;
  for (std::size_t i = begin + 1; i < end; ++i) {
    auto label = static_cast<std::size_t>(sorted[i - 1].second);
    ++left[label];
    --right[label];
    if (!(sorted[i - 1].first < sorted[i].first)) continue;
    std::size_t nl = i - begin;
    std::size_t nr = end - i;
    double weighted = (static_cast<double>(nl) * entropy_bits(left, nl) +
                       static_cast<double>(nr) * entropy_bits(right, nr)) /
                      static_cast<double>(n);
    if (!best.valid || weighted < best_weighted - 1e-15) {
      best.valid = true;
      best.position = i;
      best_weighted = weighted;
    }
  }
  best.gain = parent - best_weighted;
  return best;
}

}  // namespace

int Attribute::category_index(std::string_view value) const {
  for (std::size_t i = 0; i < categories.size(); ++i)
    if (categories[i] == value) return static_cast<int>(i);
  return -1;
}

int Dataset::class_index(std::string_view name) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == name) return static_cast<int>(i);
  return -1;
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  Dataset out = empty_copy();
  out.patterns.assign(patterns.begin() + static_cast<std::ptrdiff_t>(begin),
                      patterns.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

Dataset Dataset::empty_copy() const {
  Dataset out;
  out.attributes = attributes;
  out.classes = classes;
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(classes.size(), 0);
  for (const auto& p : patterns) ++counts[static_cast<std::size_t>(p.label)];
  return counts;
}

void Dataset::validate() const {
  if (classes.size() < 2) throw DataError("dataset needs at least 2 classes");
  if (patterns.empty()) throw DataError("no patterns");
  for (const auto& a : attributes) {
    if (a.categorical()) {
      if (a.categories.empty()) throw DataError("attribute '" + a.name + "' has no categories");
      std::set<std::string> unique(a.categories.begin(), a.categories.end());
      if (unique.size() != a.categories.size())
        throw DataError("attribute '" + a.name + "' has duplicate categories");
    } else if (a.min > a.max) {
      throw DataError("attribute '" + a.name + "' has min > max");
    }
  }
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const auto& p = patterns[i];
    if (p.values.size() != attributes.size())
      throw DataError(row_error(i + 1, "value count does not match attribute count"));
    if (p.label < 0 || static_cast<std::size_t>(p.label) >= classes.size())
      throw DataError(row_error(i + 1, "label out of range"));
    for (std::size_t a = 0; a < attributes.size(); ++a) {
      double v = p.values[a];
      if (std::isnan(v)) continue;
      const auto& attr = attributes[a];
      if (attr.categorical()) {
        if (v < 0 || v >= static_cast<double>(attr.categories.size()) || v != std::floor(v))
          throw DataError(row_error(i + 1, "bad category index for '" + attr.name + "'"));
      } else if (v < attr.min || v > attr.max) {
        throw DataError(row_error(i + 1, "value outside domain of '" + attr.name + "'"));
      }
    }
  }
}

Schema parse_schema(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("schema: ") + e.what());
  }
  Schema schema;
  try {
    for (const auto& a : doc.at("attributes")) {
      Attribute attr;
      attr.name = a.at("name").get<std::string>();
      std::string kind = a.value("kind", "continuous");
      if (kind == "categorical") {
        attr.kind = AttributeKind::categorical;
        attr.categories = a.at("categories").get<std::vector<std::string>>();
        if (attr.categories.empty())
          throw ConfigError("schema: attribute '" + attr.name + "' has no categories");
        std::set<std::string> unique(attr.categories.begin(), attr.categories.end());
        if (unique.size() != attr.categories.size())
          throw ConfigError("schema: attribute '" + attr.name + "' has duplicate categories");
      } else if (kind != "continuous") {
        throw ConfigError("schema: unknown attribute kind '" + kind + "'");
      }
      schema.attributes.push_back(std::move(attr));
    }
    schema.classes = doc.at("classes").get<std::vector<std::string>>();
    schema.missing_token = doc.value("missing", std::string("?"));
    schema.header = doc.value("header", false);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("schema: ") + e.what());
  }
  if (schema.attributes.empty()) throw ConfigError("schema: no attributes");
  if (schema.classes.size() < 2) throw ConfigError("schema: at least 2 classes required");
  return schema;
}

Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_schema(buf.str());
}

Dataset load_dataset(std::istream& source, const Schema& schema) {
  Dataset ds;
  ds.attributes = schema.attributes;
  ds.classes = schema.classes;
  const std::size_t arity = schema.attributes.size() + 1;
  std::vector<bool> seen(schema.attributes.size(), false);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (schema.header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != arity)
      throw DataError(line_error(line_no, "expected " + std::to_string(arity) + " fields, got " +
                                             std::to_string(fields.size())));
    Pattern p;
    p.values.resize(schema.attributes.size());
    for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
      const auto& attr = schema.attributes[a];
      const auto& f = fields[a];
      if (f == schema.missing_token || f.empty()) {
        p.values[a] = kMissing;
        continue;
      }
      if (attr.categorical()) {
        int idx = attr.category_index(f);
        if (idx < 0) throw DataError(line_error(line_no, "unknown category '" + f + "' for '" + attr.name + "'"));
        p.values[a] = idx;
      } else {
        try {
          p.values[a] = parse_double(f);
        } catch (const std::invalid_argument&) {
          throw DataError(line_error(line_no, "malformed number '" + f + "' for '" + attr.name + "'"));
        }
        auto& target = ds.attributes[a];
        if (!seen[a]) {
          target.min = target.max = p.values[a];
          seen[a] = true;
        } else {
          target.min = std::min(target.min, p.values[a]);
          target.max = std::max(target.max, p.values[a]);
        }
      }
    }
    p.label = ds.class_index(fields.back());
    if (p.label < 0) throw DataError(line_error(line_no, "unknown class label '" + fields.back() + "'"));
    ds.patterns.push_back(std::move(p));
  }
  if (ds.patterns.empty()) throw DataError("no patterns");
  ds.validate();
  return ds;
}

Dataset load_dataset(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return load_dataset(in, schema);
}

Dataset Splits::train_block() const {
  Dataset out = train;
  out.patterns.insert(out.patterns.end(), validation.patterns.begin(), validation.patterns.end());
  return out;
}

Splits split_dataset(const Dataset& ds, const SplitSpec& spec) {
  if (spec.train + spec.test > ds.size())
    throw DataError("split counts (" + std::to_string(spec.train) + " + " + std::to_string(spec.test) +
                    ") exceed dataset size " + std::to_string(ds.size()));
  if (spec.validation_fraction < 0.0 || spec.validation_fraction >= 1.0)
    throw ConfigError("validation fraction must lie in [0, 1)");
  auto n_valid = static_cast<std::size_t>(std::llround(spec.validation_fraction * static_cast<double>(spec.train)));
  std::size_t n_fit = spec.train - n_valid;
  Splits s;
  s.train = ds.slice(0, n_fit);
  s.validation = ds.slice(n_fit, spec.train);
  s.test = ds.slice(spec.train, spec.train + spec.test);
  return s;
}

Imputer Imputer::fit(const Dataset& train) {
  Imputer imp;
  imp.fill_.resize(train.attributes.size(), 0.0);
  for (std::size_t a = 0; a < train.attributes.size(); ++a) {
    const auto& attr = train.attributes[a];
    std::vector<double> present;
    for (const auto& p : train.patterns)
      if (!std::isnan(p.values[a])) present.push_back(p.values[a]);
    if (present.empty()) {
      imp.fill_[a] = attr.categorical() ? 0.0 : attr.min;
      continue;
    }
    if (attr.categorical()) {
      std::vector<std::size_t> counts(attr.categories.size(), 0);
      for (double v : present) ++counts[static_cast<std::size_t>(v)];
      imp.fill_[a] = static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    } else {
      std::sort(present.begin(), present.end());
      std::size_t mid = present.size() / 2;
      imp.fill_[a] = present.size() % 2 == 1 ? present[mid] : 0.5 * (present[mid - 1] + present[mid]);
    }
  }
  return imp;
}

Dataset Imputer::apply(const Dataset& ds) const {
  Dataset out = ds;
  for (auto& p : out.patterns)
    for (std::size_t a = 0; a < p.values.size(); ++a)
      if (std::isnan(p.values[a])) p.values[a] = fill_[a];
  return out;
}

void EncodedSet::append(const EncodedSet& other) {
  inputs.insert(inputs.end(), other.inputs.begin(), other.inputs.end());
  targets.insert(targets.end(), other.targets.begin(), other.targets.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

Encoder Encoder::fit(const Dataset& train) {
  if (train.empty()) throw DataError("cannot fit encoder on an empty split");
  Encoder enc;
  enc.classes_ = train.classes.size();
  for (std::size_t a = 0; a < train.attributes.size(); ++a) {
    const auto& attr = train.attributes[a];
    enc.kinds_.push_back(attr.kind);
    enc.offsets_.push_back(enc.input_size_);
    std::size_t width = attr.categorical() ? attr.categories.size() : 1;
    enc.widths_.push_back(width);
    for (std::size_t k = 0; k < width; ++k) enc.input_attribute_.push_back(a);
    enc.input_size_ += width;
    double lo = INFINITY;
    double hi = -INFINITY;
    if (!attr.categorical()) {
      for (const auto& p : train.patterns) {
        double v = p.values[a];
        if (std::isnan(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (lo > hi) lo = hi = 0.0;
    }
    enc.mins_.push_back(lo);
    enc.maxs_.push_back(hi);
  }
  return enc;
}

double Encoder::scale(std::size_t attribute, double raw) const {
  double range = maxs_[attribute] - mins_[attribute];
  if (range <= 0.0) return 0.0;
  return (raw - mins_[attribute]) / range;
}

double Encoder::unscale(std::size_t attribute, double scaled) const {
  return mins_[attribute] + scaled * (maxs_[attribute] - mins_[attribute]);
}

std::vector<double> Encoder::encode_input(const Pattern& p) const {
  if (p.values.size() != kinds_.size()) throw DataError("pattern does not match encoder schema");
  std::vector<double> x(input_size_, 0.0);
  for (std::size_t a = 0; a < kinds_.size(); ++a) {
    double v = p.values[a];
    if (std::isnan(v)) throw DataError("cannot encode a missing value; impute first");
    if (kinds_[a] == AttributeKind::categorical) {
      auto idx = static_cast<std::size_t>(v);
      if (idx >= widths_[a]) throw DataError("category index out of range");
      x[offsets_[a] + idx] = 1.0;
    } else {
      x[offsets_[a]] = scale(a, v);
    }
  }
  return x;
}

std::vector<double> Encoder::encode_target(int label) const {
  std::vector<double> t(classes_, 0.0);
  t.at(static_cast<std::size_t>(label)) = 1.0;
  return t;
}

EncodedSet Encoder::encode(const Dataset& ds) const {
  EncodedSet out;
  out.inputs.reserve(ds.size());
  out.targets.reserve(ds.size());
  out.labels.reserve(ds.size());
  for (const auto& p : ds.patterns) {
    out.inputs.push_back(encode_input(p));
    out.targets.push_back(encode_target(p.label));
    out.labels.push_back(p.label);
  }
  return out;
}

int Encoder::decode_category(std::size_t attribute, std::span<const double> input) const {
  auto first = input.begin() + static_cast<std::ptrdiff_t>(offsets_[attribute]);
  auto last = first + static_cast<std::ptrdiff_t>(widths_[attribute]);
  return static_cast<int>(std::max_element(first, last) - first);
}

DiscretizationScheme::DiscretizationScheme(std::vector<AttributeKind> kinds,
                                           std::vector<std::vector<double>> cuts,
                                           std::vector<std::size_t> category_counts)
    : kinds_(std::move(kinds)), cuts_(std::move(cuts)), category_counts_(std::move(category_counts)) {}

int DiscretizationScheme::cardinality(std::size_t a) const {
  if (kinds_[a] == AttributeKind::categorical) return static_cast<int>(category_counts_[a]);
  return static_cast<int>(cuts_[a].size()) + 1;
}

int DiscretizationScheme::interval_of(std::size_t a, double raw) const {
  if (kinds_[a] == AttributeKind::categorical) return static_cast<int>(raw);
  const auto& c = cuts_[a];
  return static_cast<int>(std::lower_bound(c.begin(), c.end(), raw) - c.begin());
}

std::vector<int> DiscretizationScheme::discretize(const Pattern& p) const {
  std::vector<int> out(kinds_.size());
  for (std::size_t a = 0; a < kinds_.size(); ++a) out[a] = interval_of(a, p.values[a]);
  return out;
}

DiscretizationScheme discretize_inputs(const Dataset& train, const CutPolicy& policy) {
  if (train.empty()) throw DataError("cannot discretize an empty split");
  if (policy.max_intervals < 1) throw ConfigError("max_intervals must be >= 1");
  const std::size_t classes = train.classes.size();
  std::vector<AttributeKind> kinds;
  std::vector<std::vector<double>> all_cuts;
  std::vector<std::size_t> category_counts;
  for (std::size_t a = 0; a < train.attributes.size(); ++a) {
    const auto& attr = train.attributes[a];
    kinds.push_back(attr.kind);
    category_counts.push_back(attr.categories.size());
    std::vector<double> cuts;
    if (!attr.categorical()) {
      std::vector<std::pair<double, int>> sorted;
      for (const auto& p : train.patterns)
        if (!std::isnan(p.values[a])) sorted.emplace_back(p.values[a], p.label);
      std::sort(sorted.begin(), sorted.end());
      const auto total = static_cast<double>(sorted.size());
      std::vector<std::pair<std::size_t, std::size_t>> segments{{0, sorted.size()}};
      while (static_cast<int>(segments.size()) < policy.max_intervals) {
        std::size_t best_seg = 0;
        CutCandidate best;
        double best_reduction = 0.0;
        for (std::size_t s = 0; s < segments.size(); ++s) {
          auto cand = best_cut(sorted, segments[s].first, segments[s].second, classes);
          if (!cand.valid) continue;
          double reduction = cand.gain * static_cast<double>(segments[s].second - segments[s].first) / total;
          if (!best.valid || reduction > best_reduction + 1e-15) {
            best = cand;
            best_seg = s;
            best_reduction = reduction;
          }
        }
        if (!best.valid || best_reduction <= policy.min_gain) break;
        auto [lo, hi] = segments[best_seg];
        segments[best_seg] = {lo, best.position};
        segments.insert(segments.begin() + static_cast<std::ptrdiff_t>(best_seg) + 1, {best.position, hi});
        cuts.push_back(0.5 * (sorted[best.position - 1].first + sorted[best.position].first));
      }
      std::sort(cuts.begin(), cuts.end());
    }
    all_cuts.push_back(std::move(cuts));
  }
  return DiscretizationScheme(std::move(kinds), std::move(all_cuts), std::move(category_counts));
}

}  // namespace rgann
