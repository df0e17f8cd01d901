// Order-insensitive rule sets over discrete tables: the RG covering
// algorithm, rule clustering and pruning, default selection, evaluation and
// the line-oriented rule text format.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rgann/data.hpp"

namespace rgann {

/// One column of a discrete table.
struct Feature {
  std::string name;
  int cardinality = 1;
  /// Ordinal features are interval indices of a continuous attribute and
  /// admit range conditions; the others admit equality only.
  bool ordinal = false;
  std::vector<std::string> values;  // value names, non-ordinal features
  std::vector<double> cuts;         // raw cut points, ordinal features
  double raw_min = 0.0;             // raw range used for scaled rendering
  double raw_max = 0.0;
};

struct DiscreteTable {
  std::vector<Feature> features;
  std::vector<std::string> classes;
  std::vector<std::vector<int>> rows;
  std::vector<int> labels;

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }
  void add(std::vector<int> row, int label);
  /// Copy whose columns outside `keep` are constant 0.
  DiscreteTable restricted(const std::vector<bool>& keep) const;
  /// Copy with new labels.
  DiscreteTable relabeled(std::vector<int> labels, std::vector<std::string> classes) const;
};

enum class Relation { equals, at_most, above, in_interval };

/// feature value in [lo, hi] (inclusive, discrete indices).
struct Condition {
  std::size_t feature = 0;
  int lo = 0;
  int hi = 0;

  bool matches(int value) const noexcept { return lo <= value && value <= hi; }
  /// True when every value admitted here is admitted by `other` (same feature).
  bool within(const Condition& other) const noexcept {
    return feature == other.feature && other.lo <= lo && hi <= other.hi;
  }
  Relation relation(const Feature& f) const;

  auto operator<=>(const Condition&) const = default;
};

struct Rule {
  std::vector<Condition> conditions;  // sorted by feature, one per feature
  int consequent = 0;
  std::size_t support = 0;            // training rows matched

  bool matches(std::span<const int> row) const;
  /// Every row matched by this rule is matched by `general`.
  bool subsumed_by(const Rule& general) const;

  bool operator==(const Rule& other) const {
    return conditions == other.conditions && consequent == other.consequent;
  }
};

enum class RulePhase { direct, output_layer, hidden_layer, merged };
std::string to_string(RulePhase phase);

/// Unordered rules plus a default class. A row is assigned the consequent of
/// the rules matching it (the most frequent one if they disagree) or the
/// default when nothing matches.
struct RuleSet {
  std::vector<Rule> rules;
  int default_class = 0;
  RulePhase phase = RulePhase::direct;

  /// Rules including the default.
  std::size_t rule_count() const noexcept { return rules.size() + 1; }
  double mean_conditions() const;
  /// Deterministic order: by consequent, then conditions.
  void canonicalize();
};

struct Prediction {
  int label = 0;
  bool matched = false;
  bool ambiguous = false;  // matching rules disagree
};
Prediction predict(const RuleSet& rs, std::span<const int> row);

struct RuleMetrics {
  double accuracy = 0.0;
  double coverage = 0.0;  // fraction matched by a non-default rule
  std::size_t rule_count = 0;
  double mean_conditions = 0.0;
  std::size_t ambiguous = 0;
  std::size_t patterns = 0;
};
/// Scores `rs` against the table labels.
RuleMetrics evaluate_ruleset(const RuleSet& rs, const DiscreteTable& table);
RuleMetrics evaluate_ruleset(const RuleSet& rs, const Dataset& ds, const DiscretizationScheme& scheme);

/// Fig.-5 step 1: cover the most frequent uncovered tuple with the shortest
/// greedy conjunction that excludes every tuple of another label; repeat.
/// Tuples with conflicting labels take their majority label.
RuleSet generate_rules(const DiscreteTable& table);
/// Within each consequent group drops rules subsumed by another rule.
RuleSet cluster_rules(RuleSet rs);
/// Drops conditions, widens ordinal ranges and removes rules as long as the
/// table error does not grow and no new ambiguous rows appear. With
/// `keep_coverage`, unmatched rows count as errors (no default).
RuleSet prune_rules(RuleSet rs, const DiscreteTable& table, bool keep_coverage = false);
/// A class with no rules if there is one (the most frequent among unmatched
/// rows wins); else the majority label of unmatched rows; else the
/// consequent of the largest rule group.
RuleSet default_rule(RuleSet rs, const DiscreteTable& table);
/// Removes rules involved in ambiguous rows, cheapest first, until none remain.
RuleSet resolve_conflicts(RuleSet rs, const DiscreteTable& table);

/// Full RG: generate, cluster, default, prune.
RuleSet rg(const DiscreteTable& table);
/// RG keeping explicit rules for every label (no rule relies on the default).
RuleSet rg_covering(const DiscreteTable& table);

/// The single generalization (remove a rule, drop a condition, or widen an
/// ordinal range) with the smallest error increase that adds no ambiguous
/// rows; nullopt when nothing can be generalized.
std::optional<RuleSet> relax_once(const RuleSet& rs, const DiscreteTable& table);

/// Features for the raw attributes of `ds` under `scheme`.
std::vector<Feature> input_features(const Dataset& ds, const DiscretizationScheme& scheme);
/// Discrete view of every pattern; labels default to the true labels.
DiscreteTable input_table(const Dataset& ds, const DiscretizationScheme& scheme,
                          std::optional<std::vector<int>> labels = std::nullopt);

/// `IF <attr> <rel> <value> AND ... THEN <class>` lines, then `DEFAULT <class>`.
/// Thresholds are printed in raw units, or min-max scaled when `scaled`.
std::string render_rules(const RuleSet& rs, const std::vector<Feature>& features,
                         const std::vector<std::string>& classes, bool scaled = false);
/// Parses the raw-unit form produced by render_rules.
RuleSet parse_rules(std::string_view text, const std::vector<Feature>& features,
                    const std::vector<std::string>& classes);

}  // namespace rgann
