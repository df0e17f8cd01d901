// End-to-end driver: configuration, data preparation, the full
// train/prune/cluster/extract run for one seed, and multi-seed reports.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rgann/clustering.hpp"
#include "rgann/data.hpp"
#include "rgann/extraction.hpp"
#include "rgann/network.hpp"
#include "rgann/pruning.hpp"
#include "rgann/rules.hpp"
#include "rgann/training.hpp"

namespace rgann {

struct RuleConfig {
  /// Minimum true-label train accuracy kept while generalizing the merged
  /// rules. Unset: discretized-network train accuracy minus floor_margin.
  std::optional<double> accuracy_floor;
  double floor_margin = 0.01;
  std::size_t expansion_cap = 20000;

  void validate() const;
};

struct RunConfig {
  std::string name;
  std::string data_path;    // resolved against the config file's directory
  std::string schema_path;
  SplitSpec split;
  TrainConfig train;
  PruneConfig prune;
  ClusterSearchConfig cluster;
  CutPolicy discretize;
  RuleConfig rules;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  void validate() const;
};

/// Parses the JSON configuration. `overrides` are "dotted.key=value" strings
/// applied before validation; values are read as JSON, falling back to a
/// plain string. Relative dataset paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view json_text, const std::string& base_dir,
                           const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Imputed splits, encodings and discrete views shared by every seed.
struct PreparedData {
  Dataset raw;
  Splits splits;          // imputed
  Dataset train_block;    // imputed train + validation
  Encoder encoder;
  EncodedSet fit;         // constructive training and pruning retraining
  EncodedSet validation;
  EncodedSet block;       // the whole train block
  EncodedSet test;
  DiscretizationScheme scheme;
  DiscreteTable train_table;  // true labels
  DiscreteTable test_table;
};
PreparedData prepare_data(const RunConfig& cfg);

/// One pipeline run. Counts are stored as doubles so every numeric field
/// serializes the same way; NaN marks a value that does not apply.
struct RunRow {
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  double initial_nodes = 0, initial_connections = 0;
  double intermediate_nodes = 0, intermediate_connections = 0;
  double final_nodes = 0, final_connections = 0;
  double hidden_nodes = 0;
  double constructive_epochs = 0;
  double prune_epochs = 0;  // retraining during pruning
  double epochs = 0;        // both phases
  double net_train_accuracy = 0, net_test_accuracy = 0;
  double disc_train_accuracy = 0, disc_test_accuracy = 0;
  double clusters = 0;      // sum of D over hidden nodes
  double merged_rules = 0;  // before generalization, default included
  double rules = 0;         // default included
  double mean_conditions = 0;
  double rule_train_accuracy = 0, rule_test_accuracy = 0;
  double rule_fidelity = 0;  // agreement with the discretized network, train block
  double ambiguous = 0;
  std::string cluster_sizes;  // D per hidden node, ';'-separated
  std::vector<std::string> flags;

  bool operator==(const RunRow&) const;
};

/// Numeric columns of RunRow, in report order.
struct RowField {
  const char* name;
  double RunRow::*member;
};
const std::vector<RowField>& row_fields();

struct RunResult {
  Network network;
  ClusterModel clusters;
  RuleSet rules;
  RuleSet merged_rules;
  OutputRules output_rules;
  std::vector<RuleSet> hidden_rules;
  std::vector<Feature> features;
  std::vector<std::string> classes;
  TrainTrace constructive_trace;
  PruneResult prune;
  RunRow row;
};

/// Last stage executed by run_pipeline; later fields of the result stay empty.
enum class Stage { train, prune, cluster, extract, full };

/// Steps 1-6 for one seed. Stage failures propagate as StageError.
RunResult run_pipeline(const RunConfig& cfg, std::uint64_t seed, Stage last = Stage::full);
RunResult run_pipeline(const RunConfig& cfg, const PreparedData& data, std::uint64_t seed,
                       Stage last = Stage::full);

struct FieldStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct RunReport {
  std::string name;
  std::vector<RunRow> rows;

  /// Over successful rows, ignoring NaN entries.
  std::map<std::string, FieldStats> aggregate() const;
  /// Smallest pruned network (fewest connections), then highest rule train
  /// accuracy, then fewest rules, then seed order.
  std::optional<std::size_t> best_run() const;

  std::string to_json() const;
  static RunReport from_json(std::string_view text);
  std::string to_csv() const;
  static RunReport from_csv(std::string_view text, std::string name = {});
  /// Fixed-width summary with per-field mean/min/max.
  std::string to_table() const;
};

/// Runs every seed (concurrently), collecting failures as flagged rows.
RunReport run_experiment(const RunConfig& cfg, unsigned threads = 0);

}  // namespace rgann
