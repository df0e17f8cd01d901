// Magnitude-based connection pruning with retraining, and dead-node removal.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rgann/training.hpp"

namespace rgann {

struct PruneConfig {
  /// Minimum training accuracy to retain; unset means the unpruned
  /// accuracy minus 0.5 percentage points.
  std::optional<double> accuracy_floor;
  int retrain_epochs_cap = 50;

  void validate() const;
};

struct PruneLogEntry {
  WeightId weight;
  double magnitude = 0.0;
  bool removed = false;
  double accuracy = 0.0;  // training accuracy after the step
};

struct PruneResult {
  std::vector<PruneLogEntry> log;
  TrainTrace trace;
  double accuracy_floor = 0.0;
  int epochs = 0;

  /// weight,magnitude,action,accuracy rows.
  std::string log_csv() const;
};

/// Candidates in ascending |weight|, ties by (layer, row, col).
std::vector<WeightId> prune_candidates(const Network& net, const std::vector<WeightId>& excluded);

/// Repeatedly masks the smallest active non-bias weight and retrains. A step
/// whose training accuracy falls below the floor is undone and the weight is
/// marked unprunable. Ends when every remaining weight is unprunable.
PruneResult prune_network(Network& net, const EncodedSet& train, const EncodedSet& validation,
                          const PruneConfig& pcfg, const TrainConfig& tcfg);

struct DeadNodeReport {
  std::vector<std::size_t> removed_hidden;  // indices in the pre-removal network
  std::vector<bool> relevant_inputs;
};

/// Removes hidden nodes lacking active incoming or outgoing connections. A node
/// with outgoing links but no inputs emits a constant, which is folded into
/// the output biases so the network function is unchanged.
/// Throws StageError("prune", "network degenerate") if no hidden node survives.
DeadNodeReport remove_dead_nodes(Network& net);

}  // namespace rgann
