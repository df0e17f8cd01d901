// Penalized cross-entropy backpropagation, plateau detection, weight freezing
// and the constructive (node-adding) training loop.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rgann/data.hpp"
#include "rgann/network.hpp"

namespace rgann {

struct TrainConfig {
  double learning_rate = 0.5;
  int tau = 10;                 // epoch window for plateau and freezing checks
  double plateau_tol = 1e-3;    // relative objective change treated as "constant"
  double freeze_tol = 1e-2;     // mean |activation change| treated as "stable"
  double eps1 = 0.1;            // penalty coefficients and steepness
  double eps2 = 1e-4;
  double beta = 10.0;
  int max_epochs = 1000;        // per plateau run
  std::optional<double> valid_error_target;  // unset: derived from a reference run
  std::size_t max_hidden = 10;

  /// Throws ConfigError.
  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double valid_error = 0.0;    // squared error on the validation set
  double cross_entropy = 0.0;  // on the training set
  double penalty = 0.0;
  double objective = 0.0;      // cross_entropy + penalty
  std::vector<double> mean_activation;  // per hidden node over the training set
};

struct TrainTrace {
  std::vector<EpochRecord> epochs;
  /// Per-pattern hidden activations of the most recent tau+1 epochs,
  /// [epoch][node][pattern]; not exported.
  std::vector<std::vector<std::vector<double>>> recent_activations;
  bool hit_max_epochs = false;

  void append(const TrainTrace& later);
  /// One row per epoch: epoch,E_valid,F,P,theta,act_0..act_{h-1}.
  std::string to_csv() const;
};

/// E = 1/2 sum_i sum_p (S_pi - t_pi)^2
double squared_error(const Network& net, const EncodedSet& set);
/// F = -sum_i sum_p [t log S + (1-t) log(1-S)], S clamped to [1e-12, 1-1e-12].
double cross_entropy(const Network& net, const EncodedSet& set);
/// P = eps1 sum beta q^2/(1+beta q^2) + eps2 sum q^2 over active non-bias weights.
double penalty(const Network& net, double eps1, double eps2, double beta);
double objective(const Network& net, const EncodedSet& set, const TrainConfig& cfg);
/// Fraction of patterns classified correctly.
double accuracy(const Network& net, const EncodedSet& set);

/// d(theta)/d(weight) for every slot; zero on inactive slots.
struct Gradient {
  Grid<double> w;
  Grid<double> v;
};
Gradient objective_gradient(const Network& net, const EncodedSet& set, const TrainConfig& cfg);

/// One pass of per-pattern updates in set order. Each pattern step descends
/// on its own cross-entropy term plus P/k. Frozen rows and inactive slots are
/// untouched. Throws StageError when the objective becomes non-finite.
void backprop_epoch(Network& net, const EncodedSet& train, const TrainConfig& cfg);

/// Trains until the objective's relative spread over the trailing tau+1
/// epochs drops below plateau_tol, or `epoch_cap` (default max_epochs) epochs.
TrainTrace train_until_plateau(Network& net, const EncodedSet& train, const TrainConfig& cfg,
                               const EncodedSet* validation = nullptr, int epoch_cap = 0,
                               int first_epoch = 1);

/// Freezes nodes whose mean |activation change| between the last epoch and
/// the one tau epochs earlier is below freeze_tol. Returns the nodes frozen.
std::vector<std::size_t> freeze_stable_nodes(Network& net, const TrainTrace& trace, const TrainConfig& cfg);

struct ConstructiveResult {
  Network network;
  TrainTrace trace;
  int epochs = 0;
  double validation_error = 0.0;
  double error_target = 0.0;
  bool hit_hidden_cap = false;
};

/// Squared validation error of an unpenalized 3-hidden-node reference net
/// trained to plateau, minus 5%.
double reference_error_target(const EncodedSet& train, const EncodedSet& validation, const TrainConfig& cfg,
                              std::uint64_t seed);

/// Starts from one hidden node; trains to plateau; stops when the validation
/// error meets the target, otherwise freezes stable nodes and adds a node.
/// An empty validation set falls back to the training set.
ConstructiveResult constructive_train(const EncodedSet& train, const EncodedSet& validation,
                                      const TrainConfig& cfg, std::uint64_t seed);

}  // namespace rgann
