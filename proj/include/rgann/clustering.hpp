// One-pass threshold clustering of hidden-node activations and the per-node
// epsilon search that keeps the discretized network accurate.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rgann/data.hpp"
#include "rgann/network.hpp"

namespace rgann {

/// Discrete activation values of one hidden node.
struct NodeClusters {
  std::vector<double> centroids;       // H(1..D), finalized to sum/count
  std::vector<std::size_t> counts;
  std::vector<double> sums;
  double epsilon = 0.0;
  bool constant_node = false;
  /// Cluster joined by each clustered activation, in insertion order.
  std::vector<std::size_t> membership;

  std::size_t size() const noexcept { return centroids.size(); }
  /// Nearest centroid; ties go to the lower index.
  std::size_t assign(double activation) const;
};

struct ClusterModel {
  std::vector<NodeClusters> nodes;
  bool used_fallback = false;  // some node fell back to epsilon = zeta/10

  std::size_t assign(std::size_t node, double activation) const { return nodes.at(node).assign(activation); }
  /// Hidden activations of `x` replaced by their centroids.
  std::vector<double> discretize(const Network& net, std::span<const double> x) const;
  std::vector<std::size_t> cluster_indices(const Network& net, std::span<const double> x) const;
  int classify(const Network& net, std::span<const double> x) const;

  /// Human-readable table: node, epsilon, D, centroids, counts.
  std::string report() const;
  std::string to_text() const;
  static ClusterModel from_text(std::string_view text);
};

/// Seeds cluster 1 with the first value; each later value joins the nearest
/// cluster (measured against the cluster's seed value) when within epsilon,
/// otherwise opens a new cluster. Centroids are finally replaced by means.
NodeClusters cluster_node(std::span<const double> activations, double epsilon);

/// Classification accuracy with every hidden activation replaced by its centroid.
double discretized_accuracy(const Network& net, const ClusterModel& model, const EncodedSet& set);

struct ClusterSearchConfig {
  double zeta = 0.10;
  /// Unset: the continuous network's training accuracy.
  std::optional<double> required_accuracy;
  /// Activation range below which a node is treated as constant (D = 1).
  double constant_tol = 1e-2;

  void validate() const;
};

/// Per node (in order, earlier nodes already discretized), the largest
/// epsilon = i*zeta < 1 whose model keeps training accuracy >= required.
ClusterModel search_epsilon(const Network& net, const EncodedSet& train, const ClusterSearchConfig& cfg);

}  // namespace rgann
