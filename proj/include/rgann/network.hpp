// Three-layer feedforward classifier: tanh hidden layer, sigmoid outputs.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rgann/common.hpp"

namespace rgann {

struct Topology {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::size_t outputs = 0;

  bool operator==(const Topology&) const = default;
};

double hidden_activation(double y);  // tanh
double output_activation(double y);  // logistic sigmoid

/// Identifies one weight slot. Layer 0 is input->hidden (row = hidden node,
/// col = input, col == inputs is the bias); layer 1 is hidden->output
/// (row = output, col = hidden node, col == hidden is the bias).
struct WeightId {
  int layer = 0;
  std::size_t row = 0;
  std::size_t col = 0;

  auto operator<=>(const WeightId&) const = default;
  std::string to_string() const;
};

/// Dense weights with activity masks. Inactive slots hold exactly 0.
/// Bias slots are always active and are neither pruned nor counted.
class Network {
 public:
  Network() = default;
  /// All-zero weights, every connection active, nothing frozen.
  explicit Network(Topology topology);

  const Topology& topology() const noexcept { return topology_; }
  std::size_t inputs() const noexcept { return topology_.inputs; }
  std::size_t hidden() const noexcept { return topology_.hidden; }
  std::size_t outputs() const noexcept { return topology_.outputs; }

  /// Input->hidden weights, h x (n+1).
  const Grid<double>& w() const noexcept { return w_; }
  /// Hidden->output weights, C x (h+1).
  const Grid<double>& v() const noexcept { return v_; }
  const Grid<std::uint8_t>& w_active() const noexcept { return w_active_; }
  const Grid<std::uint8_t>& v_active() const noexcept { return v_active_; }

  double weight(const WeightId& id) const;
  bool active(const WeightId& id) const;
  bool is_bias(const WeightId& id) const;
  /// Writes a weight; writes to inactive slots are ignored (they stay 0).
  void set_weight(const WeightId& id, double value);
  /// Masks a non-bias connection and zeroes it.
  void deactivate(const WeightId& id);
  /// Unmasks a connection and stores `value`.
  void reactivate(const WeightId& id, double value);

  bool frozen(std::size_t node) const { return frozen_.at(node) != 0; }
  void freeze(std::size_t node) { frozen_.at(node) = 1; }
  const std::vector<std::uint8_t>& frozen_flags() const noexcept { return frozen_; }

  /// Adds one hidden node with weights uniform in [-1, 1] drawn from `seed`.
  void add_hidden_node(std::uint64_t seed);
  /// Drops hidden node `m` together with its row of w and column of v.
  void remove_hidden_node(std::size_t m);

  std::vector<double> hidden_activations(std::span<const double> x) const;
  std::vector<double> outputs_from_hidden(std::span<const double> hidden) const;
  std::vector<double> forward(std::span<const double> x) const;
  int classify(std::span<const double> x) const;

  /// Active non-bias connections, in both layers.
  std::vector<WeightId> active_connections() const;
  std::size_t connection_count() const;
  /// Inputs with at least one active outgoing connection.
  std::vector<bool> relevant_inputs() const;
  /// Relevant inputs + hidden + outputs.
  std::size_t node_count() const;

  /// Text form: topology, frozen flags, masks and weights (round-trip exact).
  std::string to_text() const;
  static Network from_text(std::string_view text);

  bool operator==(const Network&) const = default;

 private:
  Topology topology_;
  Grid<double> w_;
  Grid<double> v_;
  Grid<std::uint8_t> w_active_;
  Grid<std::uint8_t> v_active_;
  std::vector<std::uint8_t> frozen_;
};

/// One hidden node, weights uniform in [-1, 1].
Network init_network(std::size_t inputs, std::size_t outputs, std::uint64_t seed);

/// Argmax with ties toward the lower index.
int argmax(std::span<const double> values);

}  // namespace rgann
