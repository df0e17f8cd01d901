// Rules from a pruned, discretized network: output-layer rules over hidden
// clusters, hidden-layer rules over inputs, and their merge.
#pragma once

#include <cstddef>
#include <vector>

#include "rgann/clustering.hpp"
#include "rgann/network.hpp"
#include "rgann/rules.hpp"

namespace rgann {

struct OutputRules {
  RuleSet rules;
  DiscreteTable table;  // cluster-index tuples labeled by the discretized network
};

/// Table of cluster-index tuples (one column "H<m>" per hidden node) labeled
/// with the discretized network's class, and its RG rules. Every class that
/// occurs keeps explicit rules; the default is still chosen.
OutputRules extract_output_rules(const Network& net, const ClusterModel& model, const EncodedSet& set,
                                 const std::vector<std::string>& classes);

/// Whether raw attribute `a` feeds hidden node `m` through an active link.
std::vector<std::vector<bool>> node_attributes(const Network& net, const Encoder& encoder);

/// Per hidden node: rules over the discrete inputs it is connected to,
/// predicting its cluster index. Every cluster gets explicit rules.
/// `inputs` is the discrete view of the rows encoded in `set`.
std::vector<RuleSet> extract_hidden_rules(const Network& net, const ClusterModel& model, const EncodedSet& set,
                                          const DiscreteTable& inputs, const Encoder& encoder);

struct MergeConfig {
  std::size_t expansion_cap = 20000;
};

/// Substitutes each "H<m> = j" in the output rules by the rules of node m
/// predicting j and simplifies the result against `table`, which should hold
/// the discrete inputs labeled by the discretized network.
RuleSet merge_rules(const RuleSet& output, const std::vector<RuleSet>& hidden, const DiscreteTable& table,
                    const MergeConfig& cfg = {});

}  // namespace rgann
