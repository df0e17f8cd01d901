#include "rgann/extraction.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <stdexcept>

namespace rgann {

OutputRules extract_output_rules(const Network& net, const ClusterModel& model, const EncodedSet& set,
                                 const std::vector<std::string>& classes) {
  if (model.nodes.size() != net.hidden()) throw StageError("extract", "cluster model does not match network");
  OutputRules out;
  auto& t = out.table;
  t.classes = classes;
  for (std::size_t m = 0; m < net.hidden(); ++m) {
    Feature f;
    f.name = "H" + std::to_string(m + 1);
    const auto& node = model.nodes[m];
    f.cardinality = static_cast<int>(node.size());
    for (std::size_t j = 0; j < node.size(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", node.centroids[j]);
      std::string name = buf;
      if (std::find(f.values.begin(), f.values.end(), name) != f.values.end()) name += "#" + std::to_string(j + 1);
      f.values.push_back(name);
    }
    t.features.push_back(std::move(f));
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto idx = model.cluster_indices(net, set.inputs[i]);
    t.add(std::vector<int>(idx.begin(), idx.end()), model.classify(net, set.inputs[i]));
  }
  // Explicit rules for every class so that the merged level, not this one,
  // decides which class the default absorbs.
  out.rules = default_rule(rg_covering(t), t);
  out.rules.phase = RulePhase::output_layer;
  return out;
}

std::vector<std::vector<bool>> node_attributes(const Network& net, const Encoder& encoder) {
  std::vector<std::vector<bool>> rel(net.hidden(), std::vector<bool>(encoder.attribute_count(), false));
  for (std::size_t m = 0; m < net.hidden(); ++m)
    for (std::size_t l = 0; l < net.inputs(); ++l)
      if (net.w_active()(m, l)) rel[m][encoder.attribute_of_input(l)] = true;
  return rel;
}

std::vector<RuleSet> extract_hidden_rules(const Network& net, const ClusterModel& model, const EncodedSet& set,
                                          const DiscreteTable& inputs, const Encoder& encoder) {
  if (inputs.size() != set.size()) throw StageError("extract", "input view does not match encoded rows");
  if (model.nodes.size() != net.hidden()) throw StageError("extract", "cluster model does not match network");
  const auto rel = node_attributes(net, encoder);
  std::vector<std::vector<int>> labels(net.hidden(), std::vector<int>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto idx = model.cluster_indices(net, set.inputs[i]);
    for (std::size_t m = 0; m < net.hidden(); ++m) labels[m][i] = static_cast<int>(idx[m]);
  }
  std::vector<RuleSet> out;
  for (std::size_t m = 0; m < net.hidden(); ++m) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < model.nodes[m].size(); ++j) names.push_back("H" + std::to_string(m + 1) + "_" + std::to_string(j + 1));
    const auto table = inputs.restricted(rel[m]).relabeled(labels[m], names);
    RuleSet rs = rg_covering(table);
    rs.phase = RulePhase::hidden_layer;
    out.push_back(std::move(rs));
  }
  return out;
}

namespace {

// Conjunction of two condition lists; nullopt when contradictory.
std::optional<std::vector<Condition>> conjoin(const std::vector<Condition>& a, const std::vector<Condition>& b) {
  std::vector<Condition> out = a;
  for (const auto& c : b) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Condition& o) { return o.feature == c.feature; });
    if (it == out.end()) {
      out.push_back(c);
      continue;
    }
    it->lo = std::max(it->lo, c.lo);
    it->hi = std::min(it->hi, c.hi);
    if (it->lo > it->hi) return std::nullopt;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

RuleSet merge_rules(const RuleSet& output, const std::vector<RuleSet>& hidden, const DiscreteTable& table,
                    const MergeConfig& cfg) {
  RuleSet merged;
  merged.phase = RulePhase::merged;
  merged.default_class = output.default_class;
  for (const auto& orule : output.rules) {
    std::vector<std::vector<Condition>> partial{{}};
    for (const auto& c : orule.conditions) {
      if (c.feature >= hidden.size()) throw StageError("extract", "output rule refers to an unknown hidden node");
      const RuleSet& h = hidden[c.feature];
      std::vector<const std::vector<Condition>*> options;
      static const std::vector<Condition> always;
      for (int j = c.lo; j <= c.hi; ++j) {
        bool any = false;
        for (const auto& r : h.rules)
          if (r.consequent == j) {
            options.push_back(&r.conditions);
            any = true;
          }
        if (!any && h.default_class == j && h.rules.empty()) options.push_back(&always);
      }
      std::vector<std::vector<Condition>> next;
      for (const auto& p : partial)
        for (const auto* o : options)
          if (auto conj = conjoin(p, *o)) {
            next.push_back(std::move(*conj));
            if (next.size() > cfg.expansion_cap)
              throw StageError("extract", "merged rule expansion exceeds " + std::to_string(cfg.expansion_cap));
          }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      partial = std::move(next);
      if (partial.empty()) break;
    }
    for (auto& p : partial) merged.rules.push_back({std::move(p), orule.consequent, 0});
  }
  merged.canonicalize();
  merged.rules.erase(std::unique(merged.rules.begin(), merged.rules.end()), merged.rules.end());

  merged = cluster_rules(std::move(merged));
  merged = resolve_conflicts(std::move(merged), table);
  merged = default_rule(std::move(merged), table);
  for (int round = 0; round < 4; ++round) {
    const int before = merged.default_class;
    merged = prune_rules(std::move(merged), table);
    merged = default_rule(std::move(merged), table);
    if (merged.default_class == before) break;
  }
  merged.phase = RulePhase::merged;
  return merged;
}

}  // namespace rgann
