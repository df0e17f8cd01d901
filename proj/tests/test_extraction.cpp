#include <doctest.h>

#include <set>

#include "rgann/pipeline.hpp"

using namespace rgann;

namespace {

RunConfig config(const std::string& name) {
  return load_run_config(std::string(RGANN_SOURCE_DIR) + "/configs/" + name + ".json");
}

}  // namespace

TEST_CASE("three-phase extraction on breast cancer") {
  const auto cfg = config("breast_cancer");
  const auto data = prepare_data(cfg);
  const auto res = run_pipeline(cfg, data, 1);
  const auto& net = res.network;
  const auto& model = res.clusters;

  // output table: cluster tuples labeled by the discretized network
  const auto& t = res.output_rules.table;
  REQUIRE(t.features.size() == net.hidden());
  std::size_t product = 1;
  for (const auto& n : model.nodes) product *= n.size();
  std::set<std::vector<int>> tuples(t.rows.begin(), t.rows.end());
  CHECK(tuples.size() <= product);
  for (std::size_t i = 0; i < data.block.size(); ++i)
    CHECK(t.labels[i] == model.classify(net, data.block.inputs[i]));
  CHECK(evaluate_ruleset(res.output_rules.rules, t).accuracy == 1.0);

  // hidden rules mention connected attributes only and reproduce the clusters
  const auto rel = node_attributes(net, data.encoder);
  REQUIRE(res.hidden_rules.size() == net.hidden());
  for (std::size_t m = 0; m < net.hidden(); ++m) {
    for (const auto& r : res.hidden_rules[m].rules)
      for (const auto& c : r.conditions) CHECK(rel[m][c.feature]);
    std::vector<int> labels;
    for (const auto& x : data.block.inputs) labels.push_back(int(model.cluster_indices(net, x)[m]));
    auto view = data.train_table.relabeled(labels, std::vector<std::string>(model.nodes[m].size(), "c"));
    CHECK(evaluate_ruleset(res.hidden_rules[m], view).accuracy >= 0.9);
    if (model.nodes[m].size() == 1) CHECK(res.hidden_rules[m].rules.empty());
  }

  // merged rules speak about inputs only
  for (const auto& r : res.merged_rules.rules)
    for (const auto& c : r.conditions) CHECK(c.feature < data.train_table.features.size());
  CHECK(res.rules.rule_count() <= res.merged_rules.rule_count() + 1);
}

TEST_CASE("one-cluster model gives a default-only output level") {
  Network net(Topology{2, 1, 2});
  net.set_weight({0, 0, 0}, 1.0);
  net.set_weight({1, 0, 0}, 1.0);
  EncodedSet set;
  for (double a : {0.0, 0.5, 1.0}) {
    set.inputs.push_back({a, 0.0});
    set.targets.push_back({1.0, 0.0});
    set.labels.push_back(0);
  }
  ClusterModel model;
  NodeClusters nc;
  nc.centroids = {0.4};
  nc.counts = {3};
  nc.sums = {1.2};
  model.nodes.push_back(nc);
  auto out = extract_output_rules(net, model, set, {"a", "b"});
  CHECK(out.rules.rules.empty());
  CHECK(out.rules.default_class == model.classify(net, set.inputs[0]));
}

TEST_CASE("merge substitutes hidden rules and respects the expansion cap") {
  DiscreteTable inputs;
  inputs.classes = {"n", "y"};
  for (const char* name : {"A", "B"}) {
    Feature f;
    f.name = name;
    f.cardinality = 2;
    f.values = {"0", "1"};
    inputs.features.push_back(f);
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) inputs.add({a, b}, a & b);

  // H1 = 1 exactly when A = 1, H2 = 1 exactly when B = 1; output y iff both
  RuleSet out;
  out.rules = {{{{0, 1, 1}, {1, 1, 1}}, 1, 0}};
  out.default_class = 0;
  RuleSet h1, h2;
  h1.rules = {{{{0, 1, 1}}, 1, 0}, {{{0, 0, 0}}, 0, 0}};
  h2.rules = {{{{1, 1, 1}}, 1, 0}, {{{1, 0, 0}}, 0, 0}};
  auto merged = merge_rules(out, {h1, h2}, inputs);
  REQUIRE(merged.rules.size() == 1);
  CHECK(merged.rules[0].conditions == std::vector<Condition>{{0, 1, 1}, {1, 1, 1}});
  CHECK(merged.default_class == 0);
  CHECK(evaluate_ruleset(merged, inputs).accuracy == 1.0);

  MergeConfig tiny;
  tiny.expansion_cap = 0;
  CHECK_THROWS_AS(merge_rules(out, {h1, h2}, inputs, tiny), StageError);
}
