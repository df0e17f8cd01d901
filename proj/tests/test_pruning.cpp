#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rgann/pruning.hpp"

using namespace rgann;

namespace {

// Label = x0 > 0.5, plus a few flipped rows; x1 and x2 are noise.
EncodedSet noisy_set(std::mt19937_64& rng) {
  EncodedSet s;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    std::vector<double> x{u(rng), u(rng), u(rng)};
    int y = x[0] > 0.5 ? 1 : 0;
    if (i % 15 == 7) y = 1 - y;
    s.inputs.push_back(x);
    s.targets.push_back({y ? 0.0 : 1.0, y ? 1.0 : 0.0});
    s.labels.push_back(y);
  }
  return s;
}

}  // namespace

TEST_CASE("candidates in ascending magnitude") {
  std::mt19937_64 rng(1);
  auto net = oracle::random_net(3, 2, 2, rng);
  net.set_weight({1, 1, 1}, 0.0);
  auto c = prune_candidates(net, {});
  CHECK(c.size() == net.connection_count());
  CHECK(c.front() == WeightId{1, 1, 1});
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(std::abs(net.weight(c[i - 1])) <= std::abs(net.weight(c[i])));
  auto rest = prune_candidates(net, {c.front()});
  CHECK(rest.front() == c[1]);
}

TEST_CASE("pruning keeps the accuracy floor") {
  std::mt19937_64 rng(4);
  auto set = noisy_set(rng);
  TrainConfig tcfg;
  auto net = init_network(3, 2, 8);
  net.add_hidden_node(9);
  train_until_plateau(net, set, tcfg);
  const double start = accuracy(net, set);
  const auto before = net.connection_count();

  auto pruned = net;
  auto res = prune_network(pruned, set, {}, {}, tcfg);
  CHECK(res.accuracy_floor == doctest::Approx(start - 0.005));
  CHECK(accuracy(pruned, set) >= res.accuracy_floor);
  CHECK(pruned.connection_count() < before);
  std::size_t removed = 0;
  for (const auto& e : res.log) {
    if (e.removed) ++removed;
    CHECK((e.removed ? e.accuracy >= res.accuracy_floor : true));
  }
  CHECK(pruned.connection_count() == before - removed);
  for (std::size_t m = 0; m < pruned.hidden(); ++m)
    for (std::size_t l = 0; l < pruned.inputs(); ++l)
      if (!pruned.w_active()(m, l)) CHECK(pruned.w()(m, l) == 0.0);
  CHECK(res.log_csv().rfind("weight,magnitude,action,accuracy\n", 0) == 0);
  // the noise inputs should not survive alone
  CHECK(pruned.relevant_inputs()[0]);

  // floor 1.0 on a set the network cannot fit: nothing may be removed
  if (start < 1.0) {
    auto strict = net;
    PruneConfig pcfg;
    pcfg.accuracy_floor = 1.0;
    auto sres = prune_network(strict, set, {}, pcfg, tcfg);
    for (const auto& e : sres.log) CHECK_FALSE(e.removed);
    CHECK(strict == net);
  }
}

TEST_CASE("prune config validation") {
  PruneConfig p;
  p.accuracy_floor = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.accuracy_floor.reset();
  p.retrain_epochs_cap = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("dead node removal") {
  std::mt19937_64 rng(6);
  auto net = oracle::random_net(3, 2, 2, rng);
  const auto untouched = net;
  auto rep = remove_dead_nodes(net);
  CHECK(rep.removed_hidden.empty());
  CHECK(net == untouched);

  // node 1 loses its outputs: dropped
  auto a = untouched;
  a.deactivate({1, 0, 1});
  a.deactivate({1, 1, 1});
  const std::vector<double> x{0.2, 0.4, 0.9};
  const auto ya = a.forward(x);
  rep = remove_dead_nodes(a);
  CHECK(a.hidden() == 1);
  CHECK(rep.removed_hidden == std::vector<std::size_t>{1});
  CHECK(a.forward(x)[0] == doctest::Approx(ya[0]).epsilon(1e-12));

  // node 0 loses its inputs: its constant output folds into the biases
  auto b = untouched;
  for (std::size_t l = 0; l < 3; ++l) b.deactivate({0, 0, l});
  const auto yb = b.forward(x);
  rep = remove_dead_nodes(b);
  CHECK(b.hidden() == 1);
  CHECK(rep.removed_hidden == std::vector<std::size_t>{0});
  CHECK(b.forward(x)[0] == doctest::Approx(yb[0]).epsilon(1e-12));
  CHECK(b.forward(x)[1] == doctest::Approx(yb[1]).epsilon(1e-12));

  auto c = untouched;
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t m = 0; m < 2; ++m) c.deactivate({1, p, m});
  CHECK_THROWS_AS(remove_dead_nodes(c), StageError);
}
