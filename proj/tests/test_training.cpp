#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "rgann/training.hpp"

using namespace rgann;

namespace {

EncodedSet single(std::vector<double> x, std::vector<double> t) {
  EncodedSet s;
  s.labels.push_back(argmax(t));
  s.inputs.push_back(std::move(x));
  s.targets.push_back(std::move(t));
  return s;
}

// AND of two inputs.
EncodedSet and_set() {
  EncodedSet s;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int y = a & b;
      s.inputs.push_back({double(a), double(b)});
      s.targets.push_back({y ? 0.0 : 1.0, y ? 1.0 : 0.0});
      s.labels.push_back(y);
    }
  return s;
}

}  // namespace

TEST_CASE("error terms by hand") {
  Network net(Topology{1, 1, 2});
  auto s = single({0.3}, {1.0, 0.0});
  CHECK(squared_error(net, s) == doctest::Approx(0.25));

  // each output contributes -log 0.5
  CHECK(cross_entropy(net, s) == doctest::Approx(2 * 0.6931).epsilon(1e-4));

  // near-perfect outputs
  Network sharp(Topology{1, 1, 2});
  sharp.set_weight({1, 0, 1}, 30.0);
  sharp.set_weight({1, 1, 1}, -30.0);
  CHECK(squared_error(sharp, s) < 1e-20);
  CHECK(cross_entropy(sharp, s) < 1e-10);
}

TEST_CASE("penalty") {
  Network net(Topology{1, 1, 2});
  CHECK(penalty(net, 0.1, 1e-4, 10.0) == 0.0);
  net.set_weight({0, 0, 0}, 1.0);
  CHECK(penalty(net, 0.1, 1e-4, 10.0) == doctest::Approx(0.1 * 10.0 / 11.0 + 1e-4).epsilon(1e-12));
  CHECK(penalty(net, 0.1, 1e-4, 10.0) == doctest::Approx(0.0910091).epsilon(1e-6));
  // biases carry no penalty
  net.set_weight({0, 0, 1}, 5.0);
  CHECK(penalty(net, 0.1, 1e-4, 10.0) == doctest::Approx(0.0910091).epsilon(1e-6));
  double last = -1.0;
  for (double q : {0.0, 0.1, 0.5, 1.0, 2.0, 10.0}) {
    net.set_weight({0, 0, 0}, -q);
    const double p = penalty(net, 0.1, 1e-4, 10.0);
    CHECK(p >= last);
    last = p;
  }
}

TEST_CASE("objective is F + P") {
  std::mt19937_64 rng(3);
  auto net = oracle::random_net(3, 2, 2, rng);
  auto set = oracle::random_set(20, 3, 2, rng);
  TrainConfig cfg;
  CHECK(objective(net, set, cfg) == cross_entropy(net, set) + penalty(net, cfg.eps1, cfg.eps2, cfg.beta));
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(2024);
  TrainConfig cfg;
  for (auto [n, h, c] : {std::tuple{3, 2, 2}, std::tuple{5, 3, 3}}) {
    auto net = oracle::random_net(n, h, c, rng);
    auto set = oracle::random_set(15, n, c, rng);
    auto chk = oracle::check_gradient(net, set, cfg, 100, rng);
    CHECK(chk.max_relative_error < 1e-4);
  }
  // masked slots have zero gradient
  auto net = oracle::random_net(3, 2, 2, rng);
  net.deactivate({0, 1, 2});
  auto set = oracle::random_set(10, 3, 2, rng);
  CHECK(objective_gradient(net, set, cfg).w(1, 2) == 0.0);
}

TEST_CASE("without the penalty the gradient is the cross-entropy gradient") {
  std::mt19937_64 rng(5);
  TrainConfig cfg;
  cfg.eps1 = 0.0;
  cfg.eps2 = 0.0;
  auto net = oracle::random_net(3, 2, 2, rng);
  auto set = oracle::random_set(10, 3, 2, rng);
  const auto g = objective_gradient(net, set, cfg);
  auto plus = net, minus = net;
  plus.set_weight({0, 1, 0}, net.weight({0, 1, 0}) + 1e-6);
  minus.set_weight({0, 1, 0}, net.weight({0, 1, 0}) - 1e-6);
  const double fd = (cross_entropy(plus, set) - cross_entropy(minus, set)) / 2e-6;
  CHECK(g.w(1, 0) == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("frozen rows and inactive slots do not move") {
  std::mt19937_64 rng(9);
  auto net = oracle::random_net(3, 2, 2, rng);
  net.freeze(0);
  net.deactivate({0, 1, 1});
  auto set = oracle::random_set(12, 3, 2, rng);
  const auto before = net;
  backprop_epoch(net, set, TrainConfig{});
  for (std::size_t l = 0; l <= 3; ++l) CHECK(net.w()(0, l) == before.w()(0, l));
  CHECK(net.w()(1, 1) == 0.0);
  CHECK(net.w()(1, 0) != before.w()(1, 0));
}

TEST_CASE("plateau detection") {
  std::mt19937_64 rng(1);
  auto set = oracle::random_set(10, 2, 2, rng);
  TrainConfig cfg;
  cfg.plateau_tol = std::numeric_limits<double>::infinity();
  auto net = init_network(2, 2, 1);
  auto tr = train_until_plateau(net, set, cfg);
  CHECK(tr.epochs.size() == static_cast<std::size_t>(cfg.tau) + 1);
  CHECK_FALSE(tr.hit_max_epochs);

  cfg.plateau_tol = 1e-300;
  cfg.max_epochs = 7;
  auto net2 = init_network(2, 2, 1);
  auto tr2 = train_until_plateau(net2, set, cfg);
  CHECK(tr2.epochs.size() == 7);
  CHECK(tr2.hit_max_epochs);

  cfg = TrainConfig{};
  auto net3 = init_network(2, 2, 1);
  auto tr3 = train_until_plateau(net3, set, cfg);
  for (const auto& e : tr3.epochs) CHECK(std::abs(e.objective - (e.cross_entropy + e.penalty)) <= 1e-12);
  if (!tr3.hit_max_epochs) {
    const auto w = static_cast<std::size_t>(cfg.tau) + 1;
    const double base = tr3.epochs[tr3.epochs.size() - w].objective;
    for (std::size_t j = tr3.epochs.size() - w; j < tr3.epochs.size(); ++j)
      CHECK(std::abs(tr3.epochs[j].objective - base) / base < cfg.plateau_tol);
  }
  CHECK(tr3.to_csv().rfind("epoch,E_valid,F,P,theta,act_0\n", 0) == 0);
}

TEST_CASE("freezing criterion") {
  TrainConfig cfg;
  cfg.tau = 1;
  Network net(Topology{1, 2, 2});
  net.set_weight({0, 0, 0}, 0.3);
  TrainTrace tr;
  // node 0 constant, node 1 swinging by 0.5 every epoch
  tr.recent_activations.push_back({{0.2, 0.2}, {0.0, 0.5}});
  tr.recent_activations.push_back({{0.2, 0.2}, {0.5, 0.0}});
  const auto before = net;
  auto frozen = freeze_stable_nodes(net, tr, cfg);
  CHECK(frozen == std::vector<std::size_t>{0});
  CHECK(net.frozen(0));
  CHECK_FALSE(net.frozen(1));
  CHECK(net.w() == before.w());

  // too short a history freezes nothing
  Network n2(Topology{1, 2, 2});
  TrainTrace short_trace;
  short_trace.recent_activations.push_back({{0.2}, {0.2}});
  CHECK(freeze_stable_nodes(n2, short_trace, cfg).empty());
}

TEST_CASE("constructive training") {
  auto set = and_set();
  TrainConfig cfg;
  cfg.valid_error_target = 0.1;
  // seed 3 avoids the all-weights-near-zero saddle the penalty can pull a
  // single node into; other seeds recover by adding a node
  auto res = constructive_train(set, {}, cfg, 3);
  CHECK(res.network.hidden() == 1);
  CHECK(res.validation_error <= res.error_target);
  CHECK(accuracy(res.network, set) == 1.0);
  CHECK(res.epochs == static_cast<int>(res.trace.epochs.size()));

  cfg.valid_error_target = 1e300;
  auto quick = constructive_train(set, {}, cfg, 17);
  CHECK(quick.network.hidden() == 1);

  // an unreachable target grows to the cap
  cfg.valid_error_target = 1e-300;
  cfg.max_hidden = 3;
  cfg.max_epochs = 30;
  auto capped = constructive_train(set, {}, cfg, 17);
  CHECK(capped.hit_hidden_cap);
  CHECK(capped.network.hidden() <= 3);

  auto again = constructive_train(set, {}, cfg, 17);
  CHECK(again.network == capped.network);

  TrainConfig bad;
  bad.learning_rate = 2.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(constructive_train({}, {}, TrainConfig{}, 1), StageError);
}
