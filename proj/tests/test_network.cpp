#include <doctest.h>

#include <cmath>

#include "rgann/network.hpp"

using namespace rgann;

TEST_CASE("initial network shape and determinism") {
  auto a = init_network(9, 2, 42);
  CHECK(a.w().rows() == 1);
  CHECK(a.w().cols() == 10);
  CHECK(a.v().rows() == 2);
  CHECK(a.v().cols() == 2);
  CHECK(a == init_network(9, 2, 42));
  CHECK_FALSE(a == init_network(9, 2, 43));
  for (double x : a.w().data()) CHECK(std::abs(x) <= 1.0);

  // 13 inputs + 3 outputs, bias links not counted
  CHECK(init_network(13, 3, 1).connection_count() == 16);
  CHECK(init_network(13, 3, 1).node_count() == 17);
}

TEST_CASE("activations") {
  Network net(Topology{3, 2, 2});
  for (double a : net.hidden_activations(std::vector<double>{0.3, -1.0, 2.0})) CHECK(a == 0.0);
  for (double s : net.forward(std::vector<double>{0.3, -1.0, 2.0})) CHECK(s == 0.5);

  Network one(Topology{1, 1, 2});
  one.set_weight({0, 0, 0}, 2.0);
  CHECK(one.hidden_activations(std::vector<double>{1.0})[0] == doctest::Approx(0.9640).epsilon(1e-4));

  Network big(Topology{2, 1, 2});
  big.set_weight({0, 0, 0}, 5.0);
  big.set_weight({0, 0, 1}, -5.0);
  const double h = big.hidden_activations(std::vector<double>{1.0, -1.0})[0];
  CHECK(h < 1.0);
  CHECK(h > -1.0);
}

TEST_CASE("output layer with the reported breast-cancer weights") {
  Network net(Topology{9, 1, 2});
  net.set_weight({1, 0, 0}, 3.0354);
  net.set_weight({1, 1, 0}, -3.0354);
  auto s = net.outputs_from_hidden(std::vector<double>{0.987});
  CHECK(s[0] == doctest::Approx(0.952).epsilon(1e-3));
  CHECK(s[1] == doctest::Approx(0.048).epsilon(1e-2));
  CHECK(s[0] == doctest::Approx(output_activation(2.996)).epsilon(1e-3));
}

TEST_CASE("classification and ties") {
  CHECK(argmax(std::vector<double>{0.9, 0.1}) == 0);
  CHECK(argmax(std::vector<double>{0.5, 0.5}) == 0);
  CHECK(argmax(std::vector<double>{0.2, 0.5, 0.5}) == 1);
  CHECK_THROWS(Network(Topology{2, 1, 1}));
}

TEST_CASE("adding a hidden node leaves old weights alone") {
  auto net = init_network(4, 3, 7);
  const auto before = net;
  const auto count = net.connection_count();
  net.add_hidden_node(99);
  CHECK(net.hidden() == 2);
  for (std::size_t l = 0; l <= 4; ++l) CHECK(net.w()(0, l) == before.w()(0, l));
  for (std::size_t p = 0; p < 3; ++p) {
    CHECK(net.v()(p, 0) == before.v()(p, 0));
    CHECK(net.v()(p, 2) == before.v()(p, 1));  // bias moved to the last column
  }
  CHECK(net.connection_count() == count + 4 + 3);
  CHECK(net.w_active().rows() * net.w_active().cols() + net.v_active().rows() * net.v_active().cols() ==
        before.w_active().rows() * before.w_active().cols() + before.v_active().rows() * before.v_active().cols() +
            (4 + 1) + 3);

  auto again = before;
  again.add_hidden_node(99);
  CHECK(again == net);
}

TEST_CASE("masks") {
  auto net = init_network(3, 2, 5);
  const std::vector<double> x{0.1, 0.7, -0.4};
  WeightId id{0, 0, 1};
  net.deactivate(id);
  CHECK(net.weight(id) == 0.0);
  CHECK_FALSE(net.active(id));
  const auto y = net.forward(x);
  net.set_weight(id, 123.0);
  CHECK(net.weight(id) == 0.0);
  CHECK(net.forward(x) == y);
  CHECK(net.connection_count() == 4);
  CHECK(net.relevant_inputs() == std::vector<bool>{true, false, true});

  CHECK(net.is_bias({0, 0, 3}));
  CHECK_THROWS(net.deactivate({0, 0, 3}));

  net.reactivate(id, 0.25);
  CHECK(net.weight(id) == 0.25);
}

TEST_CASE("text round trip and node removal") {
  auto net = init_network(3, 2, 11);
  net.add_hidden_node(12);
  net.deactivate({1, 1, 0});
  net.freeze(0);
  auto back = Network::from_text(net.to_text());
  CHECK(back == net);

  net.remove_hidden_node(0);
  CHECK(net.hidden() == 1);
  CHECK_FALSE(net.frozen(0));
  CHECK(net.w()(0, 0) == back.w()(1, 0));
  CHECK_THROWS(Network::from_text("garbage"));
}
