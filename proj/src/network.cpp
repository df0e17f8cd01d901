#include "rgann/network.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rgann {

double hidden_activation(double y) { return std::tanh(y); }

double output_activation(double y) {
  if (y >= 0.0) return 1.0 / (1.0 + std::exp(-y));
  double e = std::exp(y);
  return e / (1.0 + e);
}

std::string WeightId::to_string() const {
  return (layer == 0 ? "w[" : "v[") + std::to_string(row) + "][" + std::to_string(col) + "]";
}

int argmax(std::span<const double> values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

Network::Network(Topology topology)
    : topology_(topology),
      w_(topology.hidden, topology.inputs + 1, 0.0),
      v_(topology.outputs, topology.hidden + 1, 0.0),
      w_active_(topology.hidden, topology.inputs + 1, 1),
      v_active_(topology.outputs, topology.hidden + 1, 1),
      frozen_(topology.hidden, 0) {
  if (topology.inputs < 1) throw std::invalid_argument("network needs at least one input");
  if (topology.outputs < 2) throw std::invalid_argument("network needs at least two outputs");
}

Network init_network(std::size_t inputs, std::size_t outputs, std::uint64_t seed) {
  Network net(Topology{inputs, 0, outputs});
  net.add_hidden_node(seed);
  return net;
}

bool Network::is_bias(const WeightId& id) const {
  return id.layer == 0 ? id.col == topology_.inputs : id.col == topology_.hidden;
}

double Network::weight(const WeightId& id) const { return id.layer == 0 ? w_(id.row, id.col) : v_(id.row, id.col); }

bool Network::active(const WeightId& id) const {
  return (id.layer == 0 ? w_active_(id.row, id.col) : v_active_(id.row, id.col)) != 0;
}

void Network::set_weight(const WeightId& id, double value) {
  if (!active(id)) return;
  (id.layer == 0 ? w_(id.row, id.col) : v_(id.row, id.col)) = value;
}

void Network::deactivate(const WeightId& id) {
  if (is_bias(id)) throw std::invalid_argument("bias connections cannot be pruned");
  if (id.layer == 0) {
    w_active_(id.row, id.col) = 0;
    w_(id.row, id.col) = 0.0;
  } else {
    v_active_(id.row, id.col) = 0;
    v_(id.row, id.col) = 0.0;
  }
}

void Network::reactivate(const WeightId& id, double value) {
  if (id.layer == 0) {
    w_active_(id.row, id.col) = 1;
    w_(id.row, id.col) = value;
  } else {
    v_active_(id.row, id.col) = 1;
    v_(id.row, id.col) = value;
  }
}

void Network::add_hidden_node(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<double> row(topology_.inputs + 1);
  for (auto& x : row) x = uniform(rng);
  std::vector<double> col(topology_.outputs);
  for (auto& x : col) x = uniform(rng);

  const std::size_t m = topology_.hidden;
  if (m == 0) {
    w_ = Grid<double>(0, topology_.inputs + 1);
    w_active_ = Grid<std::uint8_t>(0, topology_.inputs + 1);
    v_ = Grid<double>(topology_.outputs, 1, 0.0);
    v_active_ = Grid<std::uint8_t>(topology_.outputs, 1, 1);
    for (std::size_t p = 0; p < topology_.outputs; ++p) v_(p, 0) = uniform(rng);
  }
  w_.append_row(row);
  w_active_.append_row(std::vector<std::uint8_t>(topology_.inputs + 1, 1));
  v_.insert_col(m, col);
  v_active_.insert_col(m, std::vector<std::uint8_t>(topology_.outputs, 1));
  frozen_.push_back(0);
  ++topology_.hidden;
}

void Network::remove_hidden_node(std::size_t m) {
  if (m >= topology_.hidden) throw std::out_of_range("remove_hidden_node: no such node");
  w_.erase_row(m);
  w_active_.erase_row(m);
  v_.erase_col(m);
  v_active_.erase_col(m);
  frozen_.erase(frozen_.begin() + static_cast<std::ptrdiff_t>(m));
  --topology_.hidden;
}

std::vector<double> Network::hidden_activations(std::span<const double> x) const {
  if (x.size() != topology_.inputs) throw std::invalid_argument("input size mismatch");
  std::vector<double> a(topology_.hidden);
  for (std::size_t m = 0; m < topology_.hidden; ++m) {
    double z = w_(m, topology_.inputs);
    for (std::size_t l = 0; l < topology_.inputs; ++l) z += w_(m, l) * x[l];
    a[m] = hidden_activation(z);
  }
  return a;
}

std::vector<double> Network::outputs_from_hidden(std::span<const double> hidden) const {
  if (hidden.size() != topology_.hidden) throw std::invalid_argument("hidden size mismatch");
  std::vector<double> s(topology_.outputs);
  for (std::size_t p = 0; p < topology_.outputs; ++p) {
    double y = v_(p, topology_.hidden);
    for (std::size_t m = 0; m < topology_.hidden; ++m) y += v_(p, m) * hidden[m];
    s[p] = output_activation(y);
  }
  return s;
}

std::vector<double> Network::forward(std::span<const double> x) const {
  auto a = hidden_activations(x);
  return outputs_from_hidden(a);
}

int Network::classify(std::span<const double> x) const { return argmax(forward(x)); }

std::vector<WeightId> Network::active_connections() const {
  std::vector<WeightId> ids;
  for (std::size_t m = 0; m < topology_.hidden; ++m)
    for (std::size_t l = 0; l < topology_.inputs; ++l)
      if (w_active_(m, l)) ids.push_back({0, m, l});
  for (std::size_t p = 0; p < topology_.outputs; ++p)
    for (std::size_t m = 0; m < topology_.hidden; ++m)
      if (v_active_(p, m)) ids.push_back({1, p, m});
  return ids;
}

std::size_t Network::connection_count() const { return active_connections().size(); }

std::vector<bool> Network::relevant_inputs() const {
  std::vector<bool> relevant(topology_.inputs, false);
  for (std::size_t m = 0; m < topology_.hidden; ++m)
    for (std::size_t l = 0; l < topology_.inputs; ++l)
      if (w_active_(m, l)) relevant[l] = true;
  return relevant;
}

std::size_t Network::node_count() const {
  std::size_t relevant = 0;
  for (bool r : relevant_inputs()) relevant += r ? 1 : 0;
  return relevant + topology_.hidden + topology_.outputs;
}

std::string Network::to_text() const {
  std::ostringstream out;
  out << "rgann-network 1\n";
  out << "topology " << topology_.inputs << ' ' << topology_.hidden << ' ' << topology_.outputs << '\n';
  out << "frozen";
  for (auto f : frozen_) out << ' ' << int(f);
  out << '\n';
  auto dump = [&out](char tag, const Grid<double>& g, const Grid<std::uint8_t>& mask) {
    for (std::size_t r = 0; r < g.rows(); ++r) {
      out << tag << ' ' << r << ' ';
      for (std::size_t c = 0; c < g.cols(); ++c) out << int(mask(r, c));
      for (std::size_t c = 0; c < g.cols(); ++c) out << ' ' << format_double(g(r, c));
      out << '\n';
    }
  };
  dump('w', w_, w_active_);
  dump('v', v_, v_active_);
  out << "end\n";
  return out.str();
}

Network Network::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto fail = [](const std::string& what) { return std::invalid_argument("network text: " + what); };
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "rgann-network" || version != 1) throw fail("bad header");
  Topology t;
  if (!(in >> tag >> t.inputs >> t.hidden >> t.outputs) || tag != "topology") throw fail("bad topology");
  Network net(Topology{t.inputs, 0, t.outputs});
  net.topology_ = t;
  net.w_ = Grid<double>(t.hidden, t.inputs + 1, 0.0);
  net.w_active_ = Grid<std::uint8_t>(t.hidden, t.inputs + 1, 1);
  net.v_ = Grid<double>(t.outputs, t.hidden + 1, 0.0);
  net.v_active_ = Grid<std::uint8_t>(t.outputs, t.hidden + 1, 1);
  net.frozen_.assign(t.hidden, 0);
  if (!(in >> tag) || tag != "frozen") throw fail("missing frozen flags");
  for (std::size_t m = 0; m < t.hidden; ++m) {
    int f = 0;
    if (!(in >> f)) throw fail("short frozen flags");
    net.frozen_[m] = static_cast<std::uint8_t>(f != 0);
  }
  auto load = [&](char expect, Grid<double>& g, Grid<std::uint8_t>& mask) {
    for (std::size_t r = 0; r < g.rows(); ++r) {
      std::size_t row = 0;
      std::string bits;
      if (!(in >> tag >> row >> bits) || tag.size() != 1 || tag[0] != expect || row != r || bits.size() != g.cols())
        throw fail(std::string("bad ") + expect + " row " + std::to_string(r));
      for (std::size_t c = 0; c < g.cols(); ++c) {
        std::string num;
        if (!(in >> num)) throw fail("short weight row");
        mask(r, c) = static_cast<std::uint8_t>(bits[c] == '1');
        g(r, c) = parse_double(num);
        if (!mask(r, c) && g(r, c) != 0.0) throw fail("inactive weight must be 0");
      }
    }
  };
  load('w', net.w_, net.w_active_);
  load('v', net.v_, net.v_active_);
  if (!(in >> tag) || tag != "end") throw fail("missing end marker");
  return net;
}

}  // namespace rgann
