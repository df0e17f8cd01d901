#include "rgann/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "rgann/training.hpp"

namespace rgann {

namespace {

// Nodes without a model keep their continuous activation.
std::size_t correct_count(const Network& net, const std::vector<std::optional<NodeClusters>>& nodes,
                          const EncodedSet& set) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto a = net.hidden_activations(set.inputs[i]);
    for (std::size_t m = 0; m < a.size(); ++m)
      if (nodes[m]) a[m] = nodes[m]->centroids[nodes[m]->assign(a[m])];
    if (argmax(net.outputs_from_hidden(a)) == set.labels[i]) ++correct;
  }
  return correct;
}

}  // namespace

std::size_t NodeClusters::assign(double activation) const {
  std::size_t best = 0;
  double best_distance = std::abs(activation - centroids.at(0));
  for (std::size_t j = 1; j < centroids.size(); ++j) {
    double d = std::abs(activation - centroids[j]);
    if (d < best_distance) {
      best = j;
      best_distance = d;
    }
  }
  return best;
}

NodeClusters cluster_node(std::span<const double> activations, double epsilon) {
  if (activations.empty()) throw std::invalid_argument("cluster_node: no activations");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("cluster_node: epsilon must lie in (0, 1)");
  NodeClusters nc;
  nc.epsilon = epsilon;
  std::vector<double> seeds;
  for (double delta : activations) {
    std::size_t nearest = 0;
    double distance = INFINITY;
    for (std::size_t j = 0; j < seeds.size(); ++j) {
      double d = std::abs(delta - seeds[j]);
      if (d < distance) {
        nearest = j;
        distance = d;
      }
    }
    if (!seeds.empty() && distance <= epsilon) {
      ++nc.counts[nearest];
      nc.sums[nearest] += delta;
      nc.membership.push_back(nearest);
    } else {
      seeds.push_back(delta);
      nc.counts.push_back(1);
      nc.sums.push_back(delta);
      nc.membership.push_back(seeds.size() - 1);
    }
  }
  nc.centroids.resize(seeds.size());
  for (std::size_t j = 0; j < seeds.size(); ++j) nc.centroids[j] = nc.sums[j] / static_cast<double>(nc.counts[j]);
  return nc;
}

std::vector<double> ClusterModel::discretize(const Network& net, std::span<const double> x) const {
  auto a = net.hidden_activations(x);
  if (a.size() != nodes.size()) throw std::invalid_argument("cluster model does not cover every hidden node");
  for (std::size_t m = 0; m < a.size(); ++m) a[m] = nodes[m].centroids[nodes[m].assign(a[m])];
  return a;
}

std::vector<std::size_t> ClusterModel::cluster_indices(const Network& net, std::span<const double> x) const {
  auto a = net.hidden_activations(x);
  if (a.size() != nodes.size()) throw std::invalid_argument("cluster model does not cover every hidden node");
  std::vector<std::size_t> idx(a.size());
  for (std::size_t m = 0; m < a.size(); ++m) idx[m] = nodes[m].assign(a[m]);
  return idx;
}

int ClusterModel::classify(const Network& net, std::span<const double> x) const {
  return argmax(net.outputs_from_hidden(discretize(net, x)));
}

std::string ClusterModel::report() const {
  std::ostringstream out;
  out << "node  epsilon  D  centroids (count)\n";
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    const auto& n = nodes[m];
    char head[64];
    std::snprintf(head, sizeof(head), "H%-4zu %-8.3f %-2zu", m + 1, n.epsilon, n.size());
    out << head;
    for (std::size_t j = 0; j < n.size(); ++j) {
      char cell[48];
      std::snprintf(cell, sizeof(cell), " %.3f (%zu)", n.centroids[j], n.counts[j]);
      out << cell;
    }
    if (n.constant_node) out << "  [constant]";
    out << '\n';
  }
  if (used_fallback) out << "note: at least one node fell back to epsilon = zeta/10\n";
  return out.str();
}

std::string ClusterModel::to_text() const {
  std::ostringstream out;
  out << "rgann-clusters 1\nnodes " << nodes.size() << " fallback " << (used_fallback ? 1 : 0) << '\n';
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    const auto& n = nodes[m];
    out << "node " << m << " epsilon " << format_double(n.epsilon) << " constant " << (n.constant_node ? 1 : 0)
        << " D " << n.size() << '\n';
    for (std::size_t j = 0; j < n.size(); ++j)
      out << format_double(n.centroids[j]) << ' ' << n.counts[j] << ' ' << format_double(n.sums[j]) << '\n';
  }
  out << "end\n";
  return out.str();
}

ClusterModel ClusterModel::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto fail = [](const std::string& what) { return std::invalid_argument("cluster text: " + what); };
  std::string tag;
  int version = 0;
  std::size_t count = 0;
  int fallback = 0;
  if (!(in >> tag >> version) || tag != "rgann-clusters" || version != 1) throw fail("bad header");
  if (!(in >> tag >> count) || tag != "nodes") throw fail("bad node count");
  if (!(in >> tag >> fallback) || tag != "fallback") throw fail("bad fallback flag");
  ClusterModel model;
  model.used_fallback = fallback != 0;
  for (std::size_t m = 0; m < count; ++m) {
    NodeClusters n;
    std::size_t index = 0;
    std::size_t d = 0;
    std::string eps;
    int constant = 0;
    std::string t1, t2, t3, t4;
    if (!(in >> t1 >> index >> t2 >> eps >> t3 >> constant >> t4 >> d) || t1 != "node" || index != m ||
        t2 != "epsilon" || t3 != "constant" || t4 != "D" || d == 0)
      throw fail("bad node header " + std::to_string(m));
    n.epsilon = parse_double(eps);
    n.constant_node = constant != 0;
    for (std::size_t j = 0; j < d; ++j) {
      std::string c;
      std::string s;
      std::size_t k = 0;
      if (!(in >> c >> k >> s)) throw fail("short cluster row");
      n.centroids.push_back(parse_double(c));
      n.counts.push_back(k);
      n.sums.push_back(parse_double(s));
    }
    model.nodes.push_back(std::move(n));
  }
  if (!(in >> tag) || tag != "end") throw fail("missing end marker");
  return model;
}

double discretized_accuracy(const Network& net, const ClusterModel& model, const EncodedSet& set) {
  if (set.empty()) return 0.0;
  std::vector<std::optional<NodeClusters>> nodes(model.nodes.begin(), model.nodes.end());
  if (nodes.size() != net.hidden()) throw std::invalid_argument("cluster model does not cover every hidden node");
  return static_cast<double>(correct_count(net, nodes, set)) / static_cast<double>(set.size());
}

void ClusterSearchConfig::validate() const {
  if (!(zeta > 0.0 && zeta < 1.0)) throw ConfigError("zeta must lie in (0, 1)");
  if (required_accuracy && !(*required_accuracy >= 0.0 && *required_accuracy <= 1.0))
    throw ConfigError("required_accuracy must lie in [0, 1]");
  if (!(constant_tol >= 0.0)) throw ConfigError("constant_tol must be >= 0");
}

ClusterModel search_epsilon(const Network& net, const EncodedSet& train, const ClusterSearchConfig& cfg) {
  cfg.validate();
  if (train.empty()) throw StageError("cluster", "empty training set");
  const std::size_t h = net.hidden();
  const auto total = static_cast<double>(train.size());
  const double required = cfg.required_accuracy ? *cfg.required_accuracy : accuracy(net, train);
  const double needed = required * total - 1e-9;

  std::vector<std::vector<double>> acts(h, std::vector<double>(train.size()));
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto a = net.hidden_activations(train.inputs[i]);
    for (std::size_t m = 0; m < h; ++m) acts[m][i] = a[m];
  }

  std::vector<double> grid;
  for (int i = 1;; ++i) {
    double eps = i * cfg.zeta;
    if (eps >= 1.0 - 1e-12) break;
    grid.push_back(eps);
  }

  ClusterModel model;
  std::vector<std::optional<NodeClusters>> chosen(h);
  for (std::size_t m = 0; m < h; ++m) {
    auto [lo, hi] = std::minmax_element(acts[m].begin(), acts[m].end());
    if (*hi - *lo < cfg.constant_tol) {
      NodeClusters nc;
      double sum = 0.0;
      for (double a : acts[m]) sum += a;
      nc.sums = {sum};
      nc.counts = {acts[m].size()};
      nc.centroids = {sum / total};
      nc.membership.assign(acts[m].size(), 0);
      nc.constant_node = true;
      chosen[m] = std::move(nc);
      continue;
    }
    bool found = false;
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
      chosen[m] = cluster_node(acts[m], *it);
      if (static_cast<double>(correct_count(net, chosen, train)) >= needed) {
        found = true;
        break;
      }
    }
    if (!found) {
      chosen[m] = cluster_node(acts[m], cfg.zeta / 10.0);
      model.used_fallback = true;
    }
  }
  for (auto& n : chosen) model.nodes.push_back(std::move(*n));
  return model;
}

}  // namespace rgann
