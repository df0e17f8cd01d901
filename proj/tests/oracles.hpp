// Independent reference computations used by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "rgann/network.hpp"
#include "rgann/rules.hpp"
#include "rgann/training.hpp"

namespace oracle {

// Random net with `h` hidden nodes and weights uniform in [-2, 2].
inline rgann::Network random_net(std::size_t n, std::size_t h, std::size_t c, std::mt19937_64& rng) {
  rgann::Network net(rgann::Topology{n, h, c});
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (std::size_t m = 0; m < h; ++m)
    for (std::size_t l = 0; l <= n; ++l) net.set_weight({0, m, l}, u(rng));
  for (std::size_t p = 0; p < c; ++p)
    for (std::size_t m = 0; m <= h; ++m) net.set_weight({1, p, m}, u(rng));
  return net;
}

inline rgann::EncodedSet random_set(std::size_t k, std::size_t n, std::size_t c, std::mt19937_64& rng) {
  rgann::EncodedSet s;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> lab(0, static_cast<int>(c) - 1);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    int y = lab(rng);
    std::vector<double> t(c, 0.0);
    t[static_cast<std::size_t>(y)] = 1.0;
    s.inputs.push_back(x);
    s.targets.push_back(t);
    s.labels.push_back(y);
  }
  return s;
}

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
};

// Central differences of the objective against objective_gradient, on
// `samples` randomly chosen active slots.
inline GradientCheck check_gradient(const rgann::Network& net, const rgann::EncodedSet& set,
                                    const rgann::TrainConfig& cfg, std::size_t samples, std::mt19937_64& rng,
                                    double step = 1e-5) {
  const auto g = rgann::objective_gradient(net, set, cfg);
  std::vector<rgann::WeightId> slots;
  for (std::size_t m = 0; m < net.hidden(); ++m)
    for (std::size_t l = 0; l <= net.inputs(); ++l) slots.push_back({0, m, l});
  for (std::size_t p = 0; p < net.outputs(); ++p)
    for (std::size_t m = 0; m <= net.hidden(); ++m) slots.push_back({1, p, m});
  std::uniform_int_distribution<std::size_t> pick(0, slots.size() - 1);
  GradientCheck out;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto id = slots[pick(rng)];
    auto plus = net, minus = net;
    plus.set_weight(id, net.weight(id) + step);
    minus.set_weight(id, net.weight(id) - step);
    const double numeric =
        (rgann::objective(plus, set, cfg) - rgann::objective(minus, set, cfg)) / (2.0 * step);
    const double analytic = id.layer == 0 ? g.w(id.row, id.col) : g.v(id.row, id.col);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    out.max_relative_error = std::max(out.max_relative_error, std::abs(analytic - numeric) / scale);
    ++out.checked;
  }
  return out;
}

// Fraction of rows whose label differs from the majority label of their
// exact feature tuple: the least error any classifier on these features has.
inline double inconsistency_rate(const rgann::DiscreteTable& t) {
  std::map<std::vector<int>, std::map<int, std::size_t>> groups;
  for (std::size_t i = 0; i < t.size(); ++i) ++groups[t.rows[i]][t.labels[i]];
  std::size_t bad = 0;
  for (const auto& [row, counts] : groups) {
    std::size_t total = 0, best = 0;
    for (const auto& [label, n] : counts) {
      total += n;
      best = std::max(best, n);
    }
    bad += total - best;
  }
  return t.empty() ? 0.0 : static_cast<double>(bad) / static_cast<double>(t.size());
}

// Any pair of same-consequent rules where one's conditions are a subset of
// the other's (by feature and range).
inline bool has_subset_pair(const rgann::RuleSet& rs) {
  auto subset = [](const rgann::Rule& a, const rgann::Rule& b) {
    for (const auto& c : a.conditions) {
      auto it = std::find_if(b.conditions.begin(), b.conditions.end(),
                             [&](const rgann::Condition& d) { return d.feature == c.feature; });
      if (it == b.conditions.end() || !(*it == c)) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < rs.rules.size(); ++i)
    for (std::size_t j = 0; j < rs.rules.size(); ++j)
      if (i != j && rs.rules[i].consequent == rs.rules[j].consequent && subset(rs.rules[i], rs.rules[j]))
        return true;
  return false;
}

// Random table with `noise` fraction of labels flipped.
inline rgann::DiscreteTable random_table(std::mt19937_64& rng, double noise = 0.1) {
  std::uniform_int_distribution<int> nf(1, 6), card(2, 4), nrows(1, 200), ncls(2, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  rgann::DiscreteTable t;
  const int features = nf(rng);
  const int classes = ncls(rng);
  for (int c = 0; c < classes; ++c) t.classes.push_back("c" + std::to_string(c));
  std::vector<int> cards;
  for (int f = 0; f < features; ++f) {
    rgann::Feature feat;
    feat.name = "f" + std::to_string(f);
    feat.cardinality = card(rng);
    feat.ordinal = u(rng) < 0.5;
    for (int v = 0; v < feat.cardinality; ++v) {
      feat.values.push_back("v" + std::to_string(v));
      if (feat.ordinal && v + 1 < feat.cardinality) feat.cuts.push_back(v + 0.5);
    }
    feat.raw_max = feat.cardinality;
    cards.push_back(feat.cardinality);
    t.features.push_back(std::move(feat));
  }
  // a hidden rule on the first two features decides the label
  const int rows = nrows(rng);
  for (int i = 0; i < rows; ++i) {
    std::vector<int> row;
    for (int c : cards) row.push_back(std::uniform_int_distribution<int>(0, c - 1)(rng));
    int label = (row[0] + (features > 1 ? row[1] : 0)) % classes;
    if (u(rng) < noise) label = std::uniform_int_distribution<int>(0, classes - 1)(rng);
    t.add(row, label);
  }
  return t;
}

}  // namespace oracle
