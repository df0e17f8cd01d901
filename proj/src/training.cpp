#include "rgann/training.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rgann {

namespace {

constexpr double kClamp = 1e-12;

double penalty_term(double q, double eps1, double eps2, double beta) {
  double bq2 = beta * q * q;
  return eps1 * bq2 / (1.0 + bq2) + eps2 * q * q;
}

// d/dq [eps1 beta q^2/(1+beta q^2) + eps2 q^2]
double penalty_derivative(double q, double eps1, double eps2, double beta) {
  double d = 1.0 + beta * q * q;
  return eps1 * 2.0 * beta * q / (d * d) + 2.0 * eps2 * q;
}

// Adds the gradient of one pattern's cross-entropy term into gw/gv.
void accumulate_pattern_gradient(const Network& net, const std::vector<double>& x, const std::vector<double>& t,
                                 Grid<double>& gw, Grid<double>& gv, std::vector<double>& scratch) {
  const std::size_t n = net.inputs();
  const std::size_t h = net.hidden();
  const std::size_t c = net.outputs();
  auto hidden = net.hidden_activations(x);
  auto out = net.outputs_from_hidden(hidden);
  scratch.assign(h, 0.0);
  for (std::size_t p = 0; p < c; ++p) {
    double delta = out[p] - t[p];
    for (std::size_t m = 0; m < h; ++m) {
      gv(p, m) += delta * hidden[m];
      scratch[m] += delta * net.v()(p, m);
    }
    gv(p, h) += delta;
  }
  for (std::size_t m = 0; m < h; ++m) {
    double dz = scratch[m] * (1.0 - hidden[m] * hidden[m]);
    for (std::size_t l = 0; l < n; ++l) gw(m, l) += dz * x[l];
    gw(m, n) += dz;
  }
}

void add_penalty_gradient(const Network& net, double scale, const TrainConfig& cfg, Grid<double>& gw,
                          Grid<double>& gv) {
  const std::size_t n = net.inputs();
  const std::size_t h = net.hidden();
  for (std::size_t m = 0; m < h; ++m)
    for (std::size_t l = 0; l < n; ++l)
      if (net.w_active()(m, l)) gw(m, l) += scale * penalty_derivative(net.w()(m, l), cfg.eps1, cfg.eps2, cfg.beta);
  for (std::size_t p = 0; p < net.outputs(); ++p)
    for (std::size_t m = 0; m < h; ++m)
      if (net.v_active()(p, m)) gv(p, m) += scale * penalty_derivative(net.v()(p, m), cfg.eps1, cfg.eps2, cfg.beta);
}

void mask_gradient(const Network& net, Grid<double>& gw, Grid<double>& gv) {
  for (std::size_t m = 0; m < gw.rows(); ++m)
    for (std::size_t l = 0; l < gw.cols(); ++l)
      if (!net.w_active()(m, l)) gw(m, l) = 0.0;
  for (std::size_t p = 0; p < gv.rows(); ++p)
    for (std::size_t m = 0; m < gv.cols(); ++m)
      if (!net.v_active()(p, m)) gv(p, m) = 0.0;
}

// [node][pattern]
std::vector<std::vector<double>> activation_snapshot(const Network& net, const EncodedSet& set) {
  std::vector<std::vector<double>> snap(net.hidden(), std::vector<double>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto a = net.hidden_activations(set.inputs[i]);
    for (std::size_t m = 0; m < a.size(); ++m) snap[m][i] = a[m];
  }
  return snap;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.1 && learning_rate <= 1.0)) throw ConfigError("learning_rate must lie in [0.1, 1.0]");
  if (tau < 1) throw ConfigError("tau must be a positive integer");
  if (!(plateau_tol > 0)) throw ConfigError("plateau_tol must be > 0");
  if (!(freeze_tol > 0)) throw ConfigError("freeze_tol must be > 0");
  if (!(eps1 >= 0) || !(eps2 >= 0) || !(beta > 0)) throw ConfigError("penalty parameters must be positive");
  if (max_epochs < 1) throw ConfigError("max_epochs must be positive");
  if (max_hidden < 1) throw ConfigError("max_hidden must be positive");
  if (valid_error_target && !(*valid_error_target > 0)) throw ConfigError("valid_error_target must be > 0");
}

void TrainTrace::append(const TrainTrace& later) {
  epochs.insert(epochs.end(), later.epochs.begin(), later.epochs.end());
  recent_activations = later.recent_activations;
  hit_max_epochs = hit_max_epochs || later.hit_max_epochs;
}

std::string TrainTrace::to_csv() const {
  std::size_t width = 0;
  for (const auto& e : epochs) width = std::max(width, e.mean_activation.size());
  std::ostringstream out;
  out << "epoch,E_valid,F,P,theta";
  for (std::size_t m = 0; m < width; ++m) out << ",act_" << m;
  out << '\n';
  for (const auto& e : epochs) {
    out << e.epoch << ',' << format_double(e.valid_error) << ',' << format_double(e.cross_entropy) << ','
        << format_double(e.penalty) << ',' << format_double(e.objective);
    for (std::size_t m = 0; m < width; ++m) {
      out << ',';
      if (m < e.mean_activation.size()) out << format_double(e.mean_activation[m]);
    }
    out << '\n';
  }
  return out.str();
}

double squared_error(const Network& net, const EncodedSet& set) {
  double e = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto s = net.forward(set.inputs[i]);
    for (std::size_t p = 0; p < s.size(); ++p) {
      double d = s[p] - set.targets[i][p];
      e += d * d;
    }
  }
  return 0.5 * e;
}

double cross_entropy(const Network& net, const EncodedSet& set) {
  double f = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto s = net.forward(set.inputs[i]);
    for (std::size_t p = 0; p < s.size(); ++p) {
      double sp = std::clamp(s[p], kClamp, 1.0 - kClamp);
      double t = set.targets[i][p];
      f -= t * std::log(sp) + (1.0 - t) * std::log(1.0 - sp);
    }
  }
  return f;
}

double penalty(const Network& net, double eps1, double eps2, double beta) {
  double total = 0.0;
  for (const auto& id : net.active_connections()) total += penalty_term(net.weight(id), eps1, eps2, beta);
  return total;
}

double objective(const Network& net, const EncodedSet& set, const TrainConfig& cfg) {
  return cross_entropy(net, set) + penalty(net, cfg.eps1, cfg.eps2, cfg.beta);
}

double accuracy(const Network& net, const EncodedSet& set) {
  if (set.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (net.classify(set.inputs[i]) == set.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

Gradient objective_gradient(const Network& net, const EncodedSet& set, const TrainConfig& cfg) {
  Gradient g{Grid<double>(net.w().rows(), net.w().cols(), 0.0), Grid<double>(net.v().rows(), net.v().cols(), 0.0)};
  std::vector<double> scratch;
  for (std::size_t i = 0; i < set.size(); ++i)
    accumulate_pattern_gradient(net, set.inputs[i], set.targets[i], g.w, g.v, scratch);
  add_penalty_gradient(net, 1.0, cfg, g.w, g.v);
  mask_gradient(net, g.w, g.v);
  return g;
}

void backprop_epoch(Network& net, const EncodedSet& train, const TrainConfig& cfg) {
  if (train.empty()) return;
  const double share = 1.0 / static_cast<double>(train.size());
  const std::size_t n = net.inputs();
  const std::size_t h = net.hidden();
  Grid<double> gw(net.w().rows(), net.w().cols());
  Grid<double> gv(net.v().rows(), net.v().cols());
  std::vector<double> scratch;
  for (std::size_t i = 0; i < train.size(); ++i) {
    std::fill(gw.data().begin(), gw.data().end(), 0.0);
    std::fill(gv.data().begin(), gv.data().end(), 0.0);
    accumulate_pattern_gradient(net, train.inputs[i], train.targets[i], gw, gv, scratch);
    add_penalty_gradient(net, share, cfg, gw, gv);
    for (std::size_t m = 0; m < h; ++m) {
      if (net.frozen(m)) continue;
      for (std::size_t l = 0; l <= n; ++l) {
        WeightId id{0, m, l};
        if (net.active(id)) net.set_weight(id, net.weight(id) - cfg.learning_rate * gw(m, l));
      }
    }
    for (std::size_t p = 0; p < net.outputs(); ++p)
      for (std::size_t m = 0; m <= h; ++m) {
        WeightId id{1, p, m};
        if (net.active(id)) net.set_weight(id, net.weight(id) - cfg.learning_rate * gv(p, m));
      }
  }
  for (double x : net.w().data())
    if (!std::isfinite(x)) throw StageError("train", "weights diverged (non-finite value)");
  for (double x : net.v().data())
    if (!std::isfinite(x)) throw StageError("train", "weights diverged (non-finite value)");
}

TrainTrace train_until_plateau(Network& net, const EncodedSet& train, const TrainConfig& cfg,
                               const EncodedSet* validation, int epoch_cap, int first_epoch) {
  const int cap = epoch_cap > 0 ? epoch_cap : cfg.max_epochs;
  const auto window = static_cast<std::size_t>(cfg.tau) + 1;
  const EncodedSet& valid = (validation && !validation->empty()) ? *validation : train;
  TrainTrace trace;
  for (int e = 0; e < cap; ++e) {
    backprop_epoch(net, train, cfg);
    EpochRecord rec;
    rec.epoch = first_epoch + e;
    rec.cross_entropy = cross_entropy(net, train);
    rec.penalty = penalty(net, cfg.eps1, cfg.eps2, cfg.beta);
    rec.objective = rec.cross_entropy + rec.penalty;
    if (!std::isfinite(rec.objective)) throw StageError("train", "objective became non-finite");
    rec.valid_error = squared_error(net, valid);
    auto snap = activation_snapshot(net, train);
    rec.mean_activation.resize(snap.size());
    for (std::size_t m = 0; m < snap.size(); ++m) {
      double s = 0.0;
      for (double a : snap[m]) s += a;
      rec.mean_activation[m] = train.empty() ? 0.0 : s / static_cast<double>(train.size());
    }
    trace.epochs.push_back(std::move(rec));
    trace.recent_activations.push_back(std::move(snap));
    if (trace.recent_activations.size() > window) trace.recent_activations.erase(trace.recent_activations.begin());

    if (trace.epochs.size() >= window) {
      const double base = trace.epochs[trace.epochs.size() - window].objective;
      double spread = 0.0;
      for (std::size_t j = trace.epochs.size() - window; j < trace.epochs.size(); ++j)
        spread = std::max(spread, std::abs(trace.epochs[j].objective - base));
      if (spread / std::max(std::abs(base), 1e-12) < cfg.plateau_tol) return trace;
    }
  }
  trace.hit_max_epochs = true;
  return trace;
}

std::vector<std::size_t> freeze_stable_nodes(Network& net, const TrainTrace& trace, const TrainConfig& cfg) {
  std::vector<std::size_t> frozen;
  const auto window = static_cast<std::size_t>(cfg.tau) + 1;
  if (trace.recent_activations.size() < window) return frozen;
  const auto& now = trace.recent_activations.back();
  const auto& before = trace.recent_activations[trace.recent_activations.size() - window];
  const std::size_t nodes = std::min({now.size(), before.size(), net.hidden()});
  for (std::size_t m = 0; m < nodes; ++m) {
    if (net.frozen(m) || now[m].empty()) continue;
    double change = 0.0;
    for (std::size_t i = 0; i < now[m].size(); ++i) change += std::abs(now[m][i] - before[m][i]);
    change /= static_cast<double>(now[m].size());
    if (change < cfg.freeze_tol) {
      net.freeze(m);
      frozen.push_back(m);
    }
  }
  return frozen;
}

double reference_error_target(const EncodedSet& train, const EncodedSet& validation, const TrainConfig& cfg,
                              std::uint64_t seed) {
  TrainConfig plain = cfg;
  plain.eps1 = 0.0;
  plain.eps2 = 0.0;
  Network ref = init_network(train.inputs.front().size(), train.targets.front().size(), derive_seed(seed, 0));
  ref.add_hidden_node(derive_seed(seed, 1));
  ref.add_hidden_node(derive_seed(seed, 2));
  train_until_plateau(ref, train, plain, &validation);
  const EncodedSet& valid = validation.empty() ? train : validation;
  return 0.95 * squared_error(ref, valid);
}

ConstructiveResult constructive_train(const EncodedSet& train, const EncodedSet& validation,
                                      const TrainConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (train.empty()) throw StageError("train", "empty training set");
  const EncodedSet& valid = validation.empty() ? train : validation;
  ConstructiveResult result;
  result.error_target = cfg.valid_error_target
                            ? *cfg.valid_error_target
                            : reference_error_target(train, validation, cfg, derive_seed(seed, 0x5eed));
  Network net = init_network(train.inputs.front().size(), train.targets.front().size(), derive_seed(seed, 0));
  std::optional<Network> best;
  double best_error = 0.0;
  for (std::uint64_t stage = 1;; ++stage) {
    auto tr = train_until_plateau(net, train, cfg, &valid, 0, result.epochs + 1);
    result.epochs += static_cast<int>(tr.epochs.size());
    result.trace.append(tr);
    double e = squared_error(net, valid);
    if (!best || e < best_error) {
      best = net;
      best_error = e;
    }
    if (e <= result.error_target) {
      result.network = std::move(net);
      result.validation_error = e;
      return result;
    }
    if (net.hidden() >= cfg.max_hidden) {
      result.hit_hidden_cap = true;
      result.network = std::move(*best);
      result.validation_error = best_error;
      return result;
    }
    freeze_stable_nodes(net, tr, cfg);
    net.add_hidden_node(derive_seed(seed, stage));
  }
}

}  // namespace rgann
