#include "rgann/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rgann {

void PruneConfig::validate() const {
  if (accuracy_floor && !(*accuracy_floor > 0.0 && *accuracy_floor <= 1.0))
    throw ConfigError("prune accuracy_floor must lie in (0, 1]");
  if (retrain_epochs_cap < 1) throw ConfigError("retrain_epochs_cap must be positive");
}

std::string PruneResult::log_csv() const {
  std::ostringstream out;
  out << "weight,magnitude,action,accuracy\n";
  for (const auto& e : log)
    out << e.weight.to_string() << ',' << format_double(e.magnitude) << ',' << (e.removed ? "removed" : "kept")
        << ',' << format_double(e.accuracy) << '\n';
  return out.str();
}

std::vector<WeightId> prune_candidates(const Network& net, const std::vector<WeightId>& excluded) {
  std::vector<WeightId> ids;
  for (const auto& id : net.active_connections())
    if (std::find(excluded.begin(), excluded.end(), id) == excluded.end()) ids.push_back(id);
  std::stable_sort(ids.begin(), ids.end(), [&net](const WeightId& a, const WeightId& b) {
    double ma = std::abs(net.weight(a));
    double mb = std::abs(net.weight(b));
    if (ma != mb) return ma < mb;
    return a < b;
  });
  return ids;
}

PruneResult prune_network(Network& net, const EncodedSet& train, const EncodedSet& validation,
                          const PruneConfig& pcfg, const TrainConfig& tcfg) {
  pcfg.validate();
  PruneResult result;
  const double start_accuracy = accuracy(net, train);
  result.accuracy_floor = pcfg.accuracy_floor ? *pcfg.accuracy_floor : start_accuracy - 0.005;
  std::vector<WeightId> unprunable;
  int epoch = 0;
  for (;;) {
    auto candidates = prune_candidates(net, unprunable);
    if (candidates.empty()) break;
    const WeightId id = candidates.front();
    const Network saved = net;
    const double magnitude = std::abs(net.weight(id));
    net.deactivate(id);
    auto tr = train_until_plateau(net, train, tcfg, &validation, pcfg.retrain_epochs_cap, epoch + 1);
    epoch += static_cast<int>(tr.epochs.size());
    result.trace.append(tr);
    const double acc = accuracy(net, train);
    PruneLogEntry entry{id, magnitude, true, acc};
    if (acc < result.accuracy_floor) {
      net = saved;
      entry.removed = false;
      entry.accuracy = accuracy(net, train);
      unprunable.push_back(id);
    }
    result.log.push_back(entry);
  }
  result.epochs = epoch;
  return result;
}

DeadNodeReport remove_dead_nodes(Network& net) {
  DeadNodeReport report;
  const std::size_t n = net.inputs();
  std::size_t original = 0;
  for (std::size_t m = 0; m < net.hidden();) {
    bool incoming = false;
    for (std::size_t l = 0; l < n; ++l) incoming = incoming || net.w_active()(m, l) != 0;
    bool outgoing = false;
    for (std::size_t p = 0; p < net.outputs(); ++p) outgoing = outgoing || net.v_active()(p, m) != 0;
    if (incoming && outgoing) {
      ++m;
      ++original;
      continue;
    }
    if (outgoing) {
      const double constant = hidden_activation(net.w()(m, n));
      for (std::size_t p = 0; p < net.outputs(); ++p) {
        WeightId bias{1, p, net.hidden()};
        net.set_weight(bias, net.weight(bias) + net.v()(p, m) * constant);
      }
    }
    net.remove_hidden_node(m);
    report.removed_hidden.push_back(original);
    ++original;
  }
  if (net.hidden() == 0) throw StageError("prune", "network degenerate");
  report.relevant_inputs = net.relevant_inputs();
  return report;
}

}  // namespace rgann
