// Acceptance checks: one PASS/FAIL line per criterion.
//
//   rgann_acceptance [--known-gap N]...
//
// Exit status is non-zero when a criterion fails that is not listed as a
// known gap. Known gaps still print FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "rgann/pipeline.hpp"

using namespace rgann;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = RGANN_SOURCE_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// Every pipeline run of one benchmark, kept for the property checks.
struct Bench {
  RunConfig cfg;
  PreparedData data;
  std::vector<RunResult> runs;
  RunReport report;
};

Bench run_bench(const std::string& name) {
  Bench b{load_run_config(kRoot + "/configs/" + name + ".json"), {}, {}, {}};
  b.data = prepare_data(b.cfg);
  b.report.name = name;
  for (auto seed : b.cfg.seeds) {
    try {
      b.runs.push_back(run_pipeline(b.cfg, b.data, seed));
      b.report.rows.push_back(b.runs.back().row);
    } catch (const std::exception& e) {
      RunRow row;
      row.seed = seed;
      row.ok = false;
      row.error = e.what();
      b.report.rows.push_back(row);
    }
  }
  return b;
}

std::map<std::string, Bench>& benches() {
  static std::map<std::string, Bench> all;
  return all;
}

const Bench& bench(const std::string& name) {
  auto& all = benches();
  auto it = all.find(name);
  if (it == all.end()) it = all.emplace(name, run_bench(name)).first;
  return it->second;
}

const std::vector<std::string> kBenchmarks{"season", "golf", "lenses", "breast_cancer", "wine"};

// 1
Verdict gradients() {
  std::mt19937_64 rng(20240601);
  TrainConfig cfg;
  double worst = 0.0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 5; ++trial)
    for (auto [n, h, c] : {std::tuple{3, 2, 2}, std::tuple{5, 3, 3}}) {
      auto net = oracle::random_net(n, h, c, rng);
      auto set = oracle::random_set(20, n, c, rng);
      auto chk = oracle::check_gradient(net, set, cfg, 100, rng);
      worst = std::max(worst, chk.max_relative_error);
      checked += chk.checked;
    }
  return {worst < 1e-4, "max relative error " + fmt("%.2e", worst) + " over " + std::to_string(checked) + " weights"};
}

// 2
Verdict rg_bound() {
  std::mt19937_64 rng(314159);
  std::size_t violations = 0, uncovered = 0;
  double slack = 1.0;
  for (int trial = 0; trial < 50; ++trial) {
    auto t = oracle::random_table(rng, 0.15);
    auto rs = rg(t);
    auto m = evaluate_ruleset(rs, t);
    const double bound = oracle::inconsistency_rate(t);
    if (1.0 - m.accuracy > bound + 1e-12) ++violations;
    slack = std::min(slack, bound - (1.0 - m.accuracy));
    for (const auto& row : t.rows) {
      auto p = predict(rs, row);
      if (p.label < 0 || p.label >= int(t.classes.size())) ++uncovered;
    }
  }
  return {violations == 0 && uncovered == 0, std::to_string(violations) + " bound violations, " +
                                                 std::to_string(uncovered) + " unclassified rows in 50 tables"};
}

// 3
Verdict clustering_fidelity() {
  std::size_t runs = 0, drops = 0, inexact = 0;
  for (const auto& name : kBenchmarks) {
    const auto& b = bench(name);
    for (const auto& r : b.runs) {
      ++runs;
      const auto& set = b.data.block;
      if (discretized_accuracy(r.network, r.clusters, set) < accuracy(r.network, set)) ++drops;
      for (std::size_t m = 0; m < r.clusters.nodes.size(); ++m) {
        const auto& nc = r.clusters.nodes[m];
        std::vector<double> sum(nc.size(), 0.0);
        std::vector<std::size_t> count(nc.size(), 0);
        for (std::size_t i = 0; i < set.size(); ++i) {
          const auto j = nc.membership.at(i);
          sum[j] += r.network.hidden_activations(set.inputs[i])[m];
          ++count[j];
        }
        for (std::size_t j = 0; j < nc.size(); ++j)
          if (count[j] != nc.counts[j] || nc.centroids[j] != sum[j] / double(count[j])) ++inexact;
      }
    }
  }
  return {runs > 0 && drops == 0 && inexact == 0,
          std::to_string(runs) + " runs, " + std::to_string(drops) + " with a discretization accuracy drop, " +
              std::to_string(inexact) + " inexact centroids"};
}

// 4
Verdict small_datasets() {
  bool pass = true;
  std::ostringstream d;
  const std::map<std::string, double> want{{"golf", 3}, {"lenses", 8}};
  for (const std::string name : {"season", "golf", "lenses"}) {
    const auto& b = bench(name);
    std::size_t perfect = 0;
    std::set<double> counts;
    for (const auto& r : b.report.rows) {
      if (r.ok && r.rule_train_accuracy == 1.0) ++perfect;
      counts.insert(r.rules);
    }
    const bool all_perfect = perfect == b.report.rows.size();
    bool count_ok = true;
    if (auto w = want.find(name); w != want.end()) count_ok = counts == std::set<double>{w->second};
    pass = pass && all_perfect && count_ok;
    d << name << " " << perfect << "/" << b.report.rows.size() << " at 100%, rules {";
    bool first = true;
    for (double c : counts) {
      d << (first ? "" : ",") << c;
      first = false;
    }
    d << "}";
    if (auto w = want.find(name); w != want.end()) d << " (want " << w->second << ")";
    d << "; ";
  }
  return {pass, d.str()};
}

// 5
Verdict breast_cancer() {
  const auto& b = bench("breast_cancer");
  auto best = b.report.best_run();
  if (!best) return {false, "no successful run"};
  const auto& r = b.report.rows[*best];
  auto agg = b.report.aggregate();
  const double conn = agg["final_connections"].mean;
  const double epochs = agg["epochs"].mean;
  const bool pass = r.rules <= 3 && r.rule_train_accuracy >= 0.953 && r.rule_test_accuracy >= 0.924 && conn >= 4 &&
                    conn <= 9 && epochs >= 150 && epochs <= 350;
  return {pass, "best seed " + std::to_string(r.seed) + ": " + fmt("%g", r.rules) + " rules, train " +
                    fmt("%.2f%%", 100 * r.rule_train_accuracy) + ", test " +
                    fmt("%.2f%%", 100 * r.rule_test_accuracy) + "; mean connections " + fmt("%.1f", conn) +
                    ", mean epochs " + fmt("%.1f", epochs)};
}

// 6
Verdict wine() {
  const auto& b = bench("wine");
  auto best = b.report.best_run();
  if (!best) return {false, "no successful run"};
  const auto& r = b.report.rows[*best];
  const bool pass = r.rules <= 4 && r.rule_train_accuracy >= 0.89 && r.rule_test_accuracy >= 0.80;
  double top_test = 0.0;
  for (const auto& row : b.report.rows)
    if (row.ok) top_test = std::max(top_test, row.rule_test_accuracy);
  return {pass, "best seed " + std::to_string(r.seed) + ": " + fmt("%g", r.rules) + " rules, train " +
                    fmt("%.2f%%", 100 * r.rule_train_accuracy) + ", test " +
                    fmt("%.2f%%", 100 * r.rule_test_accuracy) + " (highest test over seeds " +
                    fmt("%.2f%%", 100 * top_test) + ")"};
}

// 7
Verdict order_insensitivity() {
  std::mt19937_64 rng(99);
  std::size_t sets = 0, mismatches = 0;
  auto same = [](const RuleMetrics& a, const RuleMetrics& b) {
    return a.accuracy == b.accuracy && a.coverage == b.coverage && a.ambiguous == b.ambiguous &&
           a.rule_count == b.rule_count && a.mean_conditions == b.mean_conditions;
  };
  auto probe = [&](const RuleSet& rs, const DiscreteTable& t) {
    if (t.empty()) return;
    ++sets;
    const auto base = evaluate_ruleset(rs, t);
    for (int k = 0; k < 10; ++k) {
      auto perm = rs;
      std::shuffle(perm.rules.begin(), perm.rules.end(), rng);
      if (!same(evaluate_ruleset(perm, t), base)) ++mismatches;
    }
  };
  for (const auto& name : kBenchmarks) {
    const auto& b = bench(name);
    for (const auto& r : b.runs) {
      probe(r.rules, b.data.train_table);
      probe(r.rules, b.data.test_table);
      probe(r.merged_rules, b.data.train_table);
      probe(r.output_rules.rules, r.output_rules.table);
      for (std::size_t m = 0; m < r.hidden_rules.size(); ++m) {
        std::vector<int> labels;
        for (const auto& x : b.data.block.inputs) labels.push_back(int(r.clusters.cluster_indices(r.network, x)[m]));
        probe(r.hidden_rules[m],
              b.data.train_table.relabeled(labels, std::vector<std::string>(r.clusters.nodes[m].size(), "c")));
      }
    }
  }
  return {sets > 0 && mismatches == 0,
          std::to_string(sets) + " rule sets x 10 permutations, " + std::to_string(mismatches) + " mismatches"};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

// 8
Verdict determinism() {
  const fs::path base = fs::temp_directory_path() / "rgann_acceptance_det";
  fs::remove_all(base);
  std::size_t compared = 0, differing = 0;
  for (const std::string name : {"golf", "breast_cancer"}) {
    for (const char* run : {"a", "b"}) {
      const std::string cmd = std::string("\"") + RGANN_CLI + "\" experiment --config \"" + kRoot + "/configs/" +
                              name + ".json\" --out \"" + (base / name / run).string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "experiment failed for " + name};
    }
    for (const char* file : {"report.json", "report.csv", "report.txt"}) {
      ++compared;
      const auto a = slurp(base / name / "a" / file);
      if (a.empty() || a != slurp(base / name / "b" / file)) ++differing;
    }
  }
  fs::remove_all(base);
  return {differing == 0, std::to_string(compared) + " report files compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--known-gap" && i + 1 < argc) {
      known.insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: rgann_acceptance [--known-gap N]...\n";
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"gradient correctness", gradients},
      {"RG oracle bound", rg_bound},
      {"clustering fidelity", clustering_fidelity},
      {"small-dataset exactness", small_datasets},
      {"breast cancer", breast_cancer},
      {"wine", wine},
      {"order-insensitivity", order_insensitivity},
      {"determinism", determinism},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << id << " (" << criteria[i].first << "): " << v.detail
              << " [" << fmt("%.1f", secs) << "s]" << (!v.pass && known.count(id) ? " (known gap)" : "") << std::endl;
    if (!v.pass && !known.count(id)) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
