// rgann command-line driver.
//
//   rgann pipeline   --config configs/golf.json --seed 1 --out out/
//   rgann experiment --config configs/breast_cancer.json --out out/
//   rgann evaluate   --config configs/golf.json --rules out/rules.txt
//
// Exit codes: 0 ok, 1 configuration error, 2 data error, 3 stage failure.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "rgann/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rgann;

namespace {

struct Options {
  std::string config;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;
  std::string out = "out";
  std::vector<std::string> overrides;
  std::string rules_path;
  unsigned threads = 0;
  bool scaled = false;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

RunConfig config_of(const Options& o) {
  if (o.config.empty()) throw ConfigError("--config is required");
  RunConfig cfg = load_run_config(o.config, o.overrides);
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  return cfg;
}

fs::path out_dir(const Options& o) {
  fs::path dir(o.out);
  fs::create_directories(dir);
  return dir;
}

std::string single_row(const RunRow& row, const std::string& name) {
  RunReport rep;
  rep.name = name;
  rep.rows.push_back(row);
  return rep.to_json();
}

// Artifacts of one run up to and including `stage`.
void run_stage(const Options& o, const std::string& stage) {
  const RunConfig cfg = config_of(o);
  const fs::path dir = out_dir(o);
  static const std::map<std::string, Stage> stages{
      {"train", Stage::train}, {"prune", Stage::prune}, {"cluster", Stage::cluster}, {"extract", Stage::full}};
  const auto it = stages.find(stage);
  const RunResult res = run_pipeline(cfg, o.seed, it == stages.end() ? Stage::full : it->second);
  write_file(dir / "network.txt", res.network.to_text());
  write_file(dir / "train_trace.csv", res.constructive_trace.to_csv());
  std::cout << "network: " << res.network.inputs() << '-' << res.network.hidden() << '-' << res.network.outputs()
            << ", " << res.network.connection_count() << " connections, train accuracy " << res.row.net_train_accuracy
            << '\n';
  if (stage == "train") return;
  write_file(dir / "prune_log.csv", res.prune.log_csv());
  if (stage == "prune") return;
  write_file(dir / "clusters.txt", res.clusters.to_text());
  write_file(dir / "clusters_report.txt", res.clusters.report());
  std::cout << res.clusters.report();
  if (stage == "cluster") return;
  write_file(dir / "output_rules.txt",
             render_rules(res.output_rules.rules, res.output_rules.table.features, res.classes));
  std::string hidden;
  for (std::size_t m = 0; m < res.hidden_rules.size(); ++m) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < res.clusters.nodes[m].size(); ++j)
      names.push_back(res.output_rules.table.features[m].name + "=" + res.output_rules.table.features[m].values[j]);
    hidden += "# hidden node " + std::to_string(m + 1) + "\n" + render_rules(res.hidden_rules[m], res.features, names);
  }
  write_file(dir / "hidden_rules.txt", hidden);
  write_file(dir / "merged_rules.txt", render_rules(res.merged_rules, res.features, res.classes, o.scaled));
  const std::string rules = render_rules(res.rules, res.features, res.classes, o.scaled);
  write_file(dir / "rules.txt", rules);
  std::cout << rules;
  if (stage == "extract") return;
  write_file(dir / "report.json", single_row(res.row, cfg.name));
  RunReport rep;
  rep.name = cfg.name;
  rep.rows.push_back(res.row);
  write_file(dir / "report.csv", rep.to_csv());
  std::cout << rep.to_table();
}

void run_experiment_cmd(const Options& o) {
  const RunConfig cfg = config_of(o);
  const fs::path dir = out_dir(o);
  const RunReport rep = run_experiment(cfg, o.threads);
  write_file(dir / "report.json", rep.to_json());
  write_file(dir / "report.csv", rep.to_csv());
  write_file(dir / "report.txt", rep.to_table());
  std::cout << rep.to_table();
}

void run_evaluate(const Options& o) {
  const RunConfig cfg = config_of(o);
  if (o.rules_path.empty()) throw ConfigError("--rules is required");
  const PreparedData data = prepare_data(cfg);
  const RuleSet rs = parse_rules(read_file(o.rules_path), data.train_table.features, data.raw.classes);
  auto show = [](const char* label, const RuleMetrics& m) {
    std::cout << label << ": accuracy " << m.accuracy << ", coverage " << m.coverage << ", ambiguous " << m.ambiguous
              << ", patterns " << m.patterns << '\n';
  };
  std::cout << "rules: " << rs.rule_count() << " (including default), mean conditions " << rs.mean_conditions()
            << '\n';
  show("train", evaluate_ruleset(rs, data.train_table));
  if (!data.test_table.empty()) show("test", evaluate_ruleset(rs, data.test_table));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rgann: compact network training, pruning, clustering and rule extraction"};
  app.require_subcommand(1);
  Options o;
  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "run configuration (JSON)")->required();
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--set", o.overrides, "override a config value, e.g. train.eps1=0.05");
  };
  std::string chosen;
  for (const char* name : {"train", "prune", "cluster", "extract", "pipeline"}) {
    auto* sub = app.add_subcommand(name, std::string("run the pipeline through the ") + name + " stage");
    common(sub);
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_flag("--scaled", o.scaled, "print thresholds on the [0,1] scale");
    sub->callback([&chosen, name] { chosen = name; });
  }
  auto* exp = app.add_subcommand("experiment", "run every seed and write the aggregate report");
  common(exp);
  exp->add_option("--seeds", o.seeds, "seed list (overrides the config)");
  exp->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  exp->callback([&chosen] { chosen = "experiment"; });
  auto* ev = app.add_subcommand("evaluate", "score a rule file on the configured splits");
  common(ev);
  ev->add_option("--rules", o.rules_path, "rule file")->required();
  ev->callback([&chosen] { chosen = "evaluate"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (chosen == "experiment")
      run_experiment_cmd(o);
    else if (chosen == "evaluate")
      run_evaluate(o);
    else
      run_stage(o, chosen);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const StageError& e) {
    std::cerr << "stage failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "stage failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
