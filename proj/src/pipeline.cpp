#include "rgann/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace rgann {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void RuleConfig::validate() const {
  if (accuracy_floor && !(*accuracy_floor >= 0.0 && *accuracy_floor <= 1.0))
    throw ConfigError("rules.accuracy_floor must lie in [0, 1]");
  if (!(floor_margin >= 0.0 && floor_margin < 1.0)) throw ConfigError("rules.floor_margin must lie in [0, 1)");
  if (expansion_cap == 0) throw ConfigError("rules.expansion_cap must be positive");
}

void RunConfig::validate() const {
  if (data_path.empty() || schema_path.empty()) throw ConfigError("dataset.data and dataset.schema are required");
  if (seeds.empty()) throw ConfigError("seed list is empty");
  if (split.validation_fraction < 0.0 || split.validation_fraction >= 1.0)
    throw ConfigError("split.validation_fraction must lie in [0, 1)");
  if (discretize.max_intervals < 1) throw ConfigError("discretize.max_intervals must be >= 1");
  if (!(discretize.min_gain >= 0.0)) throw ConfigError("discretize.min_gain must be >= 0");
  train.validate();
  prune.validate();
  cluster.validate();
  rules.validate();
}

namespace {

void apply_override(json& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + spec);
  const std::string key = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);
  json* node = &root;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("bad override key: " + key);
    if (node->is_null()) *node = json::object();
    if (!node->is_object()) throw ConfigError("override path crosses a non-object: " + key);
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json value = json::parse(text, nullptr, false);
  *node = value.is_discarded() ? json(text) : value;
}

// Reads the members of one config section, rejecting unknown keys.
class Section {
 public:
  Section(const json& root, std::string name) : name_(std::move(name)) {
    if (!root.contains(name_)) return;
    node_ = &root.at(name_);
    if (!node_->is_object()) throw ConfigError(name_ + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name_ + "." + key + " has the wrong type");
    }
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key) || node_->at(key).is_null()) return;
    T value{};
    get(key, value);
    out = value;
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [k, _] : node_->items())
      if (!seen_.count(k)) throw ConfigError("unknown key " + name_ + "." + k);
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute() || base.empty()) return p.lexically_normal().string();
  return (std::filesystem::path(base) / p).lexically_normal().string();
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text, const std::string& base_dir,
                           const std::vector<std::string>& overrides) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded() || !root.is_object()) throw ConfigError("configuration is not a JSON object");
  for (const auto& o : overrides) apply_override(root, o);

  static const std::set<std::string> sections{"name",    "dataset", "split",      "train", "prune",
                                              "cluster", "discretize", "rules", "seeds"};
  for (const auto& [k, _] : root.items())
    if (!sections.count(k)) throw ConfigError("unknown key " + k);

  RunConfig cfg;
  if (root.contains("name")) {
    if (!root["name"].is_string()) throw ConfigError("name must be a string");
    cfg.name = root["name"].get<std::string>();
  }

  Section ds(root, "dataset");
  ds.get("data", cfg.data_path);
  ds.get("schema", cfg.schema_path);
  ds.finish();
  cfg.data_path = resolve(base_dir, cfg.data_path);
  cfg.schema_path = resolve(base_dir, cfg.schema_path);

  Section sp(root, "split");
  sp.get("train", cfg.split.train);
  sp.get("test", cfg.split.test);
  sp.get("validation_fraction", cfg.split.validation_fraction);
  sp.finish();

  Section tr(root, "train");
  tr.get("learning_rate", cfg.train.learning_rate);
  tr.get("tau", cfg.train.tau);
  tr.get("plateau_tol", cfg.train.plateau_tol);
  tr.get("freeze_tol", cfg.train.freeze_tol);
  tr.get("eps1", cfg.train.eps1);
  tr.get("eps2", cfg.train.eps2);
  tr.get("beta", cfg.train.beta);
  tr.get("max_epochs", cfg.train.max_epochs);
  tr.get("valid_error_target", cfg.train.valid_error_target);
  tr.get("max_hidden", cfg.train.max_hidden);
  tr.finish();

  Section pr(root, "prune");
  pr.get("accuracy_floor", cfg.prune.accuracy_floor);
  pr.get("retrain_epochs_cap", cfg.prune.retrain_epochs_cap);
  pr.finish();

  Section cl(root, "cluster");
  cl.get("zeta", cfg.cluster.zeta);
  cl.get("required_accuracy", cfg.cluster.required_accuracy);
  cl.get("constant_tol", cfg.cluster.constant_tol);
  cl.finish();

  Section di(root, "discretize");
  di.get("max_intervals", cfg.discretize.max_intervals);
  di.get("min_gain", cfg.discretize.min_gain);
  di.finish();

  Section ru(root, "rules");
  ru.get("accuracy_floor", cfg.rules.accuracy_floor);
  ru.get("floor_margin", cfg.rules.floor_margin);
  ru.get("expansion_cap", cfg.rules.expansion_cap);
  ru.finish();

  if (root.contains("seeds")) {
    try {
      cfg.seeds = root["seeds"].get<std::vector<std::uint64_t>>();
    } catch (const json::exception&) {
      throw ConfigError("seeds must be a list of non-negative integers");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse_run_config(buf.str(), base, overrides);
}

PreparedData prepare_data(const RunConfig& cfg) {
  PreparedData d;
  const Schema schema = load_schema(cfg.schema_path);
  d.raw = load_dataset(cfg.data_path, schema);
  SplitSpec spec = cfg.split;
  if (spec.train == 0 && spec.test == 0) spec.train = d.raw.size();
  if (spec.train == 0) throw ConfigError("split.train must be positive");
  const Splits split = split_dataset(d.raw, spec);
  const Imputer imputer = Imputer::fit(split.train_block());
  d.splits.train = imputer.apply(split.train);
  d.splits.validation = imputer.apply(split.validation);
  d.splits.test = imputer.apply(split.test);
  d.train_block = d.splits.train_block();
  d.encoder = Encoder::fit(d.train_block);
  d.fit = d.encoder.encode(d.splits.train);
  d.validation = d.encoder.encode(d.splits.validation);
  d.block = d.encoder.encode(d.train_block);
  d.test = d.encoder.encode(d.splits.test);
  d.scheme = discretize_inputs(d.train_block, cfg.discretize);
  d.train_table = input_table(d.train_block, d.scheme);
  d.test_table = input_table(d.splits.test, d.scheme);
  return d;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double accuracy_or_nan(const Network& net, const EncodedSet& set) {
  return set.empty() ? kNaN : accuracy(net, set);
}

double disc_accuracy_or_nan(const Network& net, const ClusterModel& m, const EncodedSet& set) {
  return set.empty() ? kNaN : discretized_accuracy(net, m, set);
}

}  // namespace

RunResult run_pipeline(const RunConfig& cfg, std::uint64_t seed, Stage last) {
  cfg.validate();
  return run_pipeline(cfg, prepare_data(cfg), seed, last);
}

namespace {

RunResult constant_run(RunResult res, const Network& net, const PreparedData& data) {
  RunRow& row = res.row;
  row.prune_epochs = res.prune.epochs;
  row.epochs = row.constructive_epochs + row.prune_epochs;
  row.final_nodes = static_cast<double>(net.outputs());
  row.final_connections = 0;
  row.hidden_nodes = 0;
  row.net_train_accuracy = accuracy(net, data.block);
  row.net_test_accuracy = accuracy_or_nan(net, data.test);
  row.disc_train_accuracy = row.net_train_accuracy;
  row.disc_test_accuracy = row.net_test_accuracy;
  row.clusters = 0;
  row.flags.push_back("constant_network");
  RuleSet rules;
  rules.default_class = net.classify(data.block.inputs.front());
  rules.phase = RulePhase::merged;
  res.merged_rules = rules;
  res.rules = rules;
  row.merged_rules = 1;
  row.rules = 1;
  row.mean_conditions = 0;
  const auto train_m = evaluate_ruleset(rules, data.train_table);
  row.rule_train_accuracy = train_m.accuracy;
  row.rule_test_accuracy = data.test_table.empty() ? kNaN : evaluate_ruleset(rules, data.test_table).accuracy;
  row.rule_fidelity = 1.0;
  row.ambiguous = 0;
  res.network = net;
  return res;
}

}  // namespace

RunResult run_pipeline(const RunConfig& cfg, const PreparedData& data, std::uint64_t seed, Stage last) {
  RunResult res;
  RunRow& row = res.row;
  row.seed = seed;
  res.features = data.train_table.features;
  res.classes = data.raw.classes;
  const auto n = static_cast<double>(data.encoder.input_size());
  const auto c = static_cast<double>(data.encoder.output_size());
  row.initial_nodes = n + 1 + c;
  row.initial_connections = n + c;

  // Steps 1-2: constructive training, then pruning.
  ConstructiveResult built = constructive_train(data.fit, data.validation, cfg.train, seed);
  Network net = std::move(built.network);
  res.constructive_trace = std::move(built.trace);
  row.constructive_epochs = built.epochs;
  if (built.hit_hidden_cap) row.flags.push_back("hidden_cap");
  if (res.constructive_trace.hit_max_epochs) row.flags.push_back("max_epochs");
  row.intermediate_nodes = static_cast<double>(net.node_count());
  row.intermediate_connections = static_cast<double>(net.connection_count());
  if (last == Stage::train) {
    row.net_train_accuracy = accuracy(net, data.block);
    row.net_test_accuracy = accuracy_or_nan(net, data.test);
    res.network = std::move(net);
    return res;
  }

  res.prune = prune_network(net, data.fit, data.validation, cfg.prune, cfg.train);
  const Network before_removal = net;
  try {
    remove_dead_nodes(net);
  } catch (const StageError&) {
    // Nothing reaches the outputs from the inputs: a constant classifier,
    // which is the default rule alone.
    return constant_run(std::move(res), before_removal, data);
  }
  row.prune_epochs = res.prune.epochs;
  row.epochs = row.constructive_epochs + row.prune_epochs;
  row.final_nodes = static_cast<double>(net.node_count());
  row.final_connections = static_cast<double>(net.connection_count());
  row.hidden_nodes = static_cast<double>(net.hidden());
  row.net_train_accuracy = accuracy(net, data.block);
  row.net_test_accuracy = accuracy_or_nan(net, data.test);
  if (last == Stage::prune) {
    res.network = std::move(net);
    return res;
  }

  // Step 3: discretize hidden activations.
  res.clusters = search_epsilon(net, data.block, cfg.cluster);
  if (res.clusters.used_fallback) row.flags.push_back("cluster_fallback");
  row.disc_train_accuracy = discretized_accuracy(net, res.clusters, data.block);
  row.disc_test_accuracy = disc_accuracy_or_nan(net, res.clusters, data.test);
  for (std::size_t m = 0; m < res.clusters.nodes.size(); ++m) {
    row.clusters += static_cast<double>(res.clusters.nodes[m].size());
    if (m) row.cluster_sizes += ';';
    row.cluster_sizes += std::to_string(res.clusters.nodes[m].size());
  }
  if (last == Stage::cluster) {
    res.network = std::move(net);
    return res;
  }

  // Steps 4-5: three-phase extraction and rule simplification.
  res.output_rules = extract_output_rules(net, res.clusters, data.block, res.classes);
  res.hidden_rules = extract_hidden_rules(net, res.clusters, data.block, data.train_table, data.encoder);
  std::vector<int> net_labels(data.block.size());
  for (std::size_t i = 0; i < data.block.size(); ++i) net_labels[i] = res.clusters.classify(net, data.block.inputs[i]);
  const DiscreteTable net_table = data.train_table.relabeled(net_labels, res.classes);
  res.merged_rules = merge_rules(res.output_rules.rules, res.hidden_rules, net_table, {cfg.rules.expansion_cap});
  row.merged_rules = static_cast<double>(res.merged_rules.rule_count());

  // Step 6: generalize while true-label train accuracy stays above the floor.
  const double floor = cfg.rules.accuracy_floor.value_or(row.disc_train_accuracy - cfg.rules.floor_margin);
  RuleSet rules = res.merged_rules;
  if (evaluate_ruleset(rules, data.train_table).accuracy >= floor - 1e-12) {
    while (auto next = relax_once(rules, data.train_table)) {
      if (evaluate_ruleset(*next, data.train_table).accuracy < floor - 1e-12) break;
      rules = std::move(*next);
    }
  }
  rules.phase = RulePhase::merged;
  res.rules = rules;

  const auto train_m = evaluate_ruleset(rules, data.train_table);
  row.rules = static_cast<double>(rules.rule_count());
  row.mean_conditions = rules.mean_conditions();
  row.rule_train_accuracy = train_m.accuracy;
  row.rule_test_accuracy = data.test_table.empty() ? kNaN : evaluate_ruleset(rules, data.test_table).accuracy;
  row.rule_fidelity = evaluate_ruleset(rules, net_table).accuracy;
  row.ambiguous = static_cast<double>(train_m.ambiguous);
  res.network = std::move(net);
  return res;
}

const std::vector<RowField>& row_fields() {
  static const std::vector<RowField> fields{
      {"initial_nodes", &RunRow::initial_nodes},
      {"initial_connections", &RunRow::initial_connections},
      {"intermediate_nodes", &RunRow::intermediate_nodes},
      {"intermediate_connections", &RunRow::intermediate_connections},
      {"final_nodes", &RunRow::final_nodes},
      {"final_connections", &RunRow::final_connections},
      {"hidden_nodes", &RunRow::hidden_nodes},
      {"constructive_epochs", &RunRow::constructive_epochs},
      {"prune_epochs", &RunRow::prune_epochs},
      {"epochs", &RunRow::epochs},
      {"net_train_accuracy", &RunRow::net_train_accuracy},
      {"net_test_accuracy", &RunRow::net_test_accuracy},
      {"disc_train_accuracy", &RunRow::disc_train_accuracy},
      {"disc_test_accuracy", &RunRow::disc_test_accuracy},
      {"clusters", &RunRow::clusters},
      {"merged_rules", &RunRow::merged_rules},
      {"rules", &RunRow::rules},
      {"mean_conditions", &RunRow::mean_conditions},
      {"rule_train_accuracy", &RunRow::rule_train_accuracy},
      {"rule_test_accuracy", &RunRow::rule_test_accuracy},
      {"rule_fidelity", &RunRow::rule_fidelity},
      {"ambiguous", &RunRow::ambiguous},
  };
  return fields;
}

bool RunRow::operator==(const RunRow& o) const {
  if (seed != o.seed || ok != o.ok || error != o.error || cluster_sizes != o.cluster_sizes || flags != o.flags)
    return false;
  for (const auto& f : row_fields()) {
    const double a = this->*f.member;
    const double b = o.*f.member;
    if (!(a == b || (std::isnan(a) && std::isnan(b)))) return false;
  }
  return true;
}

std::map<std::string, FieldStats> RunReport::aggregate() const {
  std::map<std::string, FieldStats> out;
  for (const auto& f : row_fields()) {
    FieldStats s;
    double sum = 0.0;
    for (const auto& r : rows) {
      const double v = r.*f.member;
      if (!r.ok || std::isnan(v)) continue;
      if (s.count == 0) {
        s.min = s.max = v;
      } else {
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
      }
      sum += v;
      ++s.count;
    }
    s.mean = s.count ? sum / static_cast<double>(s.count) : kNaN;
    if (!s.count) s.min = s.max = kNaN;
    out[f.name] = s;
  }
  return out;
}

std::optional<std::size_t> RunReport::best_run() const {
  std::optional<std::size_t> best;
  auto key = [](const RunRow& r) { return std::make_tuple(r.final_connections, -r.rule_train_accuracy, r.rules); };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok) continue;
    if (!best || key(rows[i]) < key(rows[*best])) best = i;
  }
  return best;
}

namespace {

ordered_json number(double v) { return std::isnan(v) ? ordered_json(nullptr) : ordered_json(v); }

double read_number(const json& j) {
  if (j.is_null()) return kNaN;
  if (!j.is_number()) throw DataError("report: expected a number");
  return j.get<double>();
}

std::string clean(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char ch) { return ch == ',' || ch == '\n' || ch == '\r'; }, ' ');
  return s;
}

std::string csv_number(double v) { return std::isnan(v) ? std::string() : format_double(v); }

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = s.find(sep, start);
    out.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

std::string RunReport::to_json() const {
  ordered_json root;
  root["name"] = name;
  ordered_json runs = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["seed"] = r.seed;
    j["ok"] = r.ok;
    j["error"] = r.error;
    for (const auto& f : row_fields()) j[f.name] = number(r.*f.member);
    j["cluster_sizes"] = r.cluster_sizes;
    j["flags"] = r.flags;
    runs.push_back(std::move(j));
  }
  root["runs"] = std::move(runs);
  ordered_json agg = ordered_json::object();
  for (const auto& f : row_fields()) {
    const auto s = aggregate().at(f.name);
    agg[f.name] = {{"mean", number(s.mean)}, {"min", number(s.min)}, {"max", number(s.max)}, {"count", s.count}};
  }
  root["aggregate"] = std::move(agg);
  const auto best = best_run();
  root["best_seed"] = best ? ordered_json(rows[*best].seed) : ordered_json(nullptr);
  return root.dump(2) + "\n";
}

RunReport RunReport::from_json(std::string_view text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object() || !root.contains("runs")) throw DataError("report: malformed JSON");
  RunReport rep;
  try {
    rep.name = root.value("name", std::string());
    for (const auto& j : root.at("runs")) {
      RunRow r;
      r.seed = j.at("seed").get<std::uint64_t>();
      r.ok = j.at("ok").get<bool>();
      r.error = j.at("error").get<std::string>();
      for (const auto& f : row_fields()) r.*f.member = read_number(j.at(f.name));
      r.cluster_sizes = j.at("cluster_sizes").get<std::string>();
      r.flags = j.at("flags").get<std::vector<std::string>>();
      rep.rows.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
  return rep;
}

std::string RunReport::to_csv() const {
  std::ostringstream out;
  out << "seed,ok,error";
  for (const auto& f : row_fields()) out << ',' << f.name;
  out << ",cluster_sizes,flags\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << (r.ok ? 1 : 0) << ',' << clean(r.error);
    for (const auto& f : row_fields()) out << ',' << csv_number(r.*f.member);
    std::string flags;
    for (const auto& fl : r.flags) flags += (flags.empty() ? "" : ";") + fl;
    out << ',' << r.cluster_sizes << ',' << flags << '\n';
  }
  return out.str();
}

RunReport RunReport::from_csv(std::string_view text, std::string name) {
  RunReport rep;
  rep.name = std::move(name);
  auto lines = split_on(text, '\n');
  if (lines.empty()) throw DataError("report csv: empty");
  const std::size_t width = 3 + row_fields().size() + 2;
  if (split_on(lines[0], ',').size() != width) throw DataError("report csv: bad header");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = split_on(lines[i], ',');
    if (cells.size() != width) throw DataError("report csv: row " + std::to_string(i + 1) + " has wrong width");
    RunRow r;
    try {
      r.seed = std::stoull(cells[0]);
    } catch (const std::exception&) {
      throw DataError("report csv: bad seed on row " + std::to_string(i + 1));
    }
    r.ok = cells[1] == "1";
    r.error = cells[2];
    std::size_t k = 3;
    for (const auto& f : row_fields()) {
      const auto& cell = cells[k++];
      r.*f.member = cell.empty() ? kNaN : parse_double(cell);
    }
    r.cluster_sizes = cells[k++];
    if (!cells[k].empty()) r.flags = split_on(cells[k], ';');
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

std::string RunReport::to_table() const {
  std::ostringstream out;
  auto pct = [](double v) {
    char buf[32];
    if (std::isnan(v)) return std::string("    -");
    std::snprintf(buf, sizeof(buf), "%6.2f", 100.0 * v);
    return std::string(buf);
  };
  out << "report: " << (name.empty() ? "(unnamed)" : name) << '\n';
  out << "  seed  hidden  conn  epochs  net_tr  net_te  disc_tr  rules  rule_tr  rule_te  flags\n";
  for (const auto& r : rows) {
    char head[96];
    std::snprintf(head, sizeof(head), "%6llu", static_cast<unsigned long long>(r.seed));
    out << head;
    if (!r.ok) {
      out << "  FAILED: " << r.error << '\n';
      continue;
    }
    char line[160];
    std::snprintf(line, sizeof(line), "  %6.0f  %4.0f  %6.0f  %s  %s   %s  %5.0f   %s   %s  ", r.hidden_nodes,
                  r.final_connections, r.epochs, pct(r.net_train_accuracy).c_str(), pct(r.net_test_accuracy).c_str(),
                  pct(r.disc_train_accuracy).c_str(), r.rules, pct(r.rule_train_accuracy).c_str(),
                  pct(r.rule_test_accuracy).c_str());
    out << line;
    for (std::size_t i = 0; i < r.flags.size(); ++i) out << (i ? "," : "") << r.flags[i];
    out << '\n';
  }
  out << "\nfield                          mean         min         max\n";
  const auto agg = aggregate();
  for (const auto& f : row_fields()) {
    const auto& s = agg.at(f.name);
    char line[128];
    std::snprintf(line, sizeof(line), "%-26s %10.4g  %10.4g  %10.4g\n", f.name, s.mean, s.min, s.max);
    out << line;
  }
  if (const auto best = best_run()) out << "best run: seed " << rows[*best].seed << '\n';
  return out.str();
}

RunReport run_experiment(const RunConfig& cfg, unsigned threads) {
  cfg.validate();
  const PreparedData data = prepare_data(cfg);
  RunReport rep;
  rep.name = cfg.name;
  rep.rows.resize(cfg.seeds.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.seeds.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cfg.seeds.size();) {
      try {
        rep.rows[i] = run_pipeline(cfg, data, cfg.seeds[i]).row;
      } catch (const std::exception& e) {
        RunRow r;
        r.seed = cfg.seeds[i];
        r.ok = false;
        r.error = e.what();
        for (const auto& f : row_fields()) r.*f.member = kNaN;
        r.flags.push_back("failed");
        rep.rows[i] = std::move(r);
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  return rep;
}

}  // namespace rgann
