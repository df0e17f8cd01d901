#include "rgann/rules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rgann {

void DiscreteTable::add(std::vector<int> row, int label) {
  if (row.size() != features.size()) throw std::invalid_argument("table row width mismatch");
  rows.push_back(std::move(row));
  labels.push_back(label);
}

DiscreteTable DiscreteTable::restricted(const std::vector<bool>& keep) const {
  DiscreteTable t = *this;
  for (auto& r : t.rows)
    for (std::size_t f = 0; f < r.size(); ++f)
      if (f >= keep.size() || !keep[f]) r[f] = 0;
  return t;
}

DiscreteTable DiscreteTable::relabeled(std::vector<int> new_labels, std::vector<std::string> new_classes) const {
  if (new_labels.size() != rows.size()) throw std::invalid_argument("label count mismatch");
  DiscreteTable t;
  t.features = features;
  t.rows = rows;
  t.labels = std::move(new_labels);
  t.classes = std::move(new_classes);
  return t;
}

Relation Condition::relation(const Feature& f) const {
  if (!f.ordinal) return Relation::equals;
  if (lo == 0) return Relation::at_most;
  if (hi == f.cardinality - 1) return Relation::above;
  return Relation::in_interval;
}

bool Rule::matches(std::span<const int> row) const {
  for (const auto& c : conditions)
    if (!c.matches(row[c.feature])) return false;
  return true;
}

bool Rule::subsumed_by(const Rule& general) const {
  for (const auto& g : general.conditions) {
    auto it = std::find_if(conditions.begin(), conditions.end(),
                           [&](const Condition& c) { return c.feature == g.feature; });
    if (it == conditions.end() || !it->within(g)) return false;
  }
  return true;
}

std::string to_string(RulePhase phase) {
  switch (phase) {
    case RulePhase::direct: return "direct";
    case RulePhase::output_layer: return "output_layer";
    case RulePhase::hidden_layer: return "hidden_layer";
    case RulePhase::merged: return "merged";
  }
  return "unknown";
}

double RuleSet::mean_conditions() const {
  if (rules.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& r : rules) total += r.conditions.size();
  return static_cast<double>(total) / static_cast<double>(rules.size());
}

void RuleSet::canonicalize() {
  for (auto& r : rules) std::sort(r.conditions.begin(), r.conditions.end());
  std::stable_sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
    if (a.consequent != b.consequent) return a.consequent < b.consequent;
    return a.conditions < b.conditions;
  });
}

namespace {

std::size_t label_space(const DiscreteTable& table, const std::vector<Rule>& rules, int default_class) {
  std::size_t c = table.classes.size();
  for (int l : table.labels) c = std::max(c, static_cast<std::size_t>(l) + 1);
  for (const auto& r : rules) c = std::max(c, static_cast<std::size_t>(r.consequent) + 1);
  if (default_class >= 0) c = std::max(c, static_cast<std::size_t>(default_class) + 1);
  return std::max<std::size_t>(c, 1);
}

struct Decision {
  int label = -1;
  int firing = 0;  // classes with a matching rule
};

Decision decide(const std::vector<int>& hits, int default_class) {
  Decision d;
  int best = 0;
  for (std::size_t k = 0; k < hits.size(); ++k) {
    if (hits[k] <= 0) continue;
    ++d.firing;
    if (hits[k] > best) {
      best = hits[k];
      d.label = static_cast<int>(k);
    }
  }
  if (d.firing == 0) d.label = default_class;
  return d;
}

// Distinct rows of a table with per-label weights, plus per-row counts of
// matching rules by class. Rule edits are scored incrementally.
class Evaluator {
 public:
  struct Delta {
    double error = 0.0;
    double ambiguous = 0.0;
  };

  Evaluator(const DiscreteTable& table, std::vector<Rule> rules, int default_class)
      : rules_(std::move(rules)), default_(default_class) {
    classes_ = label_space(table, rules_, default_class);
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < table.size(); ++i) {
      auto [it, fresh] = index.try_emplace(table.rows[i], cells_.size());
      if (fresh) cells_.push_back({table.rows[i], std::vector<double>(classes_, 0.0), 0.0});
      auto& cell = cells_[it->second];
      cell.weights[static_cast<std::size_t>(table.labels[i])] += 1.0;
      cell.total += 1.0;
    }
    hits_.assign(cells_.size(), std::vector<int>(classes_, 0));
    alive_.assign(rules_.size(), true);
    matched_.resize(rules_.size());
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      check(rules_[r]);
      for (std::size_t c = 0; c < cells_.size(); ++c)
        if (rules_[r].matches(cells_[c].row)) {
          matched_[r].push_back(c);
          ++hits_[c][static_cast<std::size_t>(rules_[r].consequent)];
        }
    }
  }

  double error() const {
    double e = 0.0;
    for (std::size_t c = 0; c < cells_.size(); ++c) e += cost(c, hits_[c]).error;
    return e;
  }

  double ambiguous() const {
    double a = 0.0;
    for (std::size_t c = 0; c < cells_.size(); ++c) a += cost(c, hits_[c]).ambiguous;
    return a;
  }

  std::size_t size() const noexcept { return rules_.size(); }
  bool alive(std::size_t r) const { return alive_[r]; }
  const Rule& rule(std::size_t r) const { return rules_[r]; }

  double support(std::size_t r) const {
    double s = 0.0;
    for (std::size_t c : matched_[r]) s += cells_[c].total;
    return s;
  }

  /// Rules touching at least one ambiguous row.
  std::vector<std::size_t> conflicting() const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      if (!alive_[r]) continue;
      for (std::size_t c : matched_[r])
        if (cost(c, hits_[c]).ambiguous > 0.0) {
          out.push_back(r);
          break;
        }
    }
    return out;
  }

  /// Effect of replacing rule r (nullptr removes it).
  Delta change(std::size_t r, const Rule* replacement) const {
    Delta d;
    const int old_k = rules_[r].consequent;
    auto score = [&](std::size_t c, bool old_hit, bool new_hit) {
      auto h = hits_[c];
      Cost before = cost(c, h);
      if (old_hit) --h[static_cast<std::size_t>(old_k)];
      if (new_hit) ++h[static_cast<std::size_t>(replacement->consequent)];
      Cost after = cost(c, h);
      d.error += after.error - before.error;
      d.ambiguous += after.ambiguous - before.ambiguous;
    };
    if (alive_[r])
      for (std::size_t c : matched_[r]) score(c, true, replacement && replacement->matches(cells_[c].row));
    if (replacement)
      for (std::size_t c = 0; c < cells_.size(); ++c) {
        if (alive_[r] && rules_[r].matches(cells_[c].row)) continue;
        if (replacement->matches(cells_[c].row)) score(c, false, true);
      }
    return d;
  }

  void apply(std::size_t r, const Rule* replacement) {
    if (alive_[r])
      for (std::size_t c : matched_[r]) --hits_[c][static_cast<std::size_t>(rules_[r].consequent)];
    matched_[r].clear();
    if (!replacement) {
      alive_[r] = false;
      return;
    }
    check(*replacement);
    rules_[r] = *replacement;
    alive_[r] = true;
    for (std::size_t c = 0; c < cells_.size(); ++c)
      if (rules_[r].matches(cells_[c].row)) {
        matched_[r].push_back(c);
        ++hits_[c][static_cast<std::size_t>(rules_[r].consequent)];
      }
  }

  std::vector<Rule> live_rules() const {
    std::vector<Rule> out;
    for (std::size_t r = 0; r < rules_.size(); ++r)
      if (alive_[r]) out.push_back(rules_[r]);
    return out;
  }

 private:
  struct Cell {
    std::vector<int> row;
    std::vector<double> weights;
    double total = 0.0;
  };
  struct Cost {
    double error = 0.0;
    double ambiguous = 0.0;
  };

  Cost cost(std::size_t c, const std::vector<int>& h) const {
    const Decision dec = decide(h, default_);
    Cost out;
    out.error = dec.label < 0 ? cells_[c].total : cells_[c].total - cells_[c].weights[static_cast<std::size_t>(dec.label)];
    out.ambiguous = dec.firing > 1 ? cells_[c].total : 0.0;
    return out;
  }

  void check(const Rule& r) const {
    if (r.consequent < 0 || static_cast<std::size_t>(r.consequent) >= classes_)
      throw std::invalid_argument("rule consequent out of range");
  }

  std::vector<Rule> rules_;
  int default_ = -1;
  std::size_t classes_ = 1;
  std::vector<Cell> cells_;
  std::vector<std::vector<int>> hits_;
  std::vector<bool> alive_;
  std::vector<std::vector<std::size_t>> matched_;
};

void refresh_support(RuleSet& rs, const DiscreteTable& table) {
  for (auto& r : rs.rules) {
    r.support = 0;
    for (const auto& row : table.rows)
      if (r.matches(row)) ++r.support;
  }
}

Rule without(const Rule& r, std::size_t k) {
  Rule out = r;
  out.conditions.erase(out.conditions.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

// Ordinal widenings of condition k: towards the lowest, then the highest value.
std::vector<Rule> widenings(const Rule& r, std::size_t k, const std::vector<Feature>& features) {
  std::vector<Rule> out;
  const auto& c = r.conditions[k];
  const auto& f = features.at(c.feature);
  if (!f.ordinal) return out;
  if (c.lo > 0) {
    Rule w = r;
    w.conditions[k].lo = 0;
    out.push_back(std::move(w));
  }
  if (c.hi < f.cardinality - 1) {
    Rule w = r;
    w.conditions[k].hi = f.cardinality - 1;
    out.push_back(std::move(w));
  }
  return out;
}

bool trivially_true(const Condition& c, const std::vector<Feature>& features) {
  return c.lo <= 0 && c.hi >= features.at(c.feature).cardinality - 1;
}

int majority(const std::vector<double>& counts) {
  int best = 0;
  for (std::size_t k = 1; k < counts.size(); ++k)
    if (counts[k] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  return best;
}

}  // namespace

Prediction predict(const RuleSet& rs, std::span<const int> row) {
  std::size_t classes = static_cast<std::size_t>(std::max(rs.default_class, 0)) + 1;
  for (const auto& r : rs.rules) classes = std::max(classes, static_cast<std::size_t>(r.consequent) + 1);
  std::vector<int> hits(classes, 0);
  for (const auto& r : rs.rules)
    if (r.matches(row)) ++hits[static_cast<std::size_t>(r.consequent)];
  const Decision d = decide(hits, rs.default_class);
  return {d.label, d.firing > 0, d.firing > 1};
}

RuleMetrics evaluate_ruleset(const RuleSet& rs, const DiscreteTable& table) {
  RuleMetrics m;
  m.rule_count = rs.rule_count();
  m.mean_conditions = rs.mean_conditions();
  m.patterns = table.size();
  if (table.empty()) return m;
  std::size_t correct = 0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto p = predict(rs, table.rows[i]);
    if (p.label == table.labels[i]) ++correct;
    if (p.matched) ++covered;
    if (p.ambiguous) ++m.ambiguous;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(table.size());
  m.coverage = static_cast<double>(covered) / static_cast<double>(table.size());
  return m;
}

RuleMetrics evaluate_ruleset(const RuleSet& rs, const Dataset& ds, const DiscretizationScheme& scheme) {
  return evaluate_ruleset(rs, input_table(ds, scheme));
}

RuleSet generate_rules(const DiscreteTable& table) {
  RuleSet rs;
  if (table.empty()) return rs;
  const std::size_t classes = label_space(table, {}, -1);

  struct Entry {
    std::vector<int> row;
    int label = 0;
    double freq = 0.0;
  };
  std::map<std::vector<int>, std::vector<double>> tally;
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto& counts = tally[table.rows[i]];
    counts.resize(classes, 0.0);
    counts[static_cast<std::size_t>(table.labels[i])] += 1.0;
  }
  std::vector<Entry> entries;
  for (const auto& [row, counts] : tally) {
    double total = 0.0;
    for (double c : counts) total += c;
    entries.push_back({row, majority(counts), total});
  }
  // map order is lexicographic, so a stable sort keeps it as the tie-break
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.freq > b.freq; });

  const std::size_t width = table.features.size();
  std::vector<bool> covered(entries.size(), false);
  for (std::size_t s = 0; s < entries.size(); ++s) {
    if (covered[s]) continue;
    const auto& seed = entries[s];
    std::vector<std::size_t> opposing;
    for (std::size_t e = 0; e < entries.size(); ++e)
      if (entries[e].label != seed.label) opposing.push_back(e);
    Rule rule;
    rule.consequent = seed.label;
    std::vector<bool> used(width, false);
    while (!opposing.empty()) {
      std::size_t best_f = width;
      double best_excluded = 0.0;
      for (std::size_t f = 0; f < width; ++f) {
        if (used[f]) continue;
        double excluded = 0.0;
        for (std::size_t e : opposing)
          if (entries[e].row[f] != seed.row[f]) excluded += entries[e].freq;
        if (excluded > best_excluded) {
          best_excluded = excluded;
          best_f = f;
        }
      }
      if (best_f == width) break;  // unreachable: distinct rows always differ somewhere
      used[best_f] = true;
      rule.conditions.push_back({best_f, seed.row[best_f], seed.row[best_f]});
      std::erase_if(opposing, [&](std::size_t e) { return entries[e].row[best_f] != seed.row[best_f]; });
    }
    std::sort(rule.conditions.begin(), rule.conditions.end());
    for (std::size_t e = 0; e < entries.size(); ++e)
      if (rule.matches(entries[e].row)) {
        rule.support += static_cast<std::size_t>(entries[e].freq);
        if (entries[e].label == seed.label) covered[e] = true;
      }
    rs.rules.push_back(std::move(rule));
  }
  rs.default_class = entries.front().label;
  return rs;
}

RuleSet cluster_rules(RuleSet rs) {
  std::vector<Rule> kept;
  const auto& rules = rs.rules;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    bool drop = false;
    for (std::size_t j = 0; j < rules.size() && !drop; ++j) {
      if (i == j || rules[i].consequent != rules[j].consequent) continue;
      if (rules[i].subsumed_by(rules[j]) && (!rules[j].subsumed_by(rules[i]) || j < i)) drop = true;
    }
    if (!drop) kept.push_back(rules[i]);
  }
  rs.rules = std::move(kept);
  return rs;
}

RuleSet default_rule(RuleSet rs, const DiscreteTable& table) {
  const std::size_t classes = label_space(table, rs.rules, rs.default_class);
  std::vector<double> unmatched(classes, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    bool hit = false;
    for (const auto& r : rs.rules)
      if (r.matches(table.rows[i])) {
        hit = true;
        break;
      }
    if (!hit) unmatched[static_cast<std::size_t>(table.labels[i])] += 1.0;
  }
  std::vector<std::size_t> group_size(classes, 0);
  std::vector<std::size_t> group_support(classes, 0);
  for (const auto& r : rs.rules) {
    ++group_size[static_cast<std::size_t>(r.consequent)];
    group_support[static_cast<std::size_t>(r.consequent)] += r.support;
  }

  int pick = -1;
  // An unconditional rule is the default in disguise.
  std::size_t widest = 0;
  for (const auto& r : rs.rules)
    if (r.conditions.empty() && (pick < 0 || r.support > widest)) {
      pick = r.consequent;
      widest = r.support;
    }
  const bool absorbed = pick >= 0;
  for (std::size_t k = 0; k < classes && !absorbed; ++k) {
    if (group_size[k] != 0) continue;
    if (pick < 0 || unmatched[k] > unmatched[static_cast<std::size_t>(pick)]) pick = static_cast<int>(k);
  }
  if (pick < 0) {
    double total = 0.0;
    for (double u : unmatched) total += u;
    if (total > 0.0) {
      pick = majority(unmatched);
    } else {
      pick = 0;
      for (std::size_t k = 1; k < classes; ++k) {
        const auto p = static_cast<std::size_t>(pick);
        if (group_size[k] > group_size[p] || (group_size[k] == group_size[p] && group_support[k] > group_support[p]))
          pick = static_cast<int>(k);
      }
    }
  }
  rs.default_class = pick;
  return rs;
}

RuleSet prune_rules(RuleSet rs, const DiscreteTable& table, bool keep_coverage) {
  rs.canonicalize();
  Evaluator ev(table, rs.rules, keep_coverage ? -1 : rs.default_class);
  auto acceptable = [](const Evaluator::Delta& d) { return d.error <= 1e-9 && d.ambiguous <= 1e-9; };

  for (std::size_t r = 0; r < ev.size(); ++r) {
    for (bool changed = true; changed;) {
      changed = false;
      const Rule current = ev.rule(r);
      for (std::size_t k = 0; k < current.conditions.size() && !changed; ++k) {
        Rule candidate = without(current, k);
        if (acceptable(ev.change(r, &candidate))) {
          ev.apply(r, &candidate);
          changed = true;
        }
      }
      for (std::size_t k = 0; k < current.conditions.size() && !changed; ++k)
        for (auto& candidate : widenings(current, k, table.features)) {
          if (trivially_true(candidate.conditions[k], table.features)) continue;
          if (acceptable(ev.change(r, &candidate))) {
            ev.apply(r, &candidate);
            changed = true;
            break;
          }
        }
    }
  }

  std::vector<std::size_t> order(ev.size());
  for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ev.support(a) < ev.support(b); });
  for (std::size_t r : order)
    if (acceptable(ev.change(r, nullptr))) ev.apply(r, nullptr);

  rs.rules = ev.live_rules();
  rs = cluster_rules(std::move(rs));
  rs.canonicalize();
  refresh_support(rs, table);
  return rs;
}

RuleSet resolve_conflicts(RuleSet rs, const DiscreteTable& table) {
  Evaluator ev(table, rs.rules, rs.default_class);
  while (ev.ambiguous() > 0.0) {
    auto candidates = ev.conflicting();
    if (candidates.empty()) break;
    std::size_t best = candidates.front();
    Evaluator::Delta best_d = ev.change(best, nullptr);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      const auto d = ev.change(candidates[i], nullptr);
      const bool better = d.ambiguous < best_d.ambiguous ||
                          (d.ambiguous == best_d.ambiguous &&
                           (d.error < best_d.error ||
                            (d.error == best_d.error && ev.support(candidates[i]) < ev.support(best))));
      if (better) {
        best = candidates[i];
        best_d = d;
      }
    }
    ev.apply(best, nullptr);
  }
  rs.rules = ev.live_rules();
  refresh_support(rs, table);
  return rs;
}

RuleSet rg(const DiscreteTable& table) {
  RuleSet rs = generate_rules(table);
  if (table.empty()) return rs;
  rs = cluster_rules(std::move(rs));
  rs = default_rule(std::move(rs), table);
  for (int round = 0; round < 4; ++round) {
    const int before = rs.default_class;
    rs = prune_rules(std::move(rs), table);
    rs = default_rule(std::move(rs), table);
    if (rs.default_class == before) break;
  }
  return rs;
}

RuleSet rg_covering(const DiscreteTable& table) {
  RuleSet rs = generate_rules(table);
  if (table.empty()) return rs;
  std::vector<double> counts(label_space(table, {}, -1), 0.0);
  for (int l : table.labels) counts[static_cast<std::size_t>(l)] += 1.0;
  rs.default_class = majority(counts);
  if (std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1) {
    rs.rules.clear();
    return rs;
  }
  rs = cluster_rules(std::move(rs));
  return prune_rules(std::move(rs), table, true);
}

std::optional<RuleSet> relax_once(const RuleSet& rs, const DiscreteTable& table) {
  if (rs.rules.empty()) return std::nullopt;
  Evaluator ev(table, rs.rules, rs.default_class);
  std::optional<Rule> best_rule;  // empty optional with found=true means removal
  std::size_t best_r = 0;
  bool found = false;
  double best_error = 0.0;
  auto consider = [&](std::size_t r, const Rule* candidate) {
    const auto d = ev.change(r, candidate);
    if (d.ambiguous > 1e-9) return;
    if (found && d.error >= best_error) return;
    found = true;
    best_error = d.error;
    best_r = r;
    best_rule = candidate ? std::optional<Rule>(*candidate) : std::nullopt;
  };
  for (std::size_t r = 0; r < ev.size(); ++r) consider(r, nullptr);
  for (std::size_t r = 0; r < ev.size(); ++r) {
    const Rule& current = ev.rule(r);
    for (std::size_t k = 0; k < current.conditions.size(); ++k) {
      Rule candidate = without(current, k);
      consider(r, &candidate);
    }
    for (std::size_t k = 0; k < current.conditions.size(); ++k)
      for (auto& candidate : widenings(current, k, table.features)) {
        if (trivially_true(candidate.conditions[k], table.features)) candidate = without(candidate, k);
        consider(r, &candidate);
      }
  }
  if (!found) return std::nullopt;
  ev.apply(best_r, best_rule ? &*best_rule : nullptr);
  RuleSet out = rs;
  out.rules = ev.live_rules();
  out = cluster_rules(std::move(out));
  out.canonicalize();
  refresh_support(out, table);
  return out;
}

std::vector<Feature> input_features(const Dataset& ds, const DiscretizationScheme& scheme) {
  if (scheme.attribute_count() != ds.attributes.size())
    throw std::invalid_argument("discretization does not match dataset attributes");
  std::vector<Feature> out;
  for (std::size_t a = 0; a < ds.attributes.size(); ++a) {
    const auto& attr = ds.attributes[a];
    Feature f;
    f.name = attr.name;
    f.cardinality = scheme.cardinality(a);
    f.ordinal = scheme.ordinal(a);
    if (f.ordinal) {
      f.cuts = scheme.cuts(a);
      f.raw_min = attr.min;
      f.raw_max = attr.max;
    } else {
      f.values = attr.categories;
    }
    out.push_back(std::move(f));
  }
  return out;
}

DiscreteTable input_table(const Dataset& ds, const DiscretizationScheme& scheme,
                          std::optional<std::vector<int>> labels) {
  DiscreteTable t;
  t.features = input_features(ds, scheme);
  t.classes = ds.classes;
  if (labels && labels->size() != ds.size()) throw std::invalid_argument("label count mismatch");
  for (std::size_t i = 0; i < ds.size(); ++i)
    t.add(scheme.discretize(ds.patterns[i]), labels ? (*labels)[i] : ds.patterns[i].label);
  return t;
}

namespace {

// Six significant digits; parse_rules maps the text back to the cut index.
std::string short_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string threshold(const Feature& f, int cut, bool scaled) {
  double value = f.cuts.at(static_cast<std::size_t>(cut));
  if (scaled && f.raw_max > f.raw_min) value = (value - f.raw_min) / (f.raw_max - f.raw_min);
  return short_number(value);
}

std::string render_condition(const Condition& c, const Feature& f, bool scaled) {
  if (!f.ordinal) {
    if (c.lo != c.hi) throw std::invalid_argument("range condition on categorical feature " + f.name);
    return f.name + " = " + f.values.at(static_cast<std::size_t>(c.lo));
  }
  switch (c.relation(f)) {
    case Relation::at_most: return f.name + " <= " + threshold(f, c.hi, scaled);
    case Relation::above: return f.name + " > " + threshold(f, c.lo - 1, scaled);
    default: return f.name + " in (" + threshold(f, c.lo - 1, scaled) + "," + threshold(f, c.hi, scaled) + "]";
  }
}

int cut_index(const Feature& f, std::string_view text) {
  const double value = parse_double(std::string(text));
  const std::string canonical = short_number(value);
  for (std::size_t k = 0; k < f.cuts.size(); ++k)
    if (f.cuts[k] == value || short_number(f.cuts[k]) == canonical) return static_cast<int>(k);
  throw DataError("unknown threshold " + std::string(text) + " for " + f.name);
}

}  // namespace

std::string render_rules(const RuleSet& rs, const std::vector<Feature>& features,
                         const std::vector<std::string>& classes, bool scaled) {
  std::ostringstream out;
  for (const auto& r : rs.rules) {
    out << "IF ";
    bool first = true;
    for (const auto& c : r.conditions) {
      const auto& f = features.at(c.feature);
      if (f.ordinal && trivially_true(c, features)) continue;
      if (!first) out << " AND ";
      out << render_condition(c, f, scaled);
      first = false;
    }
    if (first) out << "TRUE";
    out << " THEN " << classes.at(static_cast<std::size_t>(r.consequent)) << '\n';
  }
  out << "DEFAULT " << classes.at(static_cast<std::size_t>(rs.default_class)) << '\n';
  return out.str();
}

RuleSet parse_rules(std::string_view text, const std::vector<Feature>& features,
                    const std::vector<std::string>& classes) {
  RuleSet rs;
  bool have_default = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto class_of = [&](const std::string& name) {
    auto it = std::find(classes.begin(), classes.end(), name);
    if (it == classes.end()) throw DataError("rules line " + std::to_string(line_no) + ": unknown class " + name);
    return static_cast<int>(it - classes.begin());
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::vector<std::string> tok;
    for (std::string w; words >> w;) tok.push_back(w);
    if (tok.empty() || tok[0].starts_with("#")) continue;
    auto fail = [&](const std::string& what) {
      return DataError("rules line " + std::to_string(line_no) + ": " + what);
    };
    if (have_default) throw fail("text after DEFAULT");
    if (tok[0] == "DEFAULT") {
      if (tok.size() != 2) throw fail("expected DEFAULT <class>");
      rs.default_class = class_of(tok[1]);
      have_default = true;
      continue;
    }
    if (tok[0] != "IF" || tok.size() < 4 || tok[tok.size() - 2] != "THEN") throw fail("expected IF ... THEN <class>");
    Rule rule;
    rule.consequent = class_of(tok.back());
    const std::size_t end = tok.size() - 2;
    if (!(end == 2 && tok[1] == "TRUE")) {
      for (std::size_t i = 1; i < end;) {
        if (i + 3 > end) throw fail("incomplete condition");
        const auto& name = tok[i];
        const auto& rel = tok[i + 1];
        const auto& value = tok[i + 2];
        auto fit = std::find_if(features.begin(), features.end(), [&](const Feature& f) { return f.name == name; });
        if (fit == features.end()) throw fail("unknown attribute " + name);
        const auto& f = *fit;
        Condition c;
        c.feature = static_cast<std::size_t>(fit - features.begin());
        if (rel == "=") {
          if (f.ordinal) throw fail("use a range relation for " + name);
          auto vit = std::find(f.values.begin(), f.values.end(), value);
          if (vit == f.values.end()) throw fail("unknown value " + value + " for " + name);
          c.lo = c.hi = static_cast<int>(vit - f.values.begin());
        } else if (!f.ordinal) {
          throw fail("range relation on categorical attribute " + name);
        } else if (rel == "<=") {
          c.lo = 0;
          c.hi = cut_index(f, value);
        } else if (rel == ">") {
          c.lo = cut_index(f, value) + 1;
          c.hi = f.cardinality - 1;
        } else if (rel == "in") {
          if (value.size() < 5 || value.front() != '(' || value.back() != ']') throw fail("malformed interval " + value);
          const auto comma = value.find(',');
          if (comma == std::string::npos) throw fail("malformed interval " + value);
          c.lo = cut_index(f, std::string_view(value).substr(1, comma - 1)) + 1;
          c.hi = cut_index(f, std::string_view(value).substr(comma + 1, value.size() - comma - 2));
          if (c.lo > c.hi) throw fail("empty interval " + value);
        } else {
          throw fail("unknown relation " + rel);
        }
        rule.conditions.push_back(c);
        i += 3;
        if (i < end) {
          if (tok[i] != "AND") throw fail("expected AND");
          ++i;
          if (i == end) throw fail("dangling AND");
        }
      }
    }
    std::sort(rule.conditions.begin(), rule.conditions.end());
    rs.rules.push_back(std::move(rule));
  }
  if (!have_default) throw DataError("rules: missing DEFAULT line");
  return rs;
}

}  // namespace rgann
