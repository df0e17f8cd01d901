// Python module _rgann: configuration, single runs, experiments and the
// building blocks (network, clustering, RG) for interactive use.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rgann/pipeline.hpp"

namespace py = pybind11;
using namespace rgann;

namespace {

py::dict row_dict(const RunRow& r) {
  py::dict d;
  d["seed"] = r.seed;
  d["ok"] = r.ok;
  d["error"] = r.error;
  for (const auto& f : row_fields()) d[f.name] = r.*f.member;
  d["cluster_sizes"] = r.cluster_sizes;
  d["flags"] = r.flags;
  return d;
}

DiscreteTable make_table(const std::vector<std::vector<int>>& rows, const std::vector<int>& labels,
                         std::optional<std::vector<int>> cardinalities, std::optional<std::vector<std::string>> classes) {
  if (rows.size() != labels.size()) throw DataError("rows and labels differ in length");
  DiscreteTable t;
  const std::size_t width = rows.empty() ? (cardinalities ? cardinalities->size() : 0) : rows.front().size();
  std::vector<int> card(width, 1);
  if (cardinalities) {
    if (cardinalities->size() != width) throw DataError("cardinalities do not match the row width");
    card = *cardinalities;
  } else {
    for (const auto& r : rows)
      for (std::size_t f = 0; f < width && f < r.size(); ++f) card[f] = std::max(card[f], r[f] + 1);
  }
  for (std::size_t f = 0; f < width; ++f) {
    Feature feat;
    feat.name = "x" + std::to_string(f);
    feat.cardinality = card[f];
    for (int v = 0; v < card[f]; ++v) feat.values.push_back(std::to_string(v));
    t.features.push_back(std::move(feat));
  }
  int top = 0;
  for (int l : labels) top = std::max(top, l);
  if (classes) {
    t.classes = *classes;
  } else {
    for (int c = 0; c <= top; ++c) t.classes.push_back(std::to_string(c));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) throw DataError("ragged rows");
    for (std::size_t f = 0; f < width; ++f)
      if (rows[i][f] < 0 || rows[i][f] >= card[f]) throw DataError("value outside its feature's range");
    if (labels[i] < 0 || labels[i] >= int(t.classes.size())) throw DataError("label out of range");
    t.add(rows[i], labels[i]);
  }
  return t;
}

}  // namespace

PYBIND11_MODULE(_rgann, m) {
  m.doc() = "Constructive/pruned network training and rule extraction";

  auto base = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<StageError>(m, "StageError", PyExc_RuntimeError);
  (void)base;

  py::class_<RunConfig>(m, "RunConfig")
      .def_readonly("name", &RunConfig::name)
      .def_readonly("data_path", &RunConfig::data_path)
      .def_readonly("schema_path", &RunConfig::schema_path)
      .def_readwrite("seeds", &RunConfig::seeds)
      .def("__repr__", [](const RunConfig& c) { return "<RunConfig " + c.name + ">"; });

  m.def("load_config", &load_run_config, py::arg("path"), py::arg("overrides") = std::vector<std::string>{},
        "Read a JSON run configuration; overrides look like 'train.eps1=0.05'.");

  py::class_<Network>(m, "Network")
      .def_static("init", &init_network, py::arg("inputs"), py::arg("outputs"), py::arg("seed"))
      .def_static("from_text", [](const std::string& s) { return Network::from_text(s); })
      .def_property_readonly("inputs", &Network::inputs)
      .def_property_readonly("hidden", &Network::hidden)
      .def_property_readonly("outputs", &Network::outputs)
      .def("add_hidden_node", &Network::add_hidden_node, py::arg("seed"))
      .def("forward", [](const Network& n, const std::vector<double>& x) {
        if (x.size() != n.inputs()) throw DataError("input width mismatch");
        return n.forward(x);
      })
      .def("hidden_activations", [](const Network& n, const std::vector<double>& x) {
        if (x.size() != n.inputs()) throw DataError("input width mismatch");
        return n.hidden_activations(x);
      })
      .def("classify", [](const Network& n, const std::vector<double>& x) {
        if (x.size() != n.inputs()) throw DataError("input width mismatch");
        return n.classify(x);
      })
      .def("connection_count", &Network::connection_count)
      .def("relevant_inputs", &Network::relevant_inputs)
      .def("to_text", &Network::to_text);

  m.def(
      "cluster_node",
      [](const std::vector<double>& activations, double epsilon) {
        if (activations.empty()) throw DataError("no activations");
        auto nc = cluster_node(activations, epsilon);
        py::dict d;
        d["centroids"] = nc.centroids;
        d["counts"] = nc.counts;
        d["membership"] = nc.membership;
        d["epsilon"] = nc.epsilon;
        return d;
      },
      py::arg("activations"), py::arg("epsilon"), "One-pass threshold clustering of one node's activations.");

  py::class_<RuleSet>(m, "RuleSet")
      .def_readonly("default_class", &RuleSet::default_class)
      .def("rule_count", &RuleSet::rule_count)
      .def("mean_conditions", &RuleSet::mean_conditions)
      .def_property_readonly("rules", [](const RuleSet& rs) {
        py::list out;
        for (const auto& r : rs.rules) {
          py::list conds;
          for (const auto& c : r.conditions) conds.append(py::make_tuple(c.feature, c.lo, c.hi));
          out.append(py::make_tuple(conds, r.consequent));
        }
        return out;
      });

  m.def(
      "rg",
      [](const std::vector<std::vector<int>>& rows, const std::vector<int>& labels,
         std::optional<std::vector<int>> cardinalities, std::optional<std::vector<std::string>> classes) {
        const auto t = make_table(rows, labels, cardinalities, classes);
        auto rs = rg(t);
        const auto metrics = evaluate_ruleset(rs, t);
        py::dict d;
        d["ruleset"] = rs;
        d["text"] = render_rules(rs, t.features, t.classes);
        d["accuracy"] = metrics.accuracy;
        return d;
      },
      py::arg("rows"), py::arg("labels"), py::arg("cardinalities") = py::none(), py::arg("classes") = py::none(),
      "RG on a discrete table (equality conditions); conditions are (feature, lo, hi).");

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("row", [](const RunResult& r) { return row_dict(r.row); })
      .def_readonly("network", &RunResult::network)
      .def_readonly("rules", &RunResult::rules)
      .def_property_readonly("rules_text",
                             [](const RunResult& r) { return render_rules(r.rules, r.features, r.classes); })
      .def_property_readonly("merged_rules_text",
                             [](const RunResult& r) { return render_rules(r.merged_rules, r.features, r.classes); })
      .def_property_readonly("cluster_report", [](const RunResult& r) { return r.clusters.report(); })
      .def_property_readonly("train_trace_csv", [](const RunResult& r) { return r.constructive_trace.to_csv(); });

  m.def(
      "run_pipeline",
      [](const RunConfig& cfg, std::uint64_t seed) {
        py::gil_scoped_release release;
        return run_pipeline(cfg, seed);
      },
      py::arg("config"), py::arg("seed") = 1, "Train, prune, cluster and extract rules for one seed.");

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("name", &RunReport::name)
      .def_property_readonly("rows",
                             [](const RunReport& r) {
                               py::list out;
                               for (const auto& row : r.rows) out.append(row_dict(row));
                               return out;
                             })
      .def_property_readonly("best_seed",
                             [](const RunReport& r) -> py::object {
                               auto b = r.best_run();
                               if (!b) return py::none();
                               return py::int_(r.rows[*b].seed);
                             })
      .def("aggregate",
           [](const RunReport& r) {
             py::dict out;
             for (const auto& [name, s] : r.aggregate()) {
               py::dict d;
               d["mean"] = s.mean;
               d["min"] = s.min;
               d["max"] = s.max;
               d["count"] = s.count;
               out[py::str(name)] = d;
             }
             return out;
           })
      .def("to_json", &RunReport::to_json)
      .def("to_csv", &RunReport::to_csv)
      .def("to_table", &RunReport::to_table);

  m.def(
      "run_experiment",
      [](const RunConfig& cfg, unsigned threads) {
        py::gil_scoped_release release;
        return run_experiment(cfg, threads);
      },
      py::arg("config"), py::arg("threads") = 0, "Every configured seed; failures become flagged rows.");
}
