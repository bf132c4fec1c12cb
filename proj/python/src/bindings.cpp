#include "redraw/benchmark.hpp"
#include "redraw/calibrate.hpp"
#include "redraw/io.hpp"
#include "redraw/metrics.hpp"
#include "redraw/reconstruct.hpp"
#include "redraw/simulator.hpp"
#include "redraw/topologies.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace redraw;

namespace {

py::object metric_value(const Metric& m) { return m.value ? py::cast(*m.value) : py::none(); }

py::dict metrics_dict(const MetricsReport& r) {
  py::dict d;
  d["ppv"] = metric_value(r.ppv);
  d["acc"] = metric_value(r.acc);
  d["tpr"] = metric_value(r.tpr);
  d["fpr"] = metric_value(r.fpr);
  return d;
}

py::dict counts_dict(const ConfusionCounts& c) {
  py::dict d;
  d["tp"] = c.true_positive;
  d["fp"] = c.false_positive;
  d["tn"] = c.true_negative;
  d["fn"] = c.false_negative;
  d["total"] = c.total;
  return d;
}

NetworkSpec network_of(const Matrix& weights) { return validate_network(NetworkSpec(weights)); }

py::dict pipeline_dict(const PipelineResult& r) {
  py::dict d;
  d["raw"] = r.raw.values;
  d["post_dpi"] = r.post_dpi.values;
  d["post_threshold"] = r.post_threshold.values;
  d["warnings"] = r.warnings;
  return d;
}

UnlockedPolicy policy_of(const std::string& s) {
  if (s == "reject") return UnlockedPolicy::reject;
  if (s == "warn") return UnlockedPolicy::warn_and_include;
  throw ValidationError("unlocked policy must be 'reject' or 'warn'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kuramoto network simulation and directed topology reconstruction";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<UnlockedExperimentError>(m, "UnlockedExperimentError", PyExc_RuntimeError);
  py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("natural_frequencies", &SimConfig::natural_frequencies)
      .def_readwrite("initial_phases", &SimConfig::initial_phases)
      .def_readwrite("coupling", &SimConfig::coupling)
      .def_readwrite("base_phase_shift", &SimConfig::base_phase_shift)
      .def_readwrite("duration", &SimConfig::duration)
      .def_readwrite("time_step", &SimConfig::time_step)
      .def_readwrite("rng_seed", &SimConfig::rng_seed);

  py::class_<LockCriterion>(m, "LockCriterion")
      .def(py::init<>())
      .def(py::init([](double chi, double settle) { return LockCriterion{chi, settle}; }), py::arg("chi") = 0.35,
           py::arg("settle_time") = 20.0)
      .def_readwrite("chi", &LockCriterion::chi)
      .def_readwrite("settle_time", &LockCriterion::settle_time);

  m.def("preset_names", &preset_names, "Names of the reference topologies.");
  m.def(
      "preset", [](const std::string& name) { return build(preset(name)).weights(); }, py::arg("name"),
      "Weight matrix a_ij (row i influenced by column j) of a reference topology.");
  m.def(
      "erdos_renyi", [](std::size_t n, double p, std::uint64_t seed) { return erdos_renyi_directed(n, p, seed).weights(); },
      py::arg("n"), py::arg("p"), py::arg("seed"));
  m.def(
      "parse_edge_list",
      [](const std::string& text, std::optional<std::size_t> nodes) { return parse_edge_list(text, nodes).weights(); },
      py::arg("text"), py::arg("nodes") = py::none());
  m.def(
      "format_edge_list", [](const Matrix& w) { return format_edge_list(network_of(w)); }, py::arg("weights"));

  m.def(
      "simulate",
      [](const Matrix& weights, const SimConfig& config) {
        const PhaseTrace t = simulate(network_of(weights), config);
        return py::make_tuple(t.times, t.phases);
      },
      py::arg("weights"), py::arg("config"), "RK4 trajectory as (times, phases[M+1, n]).");

  m.def(
      "lock_report",
      [](const std::vector<double>& times, const Matrix& phases, const LockCriterion& criterion) {
        PhaseTrace t;
        t.times = times;
        t.phases = phases;
        const LockReport r = lock_report(t, criterion);
        py::dict d;
        d["r"] = r.order_magnitude;
        d["psi"] = r.order_phase;
        d["mean"] = r.mean;
        d["stddev"] = r.stddev;
        d["cv"] = r.coefficient_of_variation ? py::cast(*r.coefficient_of_variation) : py::none();
        d["locked"] = r.locked;
        return d;
      },
      py::arg("times"), py::arg("phases"), py::arg("criterion") = LockCriterion{});

  m.def(
      "reconstruct",
      [](const Matrix& weights, int experiments, std::uint64_t seed, double coupling, double nu, double mu,
         double duration, const std::string& unlocked) {
        SimConfig tmpl;
        tmpl.coupling = coupling;
        tmpl.duration = duration;
        const NetworkSpec spec = network_of(weights);
        const UnlockedPolicy policy = policy_of(unlocked);
        ExperimentBatch batch;
        PipelineResult r;
        {
          py::gil_scoped_release release;
          batch = run_batch(spec, tmpl, experiments, seed);
          r = run_pipeline(batch.traces, batch.lock_reports, ReconstructionParams{nu, mu, {}}, policy);
        }
        py::dict d = pipeline_dict(r);
        d["locked"] = batch.locked_count();
        return d;
      },
      py::arg("weights"), py::arg("experiments") = 50, py::arg("seed") = 1, py::arg("coupling") = 10.0,
      py::arg("nu") = 0.9, py::arg("mu") = 0.8, py::arg("duration") = 30.0, py::arg("unlocked") = "reject",
      "Simulate K experiments on a known network and run the six-step pipeline.");

  m.def(
      "reconstruct_traces",
      [](const std::vector<Matrix>& phases, const std::vector<double>& times, double nu, double mu) {
        std::vector<PhaseTrace> traces;
        for (std::size_t k = 0; k < phases.size(); ++k) {
          PhaseTrace t;
          t.times = times;
          t.phases = phases[k];
          t.experiment_index = static_cast<int>(k + 1);
          validate_trace(t);
          traces.push_back(std::move(t));
        }
        return pipeline_dict(run_pipeline(traces, {}, ReconstructionParams{nu, mu, {}}));
      },
      py::arg("phases"), py::arg("times"), py::arg("nu") = 0.9, py::arg("mu") = 0.8,
      "Pipeline on user traces (one phases[M+1, n] array per experiment); no lock check.");

  m.def(
      "dpi_filter", [](const Matrix& rho, double nu) { return dpi_filter(InfluenceMatrix{rho, Stage::raw}, nu).values; },
      py::arg("rho"), py::arg("nu"));
  m.def(
      "threshold_cut",
      [](const Matrix& rho, double mu) { return threshold_cut(InfluenceMatrix{rho, Stage::post_dpi}, mu).values; },
      py::arg("rho"), py::arg("mu"));

  m.def(
      "evaluate",
      [](const Matrix& truth, const Matrix& inferred) {
        const ConfusionCounts c = confusion(network_of(truth), InfluenceMatrix{inferred, Stage::post_threshold});
        py::dict d = metrics_dict(report(c));
        d["counts"] = counts_dict(c);
        return d;
      },
      py::arg("truth"), py::arg("inferred"), "Confusion counts and PPV/ACC/TPR/FPR in percent (None if undefined).");
  m.def(
      "algebraic_connectivity", [](const Matrix& w) { return algebraic_connectivity(network_of(w)); },
      py::arg("weights"));

  m.def(
      "calibrate",
      [](std::size_t n, std::size_t graphs, int experiments, double grid_step, double grid_max, std::uint64_t seed,
         std::optional<std::vector<double>> bounds) {
        CalibrationConfig cfg;
        cfg.n = n;
        cfg.graphs = graphs;
        cfg.experiments = experiments;
        cfg.grid_step = grid_step;
        cfg.grid_max = grid_max;
        cfg.seed = seed;
        if (bounds) {
          if (bounds->size() != 4) throw ValidationError("bounds must be [ppv, acc, tpr, fpr]");
          cfg.bounds = MetricBounds{(*bounds)[0], (*bounds)[1], (*bounds)[2], (*bounds)[3]};
        }
        CalibrationMap map;
        {
          py::gil_scoped_release release;
          map = calibrate(cfg);
        }
        py::list cells;
        for (const auto& c : map.cells) {
          py::dict d;
          d["nu"] = c.point.nu;
          d["mu"] = c.point.mu;
          d["ppv"] = c.ppv.mean ? py::cast(*c.ppv.mean) : py::none();
          d["acc"] = c.acc.mean ? py::cast(*c.acc.mean) : py::none();
          d["tpr"] = c.tpr.mean ? py::cast(*c.tpr.mean) : py::none();
          d["fpr"] = c.fpr.mean ? py::cast(*c.fpr.mean) : py::none();
          d["satisfied"] = c.satisfied;
          d["admissible"] = c.admissible;
          cells.append(d);
        }
        const ThresholdSuggestion s = suggest_thresholds(map);
        py::dict out;
        out["cells"] = cells;
        out["admissible_count"] = map.admissible_count();
        out["suggestion"] = py::make_tuple(s.point.nu, s.point.mu);
        out["suggestion_admissible"] = s.admissible;
        out["diagnostics"] = map.diagnostics;
        return out;
      },
      py::arg("n"), py::arg("graphs") = 100, py::arg("experiments") = 10, py::arg("grid_step") = 0.01,
      py::arg("grid_max") = 0.99, py::arg("seed") = 1, py::arg("bounds") = py::none());

  m.def(
      "benchmark",
      [](const std::string& preset_name, std::uint64_t seed, std::optional<int> experiments) {
        BenchmarkCase c = preset_case(preset_name);
        if (experiments) c.experiments = *experiments;
        const BenchmarkRow row = run_case(c, seed);
        py::dict d = metrics_dict(row.metrics);
        d["counts"] = counts_dict(row.counts);
        d["locked"] = row.locked;
        d["truth"] = row.truth.weights();
        d["inferred"] = row.result.post_threshold.values;
        d["raw"] = row.result.raw.values;
        return d;
      },
      py::arg("preset"), py::arg("seed") = 1, py::arg("experiments") = py::none(),
      "One reference experiment with its reference coupling and thresholds.");
}
