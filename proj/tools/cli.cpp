#include "cli.hpp"

#include "redraw/benchmark.hpp"
#include "redraw/calibrate.hpp"
#include "redraw/io.hpp"
#include "redraw/metrics.hpp"
#include "redraw/reconstruct.hpp"
#include "redraw/simulator.hpp"
#include "redraw/topologies.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#ifndef REDRAW_VERSION
#define REDRAW_VERSION "0.0.0"
#endif

namespace redraw::cli {

namespace fs = std::filesystem;

namespace {

fs::path default_out_dir() {
  if (const char* env = std::getenv("REDRAW_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return "redraw-out";
}

std::string numbered(std::string_view stem, std::size_t index, std::string_view ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%03zu.", index);
  return std::string(stem) + buf + std::string(ext);
}

std::string slug(std::string_view name) {
  std::string s;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') s += ch;
    else if (ch == '=' || ch == ' ') s += '_';
  }
  return s;
}

std::string metric_text(const Metric& m) {
  if (!m.value) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << *m.value;
  return os.str();
}

std::string metrics_line(const MetricsReport& r) {
  return "PPV " + metric_text(r.ppv) + "  ACC " + metric_text(r.acc) + "  TPR " + metric_text(r.tpr) + "  FPR " +
         metric_text(r.fpr);
}

Json metrics_json(const ConfusionCounts& counts, const MetricsReport& r) {
  Json j = r;
  j["counts"] = counts;
  return j;
}

NetworkSpec load_network_file(const fs::path& path) {
  if (path.extension() == ".json") return load_network(path);
  return ingest_edge_list(path);
}

InfluenceMatrix load_influence_file(const fs::path& path) {
  if (path.extension() == ".json") {
    InfluenceMatrix m = Json::parse(read_text(path)).get<InfluenceMatrix>();
    return m;
  }
  InfluenceMatrix m{parse_matrix_csv(read_text(path)), Stage::post_threshold};
  validate_influence(m);
  return m;
}

// Files of one run, plus the manifest written last.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& relative, std::string_view content) {
    write_text_atomic(dir_ / relative, content);
    files_.push_back(relative);
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

struct Manifest {
  std::string subcommand;
  std::vector<std::string> arguments;
  Json config = Json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> warnings;
};

void write_manifest(Outputs& outputs, const Manifest& m, double seconds) {
  Json j;
  j["tool"] = "redraw";
  j["version"] = REDRAW_VERSION;
  j["subcommand"] = m.subcommand;
  j["arguments"] = m.arguments;
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["inputs"] = m.inputs;
  j["outputs"] = outputs.files();
  j["output_dir"] = outputs.dir().string();
  j["warnings"] = m.warnings;
  j["wall_clock_seconds"] = seconds;
  write_text_atomic(outputs.dir() / "manifest.json", j.dump(2) + "\n");
}

std::vector<std::string> strip_out_option(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t a = 0; a < args.size(); ++a) {
    if (args[a] == "--out" || args[a] == "-o") {
      ++a;
      continue;
    }
    if (args[a].rfind("--out=", 0) == 0) continue;
    kept.push_back(args[a]);
  }
  return kept;
}

std::vector<std::string> check_formats(const std::vector<std::string>& formats) {
  for (const auto& f : formats) {
    if (f != "json" && f != "csv" && f != "dot") {
      throw ValidationError("unknown format '" + f + "' (expected json, csv or dot)");
    }
  }
  return formats;
}

bool wants(const std::vector<std::string>& formats, std::string_view f) {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

UnlockedPolicy parse_policy(const std::string& text) {
  if (text == "reject") return UnlockedPolicy::reject;
  if (text == "warn") return UnlockedPolicy::warn_and_include;
  throw ValidationError("unknown unlocked policy '" + text + "' (expected reject or warn)");
}

MetricBounds parse_bounds(const std::string& text) {
  MetricBounds b;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("bound '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const double value = parse_double(item.substr(eq + 1));
    if (key == "ppv") b.ppv = value;
    else if (key == "acc") b.acc = value;
    else if (key == "tpr") b.tpr = value;
    else if (key == "fpr") b.fpr = value;
    else throw ValidationError("unknown bound '" + key + "' (expected ppv, acc, tpr or fpr)");
  }
  return b;
}

Link parse_link(const std::string& text) {
  std::stringstream ss(text);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(ss, field, ':')) fields.push_back(field);
  if (fields.size() < 2 || fields.size() > 3) throw ValidationError("link '" + text + "' is not source:target[:weight]");
  Link link;
  try {
    link.source = std::stoul(fields[0]);
    link.target = std::stoul(fields[1]);
  } catch (const std::exception&) {
    throw ValidationError("link '" + text + "' has a non-numeric node label");
  }
  if (fields.size() == 3) link.weight = parse_double(fields[2]);
  return link;
}

// ---- option groups -------------------------------------------------------

struct RecipeArgs {
  std::string topology;
  std::size_t n = 0;
  std::vector<double> weights;
  bool reversed = false;
  double near_weight = 1.0;
  double far_weight = 0.5;
  double rewire_weight = 1.0;
  std::vector<std::string> rewired;
  double block_weight = 1.0;
  double hub_weight = 2.0;
  std::vector<std::size_t> hub_sources;
  std::vector<std::size_t> hub_targets;
  double p = 0.0;
  std::uint64_t graph_seed = 1;
  std::string file;
  std::size_t nodes = 0;
  std::map<std::string, CLI::Option*> given;

  bool has(const std::string& name) const {
    const auto it = given.find(name);
    return it != given.end() && it->second->count() > 0;
  }
};

void add_recipe_options(CLI::App* app, RecipeArgs& a, bool seed_is_graph_seed) {
  a.given["n"] = app->add_option("--n", a.n, "Node count");
  a.given["weights"] = app->add_option("--weights", a.weights, "Link weights (chain, star)")->delimiter(',');
  a.given["reversed"] = app->add_flag("--reversed", a.reversed, "Reverse the chain, or the first star spoke");
  a.given["near"] = app->add_option("--near-weight", a.near_weight, "Ring weight of the i-1 link");
  a.given["far"] = app->add_option("--far-weight", a.far_weight, "Ring weight of the i-2 link");
  a.given["rewire"] = app->add_option("--rewire-weight", a.rewire_weight, "Weight of the default rewired links");
  a.given["rewired"] = app->add_option("--rewired", a.rewired, "Extra ring links source:target[:weight]")->delimiter(',');
  a.given["block"] = app->add_option("--block-weight", a.block_weight, "Weight of the block links");
  a.given["hub"] = app->add_option("--hub-weight", a.hub_weight, "Weight of the hub links");
  a.given["sources"] = app->add_option("--hub-sources", a.hub_sources, "Nodes feeding the hub")->delimiter(',');
  a.given["targets"] = app->add_option("--hub-targets", a.hub_targets, "Nodes fed by the hub")->delimiter(',');
  a.given["p"] = app->add_option("--p", a.p, "Edge probability (er), default ln(n)/(2n)");
  if (seed_is_graph_seed) {
    a.given["graph-seed"] = app->add_option("--seed", a.graph_seed, "Graph seed (er)");
  } else {
    a.given["graph-seed"] = app->add_option("--graph-seed", a.graph_seed, "Graph seed (er), default --seed");
  }
  a.given["file"] = app->add_option("--file", a.file, "Edge-list file (file)");
  a.given["nodes"] = app->add_option("--nodes", a.nodes, "Node count for the edge list (file)");
}

std::size_t default_size(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::geometric_hub:
    case TopologyKind::ravasz_barabasi: return 17;
    case TopologyKind::regular_ring:
    case TopologyKind::rewired_ring: return 20;
    default: return 4;
  }
}

bool is_preset(const std::string& name) {
  const auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

TopologyRecipe resolve_recipe(const RecipeArgs& a, std::uint64_t fallback_seed) {
  TopologyRecipe r;
  if (is_preset(a.topology)) {
    r = preset(a.topology);
  } else {
    r.kind = topology_kind_from_string(a.topology);
    r.n = default_size(r.kind);
  }
  if (a.has("n")) r.n = a.n;
  if (a.has("weights")) r.weights = a.weights;
  if (a.has("reversed")) r.reversed = a.reversed;
  if (a.has("near")) r.near_weight = a.near_weight;
  if (a.has("far")) r.far_weight = a.far_weight;
  if (a.has("rewire")) r.rewire_weight = a.rewire_weight;
  if (a.has("rewired")) {
    r.rewired.clear();
    for (const auto& text : a.rewired) r.rewired.push_back(parse_link(text));
  }
  if (a.has("block")) r.block_weight = a.block_weight;
  if (a.has("hub")) r.hub_weight = a.hub_weight;
  if (a.has("sources")) r.hub_sources = a.hub_sources;
  if (a.has("targets")) r.hub_targets = a.hub_targets;
  if (r.kind == TopologyKind::erdos_renyi) {
    r.p = a.has("p") ? a.p : default_edge_probability(r.n);
    r.seed = a.has("graph-seed") ? a.graph_seed : fallback_seed;
  }
  if (r.kind == TopologyKind::from_file) {
    if (a.file.empty()) throw ValidationError("topology 'file' needs --file");
    r.path = a.file;
    if (a.has("nodes")) r.nodes = a.nodes;
  }
  return r;
}

Json recipe_json(const TopologyRecipe& r) {
  Json j;
  j["kind"] = std::string(to_string(r.kind));
  j["n"] = r.n;
  j["weights"] = r.weights;
  j["reversed"] = r.reversed;
  j["near_weight"] = r.near_weight;
  j["far_weight"] = r.far_weight;
  j["rewire_weight"] = r.rewire_weight;
  Json links = Json::array();
  for (const auto& l : r.rewired) links.push_back({{"source", l.source}, {"target", l.target}, {"weight", l.weight}});
  j["rewired"] = links;
  j["block_weight"] = r.block_weight;
  j["hub_weight"] = r.hub_weight;
  j["hub_sources"] = r.hub_sources ? Json(*r.hub_sources) : Json(nullptr);
  j["hub_targets"] = r.hub_targets ? Json(*r.hub_targets) : Json(nullptr);
  j["p"] = r.p;
  j["seed"] = r.seed;
  j["path"] = r.path.string();
  j["nodes"] = r.nodes ? Json(*r.nodes) : Json(nullptr);
  return j;
}

struct SimArgs {
  double duration = 30.0;
  double dt = 0.01;
  double coupling = 10.0;
  double phi = kPi / 4.0;
  int experiments = 50;
  std::uint64_t seed = 1;
  double chi = 0.35;
  double settle = 20.0;
  std::string unlocked = "reject";
  CLI::Option* coupling_opt = nullptr;
};

void add_sim_options(CLI::App* app, SimArgs& s) {
  app->add_option("--duration", s.duration, "Experiment length T in seconds")->capture_default_str();
  app->add_option("--dt", s.dt, "RK4 time step")->capture_default_str();
  s.coupling_opt = app->add_option("--coupling,-c", s.coupling, "Coupling strength c (default 10)");
  app->add_option("--phi", s.phi, "Base phase shift phi")->capture_default_str();
  app->add_option("--experiments,--k,-k", s.experiments, "Number of experiments K")->capture_default_str();
  app->add_option("--seed", s.seed, "Master seed")->capture_default_str();
  app->add_option("--chi", s.chi, "Lock bound on the coefficient of variation")->capture_default_str();
  app->add_option("--settle-time", s.settle, "Start of the lock statistics window")->capture_default_str();
  app->add_option("--unlocked", s.unlocked, "Unlocked experiments: reject | warn")->capture_default_str();
}

SimConfig sim_template(const SimArgs& s, double coupling) {
  SimConfig c;
  c.coupling = coupling;
  c.base_phase_shift = s.phi;
  c.duration = s.duration;
  c.time_step = s.dt;
  return c;
}

LockCriterion criterion_of(const SimArgs& s) { return LockCriterion{s.chi, s.settle}; }

Json sim_json(const SimArgs& s, double coupling) {
  Json j = sim_template(s, coupling);
  j["experiments"] = s.experiments;
  j["seed"] = s.seed;
  j["criterion"] = criterion_of(s);
  j["unlocked_policy"] = s.unlocked;
  return j;
}

struct ReconArgs {
  double nu = 0.9;
  double mu = 0.8;
  double window = 0.0;
  std::vector<double> boundaries;
  std::vector<std::string> formats;
  CLI::Option* nu_opt = nullptr;
  CLI::Option* mu_opt = nullptr;
};

void add_recon_options(CLI::App* app, ReconArgs& r) {
  r.nu_opt = app->add_option("--nu", r.nu, "DPI threshold nu (default 0.9)");
  r.mu_opt = app->add_option("--mu", r.mu, "Cut threshold mu (default 0.8)");
  app->add_option("--window", r.window, "Reconstruct per window of this length in seconds");
  app->add_option("--boundaries", r.boundaries, "Explicit window boundaries in seconds")->delimiter(',');
  app->add_option("--format", r.formats, "Matrix formats: json, csv, dot")->delimiter(',');
}

ReconstructionParams params_of(const ReconArgs& r, double nu, double mu) {
  ReconstructionParams p;
  p.dpi_threshold = nu;
  p.cut_threshold = mu;
  p.window_boundaries = r.boundaries;
  validate_params(p);
  if (r.window < 0.0) throw ValidationError("window length must be > 0");
  return p;
}

void emit_matrices(Outputs& o, const PipelineResult& res, const std::vector<std::string>& formats) {
  if (wants(formats, "csv")) {
    o.write("rho_raw.csv", format_matrix_csv(res.raw.values));
    o.write("rho_dpi.csv", format_matrix_csv(res.post_dpi.values));
    o.write("rho.csv", format_matrix_csv(res.post_threshold.values));
  }
  if (wants(formats, "json")) {
    const Json j = {{"raw", res.raw}, {"post_dpi", res.post_dpi}, {"post_threshold", res.post_threshold}};
    o.write("influence.json", j.dump(2) + "\n");
  }
  if (wants(formats, "dot")) o.write("rho.dot", format_influence_dot(res.post_threshold));
}

void emit_windows(Outputs& o, const WindowedReconstruction& w, const std::vector<std::string>& formats,
                  const NetworkSpec* truth) {
  Json index = Json::array();
  for (std::size_t k = 0; k < w.size(); ++k) {
    Json entry;
    entry["window"] = k + 1;
    entry["start"] = w.windows[k].start;
    entry["end"] = w.windows[k].end;
    entry["edge_count"] = w.matrices[k].edge_count();
    Json files = Json::array();
    if (wants(formats, "csv")) {
      const std::string name = "windows/" + numbered("window", k + 1, "csv");
      o.write(name, format_matrix_csv(w.matrices[k].values));
      files.push_back(name);
    }
    if (wants(formats, "json")) {
      const std::string name = "windows/" + numbered("window", k + 1, "json");
      o.write(name, Json(w.matrices[k]).dump(2) + "\n");
      files.push_back(name);
    }
    if (wants(formats, "dot")) {
      const std::string name = "windows/" + numbered("window", k + 1, "dot");
      o.write(name, format_influence_dot(w.matrices[k], "window_" + std::to_string(k + 1)));
      files.push_back(name);
    }
    entry["files"] = files;
    if (truth != nullptr) {
      const ConfusionCounts counts = confusion(*truth, w.matrices[k]);
      entry["metrics"] = metrics_json(counts, report(counts));
    }
    index.push_back(entry);
  }
  o.write("windows/index.json", index.dump(2) + "\n");
}

Json lock_summary(const ExperimentBatch& batch) {
  Json list = Json::array();
  for (std::size_t k = 0; k < batch.size(); ++k) {
    Json e;
    e["experiment"] = k + 1;
    e["natural_frequencies"] = batch.configs[k].natural_frequencies;
    e["initial_phases"] = batch.configs[k].initial_phases;
    e["lock"] = batch.lock_reports[k];
    list.push_back(e);
  }
  return list;
}

std::vector<std::string> unlocked_messages(const std::vector<LockReport>& reports) {
  std::vector<std::string> messages;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    if (reports[k].locked) continue;
    std::ostringstream os;
    os << "experiment " << k + 1 << " is not phase-locked";
    if (reports[k].coefficient_of_variation) os << " (c_v " << *reports[k].coefficient_of_variation << ")";
    if (!reports[k].diagnostic.empty()) os << ": " << reports[k].diagnostic;
    messages.push_back(os.str());
  }
  return messages;
}

// ---- subcommands ---------------------------------------------------------

struct Common {
  std::string out_dir;
  std::vector<std::string> args;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Manifest new_manifest(const Common& c, std::string subcommand) {
  Manifest m;
  m.subcommand = std::move(subcommand);
  m.arguments = strip_out_option(c.args);
  return m;
}

struct GenerateArgs {
  RecipeArgs recipe;
  std::vector<std::string> formats;
};

int cmd_generate(const Common& c, const GenerateArgs& g) {
  Timer timer;
  const std::vector<std::string> formats = check_formats(g.formats.empty() ? std::vector<std::string>{"json", "dot"} : g.formats);
  const TopologyRecipe recipe = resolve_recipe(g.recipe, 1);
  const NetworkSpec spec = build(recipe);
  Outputs o(c.out_dir);
  if (wants(formats, "json")) o.write("network.json", Json(spec).dump(2) + "\n");
  if (wants(formats, "csv")) o.write("network.csv", format_edge_list(spec));
  if (wants(formats, "dot")) o.write("network.dot", format_network_dot(spec));
  Manifest m = new_manifest(c, "generate");
  m.config = {{"topology", g.recipe.topology}, {"recipe", recipe_json(recipe)}, {"formats", formats}};
  m.seed = recipe.seed;
  if (recipe.kind == TopologyKind::from_file) m.inputs.push_back(recipe.path.string());
  write_manifest(o, m, timer.seconds());
  *c.out << g.recipe.topology << ": n=" << spec.size() << " edges=" << spec.edge_count() << " -> " << c.out_dir
         << "\n";
  return kOk;
}

struct SimulateArgs {
  std::string network;
  SimArgs sim;
};

int cmd_simulate(const Common& c, const SimulateArgs& s) {
  Timer timer;
  const UnlockedPolicy policy = parse_policy(s.sim.unlocked);
  const NetworkSpec spec = load_network_file(s.network);
  const ExperimentBatch batch =
      run_batch(spec, sim_template(s.sim, s.sim.coupling), s.sim.experiments, s.sim.seed, criterion_of(s.sim));
  Outputs o(c.out_dir);
  o.write("network.json", Json(spec).dump(2) + "\n");
  for (std::size_t k = 0; k < batch.size(); ++k) {
    o.write("traces/" + numbered("trace", k + 1, "csv"), format_trace_csv(batch.traces[k]));
    o.write("order/" + numbered("order", k + 1, "csv"),
            format_order_parameter_csv(batch.traces[k], batch.lock_reports[k]));
  }
  o.write("experiments.json", lock_summary(batch).dump(2) + "\n");
  Manifest m = new_manifest(c, "simulate");
  m.config = {{"network", s.network}, {"simulation", sim_json(s.sim, s.sim.coupling)}};
  m.seed = s.sim.seed;
  m.inputs.push_back(s.network);
  m.warnings = unlocked_messages(batch.lock_reports);
  write_manifest(o, m, timer.seconds());
  *c.out << batch.locked_count() << "/" << batch.size() << " experiments locked -> " << c.out_dir << "\n";
  for (const auto& w : m.warnings) *c.err << "warning: " << w << "\n";
  if (!m.warnings.empty() && policy == UnlockedPolicy::reject) return kUnlocked;
  return kOk;
}

struct ReconstructArgs {
  std::vector<std::string> traces;
  std::string trace_dir;
  SimArgs sim;  // only the lock criterion and policy are used
  ReconArgs recon;
};

std::vector<fs::path> trace_files(const ReconstructArgs& r) {
  std::vector<fs::path> files(r.traces.begin(), r.traces.end());
  if (!r.trace_dir.empty()) {
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(r.trace_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") found.push_back(entry.path());
    }
    std::sort(found.begin(), found.end());
    files.insert(files.end(), found.begin(), found.end());
  }
  if (files.empty()) throw ValidationError("no trace files given");
  return files;
}

int cmd_reconstruct(const Common& c, const ReconstructArgs& r) {
  Timer timer;
  const UnlockedPolicy policy = parse_policy(r.sim.unlocked);
  const std::vector<std::string> formats = check_formats(r.recon.formats.empty() ? std::vector<std::string>{"csv"} : r.recon.formats);
  const ReconstructionParams params = params_of(r.recon, r.recon.nu, r.recon.mu);
  const std::vector<fs::path> files = trace_files(r);
  std::vector<PhaseTrace> traces;
  std::vector<LockReport> locks;
  for (std::size_t k = 0; k < files.size(); ++k) {
    traces.push_back(load_trace(files[k], static_cast<int>(k + 1)));
    locks.push_back(lock_report(traces.back(), criterion_of(r.sim)));
  }
  const PipelineResult res = run_pipeline(traces, locks, params, policy);
  Outputs o(c.out_dir);
  emit_matrices(o, res, formats);
  std::size_t windows = 0;
  if (r.recon.window > 0.0 || !params.window_boundaries.empty()) {
    const auto windows_of = r.recon.window > 0.0 ? uniform_windows(traces.front(), r.recon.window)
                                                 : boundary_windows(traces.front(), params.window_boundaries);
    const WindowedReconstruction w = reconstruct_windowed(traces, locks, params, windows_of, policy);
    emit_windows(o, w, formats, nullptr);
    windows = w.size();
  }
  Manifest m = new_manifest(c, "reconstruct");
  Json params_json = params;
  m.config = {{"params", params_json},
              {"window", r.recon.window},
              {"criterion", criterion_of(r.sim)},
              {"unlocked_policy", r.sim.unlocked},
              {"formats", formats}};
  for (const auto& f : files) m.inputs.push_back(f.string());
  m.warnings = res.warnings;
  write_manifest(o, m, timer.seconds());
  for (const auto& w : res.warnings) *c.err << "warning: " << w << "\n";
  *c.out << traces.size() << " traces, " << res.post_threshold.edge_count() << " inferred edges";
  if (windows > 0) *c.out << ", " << windows << " windows";
  *c.out << " -> " << c.out_dir << "\n";
  return kOk;
}

struct EvaluateArgs {
  std::string truth;
  std::string inferred;
};

int cmd_evaluate(const Common& c, const EvaluateArgs& e) {
  Timer timer;
  const NetworkSpec truth = load_network_file(e.truth);
  const InfluenceMatrix inferred = load_influence_file(e.inferred);
  const ConfusionCounts counts = confusion(truth, inferred);
  const MetricsReport r = report(counts);
  Outputs o(c.out_dir);
  o.write("metrics.json", metrics_json(counts, r).dump(2) + "\n");
  o.write("metrics.csv", format_metrics_csv(r));
  Manifest m = new_manifest(c, "evaluate");
  m.config = {{"truth", e.truth}, {"inferred", e.inferred}};
  m.inputs = {e.truth, e.inferred};
  write_manifest(o, m, timer.seconds());
  *c.out << metrics_line(r) << "\n";
  return kOk;
}

struct PipelineArgs {
  std::string network;
  RecipeArgs recipe;
  SimArgs sim;
  ReconArgs recon;
  bool save_traces = false;
};

int cmd_pipeline(const Common& c, const PipelineArgs& p) {
  Timer timer;
  const UnlockedPolicy policy = parse_policy(p.sim.unlocked);
  const std::vector<std::string> formats = check_formats(p.recon.formats.empty() ? std::vector<std::string>{"csv", "dot"} : p.recon.formats);
  if (p.network.empty() == p.recipe.topology.empty()) {
    throw ValidationError("pipeline needs exactly one of --network or --topology");
  }
  NetworkSpec spec;
  Json source;
  double coupling = p.sim.coupling;
  double nu = p.recon.nu;
  double mu = p.recon.mu;
  if (!p.network.empty()) {
    spec = load_network_file(p.network);
    source = {{"network", p.network}};
  } else {
    const TopologyRecipe recipe = resolve_recipe(p.recipe, p.sim.seed);
    spec = build(recipe);
    source = {{"topology", p.recipe.topology}, {"recipe", recipe_json(recipe)}};
    if (is_preset(p.recipe.topology)) {
      const BenchmarkCase reference = preset_case(p.recipe.topology);
      if (p.sim.coupling_opt->count() == 0) coupling = reference.sim.coupling;
      if (p.recon.nu_opt->count() == 0) nu = reference.params.dpi_threshold;
      if (p.recon.mu_opt->count() == 0) mu = reference.params.cut_threshold;
    }
  }
  const ReconstructionParams params = params_of(p.recon, nu, mu);
  const ExperimentBatch batch =
      run_batch(spec, sim_template(p.sim, coupling), p.sim.experiments, p.sim.seed, criterion_of(p.sim));
  const PipelineResult res = run_pipeline(batch.traces, batch.lock_reports, params, policy);
  const ConfusionCounts counts = confusion(spec, res.post_threshold);
  const MetricsReport metrics = report(counts);

  Outputs o(c.out_dir);
  o.write("network.json", Json(spec).dump(2) + "\n");
  o.write("network.dot", format_network_dot(spec));
  o.write("experiments.json", lock_summary(batch).dump(2) + "\n");
  if (p.save_traces) {
    for (std::size_t k = 0; k < batch.size(); ++k) {
      o.write("traces/" + numbered("trace", k + 1, "csv"), format_trace_csv(batch.traces[k]));
    }
  }
  emit_matrices(o, res, formats);
  o.write("metrics.json", metrics_json(counts, metrics).dump(2) + "\n");
  o.write("metrics.csv", format_metrics_csv(metrics));
  std::size_t windows = 0;
  if (p.recon.window > 0.0 || !params.window_boundaries.empty()) {
    const auto windows_of = p.recon.window > 0.0 ? uniform_windows(batch.traces.front(), p.recon.window)
                                                 : boundary_windows(batch.traces.front(), params.window_boundaries);
    const WindowedReconstruction w = reconstruct_windowed(batch.traces, batch.lock_reports, params, windows_of, policy);
    emit_windows(o, w, formats, &spec);
    windows = w.size();
  }
  Manifest m = new_manifest(c, "pipeline");
  Json params_json = params;
  m.config = source;
  m.config["simulation"] = sim_json(p.sim, coupling);
  m.config["params"] = params_json;
  m.config["window"] = p.recon.window;
  m.config["formats"] = formats;
  m.seed = p.sim.seed;
  if (!p.network.empty()) m.inputs.push_back(p.network);
  m.warnings = res.warnings;
  write_manifest(o, m, timer.seconds());
  for (const auto& w : res.warnings) *c.err << "warning: " << w << "\n";
  *c.out << batch.locked_count() << "/" << batch.size() << " locked  " << metrics_line(metrics);
  if (windows > 0) *c.out << "  windows " << windows;
  *c.out << "\n";
  return kOk;
}

struct CalibrateArgs {
  CalibrationConfig config;
  std::string bounds;
  double p = 0.0;
  CLI::Option* p_opt = nullptr;
  bool progress = false;
};

int cmd_calibrate(const Common& c, CalibrateArgs a) {
  Timer timer;
  if (!a.bounds.empty()) a.config.bounds = parse_bounds(a.bounds);
  if (a.p_opt->count() > 0) a.config.edge_probability = a.p;
  ProgressCallback progress;
  if (a.progress) {
    progress = [&c](std::size_t done, std::size_t total) { *c.err << "graph " << done << "/" << total << "\n"; };
  }
  const CalibrationMap map = calibrate(a.config, progress);
  const ThresholdSuggestion s = suggest_thresholds(map);

  Outputs o(c.out_dir);
  o.write("calibration.csv", format_calibration_csv(map));
  Json graphs = Json::array();
  for (const auto& g : map.graphs) {
    graphs.push_back({{"seed", g.seed},
                      {"redraws", g.redraws},
                      {"locked", g.locked},
                      {"edges", g.edges},
                      {"algebraic_connectivity", g.algebraic_connectivity},
                      {"mean_cv", g.mean_cv}});
  }
  o.write("graphs.json", Json{{"graphs", graphs}, {"diagnostics", map.diagnostics}}.dump(2) + "\n");
  const Json suggestion = {{"nu", s.point.nu},
                           {"mu", s.point.mu},
                           {"satisfied", s.satisfied},
                           {"admissible", s.admissible},
                           {"admissible_count", s.admissible_count},
                           {"centroid", {{"nu", s.centroid.nu}, {"mu", s.centroid.mu}}},
                           {"message", s.message}};
  o.write("suggestion.json", suggestion.dump(2) + "\n");

  Manifest m = new_manifest(c, "calibrate");
  const CalibrationConfig& k = a.config;
  m.config = {{"n", k.n},
              {"graphs", k.graphs},
              {"experiments", k.experiments},
              {"grid_step", k.grid_step},
              {"grid_max", k.grid_max},
              {"edge_probability", k.probability()},
              {"bounds", {{"ppv", k.bounds.ppv}, {"acc", k.bounds.acc}, {"tpr", k.bounds.tpr}, {"fpr", k.bounds.fpr}}},
              {"coupling", k.coupling()},
              {"phi", k.base_phase_shift},
              {"duration", k.duration},
              {"time_step", k.time_step},
              {"criterion", k.criterion},
              {"max_redraws", k.max_redraws}};
  m.seed = k.seed;
  m.warnings = map.diagnostics;
  write_manifest(o, m, timer.seconds());
  for (const auto& d : map.diagnostics) *c.err << "warning: " << d << "\n";
  *c.out << "admissible points " << s.admissible_count << "/" << map.cells.size() << "; suggested nu=" << s.point.nu
         << " mu=" << s.point.mu << "\n";
  if (!s.message.empty()) *c.out << s.message << "\n";
  return kOk;
}

struct BenchmarkArgs {
  std::string suite;
  SuiteOptions options;
  std::string variant;
  int experiments = 0;
  std::uint64_t seed = 1;
  std::string unlocked = "reject";
};

int cmd_benchmark(const Common& c, const BenchmarkArgs& b) {
  Timer timer;
  const UnlockedPolicy policy = parse_policy(b.unlocked);
  SuiteOptions options = b.options;
  if (!b.variant.empty()) options.variant = b.variant;
  if (b.experiments > 0) options.experiments = b.experiments;
  const std::vector<BenchmarkCase> cases = suite_cases(b.suite, options);

  Outputs o(c.out_dir);
  std::ostringstream csv;
  csv << "name,seed,experiments,locked,ppv,acc,tpr,fpr,tp,fp,tn,fn\n";
  Json rows = Json::array();
  std::vector<std::string> warnings;
  for (const auto& bc : cases) {
    const BenchmarkRow row = run_case(bc, b.seed, policy);
    const auto field = [](const Metric& m) { return m.value ? format_double(*m.value) : std::string(); };
    csv << row.name << ',' << row.seed << ',' << row.experiments << ',' << row.locked << ',' << field(row.metrics.ppv)
        << ',' << field(row.metrics.acc) << ',' << field(row.metrics.tpr) << ',' << field(row.metrics.fpr) << ','
        << row.counts.true_positive << ',' << row.counts.false_positive << ',' << row.counts.true_negative << ','
        << row.counts.false_negative << '\n';
    o.write("matrices/" + slug(row.name) + ".csv", format_matrix_csv(row.result.post_threshold.values));
    Json r = {{"name", row.name},
              {"recipe", recipe_json(bc.recipe)},
              {"coupling", bc.sim.coupling},
              {"params", bc.params},
              {"experiments", row.experiments},
              {"locked", row.locked},
              {"metrics", metrics_json(row.counts, row.metrics)}};
    rows.push_back(r);
    warnings.insert(warnings.end(), row.result.warnings.begin(), row.result.warnings.end());
    *c.out << std::left << std::setw(20) << row.name << metrics_line(row.metrics) << "\n";
  }
  o.write("benchmark.csv", csv.str());
  o.write("benchmark.json", rows.dump(2) + "\n");
  Manifest m = new_manifest(c, "benchmark");
  m.config = {{"suite", b.suite}, {"cases", rows.size()}, {"unlocked_policy", b.unlocked}};
  m.seed = b.seed;
  m.warnings = warnings;
  write_manifest(o, m, timer.seconds());
  for (const auto& w : warnings) *c.err << "warning: " << w << "\n";
  return kOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

int cmd_rerun(const Common& c, const std::string& manifest_path, int depth) {
  if (depth > 0) throw ValidationError("a manifest cannot replay another rerun");
  const Json m = Json::parse(read_text(manifest_path));
  std::vector<std::string> args = m.at("arguments").get<std::vector<std::string>>();
  args.push_back("--out");
  args.push_back(c.out_dir);
  return dispatch(args, *c.out, *c.err, depth + 1);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
  CLI::App app{"Directed network reconstruction from coupled-oscillator phase data", "redraw"};
  app.set_version_flag("--version", REDRAW_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  common.args = args;
  common.out = &out;
  common.err = &err;
  common.out_dir = default_out_dir().string();
  app.add_option("--out,-o", common.out_dir, "Output directory (default $REDRAW_OUTPUT_DIR or ./redraw-out)");

  GenerateArgs generate;
  auto* gen = app.add_subcommand("generate", "Build a topology and write its network spec");
  gen->add_option("topology", generate.recipe.topology, "Preset or kind: " + [] {
    std::string s;
    for (const auto& n : preset_names()) s += n + ", ";
    return s + "chain, star, er, file, ...";
  }())->required();
  add_recipe_options(gen, generate.recipe, true);
  gen->add_option("--format", generate.formats, "Formats: json, csv (edge list), dot")->delimiter(',');

  SimulateArgs simulate;
  auto* sim = app.add_subcommand("simulate", "Simulate K experiments on a network");
  sim->add_option("--network,-n", simulate.network, "Network JSON or edge-list CSV")->required();
  add_sim_options(sim, simulate.sim);

  ReconstructArgs reconstruct;
  auto* rec = app.add_subcommand("reconstruct", "Infer the influence matrix from phase traces");
  rec->add_option("traces", reconstruct.traces, "Trace CSV files, one per experiment");
  rec->add_option("--trace-dir", reconstruct.trace_dir, "Directory of trace CSV files");
  rec->add_option("--chi", reconstruct.sim.chi, "Lock bound on the coefficient of variation")->capture_default_str();
  rec->add_option("--settle-time", reconstruct.sim.settle, "Start of the lock statistics window")->capture_default_str();
  rec->add_option("--unlocked", reconstruct.sim.unlocked, "Unlocked experiments: reject | warn")->capture_default_str();
  add_recon_options(rec, reconstruct.recon);

  EvaluateArgs evaluate;
  auto* eva = app.add_subcommand("evaluate", "Score an inferred matrix against the true network");
  eva->add_option("--truth", evaluate.truth, "True network, JSON or edge-list CSV")->required();
  eva->add_option("--inferred", evaluate.inferred, "Inferred matrix, CSV or influence JSON")->required();

  PipelineArgs pipeline;
  auto* pipe = app.add_subcommand("pipeline", "Simulate, reconstruct and evaluate in one run");
  pipe->add_option("--network", pipeline.network, "Network JSON or edge-list CSV");
  pipe->add_option("--topology", pipeline.recipe.topology, "Preset or topology kind");
  add_recipe_options(pipe, pipeline.recipe, false);
  add_sim_options(pipe, pipeline.sim);
  add_recon_options(pipe, pipeline.recon);
  pipe->add_flag("--save-traces", pipeline.save_traces, "Also write the phase traces");

  CalibrateArgs cal;
  auto* calc = app.add_subcommand("calibrate", "Map (nu, mu) against the metric bounds on random graphs");
  calc->add_option("--n", cal.config.n, "Target network size")->capture_default_str();
  calc->add_option("--graphs", cal.config.graphs, "Number of test graphs N")->capture_default_str();
  calc->add_option("--experiments,--k,-k", cal.config.experiments, "Experiments per graph K")->capture_default_str();
  calc->add_option("--grid-step", cal.config.grid_step, "Grid step")->capture_default_str();
  calc->add_option("--grid-max", cal.config.grid_max, "Largest grid value")->capture_default_str();
  calc->add_option("--bounds", cal.bounds, "Bounds, e.g. ppv=40,acc=70,tpr=40,fpr=30");
  cal.p_opt = calc->add_option("--p", cal.p, "Edge probability, default ln(n)/(2n)");
  calc->add_option("--coupling-per-node", cal.config.coupling_per_node, "c = value * n")->capture_default_str();
  calc->add_option("--phi", cal.config.base_phase_shift, "Base phase shift phi")->capture_default_str();
  calc->add_option("--duration", cal.config.duration, "Experiment length T")->capture_default_str();
  calc->add_option("--dt", cal.config.time_step, "RK4 time step")->capture_default_str();
  calc->add_option("--chi", cal.config.criterion.chi, "Lock bound")->capture_default_str();
  calc->add_option("--settle-time", cal.config.criterion.settle_time, "Start of the lock window")->capture_default_str();
  calc->add_option("--max-redraws", cal.config.max_redraws, "Redraws of a graph that fails to lock")->capture_default_str();
  calc->add_option("--seed", cal.config.seed, "Master seed")->capture_default_str();
  calc->add_flag("--progress", cal.progress, "Report progress on stderr");

  BenchmarkArgs bench;
  auto* ben = app.add_subcommand("benchmark", "Run a reference experiment suite");
  ben->add_option("suite", bench.suite, "fig2 | fig4 | fig5 | k-sweep")->required();
  ben->add_option("--variant", bench.variant, "fig5 variant: regular | rewired");
  ben->add_option("--topology", bench.options.topology, "k-sweep topology: chain4 | ring")->capture_default_str();
  ben->add_option("--k-values", bench.options.k_values, "k-sweep values of K")->delimiter(',');
  ben->add_option("--experiments,--k,-k", bench.experiments, "Override K for every case");
  ben->add_option("--seed", bench.seed, "Master seed")->capture_default_str();
  ben->add_option("--unlocked", bench.unlocked, "Unlocked experiments: reject | warn")->capture_default_str();

  std::string manifest_path;
  auto* rerun = app.add_subcommand("rerun", "Replay the command recorded in a manifest");
  rerun->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(common, generate);
    if (*sim) return cmd_simulate(common, simulate);
    if (*rec) return cmd_reconstruct(common, reconstruct);
    if (*eva) return cmd_evaluate(common, evaluate);
    if (*pipe) return cmd_pipeline(common, pipeline);
    if (*calc) return cmd_calibrate(common, cal);
    if (*ben) return cmd_benchmark(common, bench);
    if (*rerun) return cmd_rerun(common, manifest_path, depth);
  } catch (const UnlockedExperimentError& e) {
    err << "error: " << e.what() << "\n";
    return kUnlocked;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return dispatch(args, out, err, 0);
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace redraw::cli
