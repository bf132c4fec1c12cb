#include "redraw/benchmark.hpp"

#include <algorithm>

namespace redraw {

namespace {

BenchmarkCase make_case(std::string name, std::string_view preset_name, double coupling, double nu, double mu) {
  BenchmarkCase c;
  c.name = std::move(name);
  c.recipe = preset(preset_name);
  c.sim.coupling = coupling;
  c.params.dpi_threshold = nu;
  c.params.cut_threshold = mu;
  return c;
}

}  // namespace

BenchmarkCase preset_case(std::string_view preset_name) {
  const std::string name(preset_name);
  if (name.rfind("fig2", 0) == 0) return make_case(name, preset_name, 10.0, 0.9, 0.8);
  if (name == "geometric" || name == "ravasz-barabasi") return make_case(name, preset_name, 40.0, 0.9, 0.35);
  if (name == "regular-ring" || name == "rewired-ring") return make_case(name, preset_name, 50.0, 0.65, 0.6);
  throw ValidationError("unknown preset '" + name + "'");
}

std::vector<std::string> suite_names() { return {"fig2", "fig4", "fig5", "k-sweep"}; }

std::vector<BenchmarkCase> suite_cases(std::string_view suite, const SuiteOptions& options) {
  std::vector<BenchmarkCase> cases;
  if (suite == "fig2") {
    for (const char* p : {"fig2a", "fig2b", "fig2c", "fig2d"}) cases.push_back(preset_case(p));
  } else if (suite == "fig4") {
    for (const char* p : {"geometric", "ravasz-barabasi"}) cases.push_back(preset_case(p));
  } else if (suite == "fig5") {
    const std::string v = options.variant.value_or("");
    if (v.empty() || v == "regular") cases.push_back(preset_case("regular-ring"));
    if (v.empty() || v == "rewired") cases.push_back(preset_case("rewired-ring"));
    if (cases.empty()) throw ValidationError("unknown fig5 variant '" + v + "' (expected regular or rewired)");
  } else if (suite == "k-sweep") {
    std::string preset_name;
    if (options.topology == "chain4" || options.topology == "chain") preset_name = "fig2a";
    else if (options.topology == "ring" || options.topology == "regular-ring") preset_name = "regular-ring";
    else preset_name = options.topology;
    if (options.k_values.empty()) throw ValidationError("k-sweep needs at least one K");
    for (int k : options.k_values) {
      BenchmarkCase c = preset_case(preset_name);
      c.name = options.topology + " K=" + std::to_string(k);
      c.experiments = k;
      cases.push_back(std::move(c));
    }
    return cases;
  } else {
    throw ValidationError("unknown benchmark suite '" + std::string(suite) + "'");
  }
  if (options.experiments) {
    for (auto& c : cases) c.experiments = *options.experiments;
  }
  return cases;
}

BenchmarkRow run_case(const BenchmarkCase& c, std::uint64_t seed, UnlockedPolicy policy) {
  BenchmarkRow row;
  row.name = c.name;
  row.seed = seed;
  row.experiments = c.experiments;
  row.truth = build(c.recipe);
  const ExperimentBatch batch = run_batch(row.truth, c.sim, c.experiments, seed, c.criterion);
  row.locked = batch.locked_count();
  row.result = run_pipeline(batch.traces, batch.lock_reports, c.params, policy);
  row.counts = confusion(row.truth, row.result.post_threshold);
  row.metrics = report(row.counts);
  return row;
}

GroupMeans hub_split_means(const NetworkSpec& truth, const InfluenceMatrix& raw, std::size_t hub) {
  double sums[2] = {0.0, 0.0};
  int counts[2] = {0, 0};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (!truth.has_edge(i, j)) continue;
      const int g = (i == hub || j == hub) ? 1 : 0;
      sums[g] += raw.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      ++counts[g];
    }
  }
  GroupMeans m;
  if (counts[0] > 0) m.intra = sums[0] / counts[0];
  if (counts[1] > 0) m.hub = sums[1] / counts[1];
  return m;
}

}  // namespace redraw
