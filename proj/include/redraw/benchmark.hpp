#pragma once

// Canned reconstruction runs on the reference topologies.
//
//   fig2     4-node chains, star and block     c = 10, nu = 0.9,  mu = 0.8
//   fig4     17-node hub graphs                c = 40, nu = 0.9,  mu = 0.35
//   fig5     20-node regular / rewired rings   c = 50, nu = 0.65, mu = 0.6
//   k-sweep  one topology at K = 50, 75, 100
//
// Every case uses K = 50 experiments, T = 30 s, dt = 0.01 and phi = pi/4
// unless overridden.

#include "redraw/metrics.hpp"
#include "redraw/model.hpp"
#include "redraw/reconstruct.hpp"
#include "redraw/simulator.hpp"
#include "redraw/topologies.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace redraw {

struct BenchmarkCase {
  std::string name;
  TopologyRecipe recipe;
  SimConfig sim;  // template: coupling, phase shift, duration, step
  int experiments = 50;
  ReconstructionParams params;
  LockCriterion criterion;
};

/// The case for one preset name with its reference coupling and thresholds.
BenchmarkCase preset_case(std::string_view preset_name);

struct SuiteOptions {
  std::optional<std::string> variant;   // fig5: regular | rewired
  std::string topology = "chain4";      // k-sweep: chain4 | ring
  std::vector<int> k_values = {50, 75, 100};
  std::optional<int> experiments;       // overrides K (not for k-sweep)
};

std::vector<std::string> suite_names();
std::vector<BenchmarkCase> suite_cases(std::string_view suite, const SuiteOptions& options = {});

struct BenchmarkRow {
  std::string name;
  std::uint64_t seed = 0;
  int experiments = 0;
  std::size_t locked = 0;
  NetworkSpec truth;
  PipelineResult result;
  ConfusionCounts counts;
  MetricsReport metrics;
};

BenchmarkRow run_case(const BenchmarkCase& c, std::uint64_t seed,
                      UnlockedPolicy policy = UnlockedPolicy::reject);

/// Mean raw rho over true edges, split into edges touching `hub` (0-based)
/// and the rest.
struct GroupMeans {
  double intra = 0.0;
  double hub = 0.0;
};

GroupMeans hub_split_means(const NetworkSpec& truth, const InfluenceMatrix& raw, std::size_t hub);

}  // namespace redraw
