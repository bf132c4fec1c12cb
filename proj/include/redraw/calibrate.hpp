#pragma once

// A-priori selection of the DPI threshold nu and the cut threshold mu:
// reconstruct N random test graphs of the target size over a (nu, mu) grid,
// average the four metrics across graphs and mark the grid points where
//
//   E[PPV] >= PPV*,  E[ACC] >= ACC*,  E[TPR] >= TPR*,  E[FPR] <= FPR*
//
// hold simultaneously.

#include "redraw/metrics.hpp"
#include "redraw/model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace redraw {

/// Directed G(n, p): each ordered pair i != j gets a_ij = 1 with probability p.
NetworkSpec erdos_renyi_directed(std::size_t n, double p, std::uint64_t seed);

/// ln(n) / (2n).
double default_edge_probability(std::size_t n);

struct MetricBounds {
  double ppv = 40.0;
  double acc = 70.0;
  double tpr = 40.0;
  double fpr = 30.0;
};

struct CalibrationConfig {
  std::size_t n = 5;
  std::size_t graphs = 100;    // N
  int experiments = 10;        // K per graph
  double grid_step = 0.01;
  double grid_max = 0.99;
  std::optional<double> edge_probability;  // defaults to ln(n) / (2n)
  MetricBounds bounds;
  double coupling_per_node = 2.5;  // c = 2.5 n
  double base_phase_shift = kPi / 4.0;
  double duration = 30.0;
  double time_step = 0.01;
  LockCriterion criterion;
  int max_redraws = 5;
  std::uint64_t seed = 1;

  double probability() const;
  double coupling() const { return coupling_per_node * static_cast<double>(n); }
};

void validate_config(const CalibrationConfig& config);

/// (nu, mu) grid points with 0 <= mu <= nu <= grid_max, ordered by nu then mu.
/// Values are index * step so they are exact multiples of the step.
struct GridPoint {
  double nu = 0.0;
  double mu = 0.0;
};

std::vector<GridPoint> threshold_grid(double step, double max_value);

/// Mean of a metric over graphs, excluding graphs where it is undefined.
struct AveragedMetric {
  std::optional<double> mean;
  std::size_t excluded = 0;
};

struct CalibrationCell {
  GridPoint point;
  AveragedMetric ppv;
  AveragedMetric acc;
  AveragedMetric tpr;
  AveragedMetric fpr;
  int satisfied = 0;  // bound conditions met, 0..4
  bool admissible = false;
};

/// Per-graph record of the test topologies that were reconstructed.
struct CalibrationGraph {
  std::uint64_t seed = 0;
  int redraws = 0;
  bool locked = true;
  std::size_t edges = 0;
  double algebraic_connectivity = 0.0;
  double mean_cv = 0.0;  // mean coefficient of variation over the K experiments
};

struct CalibrationMap {
  CalibrationConfig config;
  std::vector<CalibrationCell> cells;
  std::vector<CalibrationGraph> graphs;
  std::vector<std::string> diagnostics;

  std::size_t admissible_count() const;
};

/// Number of the four bound predicates that hold; an absent mean fails its
/// predicate.
int satisfied_bounds(const CalibrationCell& cell, const MetricBounds& bounds);

/// Recomputes satisfied/admissible for new bounds without re-simulating.
CalibrationMap apply_bounds(CalibrationMap map, const MetricBounds& bounds);

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Runs the full calibration. Each graph is simulated once; the raw influence
/// matrix is reused for every grid point. A graph with an unlocked experiment
/// is redrawn with a fresh seed up to max_redraws times; if it still fails
/// it is kept and reported in diagnostics.
CalibrationMap calibrate(const CalibrationConfig& config, const ProgressCallback& progress = {});

struct ThresholdSuggestion {
  GridPoint point;
  int satisfied = 0;
  bool admissible = false;
  std::size_t admissible_count = 0;
  GridPoint centroid;
  std::string message;
};

/// The admissible point nearest the centroid of the admissible region, or,
/// when none is admissible, the point nearest the centroid of the cells with
/// the highest satisfied count. Ties go to the earlier grid point.
ThresholdSuggestion suggest_thresholds(const CalibrationMap& map);

}  // namespace redraw
