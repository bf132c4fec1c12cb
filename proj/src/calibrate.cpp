#include "redraw/calibrate.hpp"

#include "redraw/reconstruct.hpp"
#include "redraw/rng.hpp"
#include "redraw/simulator.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace redraw {

NetworkSpec erdos_renyi_directed(std::size_t n, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("edge probability p must lie in (0, 1)");
  Engine engine = make_engine(seed, {kGraphStream});
  const auto size = static_cast<Eigen::Index>(n);
  Matrix w = Matrix::Zero(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) {
      if (i == j) continue;
      if (uniform(engine, 0.0, 1.0) < p) w(i, j) = 1.0;
    }
  }
  return NetworkSpec(std::move(w));
}

double default_edge_probability(std::size_t n) {
  const auto size = static_cast<double>(n);
  return std::log(size) / (2.0 * size);
}

double CalibrationConfig::probability() const {
  return edge_probability.value_or(default_edge_probability(n));
}

void validate_config(const CalibrationConfig& config) {
  if (config.n < 2) throw ValidationError("calibration needs n >= 2");
  if (config.graphs < 1) throw ValidationError("calibration needs at least one test graph");
  if (config.experiments < 1) throw ValidationError("experiment count K must be >= 1");
  const double p = config.probability();
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("edge probability p must lie in (0, 1)");
  if (!(config.grid_step > 0.0)) throw ValidationError("grid step must be > 0");
  if (!(config.grid_max >= 0.0 && config.grid_max < 1.0)) {
    throw ValidationError("grid maximum must lie in [0, 1)");
  }
  if (config.max_redraws < 0) throw ValidationError("redraw cap must be >= 0");
}

std::vector<GridPoint> threshold_grid(double step, double max_value) {
  if (!(step > 0.0)) throw ValidationError("grid step must be > 0");
  // The epsilon keeps 0.99 / 0.01 from rounding down to 98.
  const auto count = static_cast<std::size_t>(std::floor(max_value / step + 1e-9)) + 1;
  std::vector<GridPoint> grid;
  grid.reserve(count * (count + 1) / 2);
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      grid.push_back({static_cast<double>(a) * step, static_cast<double>(b) * step});
    }
  }
  return grid;
}

std::size_t CalibrationMap::admissible_count() const {
  std::size_t count = 0;
  for (const auto& c : cells) count += c.admissible ? 1 : 0;
  return count;
}

int satisfied_bounds(const CalibrationCell& cell, const MetricBounds& bounds) {
  int count = 0;
  if (cell.ppv.mean && *cell.ppv.mean >= bounds.ppv) ++count;
  if (cell.acc.mean && *cell.acc.mean >= bounds.acc) ++count;
  if (cell.tpr.mean && *cell.tpr.mean >= bounds.tpr) ++count;
  if (cell.fpr.mean && *cell.fpr.mean <= bounds.fpr) ++count;
  return count;
}

CalibrationMap apply_bounds(CalibrationMap map, const MetricBounds& bounds) {
  map.config.bounds = bounds;
  for (auto& cell : map.cells) {
    cell.satisfied = satisfied_bounds(cell, bounds);
    cell.admissible = cell.satisfied == 4;
  }
  return map;
}

namespace {

struct GraphOutcome {
  CalibrationGraph record;
  std::vector<MetricsReport> reports;  // one per grid point
  std::string diagnostic;
};

GraphOutcome evaluate_graph(const CalibrationConfig& config, std::size_t index,
                            const std::vector<GridPoint>& grid) {
  SimConfig sim;
  sim.coupling = config.coupling();
  sim.base_phase_shift = config.base_phase_shift;
  sim.duration = config.duration;
  sim.time_step = config.time_step;

  GraphOutcome out;
  NetworkSpec spec;
  ExperimentBatch batch;
  for (int attempt = 0; attempt <= config.max_redraws; ++attempt) {
    const std::uint64_t graph_seed =
        derive_seed(config.seed, {kGraphStream, index, static_cast<std::uint64_t>(attempt)});
    spec = erdos_renyi_directed(config.n, config.probability(), graph_seed);
    batch = run_batch(spec, sim, config.experiments, graph_seed, config.criterion);
    out.record.seed = graph_seed;
    out.record.redraws = attempt;
    out.record.locked = batch.locked_count() == batch.size();
    if (out.record.locked) break;
  }
  if (!out.record.locked) {
    std::ostringstream os;
    os << "test graph " << index + 1 << " did not phase-lock after " << config.max_redraws
       << " redraws; kept with its unlocked experiments";
    out.diagnostic = os.str();
  }
  out.record.edges = spec.edge_count();
  out.record.algebraic_connectivity = algebraic_connectivity(spec);
  double cv_sum = 0.0;
  for (const auto& r : batch.lock_reports) {
    cv_sum += r.coefficient_of_variation.value_or(std::numeric_limits<double>::quiet_NaN());
  }
  out.record.mean_cv = cv_sum / static_cast<double>(batch.size());

  const InfluenceMatrix raw = experiment_average(batch, UnlockedPolicy::warn_and_include);
  const auto candidates = dpi_candidates(raw);
  out.reports.reserve(grid.size());
  for (const GridPoint& point : grid) {
    const InfluenceMatrix inferred = threshold_cut(dpi_filter(raw, candidates, point.nu), point.mu);
    out.reports.push_back(report(confusion(spec, inferred)));
  }
  return out;
}

void accumulate(AveragedMetric& avg, double& sum, std::size_t& present, const Metric& m) {
  if (m.value) {
    sum += *m.value;
    ++present;
  } else {
    ++avg.excluded;
  }
}

}  // namespace

CalibrationMap calibrate(const CalibrationConfig& config, const ProgressCallback& progress) {
  validate_config(config);
  const std::vector<GridPoint> grid = threshold_grid(config.grid_step, config.grid_max);
  std::vector<GraphOutcome> outcomes(config.graphs);

  std::size_t done = 0;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t g = 0; g < config.graphs; ++g) {
    outcomes[g] = evaluate_graph(config, g, grid);
    if (progress) {
#pragma omp critical(redraw_calibration_progress)
      progress(++done, config.graphs);
    }
  }

  CalibrationMap map;
  map.config = config;
  for (const auto& o : outcomes) {
    map.graphs.push_back(o.record);
    if (!o.diagnostic.empty()) map.diagnostics.push_back(o.diagnostic);
  }

  map.cells.resize(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    CalibrationCell& cell = map.cells[c];
    cell.point = grid[c];
    double sums[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t present[4] = {0, 0, 0, 0};
    for (const auto& o : outcomes) {
      const MetricsReport& r = o.reports[c];
      accumulate(cell.ppv, sums[0], present[0], r.ppv);
      accumulate(cell.acc, sums[1], present[1], r.acc);
      accumulate(cell.tpr, sums[2], present[2], r.tpr);
      accumulate(cell.fpr, sums[3], present[3], r.fpr);
    }
    AveragedMetric* metrics[4] = {&cell.ppv, &cell.acc, &cell.tpr, &cell.fpr};
    for (int m = 0; m < 4; ++m) {
      if (present[m] > 0) metrics[m]->mean = sums[m] / static_cast<double>(present[m]);
    }
  }
  return apply_bounds(std::move(map), config.bounds);
}

namespace {

GridPoint centroid_of(const std::vector<const CalibrationCell*>& cells) {
  GridPoint c;
  for (const auto* cell : cells) {
    c.nu += cell->point.nu;
    c.mu += cell->point.mu;
  }
  c.nu /= static_cast<double>(cells.size());
  c.mu /= static_cast<double>(cells.size());
  return c;
}

const CalibrationCell* nearest_to(const std::vector<const CalibrationCell*>& cells, GridPoint target) {
  const CalibrationCell* best = nullptr;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto* cell : cells) {
    const double dn = cell->point.nu - target.nu;
    const double dm = cell->point.mu - target.mu;
    const double d = dn * dn + dm * dm;
    if (d < best_distance) {
      best_distance = d;
      best = cell;
    }
  }
  return best;
}

}  // namespace

ThresholdSuggestion suggest_thresholds(const CalibrationMap& map) {
  if (map.cells.empty()) throw ValidationError("calibration map is empty");
  ThresholdSuggestion s;
  s.admissible_count = map.admissible_count();

  int best_satisfied = 0;
  for (const auto& cell : map.cells) best_satisfied = std::max(best_satisfied, cell.satisfied);
  std::vector<const CalibrationCell*> pool;
  for (const auto& cell : map.cells) {
    if (cell.satisfied == best_satisfied) pool.push_back(&cell);
  }
  s.centroid = centroid_of(pool);
  const CalibrationCell* chosen = nearest_to(pool, s.centroid);
  s.point = chosen->point;
  s.satisfied = chosen->satisfied;
  s.admissible = chosen->admissible;
  if (!s.admissible) {
    std::ostringstream os;
    os << "no fully admissible region; best cells satisfy " << best_satisfied
       << " of 4 bounds - consider relaxing bounds";
    s.message = os.str();
  }
  return s;
}

}  // namespace redraw
