#include "redraw/reconstruct.hpp"

#include <cmath>
#include <sstream>

namespace redraw {

namespace {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

SampleRange full_range(const PhaseTrace& trace) {
  if (trace.sample_count() < 2) throw ValidationError("trace needs at least 2 samples");
  return {0, trace.sample_count() - 1};
}

void check_range(const PhaseTrace& trace, SampleRange range) {
  if (range.last >= trace.sample_count() || range.last <= range.first) {
    throw ValidationError("sample range must hold at least 2 samples inside the trace");
  }
}

void check_pair(const PhaseTrace& trace, std::size_t i, std::size_t j) {
  if (i >= trace.node_count() || j >= trace.node_count()) {
    throw ValidationError("node index out of range");
  }
  if (i == j) throw ValidationError("relative phase needs two distinct nodes");
}

// Trapezoidal mean of zeta(theta_i - theta_j) over the range, written once
// for both directions since zeta_ij and zeta_ji share the cosine.
void pair_average(const PhaseTrace& trace, std::size_t i, std::size_t j, SampleRange range,
                  double& rho_ij, double& rho_ji) {
  const auto ci = static_cast<Eigen::Index>(i);
  const auto cj = static_cast<Eigen::Index>(j);
  double sum_ij = 0.0;
  double sum_ji = 0.0;
  for (std::size_t m = range.first; m <= range.last; ++m) {
    const auto row = static_cast<Eigen::Index>(m);
    const double delta = wrap_angle(trace.phases(row, ci) - trace.phases(row, cj));
    const double w = (m == range.first || m == range.last) ? 0.5 : 1.0;
    sum_ij += w * zeta(delta);
    // wrap(-delta) differs from -delta only at delta = pi, where both zetas vanish.
    sum_ji += w * zeta(delta == kPi ? kPi : -delta);
  }
  // Uniform grid: (1/T) * sum * dt = sum / intervals.
  const auto intervals = static_cast<double>(range.last - range.first);
  rho_ij = sum_ij / intervals;
  rho_ji = sum_ji / intervals;
}

}  // namespace

double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

std::vector<double> relative_phase(const PhaseTrace& trace, std::size_t i, std::size_t j) {
  check_pair(trace, i, j);
  std::vector<double> out(trace.sample_count());
  const auto ci = static_cast<Eigen::Index>(i);
  const auto cj = static_cast<Eigen::Index>(j);
  for (std::size_t m = 0; m < out.size(); ++m) {
    const auto row = static_cast<Eigen::Index>(m);
    out[m] = wrap_angle(trace.phases(row, ci) - trace.phases(row, cj));
  }
  return out;
}

double zeta(double relative_phase) {
  return relative_phase <= 0.0 ? 0.5 * (1.0 + std::cos(relative_phase)) : 0.0;
}

double time_average(const PhaseTrace& trace, std::size_t i, std::size_t j) {
  return time_average(trace, i, j, full_range(trace));
}

double time_average(const PhaseTrace& trace, std::size_t i, std::size_t j, SampleRange range) {
  check_pair(trace, i, j);
  check_range(trace, range);
  double rho_ij = 0.0;
  double rho_ji = 0.0;
  pair_average(trace, i, j, range, rho_ij, rho_ji);
  return rho_ij;
}

Matrix correlation_matrix(const PhaseTrace& trace, SampleRange range) {
  check_range(trace, range);
  const std::size_t n = trace.node_count();
  Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double rho_ij = 0.0;
      double rho_ji = 0.0;
      pair_average(trace, i, j, range, rho_ij, rho_ji);
      rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rho_ij;
      rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rho_ji;
    }
  }
  return rho;
}

Matrix correlation_matrix(const PhaseTrace& trace) { return correlation_matrix(trace, full_range(trace)); }

InfluenceMatrix experiment_average(std::span<const Matrix> per_experiment) {
  if (per_experiment.empty()) throw ValidationError("experiment count K must be >= 1");
  Matrix sum = per_experiment.front();
  for (std::size_t k = 1; k < per_experiment.size(); ++k) {
    if (per_experiment[k].rows() != sum.rows() || per_experiment[k].cols() != sum.cols()) {
      throw ValidationError("per-experiment matrices differ in size");
    }
    sum += per_experiment[k];
  }
  return {sum / static_cast<double>(per_experiment.size()), Stage::raw};
}

namespace {

void check_locks(std::span<const PhaseTrace> traces, std::span<const LockReport> lock_reports,
                 UnlockedPolicy policy, std::vector<std::string>* warnings) {
  if (lock_reports.empty()) return;
  if (lock_reports.size() != traces.size()) {
    throw ValidationError("expected one lock report per trace");
  }
  for (std::size_t k = 0; k < lock_reports.size(); ++k) {
    if (lock_reports[k].locked) continue;
    std::ostringstream os;
    os << "experiment " << traces[k].experiment_index << " is not phase-locked";
    if (!lock_reports[k].diagnostic.empty()) os << " (" << lock_reports[k].diagnostic << ")";
    if (policy == UnlockedPolicy::reject) throw UnlockedExperimentError(os.str());
    if (warnings) warnings->push_back(os.str());
  }
}

PairwiseCorrelation correlate(std::span<const PhaseTrace> traces, std::span<const LockReport> lock_reports,
                              UnlockedPolicy policy, std::vector<std::string>* warnings,
                              const TimeWindow* window) {
  if (traces.empty()) throw ValidationError("experiment count K must be >= 1");
  check_locks(traces, lock_reports, policy, warnings);
  PairwiseCorrelation out;
  out.per_experiment.resize(traces.size());
  const std::size_t n = traces.front().node_count();
  for (const auto& t : traces) {
    if (t.node_count() != n) throw ValidationError("traces differ in node count");
  }
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < traces.size(); ++k) {
    out.per_experiment[k] =
        window ? correlation_matrix(traces[k], window->samples) : correlation_matrix(traces[k]);
  }
  out.average = experiment_average(out.per_experiment);
  return out;
}

}  // namespace

PairwiseCorrelation pairwise_correlation(std::span<const PhaseTrace> traces,
                                         std::span<const LockReport> lock_reports, UnlockedPolicy policy,
                                         std::vector<std::string>* warnings) {
  return correlate(traces, lock_reports, policy, warnings, nullptr);
}

InfluenceMatrix experiment_average(const ExperimentBatch& batch, UnlockedPolicy policy,
                                   std::vector<std::string>* warnings) {
  return pairwise_correlation(batch.traces, batch.lock_reports, policy, warnings).average;
}

BoolMatrix dpi_candidates(const InfluenceMatrix& m) {
  const auto n = m.values.rows();
  const Matrix& rho = m.values;
  BoolMatrix marked = BoolMatrix::Constant(n, n, false);
  for (Eigen::Index z = 0; z < n; ++z) {
    for (Eigen::Index w = 0; w < n; ++w) {
      if (z == w) continue;
      const double zw = rho(z, w);
      if (!(zw > 0.0)) continue;
      for (Eigen::Index y = 0; y < n; ++y) {
        if (y == z || y == w) continue;
        const double yw = rho(y, w);
        const double zy = rho(z, y);
        if (yw > 0.0 && zy > 0.0 && zw < yw && zw < zy) {
          marked(z, w) = true;
          break;
        }
      }
    }
  }
  return marked;
}

InfluenceMatrix dpi_filter(const InfluenceMatrix& m, const BoolMatrix& candidates, double nu) {
  if (!(nu >= 0.0 && nu < 1.0)) throw ValidationError("dpi threshold nu must lie in [0, 1)");
  InfluenceMatrix out{m.values, Stage::post_dpi};
  for (Eigen::Index z = 0; z < out.values.rows(); ++z) {
    for (Eigen::Index w = 0; w < out.values.cols(); ++w) {
      if (candidates(z, w) && m.values(z, w) < nu) out.values(z, w) = 0.0;
    }
  }
  return out;
}

InfluenceMatrix dpi_filter(const InfluenceMatrix& m, double nu) {
  return dpi_filter(m, dpi_candidates(m), nu);
}

InfluenceMatrix threshold_cut(const InfluenceMatrix& m, double mu) {
  if (!(mu >= 0.0 && mu < 1.0)) throw ValidationError("cut threshold mu must lie in [0, 1)");
  InfluenceMatrix out{m.values, Stage::post_threshold};
  for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
      if (out.values(i, j) < mu) out.values(i, j) = 0.0;
    }
  }
  return out;
}

InfluenceMatrix filter(const InfluenceMatrix& raw, double nu, double mu) {
  validate_params({nu, mu, {}});
  return threshold_cut(dpi_filter(raw, nu), mu);
}

PipelineResult run_pipeline(std::span<const PhaseTrace> traces, std::span<const LockReport> lock_reports,
                            const ReconstructionParams& params, UnlockedPolicy policy) {
  validate_params(params);
  PipelineResult result;
  result.raw = pairwise_correlation(traces, lock_reports, policy, &result.warnings).average;
  result.post_dpi = dpi_filter(result.raw, params.dpi_threshold);
  result.post_threshold = threshold_cut(result.post_dpi, params.cut_threshold);
  return result;
}

InfluenceMatrix reconstruct(const ExperimentBatch& batch, const ReconstructionParams& params,
                            UnlockedPolicy policy) {
  return run_pipeline(batch.traces, batch.lock_reports, params, policy).post_threshold;
}

namespace {

std::size_t sample_at(const PhaseTrace& trace, double t) {
  const double dt = trace.time_step();
  const double pos = (t - trace.times.front()) / dt;
  const auto idx = static_cast<long long>(std::llround(pos));
  if (idx < 0 || static_cast<std::size_t>(idx) >= trace.sample_count()) {
    std::ostringstream os;
    os << "window boundary " << t << " s lies outside the trace";
    throw ValidationError(os.str());
  }
  return static_cast<std::size_t>(idx);
}

TimeWindow make_window(const PhaseTrace& trace, std::size_t first, std::size_t last) {
  if (last <= first) {
    std::ostringstream os;
    os << "window starting at " << trace.times[first] << " s holds fewer than 2 samples";
    throw ValidationError(os.str());
  }
  return {trace.times[first], trace.times[last], {first, last}};
}

}  // namespace

std::vector<TimeWindow> uniform_windows(const PhaseTrace& trace, double window_length) {
  if (!(window_length > 0.0)) throw ValidationError("window length must be > 0");
  if (trace.sample_count() < 2) throw ValidationError("trace needs at least 2 samples");
  const auto per_window =
      static_cast<std::size_t>(std::llround(window_length / trace.time_step()));
  if (per_window == 0) {
    throw ValidationError("window length is shorter than the sampling step; windows would hold fewer than 2 samples");
  }
  const std::size_t last_sample = trace.sample_count() - 1;
  std::vector<TimeWindow> windows;
  for (std::size_t first = 0; first < last_sample; first += per_window) {
    windows.push_back(make_window(trace, first, std::min(first + per_window, last_sample)));
  }
  return windows;
}

std::vector<TimeWindow> boundary_windows(const PhaseTrace& trace, std::span<const double> boundaries) {
  if (boundaries.size() < 2) throw ValidationError("window boundaries need at least two entries");
  std::vector<TimeWindow> windows;
  for (std::size_t l = 0; l + 1 < boundaries.size(); ++l) {
    if (!(boundaries[l + 1] > boundaries[l])) {
      throw ValidationError("window boundaries must be strictly increasing");
    }
    windows.push_back(make_window(trace, sample_at(trace, boundaries[l]), sample_at(trace, boundaries[l + 1])));
  }
  return windows;
}

WindowedReconstruction reconstruct_windowed(std::span<const PhaseTrace> traces,
                                            std::span<const LockReport> lock_reports,
                                            const ReconstructionParams& params,
                                            std::span<const TimeWindow> windows, UnlockedPolicy policy) {
  validate_params(params);
  WindowedReconstruction out;
  out.windows.assign(windows.begin(), windows.end());
  for (const TimeWindow& window : windows) {
    const InfluenceMatrix raw = correlate(traces, lock_reports, policy, nullptr, &window).average;
    out.matrices.push_back(threshold_cut(dpi_filter(raw, params.dpi_threshold), params.cut_threshold));
  }
  return out;
}

WindowedReconstruction reconstruct_windowed(const ExperimentBatch& batch, const ReconstructionParams& params,
                                            double window_length, UnlockedPolicy policy) {
  if (batch.traces.empty()) throw ValidationError("experiment count K must be >= 1");
  const auto windows = uniform_windows(batch.traces.front(), window_length);
  return reconstruct_windowed(batch.traces, batch.lock_reports, params, windows, policy);
}

WindowedReconstruction reconstruct_windowed(const ExperimentBatch& batch, const ReconstructionParams& params,
                                            UnlockedPolicy policy) {
  if (batch.traces.empty()) throw ValidationError("experiment count K must be >= 1");
  const auto windows = boundary_windows(batch.traces.front(), params.window_boundaries);
  return reconstruct_windowed(batch.traces, batch.lock_reports, params, windows, policy);
}

}  // namespace redraw
