#pragma once

// Directed, weighted topology reconstruction from phase traces:
//
//   1. relative phase     dtheta_ij(t) = theta_i(t) - theta_j(t), wrapped to (-pi, pi]
//   2. attention          zeta = (1 + cos dtheta) / 2 when dtheta <= 0, else 0
//   3. time average       rho_ij,k = (1/T) int_0^T zeta dt   (trapezoidal rule)
//   4. experiment average rho_ij = mean_k rho_ij,k
//   5. DPI pruning        weakest edge of a connected triplet removed when below nu
//   6. thresholding       entries below mu set to 0

#include "redraw/model.hpp"
#include "redraw/simulator.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace redraw {

/// An experiment in the batch failed the phase-locking check.
class UnlockedExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class UnlockedPolicy { reject, warn_and_include };

/// Wraps an angle to (-pi, pi]; +pi stays +pi.
double wrap_angle(double angle);

/// theta_i - theta_j per sample, wrapped to (-pi, pi].
std::vector<double> relative_phase(const PhaseTrace& trace, std::size_t i, std::size_t j);

/// (1 + cos x) / 2 for x <= 0, 0 for x > 0.
double zeta(double relative_phase);

/// Samples first..last of a trace, both inclusive.
struct SampleRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

/// Time average of zeta(dtheta_ij) over the whole trace.
double time_average(const PhaseTrace& trace, std::size_t i, std::size_t j);

/// Time average of zeta(dtheta_ij) over samples first..last inclusive.
double time_average(const PhaseTrace& trace, std::size_t i, std::size_t j, SampleRange range);

/// All rho_ij,k of one experiment over the given sample range.
Matrix correlation_matrix(const PhaseTrace& trace, SampleRange range);
Matrix correlation_matrix(const PhaseTrace& trace);

struct PairwiseCorrelation {
  std::vector<Matrix> per_experiment;  // rho_ij,k
  InfluenceMatrix average;             // rho_ij, stage raw
};

/// Steps 1-4 over a set of traces. lock_reports may be empty (no lock check)
/// or hold one report per trace. `warnings` receives one line per unlocked
/// experiment included under warn_and_include.
PairwiseCorrelation pairwise_correlation(std::span<const PhaseTrace> traces,
                                         std::span<const LockReport> lock_reports,
                                         UnlockedPolicy policy = UnlockedPolicy::reject,
                                         std::vector<std::string>* warnings = nullptr);

/// Steps 1-4 on a batch: the raw influence matrix.
InfluenceMatrix experiment_average(const ExperimentBatch& batch,
                                   UnlockedPolicy policy = UnlockedPolicy::reject,
                                   std::vector<std::string>* warnings = nullptr);

/// Elementwise mean of per-experiment matrices.
InfluenceMatrix experiment_average(std::span<const Matrix> per_experiment);

/// Data-processing-inequality pruning. For each ordered triplet (w, y, z)
/// of distinct nodes with rho_zw, rho_yw, rho_zy > 0, rho_zw is marked when
/// rho_zw < rho_yw, rho_zw < rho_zy and rho_zw < nu. Marks are evaluated on
/// the input and applied together afterwards.
InfluenceMatrix dpi_filter(const InfluenceMatrix& m, double nu);

/// (z, w) entries that some y dominates (rho_zw < rho_yw and rho_zw < rho_zy,
/// all three positive). dpi_filter removes exactly the candidates below nu,
/// so calibration computes this once per graph and reuses it for every nu.
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> dpi_candidates(const InfluenceMatrix& m);

/// dpi_filter with precomputed candidates.
InfluenceMatrix dpi_filter(const InfluenceMatrix& m,
                           const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& candidates,
                           double nu);

/// Sets entries strictly below mu to zero.
InfluenceMatrix threshold_cut(const InfluenceMatrix& m, double mu);

/// Steps 5-6 on a raw matrix.
InfluenceMatrix filter(const InfluenceMatrix& raw, double nu, double mu);

/// Every stage of one reconstruction, for reporting.
struct PipelineResult {
  InfluenceMatrix raw;
  InfluenceMatrix post_dpi;
  InfluenceMatrix post_threshold;
  std::vector<std::string> warnings;
};

PipelineResult run_pipeline(std::span<const PhaseTrace> traces, std::span<const LockReport> lock_reports,
                            const ReconstructionParams& params,
                            UnlockedPolicy policy = UnlockedPolicy::reject);

/// Steps 1-6 over a batch.
InfluenceMatrix reconstruct(const ExperimentBatch& batch, const ReconstructionParams& params,
                            UnlockedPolicy policy = UnlockedPolicy::reject);

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;
  SampleRange samples;
};

struct WindowedReconstruction {
  std::vector<TimeWindow> windows;
  std::vector<InfluenceMatrix> matrices;  // post_threshold, one per window

  std::size_t size() const { return windows.size(); }
};

/// Consecutive windows of length window_length covering [0, T]; the last one
/// may be shorter. Boundaries snap to the sample grid. Throws when a window
/// would hold fewer than 2 samples.
std::vector<TimeWindow> uniform_windows(const PhaseTrace& trace, double window_length);

/// Windows from explicit boundaries t_0 < ... < t_L inside [0, T].
std::vector<TimeWindow> boundary_windows(const PhaseTrace& trace, std::span<const double> boundaries);

WindowedReconstruction reconstruct_windowed(std::span<const PhaseTrace> traces,
                                            std::span<const LockReport> lock_reports,
                                            const ReconstructionParams& params,
                                            std::span<const TimeWindow> windows,
                                            UnlockedPolicy policy = UnlockedPolicy::reject);

/// Full pipeline per window of length window_length.
WindowedReconstruction reconstruct_windowed(const ExperimentBatch& batch,
                                            const ReconstructionParams& params, double window_length,
                                            UnlockedPolicy policy = UnlockedPolicy::reject);

/// Full pipeline per window given by params.window_boundaries.
WindowedReconstruction reconstruct_windowed(const ExperimentBatch& batch,
                                            const ReconstructionParams& params,
                                            UnlockedPolicy policy = UnlockedPolicy::reject);

}  // namespace redraw
