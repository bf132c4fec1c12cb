#pragma once

// Nonuniform Kuramoto network:
//
//   dtheta_i/dt = omega_i + (c/n) sum_j a_ij sin(theta_j - theta_i - phi_ij)
//   phi_ij      = phi / a_ij  if a_ij > 0, else 0
//
// integrated with fixed-step classical RK4, plus the order-parameter based
// phase-locking check.

#include "redraw/model.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace redraw {

/// Integration produced a non-finite state.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// phi / a_ij for a_ij > 0, 0 otherwise.
double effective_phase_shift(double weight, double base_phase_shift);

/// Right-hand side of the oscillator model, with the edge list and phase
/// shifts precomputed once per (spec, config).
class KuramotoField {
 public:
  KuramotoField(const NetworkSpec& spec, const SimConfig& config);

  std::size_t size() const { return omega_.size(); }

  /// Writes dtheta/dt for the state theta into out.
  void evaluate(std::span<const double> theta, std::span<double> out) const;

 private:
  struct Edge {
    std::size_t target;  // i
    std::size_t source;  // j
    double gain;         // (c/n) a_ij
    double cos_shift;    // cos(phi_ij)
    double sin_shift;    // sin(phi_ij)
  };

  std::vector<double> omega_;
  std::vector<Edge> edges_;
  mutable std::vector<double> sin_;
  mutable std::vector<double> cos_;
};

/// dtheta/dt at state theta.
std::vector<double> derivative(const NetworkSpec& spec, const SimConfig& config,
                               std::span<const double> theta);

/// RK4 trajectory sampled every time_step from t = 0 to t = step_count * time_step.
/// Throws SimulationError on divergence.
PhaseTrace simulate(const NetworkSpec& spec, const SimConfig& config, int experiment_index = 1);

/// Order parameter r(t) e^{i psi(t)} = (1/n) sum_i e^{i theta_i(t)}, psi
/// unwrapped, and the coefficient of variation of psi over t >= settle_time.
LockReport lock_report(const PhaseTrace& trace, const LockCriterion& criterion = {});

struct ExperimentBatch {
  NetworkSpec spec;
  SimConfig config_template;
  std::uint64_t seed = 0;
  LockCriterion criterion;
  std::vector<SimConfig> configs;  // per-experiment draws
  std::vector<PhaseTrace> traces;
  std::vector<LockReport> lock_reports;

  std::size_t size() const { return traces.size(); }
  std::size_t locked_count() const;
};

inline constexpr double kFrequencyMin = 1.0;  // rad/s
inline constexpr double kFrequencyMax = 2.0;

/// Draws omega_i ~ U[1, 2] and theta_i(0) ~ U[-pi, pi] for experiment k
/// (1-based) from derive_seed(seed, {kExperimentStream, k}).
SimConfig draw_experiment_config(std::size_t n, const SimConfig& config_template,
                                 std::uint64_t seed, int experiment);

/// Simulates K independent experiments and attaches a lock report to each.
/// Results are ordered by experiment index. Simulation failures are rethrown
/// tagged with the experiment index.
ExperimentBatch run_batch(const NetworkSpec& spec, const SimConfig& config_template, int experiments,
                          std::uint64_t seed, const LockCriterion& criterion = {});

}  // namespace redraw
