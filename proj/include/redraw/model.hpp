#pragma once

// Domain types shared by the simulator, the reconstruction pipeline, the
// metrics and the calibration grid.
//
// Index convention: every matrix is indexed (i, j) with i the influenced node
// and j the influencing node, i.e. weights(i, j) = a_ij is the influence node
// j has on node i. Node indices are 0-based in code and 1-based in every
// user-facing message or file.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace redraw {

using Matrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Raised when a domain object violates one of its invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Directed weighted adjacency of the oscillator network.
class NetworkSpec {
 public:
  NetworkSpec() = default;
  explicit NetworkSpec(Matrix weights);

  /// n isolated nodes.
  static NetworkSpec isolated(std::size_t n);

  std::size_t size() const { return static_cast<std::size_t>(weights_.rows()); }
  const Matrix& weights() const { return weights_; }
  double weight(std::size_t i, std::size_t j) const {
    return weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  bool has_edge(std::size_t i, std::size_t j) const { return i != j && weight(i, j) > 0.0; }

  /// Number of strictly positive off-diagonal entries.
  std::size_t edge_count() const;

  /// Copy with weight(i, j) replaced; no validation.
  NetworkSpec with_weight(std::size_t i, std::size_t j, double value) const;

  friend bool operator==(const NetworkSpec& a, const NetworkSpec& b);

 private:
  Matrix weights_;
};

/// Checks the NetworkSpec invariants and returns the spec unchanged.
/// Throws ValidationError naming the first offending entry.
NetworkSpec validate_network(NetworkSpec spec);

struct SimConfig {
  std::vector<double> natural_frequencies;  // rad/s, one per node
  std::vector<double> initial_phases;       // rad
  double coupling = 10.0;
  double base_phase_shift = kPi / 4.0;  // rad
  double duration = 30.0;               // s
  double time_step = 0.01;              // s
  std::uint64_t rng_seed = 0;

  /// Number of integration steps, i.e. round(duration / time_step).
  std::size_t step_count() const;
};

/// Checks SimConfig invariants against a network of n nodes.
/// Pass n = 0 to skip the per-node vector checks (batch templates).
void validate_config(const SimConfig& config, std::size_t n);

/// Unwrapped phases sampled on a uniform grid.
struct PhaseTrace {
  std::vector<double> times;  // t_0 = 0 ... t_M
  Matrix phases;              // (M+1) x n
  int experiment_index = 1;   // 1..K

  std::size_t node_count() const { return static_cast<std::size_t>(phases.cols()); }
  std::size_t sample_count() const { return times.size(); }
  double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }
  double time_step() const { return times.size() < 2 ? 0.0 : times[1] - times[0]; }
};

/// Checks uniform strictly increasing times and finite phases.
void validate_trace(const PhaseTrace& trace);

enum class Stage { raw, post_dpi, post_threshold };

std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view text);

/// rho_ij estimates at one stage of the pipeline.
struct InfluenceMatrix {
  Matrix values;
  Stage stage = Stage::raw;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  /// Count of strictly positive off-diagonal entries.
  std::size_t edge_count() const;
};

void validate_influence(const InfluenceMatrix& m);

struct ReconstructionParams {
  double dpi_threshold = 0.9;  // nu
  double cut_threshold = 0.8;  // mu
  /// Optional explicit window boundaries t_0 < t_1 < ... < t_L.
  std::vector<double> window_boundaries;
};

void validate_params(const ReconstructionParams& params);

struct LockCriterion {
  double chi = 0.35;         // upper bound on the coefficient of variation
  double settle_time = 20.0; // s
};

struct LockReport {
  std::vector<double> order_magnitude;  // r(t)
  std::vector<double> order_phase;      // psi(t), unwrapped
  double mean = 0.0;                    // eta
  double stddev = 0.0;                  // sigma
  std::optional<double> coefficient_of_variation;  // absent when eta == 0
  double chi = 0.35;
  double settle_time = 20.0;
  bool locked = false;
  std::string diagnostic;
};

}  // namespace redraw
