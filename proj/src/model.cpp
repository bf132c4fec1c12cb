#include "redraw/model.hpp"

#include <cmath>
#include <sstream>

namespace redraw {

namespace {

std::string node_pair(std::size_t i, std::size_t j) {
  std::ostringstream os;
  os << "(" << i + 1 << ", " << j + 1 << ")";
  return os.str();
}

}  // namespace

NetworkSpec::NetworkSpec(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) {
    throw ValidationError("network weights must be square, got " + std::to_string(weights_.rows()) +
                          "x" + std::to_string(weights_.cols()));
  }
}

NetworkSpec NetworkSpec::isolated(std::size_t n) {
  const auto size = static_cast<Eigen::Index>(n);
  return NetworkSpec(Matrix::Zero(size, size));
}

std::size_t NetworkSpec::edge_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < size(); ++j) {
      if (has_edge(i, j)) ++count;
    }
  }
  return count;
}

NetworkSpec NetworkSpec::with_weight(std::size_t i, std::size_t j, double value) const {
  Matrix w = weights_;
  w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
  return NetworkSpec(std::move(w));
}

bool operator==(const NetworkSpec& a, const NetworkSpec& b) {
  return a.weights_.rows() == b.weights_.rows() && a.weights_ == b.weights_;
}

NetworkSpec validate_network(NetworkSpec spec) {
  const std::size_t n = spec.size();
  if (n < 2) {
    throw ValidationError("network needs at least 2 nodes, got " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = spec.weight(i, j);
      if (!std::isfinite(a)) {
        throw ValidationError("non-finite weight at " + node_pair(i, j));
      }
      if (a < 0.0) {
        throw ValidationError("negative weight at " + node_pair(i, j));
      }
    }
    if (spec.weight(i, i) != 0.0) {
      throw ValidationError("self-loop at node " + std::to_string(i + 1));
    }
  }
  return spec;
}

std::size_t SimConfig::step_count() const {
  return static_cast<std::size_t>(std::llround(duration / time_step));
}

void validate_config(const SimConfig& config, std::size_t n) {
  if (!(config.coupling > 0.0) || !std::isfinite(config.coupling)) {
    throw ValidationError("coupling must be > 0");
  }
  if (!(config.base_phase_shift >= 0.0 && config.base_phase_shift <= kPi / 2.0)) {
    throw ValidationError("base phase shift must lie in [0, pi/2]");
  }
  if (!(config.duration > 0.0) || !std::isfinite(config.duration)) {
    throw ValidationError("duration must be > 0");
  }
  if (!(config.time_step > 0.0) || config.time_step > config.duration) {
    throw ValidationError("time step must satisfy 0 < dt <= duration");
  }
  if (n == 0) return;
  if (config.natural_frequencies.size() != n) {
    throw ValidationError("expected " + std::to_string(n) + " natural frequencies, got " +
                          std::to_string(config.natural_frequencies.size()));
  }
  if (config.initial_phases.size() != n) {
    throw ValidationError("expected " + std::to_string(n) + " initial phases, got " +
                          std::to_string(config.initial_phases.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(config.natural_frequencies[i] > 0.0) || !std::isfinite(config.natural_frequencies[i])) {
      throw ValidationError("natural frequency of node " + std::to_string(i + 1) + " must be > 0");
    }
    if (!std::isfinite(config.initial_phases[i])) {
      throw ValidationError("initial phase of node " + std::to_string(i + 1) + " is not finite");
    }
  }
}

void validate_trace(const PhaseTrace& trace) {
  if (trace.times.size() != static_cast<std::size_t>(trace.phases.rows())) {
    throw ValidationError("trace has " + std::to_string(trace.times.size()) + " times but " +
                          std::to_string(trace.phases.rows()) + " phase rows");
  }
  if (trace.times.size() < 2) {
    throw ValidationError("trace needs at least 2 samples");
  }
  const double dt = trace.times[1] - trace.times[0];
  if (!(dt > 0.0)) throw ValidationError("trace times must be strictly increasing");
  for (std::size_t m = 1; m < trace.times.size(); ++m) {
    const double step = trace.times[m] - trace.times[m - 1];
    if (!(step > 0.0) || std::abs(step - dt) > 1e-6 * dt) {
      throw ValidationError("trace times are not uniformly spaced at sample " + std::to_string(m));
    }
  }
  if (!trace.phases.allFinite()) throw ValidationError("trace contains non-finite phases");
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::raw: return "raw";
    case Stage::post_dpi: return "post_dpi";
    case Stage::post_threshold: return "post_threshold";
  }
  return "raw";
}

Stage stage_from_string(std::string_view text) {
  if (text == "raw") return Stage::raw;
  if (text == "post_dpi") return Stage::post_dpi;
  if (text == "post_threshold") return Stage::post_threshold;
  throw ValidationError("unknown stage '" + std::string(text) + "'");
}

std::size_t InfluenceMatrix::edge_count() const {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (i != j && values(i, j) > 0.0) ++count;
    }
  }
  return count;
}

void validate_influence(const InfluenceMatrix& m) {
  if (m.values.rows() != m.values.cols()) throw ValidationError("influence matrix must be square");
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
      const double v = m.values(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError("influence outside [0, 1] at " +
                              node_pair(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
      }
    }
    if (m.values(i, i) != 0.0) {
      throw ValidationError("nonzero influence diagonal at node " + std::to_string(i + 1));
    }
  }
}

void validate_params(const ReconstructionParams& params) {
  const double nu = params.dpi_threshold;
  const double mu = params.cut_threshold;
  if (!(nu >= 0.0 && nu < 1.0)) throw ValidationError("dpi threshold nu must lie in [0, 1)");
  if (!(mu >= 0.0 && mu <= nu)) throw ValidationError("cut threshold mu must lie in [0, nu]");
  const auto& b = params.window_boundaries;
  for (std::size_t l = 0; l < b.size(); ++l) {
    if (!(b[l] >= 0.0) || !std::isfinite(b[l])) {
      throw ValidationError("window boundary " + std::to_string(l) + " must be finite and >= 0");
    }
    if (l > 0 && !(b[l] > b[l - 1])) {
      throw ValidationError("window boundaries must be strictly increasing");
    }
  }
  if (b.size() == 1) throw ValidationError("window boundaries need at least two entries");
}

}  // namespace redraw
