#include "redraw/simulator.hpp"

#include "redraw/rng.hpp"

#include <cmath>
#include <complex>
#include <exception>
#include <sstream>

namespace redraw {

namespace {

// Weight checks of validate_network without the n >= 2 requirement, so a
// lone oscillator can still be integrated.
void check_weights(const NetworkSpec& spec) {
  if (spec.size() == 0) throw ValidationError("network has no nodes");
  if (spec.size() >= 2) {
    validate_network(spec);
    return;
  }
  if (spec.weight(0, 0) != 0.0) throw ValidationError("self-loop at node 1");
}

double principal_angle(double x) { return std::remainder(x, 2.0 * kPi); }

}  // namespace

double effective_phase_shift(double weight, double base_phase_shift) {
  return weight > 0.0 ? base_phase_shift / weight : 0.0;
}

KuramotoField::KuramotoField(const NetworkSpec& spec, const SimConfig& config)
    : omega_(config.natural_frequencies), sin_(spec.size()), cos_(spec.size()) {
  const std::size_t n = spec.size();
  if (omega_.size() != n) {
    throw ValidationError("expected " + std::to_string(n) + " natural frequencies, got " +
                          std::to_string(omega_.size()));
  }
  const double scale = config.coupling / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!spec.has_edge(i, j)) continue;
      const double a = spec.weight(i, j);
      const double shift = effective_phase_shift(a, config.base_phase_shift);
      edges_.push_back({i, j, scale * a, std::cos(shift), std::sin(shift)});
    }
  }
}

void KuramotoField::evaluate(std::span<const double> theta, std::span<double> out) const {
  const std::size_t n = omega_.size();
  for (std::size_t i = 0; i < n; ++i) {
    sin_[i] = std::sin(theta[i]);
    cos_[i] = std::cos(theta[i]);
    out[i] = omega_[i];
  }
  // sin(theta_j - theta_i - phi_ij) expanded so each step costs O(n) trig calls.
  for (const Edge& e : edges_) {
    const double sj = sin_[e.source], cj = cos_[e.source];
    const double si = sin_[e.target], ci = cos_[e.target];
    const double sin_diff = sj * ci - cj * si;
    const double cos_diff = cj * ci + sj * si;
    out[e.target] += e.gain * (sin_diff * e.cos_shift - cos_diff * e.sin_shift);
  }
}

std::vector<double> derivative(const NetworkSpec& spec, const SimConfig& config,
                               std::span<const double> theta) {
  KuramotoField field(spec, config);
  std::vector<double> out(field.size());
  field.evaluate(theta, out);
  return out;
}

PhaseTrace simulate(const NetworkSpec& spec, const SimConfig& config, int experiment_index) {
  check_weights(spec);
  validate_config(config, spec.size());

  const std::size_t n = spec.size();
  const std::size_t steps = config.step_count();
  const double dt = config.time_step;
  const KuramotoField field(spec, config);

  PhaseTrace trace;
  trace.experiment_index = experiment_index;
  trace.times.resize(steps + 1);
  trace.phases.resize(static_cast<Eigen::Index>(steps + 1), static_cast<Eigen::Index>(n));

  std::vector<double> theta = config.initial_phases;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);

  auto store = [&](std::size_t m) {
    trace.times[m] = static_cast<double>(m) * dt;
    for (std::size_t i = 0; i < n; ++i) {
      trace.phases(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) = theta[i];
    }
  };
  store(0);

  for (std::size_t m = 1; m <= steps; ++m) {
    field.evaluate(theta, k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = theta[i] + 0.5 * dt * k1[i];
    field.evaluate(stage, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = theta[i] + 0.5 * dt * k2[i];
    field.evaluate(stage, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = theta[i] + dt * k3[i];
    field.evaluate(stage, k4);
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      theta[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      finite = finite && std::isfinite(theta[i]);
    }
    if (!finite) {
      const double t = static_cast<double>(m) * dt;
      std::ostringstream os;
      os << "integration diverged at t = " << t << " s";
      throw SimulationError(os.str(), t);
    }
    store(m);
  }
  return trace;
}

LockReport lock_report(const PhaseTrace& trace, const LockCriterion& criterion) {
  if (!(criterion.chi > 0.0)) throw ValidationError("lock bound chi must be > 0");
  if (trace.times.empty()) throw ValidationError("empty trace");
  if (!(criterion.settle_time < trace.times.back())) {
    throw ValidationError("settle time must be earlier than the end of the trace");
  }

  const std::size_t samples = trace.sample_count();
  const auto n = trace.phases.cols();
  LockReport report;
  report.chi = criterion.chi;
  report.settle_time = criterion.settle_time;
  report.order_magnitude.resize(samples);
  report.order_phase.resize(samples);

  double previous_angle = 0.0;
  for (std::size_t m = 0; m < samples; ++m) {
    std::complex<double> sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      sum += std::polar(1.0, trace.phases(static_cast<Eigen::Index>(m), i));
    }
    sum /= static_cast<double>(n);
    // Rounding can push |sum| a hair above 1 for identical phases.
    report.order_magnitude[m] = std::min(1.0, std::abs(sum));
    const double angle = std::arg(sum);
    report.order_phase[m] =
        m == 0 ? angle : report.order_phase[m - 1] + principal_angle(angle - previous_angle);
    previous_angle = angle;
  }

  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t m = 0; m < samples; ++m) {
    if (trace.times[m] >= criterion.settle_time) {
      total += report.order_phase[m];
      ++count;
    }
  }
  report.mean = total / static_cast<double>(count);
  double squares = 0.0;
  for (std::size_t m = 0; m < samples; ++m) {
    if (trace.times[m] >= criterion.settle_time) {
      const double d = report.order_phase[m] - report.mean;
      squares += d * d;
    }
  }
  report.stddev = std::sqrt(squares / static_cast<double>(count));

  if (report.mean == 0.0) {
    report.locked = false;
    report.diagnostic = "mean order-parameter phase is zero; coefficient of variation undefined";
    return report;
  }
  const double cv = report.stddev / std::abs(report.mean);
  report.coefficient_of_variation = cv;
  report.locked = cv <= criterion.chi;
  if (!report.locked) {
    std::ostringstream os;
    os << "coefficient of variation " << cv << " exceeds bound " << criterion.chi;
    report.diagnostic = os.str();
  }
  return report;
}

std::size_t ExperimentBatch::locked_count() const {
  std::size_t count = 0;
  for (const auto& r : lock_reports) count += r.locked ? 1 : 0;
  return count;
}

SimConfig draw_experiment_config(std::size_t n, const SimConfig& config_template,
                                 std::uint64_t seed, int experiment) {
  SimConfig config = config_template;
  Engine engine = make_engine(seed, {kExperimentStream, static_cast<std::uint64_t>(experiment)});
  config.natural_frequencies.resize(n);
  config.initial_phases.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    config.natural_frequencies[i] = uniform(engine, kFrequencyMin, kFrequencyMax);
  }
  for (std::size_t i = 0; i < n; ++i) config.initial_phases[i] = uniform(engine, -kPi, kPi);
  config.rng_seed = derive_seed(seed, {kExperimentStream, static_cast<std::uint64_t>(experiment)});
  return config;
}

ExperimentBatch run_batch(const NetworkSpec& spec, const SimConfig& config_template, int experiments,
                          std::uint64_t seed, const LockCriterion& criterion) {
  if (experiments < 1) throw ValidationError("experiment count K must be >= 1");
  check_weights(spec);
  validate_config(config_template, 0);

  const auto k_count = static_cast<std::size_t>(experiments);
  ExperimentBatch batch;
  batch.spec = spec;
  batch.config_template = config_template;
  batch.seed = seed;
  batch.criterion = criterion;
  batch.configs.resize(k_count);
  batch.traces.resize(k_count);
  batch.lock_reports.resize(k_count);

  std::vector<std::exception_ptr> failures(k_count);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < experiments; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    try {
      batch.configs[idx] = draw_experiment_config(spec.size(), config_template, seed, k + 1);
      batch.traces[idx] = simulate(spec, batch.configs[idx], k + 1);
      batch.lock_reports[idx] = lock_report(batch.traces[idx], criterion);
    } catch (...) {
      failures[idx] = std::current_exception();
    }
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    if (!failures[k]) continue;
    try {
      std::rethrow_exception(failures[k]);
    } catch (const SimulationError& e) {
      throw SimulationError("experiment " + std::to_string(k + 1) + ": " + e.what(), e.time());
    } catch (const std::exception& e) {
      throw std::runtime_error("experiment " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return batch;
}

}  // namespace redraw
